#pragma once

#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "lambtrap/asymptotics.hpp"
#include "lambtrap/boundary_op.hpp"
#include "lambtrap/dispersion.hpp"
#include "lambtrap/dtn.hpp"
#include "lambtrap/modes.hpp"
#include "lambtrap/spectral.hpp"

namespace lambtrap {

using json = nlohmann::ordered_json;

inline constexpr const char* kSchemaVersion = "1";

// 17 significant digits, '.' decimal separator, locale-independent.
std::string format_g17(double v);

// CSV artifacts (headers fixed by the external interface contract).
void write_dispersion_csv(const std::string& path, const std::vector<BranchPoint>& points);
void write_mode_csv(const std::string& path, const ModeProfile& mode,
                    const std::vector<double>& x2_grid, double scale = 1.0);
void write_symbol_csv(const std::string& path, const std::vector<SymbolValue>& values);
void write_results_csv(const std::string& path, const std::vector<EigenResult>& rows);
// Dense matrix as "i,j,value" plus a JSON sidecar describing the block.
void write_matrix_txt(const std::string& path, const Eigen::MatrixXd& m);
void write_matrix_sidecar(const std::string& path, const GalerkinBlock& block);

json threshold_json(const ThresholdData& t);
json fit_json(const std::string& label, const PowerLawFit& fit);
json constants_json(const AsymptoticConstants& c, const json& checks);

void write_json(const std::string& path, const json& doc);
json read_json(const std::string& path);

// Minimal structural validator for the shipped schema documents: supports
// type, required, properties, items.
bool validate_schema(const json& doc, const json& schema, std::string* error = nullptr);

// ---- run configuration ----

struct RunConfig {
    std::string command; // subcommand name, for provenance in reports
    int dimension = 2;
    std::string cls = "all"; // s | as | m=<int> | all
    std::vector<double> ell_grid;
    int n_basis = 32;
    double tol = 1e-8;
    std::string out_dir = "out";
    std::string route = "both"; // direct | bs | both
    int workers = 1;
    unsigned long long seed = 12345;
    bool dry_run = false;
    bool use_cache = false;
    std::string cache_dir = "cache";
    std::string xi_spec = "0:3:0.01";
    int branches = 3;

    void validate() const; // throws ConfigError
};

// "0.1,0.07,0.05" or "lo:hi:step" (expanded ascending then sorted descending).
std::vector<double> parse_ell_spec(const std::string& spec);

// Flat key=value file, '#' comments; unknown keys rejected.
std::map<std::string, std::string> parse_config_file(const std::string& path);
void apply_config(RunConfig& cfg, const std::map<std::string, std::string>& kv);

} // namespace lambtrap
