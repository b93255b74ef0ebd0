#include "lambtrap/io.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "lambtrap/errors.hpp"

namespace lambtrap {

std::string format_g17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

static std::ofstream open_out(const std::string& path) {
    std::filesystem::path p(path);
    if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
    std::ofstream os(path);
    if (!os) throw ConfigError("cannot open output file: " + path);
    return os;
}

void write_dispersion_csv(const std::string& path, const std::vector<BranchPoint>& points) {
    auto os = open_out(path);
    os << "xi,branch,omega,residual\n";
    for (const auto& p : points)
        os << format_g17(p.xi) << ',' << p.k << ',' << format_g17(p.omega) << ','
           << format_g17(p.residual) << '\n';
}

void write_mode_csv(const std::string& path, const ModeProfile& mode,
                    const std::vector<double>& x2_grid, double scale) {
    auto os = open_out(path);
    os << "x2,re_u1,im_u1,re_u2,im_u2\n";
    for (double x : x2_grid) {
        const auto u1 = scale * mode.u1(x), u2 = scale * mode.u2(x);
        os << format_g17(x) << ',' << format_g17(u1.real()) << ',' << format_g17(u1.imag()) << ','
           << format_g17(u2.real()) << ',' << format_g17(u2.imag()) << '\n';
    }
}

void write_symbol_csv(const std::string& path, const std::vector<SymbolValue>& values) {
    auto os = open_out(path);
    os << "xi,omega_re,omega_im,m_re,m_im\n";
    for (const auto& s : values)
        os << format_g17(s.xi) << ',' << format_g17(s.omega.real()) << ','
           << format_g17(s.omega.imag()) << ',' << format_g17(s.value.real()) << ','
           << format_g17(s.value.imag()) << '\n';
}

void write_results_csv(const std::string& path, const std::vector<EigenResult>& rows) {
    auto os = open_out(path);
    os << "class,ell,lambda,gap,route,residual\n";
    for (const auto& r : rows)
        os << r.label << ',' << format_g17(r.ell) << ',' << format_g17(r.lambda) << ','
           << format_g17(r.gap) << ',' << r.route << ',' << format_g17(r.mu1_residual) << '\n';
}

void write_matrix_txt(const std::string& path, const Eigen::MatrixXd& m) {
    auto os = open_out(path);
    os << "i,j,value\n";
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index j = 0; j < m.cols(); ++j)
            os << i << ',' << j << ',' << format_g17(m(i, j)) << '\n';
}

void write_matrix_sidecar(const std::string& path, const GalerkinBlock& block) {
    json j;
    j["schema_version"] = kSchemaVersion;
    j["kind"] = "galerkin_block";
    j["dimension"] = block.dim;
    j["class"] = block.label;
    j["ell"] = block.ell;
    j["omega"] = block.omega;
    j["N"] = block.basis_size;
    j["basis"] = block.dim == 2 ? "chebyshev_u_sqrt_weight" : "jacobi_radial_sqrt_weight";
    write_json(path, j);
}

json threshold_json(const ThresholdData& t) {
    json j;
    j["schema_version"] = kSchemaVersion;
    j["kind"] = "threshold";
    j["Lambda"] = t.lambda;
    j["kappa"] = t.kappa;
    j["zeta1_pp"] = t.zeta1_pp;
    j["residuals"] = {{"rayleigh_lamb", t.residual},
                      {"zeta1_pp_fullstep", t.zeta1_pp_fullstep},
                      {"zeta1_pp_halfstep", t.zeta1_pp_halfstep},
                      {"grid_step", t.grid_step}};
    return j;
}

json fit_json(const std::string& label, const PowerLawFit& fit) {
    json j;
    j["schema_version"] = kSchemaVersion;
    j["kind"] = "power_law_fit";
    j["class"] = label;
    j["exponent"] = fit.exponent;
    j["prefactor"] = fit.prefactor;
    j["r_squared"] = fit.r_squared;
    j["ell_grid"] = fit.ell_grid;
    j["log_residuals"] = fit.residuals;
    return j;
}

json constants_json(const AsymptoticConstants& c, const json& checks) {
    json j;
    j["schema_version"] = kSchemaVersion;
    j["kind"] = "asymptotic_constants";
    j["nu1"] = c.nu1;
    j["nu2"] = c.nu2;
    json rho = json::object();
    for (const auto& [m, v] : c.rho) rho[std::to_string(m)] = v;
    j["rho"] = rho;
    j["ingredients"] = {{"Lambda", c.ingredients.lambda},
                        {"kappa", c.ingredients.kappa},
                        {"zeta1_pp", c.ingredients.zeta1_pp},
                        {"abs_dpsi2", c.ingredients.abs_dpsi2},
                        {"s_ct", c.ingredients.s_ct},
                        {"s_id", c.ingredients.s_id}};
    json sm = json::object();
    for (const auto& [m, v] : c.ingredients.s_m) sm[std::to_string(m)] = v;
    j["ingredients"]["s_m"] = sm;
    j["checks"] = checks;
    return j;
}

void write_json(const std::string& path, const json& doc) {
    auto os = open_out(path);
    os << doc.dump(2) << '\n';
}

json read_json(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw ConfigError("cannot open json file: " + path);
    json j;
    is >> j;
    return j;
}

static bool type_matches(const json& v, const std::string& t) {
    if (t == "object") return v.is_object();
    if (t == "array") return v.is_array();
    if (t == "string") return v.is_string();
    if (t == "number") return v.is_number();
    if (t == "integer") return v.is_number_integer();
    if (t == "boolean") return v.is_boolean();
    return false;
}

bool validate_schema(const json& doc, const json& schema, std::string* error) {
    if (schema.contains("type")) {
        const std::string t = schema["type"];
        if (!type_matches(doc, t)) {
            if (error) *error = "expected type " + t;
            return false;
        }
    }
    if (schema.contains("required")) {
        for (const auto& key : schema["required"]) {
            if (!doc.contains(key.get<std::string>())) {
                if (error) *error = "missing required key " + key.get<std::string>();
                return false;
            }
        }
    }
    if (schema.contains("properties") && doc.is_object()) {
        for (const auto& [key, sub] : schema["properties"].items()) {
            if (doc.contains(key) && !validate_schema(doc[key], sub, error)) {
                if (error) *error = key + ": " + *error;
                return false;
            }
        }
    }
    if (schema.contains("items") && doc.is_array()) {
        for (const auto& el : doc)
            if (!validate_schema(el, schema["items"], error)) return false;
    }
    return true;
}

void RunConfig::validate() const {
    if (dimension != 2 && dimension != 3) throw ConfigError("dimension must be 2 or 3");
    if (n_basis < 8) throw ConfigError("N must be at least 8");
    if (workers < 1) throw ConfigError("workers must be positive");
    if (route != "direct" && route != "bs" && route != "both")
        throw ConfigError("route must be direct, bs or both");
    if (!ell_grid.empty()) {
        double prev = std::numeric_limits<double>::infinity();
        for (double l : ell_grid) {
            if (!(l > 0.0)) throw ConfigError("ell grid values must be positive");
            if (!(l < prev)) throw ConfigError("ell grid must be strictly descending");
            prev = l;
        }
    }
    if (cls != "s" && cls != "as" && cls != "all" && cls.rfind("m=", 0) != 0)
        throw ConfigError("class must be s, as, m=<int> or all");
}

std::vector<double> parse_ell_spec(const std::string& spec) {
    std::vector<double> out;
    if (spec.find(':') != std::string::npos) {
        double lo, hi, step;
        if (std::sscanf(spec.c_str(), "%lf:%lf:%lf", &lo, &hi, &step) != 3 || step <= 0)
            throw ConfigError("bad range spec: " + spec);
        for (double v = lo; v <= hi + 1e-12 * step; v += step) out.push_back(v);
    } else {
        std::stringstream ss(spec);
        std::string tok;
        while (std::getline(ss, tok, ',')) {
            if (tok.empty()) continue;
            out.push_back(std::stod(tok));
        }
    }
    std::sort(out.begin(), out.end(), std::greater<double>());
    return out;
}

std::map<std::string, std::string> parse_config_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw ConfigError("cannot open config file: " + path);
    std::map<std::string, std::string> kv;
    std::string line;
    int ln = 0;
    while (std::getline(is, line)) {
        ++ln;
        auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        auto trim = [](std::string s) {
            const char* ws = " \t\r";
            s.erase(0, s.find_first_not_of(ws));
            auto e = s.find_last_not_of(ws);
            s.erase(e == std::string::npos ? 0 : e + 1);
            return s;
        };
        line = trim(line);
        if (line.empty()) continue;
        auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config line " + std::to_string(ln) + ": expected key=value");
        kv[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
    }
    return kv;
}

void apply_config(RunConfig& cfg, const std::map<std::string, std::string>& kv) {
    for (const auto& [k, v] : kv) {
        if (k == "dimension")
            cfg.dimension = std::stoi(v);
        else if (k == "class")
            cfg.cls = v;
        else if (k == "ell")
            cfg.ell_grid = parse_ell_spec(v);
        else if (k == "N")
            cfg.n_basis = std::stoi(v);
        else if (k == "tol")
            cfg.tol = std::stod(v);
        else if (k == "out")
            cfg.out_dir = v;
        else if (k == "route")
            cfg.route = v;
        else if (k == "workers")
            cfg.workers = std::stoi(v);
        else if (k == "seed")
            cfg.seed = std::stoull(v);
        else if (k == "cache")
            cfg.use_cache = (v == "1" || v == "true" || v == "on");
        else if (k == "cache_dir")
            cfg.cache_dir = v;
        else if (k == "xi")
            cfg.xi_spec = v;
        else if (k == "branches")
            cfg.branches = std::stoi(v);
        else
            throw ConfigError("unknown config key: " + k);
    }
}

} // namespace lambtrap
