#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

namespace fs = std::filesystem;

namespace {

const char* cli = LAMBTRAP_CLI_PATH;

int run(const std::string& args) {
    const std::string cmd = std::string(cli) + " " + args + " >/dev/null 2>&1";
    const int rc = std::system(cmd.c_str());
    return WEXITSTATUS(rc);
}

std::string slurp(const fs::path& p) {
    std::ifstream is(p, std::ios::binary);
    return std::string((std::istreambuf_iterator<char>(is)), std::istreambuf_iterator<char>());
}

struct TmpDir {
    fs::path path;
    explicit TmpDir(const char* name) : path(fs::temp_directory_path() / name) {
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TmpDir() { fs::remove_all(path); }
};

} // namespace

TEST_CASE("dry run validates and exits 0") {
    CHECK(run("solve --dry-run --class s --ell 0.1,0.05") == 0);
}

TEST_CASE("configuration errors exit with code 2") {
    CHECK(run("solve --dry-run --dimension 4") == 2);
    CHECK(run("solve --dry-run --N 4") == 2);
    CHECK(run("solve --dry-run --class zz") == 2);
    CHECK(run("solve --dry-run --route sideways") == 2);
}

TEST_CASE("numerical failures exit with code 3") {
    TmpDir tmp("lambtrap_cli_t3");
    // ell far too large: no sign change in the search window
    CHECK(run("solve --class s --ell 9.0,4.0 --route direct --out " + tmp.path.string()) == 3);
}

TEST_CASE("threshold and dispersion artifacts, byte-identical reruns") {
    TmpDir a("lambtrap_cli_a"), b("lambtrap_cli_b");
    CHECK(run("threshold --out " + a.path.string()) == 0);
    CHECK(run("threshold --out " + b.path.string()) == 0);
    const std::string ja = slurp(a.path / "threshold.json");
    CHECK(!ja.empty());
    CHECK(ja == slurp(b.path / "threshold.json"));
    CHECK(ja.find("\"Lambda\": 1.887837") != std::string::npos);

    CHECK(run("dispersion --xi 0.2:0.6:0.2 --branches 2 --out " + a.path.string()) == 0);
    CHECK(run("dispersion --xi 0.2:0.6:0.2 --branches 2 --out " + b.path.string()) == 0);
    const std::string ca = slurp(a.path / "dispersion.csv");
    CHECK(ca == slurp(b.path / "dispersion.csv"));
    CHECK(ca.rfind("xi,branch,omega,residual\n", 0) == 0);
    // 3 xi values x 2 branches + header
    CHECK(std::count(ca.begin(), ca.end(), '\n') == 7);
}

TEST_CASE("symbol traces for omega and the static case") {
    TmpDir tmp("lambtrap_cli_sym");
    CHECK(run("symbol --xi 0.5,1.0,2.0 --omega 1.0 --out " + tmp.path.string()) == 0);
    CHECK(slurp(tmp.path / "symbol.csv").rfind("xi,omega_re,omega_im,m_re,m_im\n", 0) == 0);
    CHECK(run("symbol --xi 0.5,1.0 --omega 0.0 --out " + tmp.path.string()) == 0);
}

TEST_CASE("assemble writes matrices, sidecar, and a reusable cache") {
    TmpDir tmp("lambtrap_cli_asm");
    const std::string common = "assemble --class s --N 10 --ell 0.05 --omega 1.5 --cache "
                               "--cache-dir " +
                               (tmp.path / "cache").string() + " --out ";
    CHECK(run(common + (tmp.path / "o1").string()) == 0);
    CHECK(fs::exists(tmp.path / "o1" / "block_s_Q.txt"));
    CHECK(fs::exists(tmp.path / "o1" / "block_s.json"));
    REQUIRE(fs::exists(tmp.path / "cache"));
    CHECK(!fs::is_empty(tmp.path / "cache"));
    CHECK(run(common + (tmp.path / "o2").string()) == 0); // served from cache
    CHECK(slurp(tmp.path / "o1" / "block_s_Q.txt") == slurp(tmp.path / "o2" / "block_s_Q.txt"));
}

TEST_CASE("constants report validates against its schema") {
    TmpDir tmp("lambtrap_cli_const");
    CHECK(run("constants --N 16 --out " + tmp.path.string()) == 0);
    const std::string doc = slurp(tmp.path / "constants.json");
    CHECK(doc.find("\"nu1\"") != std::string::npos);
    CHECK(doc.find("\"s_m\"") != std::string::npos);
    CHECK(doc.find("\"rho\"") != std::string::npos);
}

TEST_CASE("solve then fit round-trip") {
    TmpDir tmp("lambtrap_cli_fit");
    CHECK(run("solve --class s --ell 0.1,0.07,0.05,0.035 --route direct --workers 2 --out " +
              tmp.path.string()) == 0);
    const std::string csv = slurp(tmp.path / "results.csv");
    CHECK(csv.rfind("class,ell,lambda,gap,route,residual\n", 0) == 0);
    CHECK(run("fit --in " + (tmp.path / "results.csv").string() + " --out " +
              tmp.path.string()) == 0);
    const std::string fits = slurp(tmp.path / "fits.json");
    CHECK(fits.find("\"exponent\": 3.9") != std::string::npos);
}
