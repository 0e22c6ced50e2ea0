#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "json.hpp"

#include "gafzero/cli.hpp"

using namespace gafzero;
using nlohmann::ordered_json;

namespace {

struct TempFile {
    std::string path;
    explicit TempFile(const std::string& name) : path("cli_test_" + name) {}
    ~TempFile() { std::remove(path.c_str()); }

    std::string read() const {
        std::ifstream in(path);
        std::stringstream ss;
        ss << in.rdbuf();
        return ss.str();
    }
    void write(const std::string& text) const {
        std::ofstream out(path);
        out << text;
    }
};

int run(std::vector<std::string> args, const std::string& out_path) {
    args.push_back("--out");
    args.push_back(out_path);
    return run_command(args);
}

void strip_runtime(ordered_json& j) {
    if (j.is_object()) {
        j.erase("runtime_ms");
        for (auto& kv : j.items()) strip_runtime(kv.value());
    } else if (j.is_array()) {
        for (auto& v : j) strip_runtime(v);
    }
}

}  // namespace

TEST_CASE("cli: tonelli example passes with estimate near 1") {
    TempFile out("tonelli.json");
    const int rc = run({"gafzero", "verify", "tonelli", "--coeffs", "basis", "--measure", "disk",
                        "--p", "2", "--s", "1", "--samples", "2000", "--seed", "7"},
                       out.path);
    CHECK(rc == 0);
    const ordered_json j = ordered_json::parse(out.read());
    CHECK(j["tool"] == "gafzero");
    CHECK(j["version"] == kToolVersion);
    CHECK(j["command"].get<std::string>().rfind("verify tonelli", 0) == 0);
    REQUIRE(j["reports"].size() == 1);
    const auto& rep = j["reports"][0];
    CHECK(rep["name"] == "tonelli");
    CHECK(rep["pass"] == true);
    // basis/disk/p=2 at s=1: the closed bound is exactly 1
    CHECK(std::abs(rep["estimate"].get<double>() - 1.0) <
          3.5 * rep["std_error"].get<double>());
}

TEST_CASE("cli: jensen check stays under the residual budget") {
    TempFile out("jensen.json");
    const int rc = run({"gafzero", "check", "jensen", "--degree", "30", "--radius", "0.9",
                        "--trials", "100", "--seed", "1"},
                       out.path);
    CHECK(rc == 0);
    const ordered_json j = ordered_json::parse(out.read());
    const auto& rep = j["reports"][0];
    CHECK(rep["estimate"].get<double>() < 1e-6);
    CHECK(rep["pass"] == true);
}

TEST_CASE("cli: quant example at reduced scale") {
    TempFile out("quant.json");
    const int rc = run({"gafzero", "verify", "quant", "--coeffs", "unit", "--measure", "disk",
                        "--p", "0.5", "--s", "0.9", "--samples", "200", "--seed", "3"},
                       out.path);
    CHECK(rc == 0);
    const ordered_json j = ordered_json::parse(out.read());
    const auto& rep = j["reports"][0];
    CHECK(rep["relation"] == "leq");
    CHECK(!rep["bound"].is_null());
}

TEST_CASE("cli: sample and zeros emit provenance fields") {
    TempFile out("sample.json");
    REQUIRE(run({"gafzero", "sample", "--coeffs", "geom:rho=0.5", "--s", "0.8", "--seed", "11",
                 "--index", "4"},
                out.path) == 0);
    ordered_json j = ordered_json::parse(out.read());
    CHECK(j["sample"]["seed"] == 11);
    CHECK(j["sample"]["sample_index"] == 4);
    CHECK(j["sample"]["coeff_spec"] == "geom:rho=0.5");

    TempFile zout("zeros.json");
    REQUIRE(run({"gafzero", "zeros", "--coeffs", "geom:rho=0.5", "--s", "0.8", "--seed", "11"},
                zout.path) == 0);
    j = ordered_json::parse(zout.read());
    CHECK(j["zeros"]["certified"] == true);
    CHECK(j["zeros"]["radius"] == 0.8);
}

TEST_CASE("cli: norm reports the quadrature value") {
    TempFile out("norm.json");
    REQUIRE(run({"gafzero", "norm", "--coeffs", "unit", "--measure", "disk", "--p", "2", "--s",
                 "0.8"},
                out.path) == 0);
    const ordered_json j = ordered_json::parse(out.read());
    CHECK(j["diverged"] == false);
    // (int_0^{0.8} 2r/(1-r^2) dr)^{1/2} = log(1/0.36)^{1/2}
    CHECK(j["value"].get<double>() ==
          doctest::Approx(std::sqrt(std::log(1.0 / 0.36))).epsilon(1e-9));
}

TEST_CASE("cli: exit codes distinguish config errors from failed reports") {
    TempFile out("err.json");
    CHECK(run_command({"gafzero", "frobnicate"}) == 2);
    CHECK(run_command({"gafzero", "verify"}) == 2);
    CHECK(run_command({"gafzero", "verify", "nonesuch"}) == 2);
    CHECK(run({"gafzero", "verify", "tonelli", "--p", "-3"}, out.path) == 2);
    // csv output is only defined for report-producing commands
    CHECK(run({"gafzero", "sample", "--format", "csv"}, out.path) == 2);
    // divergent coefficient-side norm is a configuration error, not a failure
    CHECK(run({"gafzero", "verify", "tonelli", "--coeffs", "unit", "--measure", "disk", "--p",
               "2", "--s", "1", "--samples", "50"},
              out.path) == 2);
}

TEST_CASE("cli: repeated invocations are byte-identical modulo runtime") {
    TempFile out("det.json");
    const std::vector<std::string> args = {"gafzero", "verify",    "slepian", "--rho", "0.5",
                                           "--samples", "500",     "--seed",  "21"};
    REQUIRE(run(args, out.path) == 0);
    const std::string first = out.read();
    REQUIRE(run(args, out.path) == 0);
    ordered_json ja = ordered_json::parse(first);
    ordered_json jb = ordered_json::parse(out.read());
    strip_runtime(ja);
    strip_runtime(jb);
    CHECK(ja.dump() == jb.dump());
}

TEST_CASE("cli: config file fills defaults but flags win") {
    TempFile cfg("conf.cfg"), out("conf.json");
    cfg.write("# comment line\nsamples = 300\nseed = 9\nrho = 0.25\n");
    REQUIRE(run({"gafzero", "verify", "slepian", "--config", cfg.path, "--rho", "0.75"},
                out.path) == 0);
    const ordered_json j = ordered_json::parse(out.read());
    const auto& rep = j["reports"][0];
    CHECK(rep["samples"] == 300);
    CHECK(rep["seed"] == 9);
    bool saw_rho = false;
    for (const auto& kv : rep["params"].items())
        if (kv.key() == "rho") {
            saw_rho = true;
            CHECK(std::stod(kv.value().get<std::string>()) == doctest::Approx(0.75));
        }
    CHECK(saw_rho);
}

TEST_CASE("cli: csv format emits the shared header") {
    TempFile out("rep.csv");
    REQUIRE(run({"gafzero", "verify", "slepian", "--rho", "1", "--samples", "100", "--format",
                 "csv"},
                out.path) == 0);
    const std::string text = out.read();
    CHECK(text.rfind("name,", 0) == 0);
    CHECK(text.find("\nslepian,") != std::string::npos);
}

TEST_CASE("cli: check targets run at small scale") {
    TempFile out("checks.json");
    CHECK(run({"gafzero", "check", "mm", "--mm", "unit", "--q", "2", "--alpha", "0.5"},
              out.path) == 0);
    CHECK(run({"gafzero", "check", "stokes", "--t", "10", "--b", "0", "--c", "0", "--terms",
               "2000"},
              out.path) == 0);
    ordered_json j = ordered_json::parse(out.read());
    CHECK(j["reports"][0]["estimate"].get<double>() == doctest::Approx(10.0));
    CHECK(j["reports"][0]["bound"].is_null());

    CHECK(run({"gafzero", "check", "flexible", "--measure", "disk", "--p", "1", "--blocks", "6"},
              out.path) == 0);
    CHECK(run({"gafzero", "check", "horowitz", "--coeffs", "unit", "--s", "0.7", "--q", "2",
               "--seed", "5"},
              out.path) == 0);
    j = ordered_json::parse(out.read());
    CHECK(j["reports"][0]["name"] == "horowitz");
}

TEST_CASE("cli: fock-scan carries verdict params") {
    TempFile out("scan.json");
    // verdicts are descriptive: a divergent row is an observation, not a failure
    CHECK(run({"gafzero", "verify", "fock-scan", "--p", "1", "--alpha", "1", "--q-list", "4,2"},
              out.path) == 0);
    const ordered_json j = ordered_json::parse(out.read());
    REQUIRE(j["reports"].size() == 2);
    bool saw_finite = false, saw_divergent = false;
    for (const auto& rep : j["reports"]) {
        const std::string verdict = rep["params"]["verdict"].get<std::string>();
        if (verdict == "finite") saw_finite = true;
        if (verdict == "divergent") saw_divergent = true;
    }
    CHECK(saw_finite);
    CHECK(saw_divergent);
}
