#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gafzero/montecarlo.hpp"

namespace gafzero {

inline constexpr const char* kToolName = "gafzero";
inline constexpr const char* kToolVersion = "0.1.0";

enum class Command { sample, zeros, norm, verify, check, suite };

// One flat bag of parameters shared by every subcommand, so a config file
// can stay a plain key=value list. Each dispatch validates only the fields
// it consumes; the operations re-check their own preconditions.
struct RunConfig {
    Command command = Command::suite;
    std::string target;  // verify/check selector, e.g. "tonelli", "jensen"

    std::string coeff_spec = "unit";
    std::string measure_spec = "disk";
    std::string mm_spec = "unit";

    double p = 2.0;
    double s = 0.9;
    double q = 2.0;
    std::string q_list = "2,4";  // fock-scan grid
    double alpha = 1.0;
    double log_c = 0.0;
    int N = 1;
    std::string b0 = "-1,0";          // complex as "re,im"
    std::string alpha_shift = "0,0";  // complex as "re,im"
    double a0 = 1.0;
    double beta = 1.0;
    double rho = 0.0;
    std::string witness = "pZ";

    int degree = 30;      // jensen trials
    double radius = 0.9;  // jensen radius
    int trials = 100;
    int depth = 30;   // mm dyadic depth
    int blocks = 8;   // flexible K
    double t = 10.0;  // stokes arguments
    double b = 0.0;
    double c = 0.0;
    std::int64_t terms = 200000;

    std::int64_t samples = 10000;
    std::uint64_t seed = 1;
    std::uint64_t index = 0;  // sample index within the stream

    std::string output;  // --out path; empty = stdout
    std::string format = "json";
    bool quick = false;
};

// Outcome of one acceptance criterion: a pass verdict, a one-line detail
// for logs, and the underlying reports.
struct CriterionResult {
    int index = 0;
    std::string title;
    bool pass = false;
    std::string detail;
    double runtime_ms = 0.0;
    std::vector<McReport> reports;
};

struct BatteryOptions {
    std::uint64_t seed = 7;
    bool quick = false;  // scaled-down sample counts, same code paths
    // 0 runs every criterion; otherwise only the named one. `skip` drops
    // individual criteria (used to quarantine known-failing ones in CI).
    int only = 0;
    std::vector<int> skip;
};

// Criteria 1..13 of the acceptance battery in order. Determinism of the
// suite command itself (criterion 14) is checked from the outside by
// running the suite twice and comparing bytes.
std::vector<CriterionResult> run_acceptance_battery(const BatteryOptions& opts);

// Full front end: parses argv (program name included), merges an optional
// --config key=value file (flags win), dispatches, writes JSON or CSV to
// --out or stdout. Returns 0 when every report passes, 1 when at least one
// fails, 2 on configuration or numerical errors.
int run_command(const std::vector<std::string>& args);
int run_command(int argc, const char* const* argv);

}  // namespace gafzero
