#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "hspde/config.hpp"

namespace hspde {

inline constexpr const char* kVersion = "0.1.0";

struct RunOptions {
    bool quiet = false;
};

// Subcommand drivers. Each writes its files under cfg.out_dir and returns a
// process exit code (0 ok, 1 validation failure). Config and CFL problems
// are reported by exception (ConfigError, CflError) and mapped to exit codes
// 2 and 3 by the CLI.
int run_simulate(const RunConfig& cfg, const RunOptions& opt, std::ostream& log);

struct BenchmarkReport {
    std::vector<double> fd_samples;      // seconds per full-field FD solve
    std::vector<double> numint_samples;  // seconds per full-field re-integration
    double fd_median = 0.0;
    double numint_median = 0.0;
    double ratio = 0.0;
    bool equality_checked = false;
    bool equality_ok = false;
};

int run_benchmark(const RunConfig& cfg, const RunOptions& opt, std::ostream& log,
                  BenchmarkReport* out_report = nullptr);

struct CheckResult {
    std::string name;
    bool passed;
    bool skipped;
    std::string detail;
};

std::vector<CheckResult> validation_checks(const RunConfig& cfg);
int run_validate(const RunConfig& cfg, const RunOptions& opt, std::ostream& log);

int run_fbm(double hurst, double eps, const RunConfig& cfg, const RunOptions& opt,
            std::ostream& log);

// Shared by simulate/fbm: solve and emit boundary/field/moments/budget plus a
// manifest under cfg.out_dir. Extra manifest lines are appended verbatim.
int write_run_outputs(const RunConfig& cfg, const RunOptions& opt, std::ostream& log,
                      const std::vector<std::string>& extra_manifest);

}  // namespace hspde
