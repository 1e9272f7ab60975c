#pragma once
/// @file cli.hpp
/// @brief User-facing entry points: the resolved run configuration, the
///        orchestrated modes (marching runs, sweeps, identity checks,
///        coefficient validation), and the command-line front end.

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "lcflow/diag.hpp"
#include "lcflow/io.hpp"
#include "lcflow/model.hpp"
#include "lcflow/stepper.hpp"

namespace lcflow::cli {

// ===========================================================================
// Configuration
// ===========================================================================

enum class RunMode {
    compressible,
    incompressible,
    sweep,
    check,
    validate_coeffs,
};

/// Parses "compressible", "incompressible", "sweep", "check", or
/// "validate-coeffs"; throws ConfigError on anything else.
RunMode mode_from_string(const std::string& name);
const char* to_string(RunMode mode);

struct RunConfig {
    RunMode mode = RunMode::compressible;
    std::size_t nx = 64;
    std::size_t ny = 64;
    model::LeslieCoefficients coefficients;
    double eps = 0.1;
    double t_final = 0.5;
    /// Nonpositive selects the stability-bound step size.
    double dt = 0.0;
    stepper::Scheme scheme = stepper::Scheme::imex_acoustic;
    /// Steps between report rows; the endpoints are always sampled.
    std::size_t cadence = 10;
    std::string out_dir = "out";
    std::uint64_t seed = 1;
    /// Positive values pin the worker thread count.
    long long threads = 0;
    /// Checkpoint every this many emitted rows; zero disables snapshots.
    std::size_t snapshot_every = 0;
    diag::DiagConfig diagnostics;
    double amplitude = 0.05;
    double alpha0 = 2.0;
    std::vector<double> eps_ladder{0.2, 0.1, 0.05, 0.025};
    std::vector<double> sample_times;
    long long check_samples = 8;
    double check_tol = 1e-9;
};

/// Resolves a parsed map into a config. Unknown sections or keys throw
/// ConfigError, as do malformed values.
RunConfig config_from_map(const io::ConfigMap& m);

/// Canonical map echoing every resolved value; feeding it back through
/// config_from_map reproduces the config.
io::ConfigMap map_from_config(const RunConfig& cfg);

// ===========================================================================
// Execution
// ===========================================================================

/// Appends one flat sample record to an open report stream.
void emit_report_row(std::ostream& os, const diag::EnergyReport& r);

/// Executes the configured mode, writing a manifest and the mode's
/// artifacts under cfg.out_dir. Returns 0 on success, 3 on a numerical
/// abort, 4 on a failed check; configuration problems throw ConfigError.
int run(const RunConfig& cfg);

/// Full front end: subcommand, flags, config file, and environment
/// overrides. Returns the process exit code: 0 success, 2 configuration
/// error, 3 numerical abort, 4 check failure.
int run_main(int argc, const char* const* argv);

}  // namespace lcflow::cli
