#pragma once
/// @file sweep.hpp
/// @brief Mach-number limit experiment: well-prepared initial data, an
///        epsilon ladder of compressible runs against one incompressible
///        reference, and a least-squares fit of the convergence exponent.

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "lcflow/grid.hpp"
#include "lcflow/model.hpp"
#include "lcflow/stepper.hpp"

namespace lcflow::sweep {

// ===========================================================================
// Configuration and results
// ===========================================================================

struct SweepConfig {
    std::vector<double> eps_ladder{0.2, 0.1, 0.05, 0.025};
    double alpha0 = 2.0;
    double t_final = 0.5;
    std::size_t nx = 64;
    std::size_t ny = 64;
    model::LeslieCoefficients coefficients;
    stepper::Scheme scheme = stepper::Scheme::imex_acoustic;
    std::uint64_t seed = 1;
    /// Interior sampling instants in (0, t_final); the endpoints are always
    /// sampled.
    std::vector<double> sample_times;
    /// Initial-data smallness knob; perturbation amplitudes scale linearly
    /// with it and the energy of the data vanishes quadratically as it
    /// tends to zero.
    double amplitude = 0.05;
    /// Sobolev order of the monitored norms.
    int s = 3;
    /// Fixed step size; nonpositive means derive one step size from the
    /// stiffest stability limit across the ladder and the reference.
    double dt = 0.0;
};

/// One run of the ladder: the modulated-energy history against the
/// reference plus the running maxima of the uniform-bound monitors.
struct RunSeries {
    double eps = 0.0;
    std::vector<double> times;
    std::vector<double> modulated;
    double terminal_modulated = 0.0;
    double max_div_monitor = 0.0;
    double max_sqrt_rho_ratio = 0.0;
};

struct FitOutcome {
    bool fitted = false;
    double beta_hat = 0.0;
    double residual_rms = 0.0;
};

struct SweepResult {
    std::vector<RunSeries> runs;
    FitOutcome fit;
    double beta0 = 0.0;
    /// Empty on success; a named failure category taints the result when a
    /// run aborts.
    std::string failure;
    bool ok() const { return failure.empty(); }
};

// ===========================================================================
// Operations
// ===========================================================================

/// min{2, alpha0, 1 + alpha0/2}.
double limit_exponent(double alpha0);

/// Matched initial states: the two share (u, d, ddot) exactly and the
/// compressible member carries phi scaled by eps^(alpha0/2).
struct InitialData {
    model::FlowState compressible;
    model::FlowState incompressible;
};

/// Well-prepared data: an exactly solenoidal seeded random velocity, a
/// fixed two-mode density profile, a unit director with a small two-mode
/// phase, and a director rate pointwise orthogonal to the director.
/// Throws ConfigError when the amplitude exceeds the smallness budget.
InitialData well_prepared_ic(const Grid& g, double eps, double alpha0,
                             std::uint64_t seed, double amplitude = 0.05);

/// Least-squares slope of log(value) against log(eps) plus the RMS fit
/// residual. Throws ConfigError on fewer than two points or nonpositive
/// values.
FitOutcome fit_rate(const std::vector<double>& eps_list,
                    const std::vector<double>& values);

/// The full experiment. Deterministic for a fixed seed and thread count;
/// a run that aborts taints the result instead of throwing.
SweepResult mach_sweep(const SweepConfig& cfg);

}  // namespace lcflow::sweep
