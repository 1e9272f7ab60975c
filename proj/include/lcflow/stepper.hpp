#pragma once
/// @file stepper.hpp
/// @brief Time integration: explicit RK4, a semi-implicit scheme for the
///        stiff acoustic couple, and a frozen-coefficient Picard iteration.

#include <string>

#include "lcflow/model.hpp"

namespace lcflow::stepper {

enum class Scheme { explicit_rk4, imex_acoustic, picard };

/// Parses "explicit-rk4", "imex-acoustic", or "picard"; throws ConfigError
/// on anything else.
Scheme scheme_from_string(const std::string& name);
const char* to_string(Scheme s);

struct StepConfig {
    double dt = 1e-3;
    Scheme scheme = Scheme::explicit_rk4;
    double picard_tol = 1e-10;
    int picard_max_iters = 50;
    double cfl_safety = 0.4;
};

/// Largest stable step for the given state: the minimum of the acoustic,
/// advective, viscous, and director-damping limits, scaled by cfl_safety.
/// The acoustic limit carries the factor eps for explicit schemes and drops
/// it for imex-acoustic, which integrates that couple implicitly.
double cfl_dt(const model::FlowState& s, const model::LeslieCoefficients& c,
              Scheme scheme, double cfl_safety = 0.4);

/// out = a + f * b over every field present in a. Shapes must match.
model::FlowState state_axpy(const model::FlowState& a, double f,
                            const model::FlowState& b);

/// L2 norm of the difference over all prognostic fields.
double state_distance(const model::FlowState& a, const model::FlowState& b);

/// Dispatches on state.mode to the matching tendency assembly.
model::FlowState rhs(const model::FlowState& s,
                     const model::LeslieCoefficients& c);

/// Classical fourth-order Runge-Kutta step.
model::FlowState step_rk4(const model::FlowState& s,
                          const model::LeslieCoefficients& c, double dt);

/// Two-stage, second-order, L-stable additive scheme. The linearized
/// acoustic couple (the 1/eps terms evaluated at rho = 1) is solved
/// implicitly per Fourier mode; everything else stays explicit. In
/// incompressible mode the implicit part is empty and the scheme reduces
/// to its explicit two-stage half.
model::FlowState step_imex(const model::FlowState& s,
                           const model::LeslieCoefficients& c, double dt);

struct PicardResult {
    model::FlowState state;
    int iterations = 0;
};

/// Backward-Euler step solved by Picard iteration: each sweep solves the
/// constant-coefficient linear core (acoustic couple, viscosity, director
/// relaxation) implicitly and lags transport and the density-dependent
/// couplings at the previous iterate. Converged when the successive-iterate
/// L2 distance drops below tol; throws NumericalError when max_iters sweeps
/// do not reach it. Compressible mode only.
PicardResult picard_solve(const model::FlowState& s,
                          const model::LeslieCoefficients& c, double dt,
                          double tol = 1e-10, int max_iters = 50);

/// One step with the configured scheme; the returned state carries
/// time + dt.
model::FlowState advance(const model::FlowState& s,
                         const model::LeslieCoefficients& c,
                         const StepConfig& cfg);

}  // namespace lcflow::stepper
