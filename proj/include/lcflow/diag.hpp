#pragma once
/// @file diag.hpp
/// @brief Post-step observers for both flow systems: energy and dissipation
///        functionals, the pressure-potential integral, modulated energy,
///        cancellation residuals, constraint drift, and uniform-bound
///        monitors. Observers are pure and never mutate the state.

#include <cmath>
#include <cstddef>
#include <utility>
#include <vector>

#include "lcflow/field.hpp"
#include "lcflow/grid.hpp"
#include "lcflow/model.hpp"

namespace lcflow::diag {

using model::FlowState;
using model::LeslieCoefficients;

// ===========================================================================
// Observer options
// ===========================================================================

/// Tunables of the observer suite. `s` is the Sobolev order of the core
/// functionals (<= 4); `eta`, `big_c`, `big_c0` enter the instant
/// functionals; `q_c` scales the exponent of the divergence weight.
struct DiagConfig {
    int s = 3;
    double eta = 0.05;
    double big_c = 1.0;
    double big_c0 = 1.0;
    double q_c = 1.0;
};

// ===========================================================================
// Core functionals
// ===========================================================================

/// Weighted energy: |phi|^2_{H^s_{p'(rho)}} + |u|^2_{H^s_rho}
/// + |ddot|^2_{H^s_rho} + kappa |grad d|^2_{H^s}. Density-weight terms
/// collapse to unweighted norms in incompressible mode.
double energy_Es(const FlowState& st, const LeslieCoefficients& c, int s);

/// Dissipation rate split into its constituent terms. Each entry is a
/// coefficient times a sum of squared norms, so with admissible
/// coefficients every entry is nonnegative up to roundoff.
struct DsBreakdown {
    double viscous_grad = 0.0;  ///< (mu4/2) |grad u|^2_{H^s}
    double viscous_div = 0.0;   ///< (mu4/2 + xi) |div u|^2_{H^s}
    double stretch_mu1 = 0.0;   ///< mu1 sum_m |d^T (d^m A) d|^2
    double rotation = 0.0;      ///< -lambda1 sum_m |d^m ddot + (d^m B) d + (lambda2/lambda1)(d^m A) d|^2
    double alignment = 0.0;     ///< (mu5 + mu6 + lambda2^2/lambda1) sum_m |(d^m A) d|^2
    double rotation_sum = 0.0;  ///< the rotation sum without its -lambda1 factor
    double total = 0.0;
};

DsBreakdown dissipation_Ds(const FlowState& st, const LeslieCoefficients& c,
                           int s);

/// Product of the two homogeneous/inhomogeneous norm sums that bound the
/// advection terms of the energy inequality.
double advective_As(const FlowState& st, const LeslieCoefficients& c, int s);

/// (1/2)(|sqrt(rho) u|^2 + |sqrt(rho) ddot|^2 + kappa |grad d|^2)
/// + <Pi, 1>; the potential term vanishes in incompressible mode.
double basic_energy(const FlowState& st, const LeslieCoefficients& c);

/// Centered-difference residual series of the basic energy balance over a
/// uniformly spaced state history: one absolute value per interior sample.
/// Throws ConfigError on fewer than three states or nonuniform spacing.
std::vector<double> basic_energy_residuals(const std::vector<FlowState>& hist,
                                           const LeslieCoefficients& c);

// ===========================================================================
// Pressure potential
// ===========================================================================

struct PiResult {
    ScalarField field;  ///< pointwise Pi, nonnegative up to roundoff
    double integral;
};

/// Pi = (a_tilde/(gamma-1)) [rho^gamma - gamma (rho - 1) - 1] / eps^2,
/// evaluated through a cancellation-free series so small-eps values keep
/// full relative accuracy. Zero field in incompressible mode.
PiResult pi_functional(const FlowState& st, const LeslieCoefficients& c);

// ===========================================================================
// Modulated energy
// ===========================================================================

/// |sqrt(rho) u - u_ref|^2 + |sqrt(rho) ddot - ddot_ref|^2
/// + kappa |grad d - grad d_ref|^2 + |d - d_ref|^2 + <Pi, 1>.
/// Throws ConfigError when the states live on different grids or at
/// different times.
double modulated_energy(const FlowState& se, const FlowState& sref,
                        const LeslieCoefficients& c);

// ===========================================================================
// Algebraic identities
// ===========================================================================

struct Residual {
    double abs = 0.0;
    double rel = 0.0;  ///< abs over the largest constituent term, 0 on 0/0
};

/// Named residuals of the singular-pairing identities, evaluated with the
/// discrete operators on dealiased copies of the state fields. The pressure
/// pairings are identically zero in incompressible mode.
struct CancellationResiduals {
    Residual cs0;      ///< pressure/divergence pairing
    Residual cs1;      ///< elastic stress vs transported director
    Residual cs2;      ///< Leslie stress vs director relaxation
    Residual dt_pair;  ///< the same pressure pairing on the tendencies
};

CancellationResiduals cancellation_residuals(const FlowState& st,
                                             const LeslieCoefficients& c);

/// (max | |d| - 1 |, max |d . ddot|) over all grid points.
std::pair<double, double> constraint_drift(const FlowState& st);

// ===========================================================================
// Uniform-bound monitors
// ===========================================================================

struct UniformMonitors {
    double div_u_over_eps;  ///< (1/eps) |div u|_{H^{s-2}}
    double sqrt_rho_ratio;  ///< |sqrt(rho)-1|_{L2} / (eps <Pi,1>^{1/2}), 0 on 0/0
};

UniformMonitors uniform_bound_monitors(const FlowState& st,
                                       const LeslieCoefficients& c, int s);

/// Trapezoidal accumulator for the exponent integral_0^t |div u|_{L^inf}.
class QWeight {
public:
    void observe(double time, double divu_linf);
    double integral() const { return integral_; }
    double weight(double c) const { return std::exp(c * integral_); }

private:
    double integral_ = 0.0;
    double last_time_ = 0.0;
    double last_value_ = 0.0;
    bool primed_ = false;
};

// ===========================================================================
// Instant and global functionals
// ===========================================================================

/// E_s plus the eta-weighted cross terms of the instant energy.
double instant_E_eta(const FlowState& st, const LeslieCoefficients& c,
                     const DiagConfig& cfg);

/// D_s plus the eta-weighted density/director dissipation minus the
/// (C + C0) eta compensation terms.
double instant_D_eta(const FlowState& st, const LeslieCoefficients& c,
                     const DiagConfig& cfg);

/// |grad phi|^2_{H^{s-1}_w} + |grad d|^2_{dot H^s_{1/rho}} + D_s with
/// w = p'(rho)/rho.
double global_D(const FlowState& st, const LeslieCoefficients& c, int s);

/// Energy of the time derivatives (phi_t, u_t) at order s-2, with the
/// derivatives taken by centered differences of three consecutive states.
/// Throws ConfigError on nonuniform spacing.
double dt_energy(const FlowState& prev, const FlowState& cur,
                 const FlowState& next, const LeslieCoefficients& c, int s);

// ===========================================================================
// Flat report
// ===========================================================================

/// One observer sweep flattened into named doubles for the report stream.
struct EnergyReport {
    double time = 0.0;
    double e_s = 0.0;
    double d_s = 0.0;
    double a_s = 0.0;
    double basic_energy = 0.0;
    double pi_integral = 0.0;
    double instant_e_eta = 0.0;
    double instant_d_eta = 0.0;
    double global_d = 0.0;
    double dt_energy = 0.0;
    double div_u_over_eps = 0.0;
    double sqrt_rho_ratio = 0.0;
    double constraint_drift_max = 0.0;
    double cs0_abs = 0.0;
    double cs0_rel = 0.0;
    double cs1_abs = 0.0;
    double cs1_rel = 0.0;
    double cs2_abs = 0.0;
    double cs2_rel = 0.0;
    double dt_pair_abs = 0.0;
    double dt_pair_rel = 0.0;
    double q_weight = 1.0;
};

/// Stable name-to-member table used by the CSV writer and the tests; one
/// entry per EnergyReport field, in emission order.
struct ReportField {
    const char* name;
    double EnergyReport::*member;
};
const std::vector<ReportField>& report_fields();

/// Assembles every observer into one report. `prev`/`next` enable the
/// centered time-derivative entry (zero when absent); `q_integral` is the
/// accumulated divergence exponent from QWeight.
EnergyReport make_report(const FlowState& st, const LeslieCoefficients& c,
                         const DiagConfig& cfg,
                         const FlowState* prev = nullptr,
                         const FlowState* next = nullptr,
                         double q_integral = 0.0);

}  // namespace lcflow::diag
