#pragma once
/// @file model.hpp
/// @brief Material parameters, admissibility checks, nondimensional groups,
///        and right-hand-side assembly for the compressible liquid-crystal
///        flow and its incompressible limit.

#include <string>
#include <utility>
#include <vector>

#include "lcflow/field.hpp"
#include "lcflow/grid.hpp"

namespace lcflow::model {

// ===========================================================================
// Material parameters
// ===========================================================================

/// @brief Leslie viscosities plus the elastic and barotropic constants.
///
/// The combinations lambda1 = mu2 - mu3 and lambda2 = mu5 - mu6 are exposed
/// as accessors so they cannot drift out of sync with the mu values.
/// Defaults form an admissible baseline set.
struct LeslieCoefficients {
    double mu1 = 0.0;
    double mu2 = -0.5;
    double mu3 = 0.5;
    double mu4 = 1.0;
    double mu5 = 0.0;
    double mu6 = 0.0;
    double xi = 0.0;       ///< bulk viscosity
    double kappa = 1.0;    ///< Frank elastic constant
    double a_tilde = 1.0;  ///< prefactor in p(rho) = a_tilde * rho^gamma
    double gamma = 2.0;    ///< adiabatic exponent, > 1

    double lambda1() const { return mu2 - mu3; }
    double lambda2() const { return mu5 - mu6; }

    double pressure(double rho) const;  ///< p(rho)
    double dp(double rho) const;        ///< p'(rho)
    double ddp(double rho) const;       ///< p''(rho)
};

/// Checks Parodi's relation and the admissibility inequalities.
/// Returns one human-readable entry per failed condition; empty means valid.
std::vector<std::string> validate_coefficients(const LeslieCoefficients& c);

// ===========================================================================
// Nondimensionalization
// ===========================================================================

/// Reference scales of the dimensional problem. U_star is the velocity
/// scale L_star / T_star; K is the elastic constant and l the molecular
/// length, so the elastic stress scale is kappa_star = K / l^2.
struct PhysicalUnits {
    double L_star = 1.0;      ///< length
    double T_star = 1.0;      ///< time
    double U_star = 1.0;      ///< velocity
    double rho_star = 1.0;    ///< density
    double c_star = 1.0;      ///< sound speed
    double mu_star = 1.0;     ///< viscosity
    double kappa_star = 1.0;  ///< elastic stress, K / l^2
    double l = 1.0;           ///< molecular length
    double K = 1.0;           ///< elastic constant
};

struct DimensionlessGroups {
    double ma;   ///< Mach number U*/c*
    double re;   ///< Reynolds number rho* L* U* / mu*
    double er;   ///< Ericksen number mu* L* U* / (kappa* l^2)
    double chi;  ///< inertial constant rho* U*^2 / kappa*
};

/// Forms the dimensionless groups from a unit set. Throws ConfigError if
/// any unit is nonpositive.
DimensionlessGroups nondimensionalize(const PhysicalUnits& units);

// ===========================================================================
// Flow state
// ===========================================================================

enum class FlowMode { compressible, incompressible };

/// Prognostic fields of one flow. In compressible mode the density is
/// rho = 1 + eps * phi and eps is the Mach number; in incompressible mode
/// phi stays empty and eps is ignored.
struct FlowState {
    FlowMode mode = FlowMode::compressible;
    double time = 0.0;
    double eps = 1.0;
    ScalarField phi;
    VectorField u;
    VectorField d;     ///< director, |d| = 1 up to monitored drift
    VectorField ddot;  ///< material time derivative of d
};

/// Zero-filled state at rest with constant director (1, 0).
FlowState make_state(const Grid& g, FlowMode mode, double eps = 1.0);

/// rho = 1 + eps * phi in compressible mode, the constant 1 otherwise.
ScalarField density(const FlowState& s);

// ===========================================================================
// Tensor algebra of the model
// ===========================================================================

/// A = (J + J^T)/2 and B = (J - J^T)/2 with J(i,j) = d_j u_i.
std::pair<TensorField, TensorField> strain_and_vorticity(const VectorField& u);

/// Newtonian part: mu4 A + xi (div u) I.
TensorField stress_sigma1(const VectorField& u, const LeslieCoefficients& c);

/// Elastic part: (kappa/2) |grad d|^2 I - kappa (grad d o grad d), where
/// (grad d o grad d)(i,j) = d_i d . d_j d.
TensorField stress_sigma2(const VectorField& d, const LeslieCoefficients& c);

/// Anisotropic Leslie part with N = ddot + B d:
///   sigma3(i,j) = mu1 (d^T A d) d_i d_j + mu2 d_i N_j + mu3 d_j N_i
///               + mu5 d_i (A d)_j + mu6 d_j (A d)_i.
TensorField stress_sigma3(const VectorField& u, const VectorField& d,
                          const VectorField& ddot, const LeslieCoefficients& c);

/// Lagrange multiplier Gamma = -rho |ddot|^2 + kappa |grad d|^2
/// - lambda2 d^T A d (rho = 1 in incompressible mode).
ScalarField gamma_multiplier(const FlowState& s, const LeslieCoefficients& c);

// ===========================================================================
// Right-hand sides
// ===========================================================================

/// Selects whether the stiff 1/eps acoustic couple (the -(1/eps) div u
/// source in the phi equation and the -(1/eps) p'(1) grad phi part of the
/// pressure force) is kept in the assembled tendency. `excluded` yields the
/// explicit remainder used by the semi-implicit stepper; the pressure force
/// then keeps only its density-dependent deviation from the linearization.
enum class AcousticTerms { included, excluded };

/// Tendencies (d/dt of phi, u, d, ddot) of the compressible system.
/// All nonlinear products are assembled pointwise and dealiased once at the
/// end. Throws NumericalError when min rho <= 0.01.
FlowState compressible_rhs(const FlowState& s, const LeslieCoefficients& c,
                           AcousticTerms acoustics = AcousticTerms::included);

/// Tendencies of the incompressible limit system. The momentum tendency is
/// Leray projected; when pressure_out is non-null it receives the zero-mean
/// scalar whose gradient completes the projection. Throws NumericalError
/// when the input velocity is not solenoidal (max |div u| > 1e-10).
FlowState incompressible_rhs(const FlowState& s, const LeslieCoefficients& c,
                             ScalarField* pressure_out = nullptr);

}  // namespace lcflow::model
