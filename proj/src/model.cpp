/// @file model.cpp
/// @brief Coefficient checks and tendency assembly for both flow regimes.

#include "lcflow/model.hpp"

#include <cassert>
#include <cmath>
#include <cstddef>
#include <string>

#include "lcflow/errors.hpp"
#include "lcflow/kernels.hpp"

namespace lcflow::model {

// ===========================================================================
// Barotropic pressure law
// ===========================================================================

double LeslieCoefficients::pressure(double rho) const {
    return a_tilde * std::pow(rho, gamma);
}

double LeslieCoefficients::dp(double rho) const {
    return a_tilde * gamma * std::pow(rho, gamma - 1.0);
}

double LeslieCoefficients::ddp(double rho) const {
    return a_tilde * gamma * (gamma - 1.0) * std::pow(rho, gamma - 2.0);
}

// ===========================================================================
// Admissibility
// ===========================================================================

std::vector<std::string> validate_coefficients(const LeslieCoefficients& c) {
    std::vector<std::string> bad;
    const double l1 = c.lambda1();
    const double l2 = c.lambda2();

    const double parodi_gap = std::fabs((c.mu2 + c.mu3) - (c.mu6 - c.mu5));
    const double parodi_scale =
        1.0 + std::fabs(c.mu2) + std::fabs(c.mu3) + std::fabs(c.mu5) + std::fabs(c.mu6);
    if (parodi_gap > 1e-12 * parodi_scale)
        bad.push_back("Parodi relation mu2 + mu3 = mu6 - mu5 violated");
    if (!(c.kappa > 0.0)) bad.push_back("kappa > 0 violated");
    if (!(c.mu1 >= 0.0)) bad.push_back("mu1 >= 0 violated");
    if (!(c.mu4 > 0.0)) bad.push_back("mu4 > 0 violated");
    if (!(0.5 * c.mu4 + c.xi >= 0.0)) bad.push_back("mu4/2 + xi >= 0 violated");
    if (!(l1 < 0.0)) {
        bad.push_back("lambda1 < 0 violated");
    } else if (!(c.mu5 + c.mu6 + l2 * l2 / l1 >= 0.0)) {
        bad.push_back("mu5 + mu6 + lambda2^2/lambda1 >= 0 violated");
    }
    if (!(c.a_tilde > 0.0)) bad.push_back("a_tilde > 0 violated");
    if (!(c.gamma > 1.0)) bad.push_back("gamma > 1 violated");
    return bad;
}

// ===========================================================================
// Nondimensional groups
// ===========================================================================

DimensionlessGroups nondimensionalize(const PhysicalUnits& units) {
    const struct { const char* name; double value; } checks[] = {
        {"L_star", units.L_star},   {"T_star", units.T_star},
        {"U_star", units.U_star},   {"rho_star", units.rho_star},
        {"c_star", units.c_star},   {"mu_star", units.mu_star},
        {"kappa_star", units.kappa_star}, {"l", units.l}, {"K", units.K},
    };
    for (const auto& ck : checks) {
        if (!(ck.value > 0.0))
            throw ConfigError(std::string("nondimensionalize: unit ") + ck.name +
                              " must be positive");
    }
    DimensionlessGroups g;
    g.ma = units.U_star / units.c_star;
    g.re = units.rho_star * units.L_star * units.U_star / units.mu_star;
    g.er = units.mu_star * units.L_star * units.U_star /
           (units.kappa_star * units.l * units.l);
    g.chi = units.rho_star * units.U_star * units.U_star / units.kappa_star;
    return g;
}

// ===========================================================================
// Flow state helpers
// ===========================================================================

FlowState make_state(const Grid& g, FlowMode mode, double eps) {
    FlowState s;
    s.mode = mode;
    s.eps = eps;
    if (mode == FlowMode::compressible) s.phi = g.scalar();
    s.u = g.vector();
    s.d = g.vector();
    s.ddot = g.vector();
    s.d.comp(0).fill(1.0);
    return s;
}

ScalarField density(const FlowState& s) {
    const Grid& g = *s.u.grid();
    if (s.mode == FlowMode::incompressible) return g.scalar(1.0);
    assert(s.phi.size() == s.u.size());
    ScalarField rho = g.scalar();
    const double* phi = s.phi.data();
    double* r = rho.data();
    const double eps = s.eps;
    kernels::parallel_for(rho.size(),
                          [=](std::size_t i) { r[i] = 1.0 + eps * phi[i]; });
    return rho;
}

// ===========================================================================
// Tensor algebra
// ===========================================================================

std::pair<TensorField, TensorField> strain_and_vorticity(const VectorField& u) {
    const Grid& g = *u.grid();
    const TensorField J = g.jacobian(u);
    TensorField A = g.tensor();
    TensorField B = g.tensor();
    const double* j00 = J.comp(0, 0).data();
    const double* j01 = J.comp(0, 1).data();
    const double* j10 = J.comp(1, 0).data();
    const double* j11 = J.comp(1, 1).data();
    double* a00 = A.comp(0, 0).data();
    double* a01 = A.comp(0, 1).data();
    double* a10 = A.comp(1, 0).data();
    double* a11 = A.comp(1, 1).data();
    double* b01 = B.comp(0, 1).data();
    double* b10 = B.comp(1, 0).data();
    kernels::parallel_for(u.size(), [=](std::size_t i) {
        a00[i] = j00[i];
        a11[i] = j11[i];
        const double sym = 0.5 * (j01[i] + j10[i]);
        const double skew = 0.5 * (j01[i] - j10[i]);
        a01[i] = sym;
        a10[i] = sym;
        b01[i] = skew;
        b10[i] = -skew;
    });
    return {std::move(A), std::move(B)};
}

namespace {

// Raw assembly shared by the public stress functions and the tendency
// builders. Callers dealias the result exactly once.

TensorField sigma1_raw(const Grid& g, const TensorField& J,
                       const LeslieCoefficients& c) {
    TensorField out = g.tensor();
    const double* j00 = J.comp(0, 0).data();
    const double* j01 = J.comp(0, 1).data();
    const double* j10 = J.comp(1, 0).data();
    const double* j11 = J.comp(1, 1).data();
    double* s00 = out.comp(0, 0).data();
    double* s01 = out.comp(0, 1).data();
    double* s10 = out.comp(1, 0).data();
    double* s11 = out.comp(1, 1).data();
    const double mu4 = c.mu4, xi = c.xi;
    kernels::parallel_for(out.size(), [=](std::size_t i) {
        const double divu = j00[i] + j11[i];
        const double off = 0.5 * mu4 * (j01[i] + j10[i]);
        s00[i] = mu4 * j00[i] + xi * divu;
        s11[i] = mu4 * j11[i] + xi * divu;
        s01[i] = off;
        s10[i] = off;
    });
    return out;
}

TensorField sigma2_raw(const Grid& g, const TensorField& Gd,
                       const LeslieCoefficients& c) {
    TensorField out = g.tensor();
    const double* g00 = Gd.comp(0, 0).data();
    const double* g01 = Gd.comp(0, 1).data();
    const double* g10 = Gd.comp(1, 0).data();
    const double* g11 = Gd.comp(1, 1).data();
    double* s00 = out.comp(0, 0).data();
    double* s01 = out.comp(0, 1).data();
    double* s10 = out.comp(1, 0).data();
    double* s11 = out.comp(1, 1).data();
    const double kap = c.kappa;
    kernels::parallel_for(out.size(), [=](std::size_t i) {
        // (grad d o grad d)(i,j) = sum_k d_i d_k * d_j d_k with
        // Gd(k, m) = d_m d_k, so the entry is column_i . column_j.
        const double o00 = g00[i] * g00[i] + g10[i] * g10[i];
        const double o01 = g00[i] * g01[i] + g10[i] * g11[i];
        const double o11 = g01[i] * g01[i] + g11[i] * g11[i];
        const double gd2 = o00 + o11;
        s00[i] = kap * (0.5 * gd2 - o00);
        s11[i] = kap * (0.5 * gd2 - o11);
        s01[i] = -kap * o01;
        s10[i] = -kap * o01;
    });
    return out;
}

TensorField sigma3_raw(const Grid& g, const TensorField& J,
                       const VectorField& d, const VectorField& ddot,
                       const LeslieCoefficients& c) {
    TensorField out = g.tensor();
    const double* j00 = J.comp(0, 0).data();
    const double* j01 = J.comp(0, 1).data();
    const double* j10 = J.comp(1, 0).data();
    const double* j11 = J.comp(1, 1).data();
    const double* d0 = d.comp(0).data();
    const double* d1 = d.comp(1).data();
    const double* e0 = ddot.comp(0).data();
    const double* e1 = ddot.comp(1).data();
    double* s00 = out.comp(0, 0).data();
    double* s01 = out.comp(0, 1).data();
    double* s10 = out.comp(1, 0).data();
    double* s11 = out.comp(1, 1).data();
    const double mu1 = c.mu1, mu2 = c.mu2, mu3 = c.mu3, mu5 = c.mu5,
                 mu6 = c.mu6;
    kernels::parallel_for(out.size(), [=](std::size_t i) {
        const double a00 = j00[i];
        const double a11 = j11[i];
        const double a01 = 0.5 * (j01[i] + j10[i]);
        const double b01 = 0.5 * (j01[i] - j10[i]);
        const double ad0 = a00 * d0[i] + a01 * d1[i];
        const double ad1 = a01 * d0[i] + a11 * d1[i];
        const double n0 = e0[i] + b01 * d1[i];
        const double n1 = e1[i] - b01 * d0[i];
        const double dad = d0[i] * ad0 + d1[i] * ad1;
        s00[i] = mu1 * dad * d0[i] * d0[i] + (mu2 + mu3) * d0[i] * n0 +
                 (mu5 + mu6) * d0[i] * ad0;
        s11[i] = mu1 * dad * d1[i] * d1[i] + (mu2 + mu3) * d1[i] * n1 +
                 (mu5 + mu6) * d1[i] * ad1;
        s01[i] = mu1 * dad * d0[i] * d1[i] + mu2 * d0[i] * n1 +
                 mu3 * d1[i] * n0 + mu5 * d0[i] * ad1 + mu6 * d1[i] * ad0;
        s10[i] = mu1 * dad * d1[i] * d0[i] + mu2 * d1[i] * n0 +
                 mu3 * d0[i] * n1 + mu5 * d1[i] * ad0 + mu6 * d0[i] * ad1;
    });
    return out;
}

}  // namespace

TensorField stress_sigma1(const VectorField& u, const LeslieCoefficients& c) {
    const Grid& g = *u.grid();
    TensorField out = sigma1_raw(g, g.jacobian(u), c);
    g.dealias(out);
    return out;
}

TensorField stress_sigma2(const VectorField& d, const LeslieCoefficients& c) {
    const Grid& g = *d.grid();
    TensorField out = sigma2_raw(g, g.jacobian(d), c);
    g.dealias(out);
    return out;
}

TensorField stress_sigma3(const VectorField& u, const VectorField& d,
                          const VectorField& ddot,
                          const LeslieCoefficients& c) {
    const Grid& g = *u.grid();
    TensorField out = sigma3_raw(g, g.jacobian(u), d, ddot, c);
    g.dealias(out);
    return out;
}

ScalarField gamma_multiplier(const FlowState& s, const LeslieCoefficients& c) {
    const Grid& g = *s.u.grid();
    const ScalarField rho = density(s);
    const TensorField J = g.jacobian(s.u);
    const TensorField Gd = g.jacobian(s.d);
    ScalarField out = g.scalar();
    const double* j00 = J.comp(0, 0).data();
    const double* j01 = J.comp(0, 1).data();
    const double* j10 = J.comp(1, 0).data();
    const double* j11 = J.comp(1, 1).data();
    const double* g00 = Gd.comp(0, 0).data();
    const double* g01 = Gd.comp(0, 1).data();
    const double* g10 = Gd.comp(1, 0).data();
    const double* g11 = Gd.comp(1, 1).data();
    const double* d0 = s.d.comp(0).data();
    const double* d1 = s.d.comp(1).data();
    const double* e0 = s.ddot.comp(0).data();
    const double* e1 = s.ddot.comp(1).data();
    const double* r = rho.data();
    double* ga = out.data();
    const double kap = c.kappa, l2 = c.lambda2();
    kernels::parallel_for(out.size(), [=](std::size_t i) {
        const double a00 = j00[i];
        const double a11 = j11[i];
        const double a01 = 0.5 * (j01[i] + j10[i]);
        const double dad = d0[i] * (a00 * d0[i] + a01 * d1[i]) +
                           d1[i] * (a01 * d0[i] + a11 * d1[i]);
        const double gd2 = g00[i] * g00[i] + g01[i] * g01[i] +
                           g10[i] * g10[i] + g11[i] * g11[i];
        const double dd2 = e0[i] * e0[i] + e1[i] * e1[i];
        ga[i] = -r[i] * dd2 + kap * gd2 - l2 * dad;
    });
    return out;
}

// ===========================================================================
// Right-hand sides
// ===========================================================================

FlowState compressible_rhs(const FlowState& s, const LeslieCoefficients& c,
                           AcousticTerms acoustics) {
    assert(s.mode == FlowMode::compressible);
    assert(s.eps > 0.0);
    const Grid& g = *s.u.grid();
    const std::size_t n = s.u.size();

    const ScalarField rho = density(s);
    const double rho_min = g.min_value(rho);
    if (rho_min <= 0.01)
        throw NumericalError("compressible_rhs: density floor reached, min rho = " +
                             std::to_string(rho_min) + " at t = " +
                             std::to_string(s.time));

    const TensorField J = g.jacobian(s.u);
    const TensorField Gd = g.jacobian(s.d);
    const TensorField Ge = g.jacobian(s.ddot);
    const VectorField gphi = g.gradient(s.phi);
    const VectorField lap_d = g.laplacian(s.d);

    // Total stress, one pointwise pass, then one dealias before divergence.
    TensorField sig = sigma1_raw(g, J, c);
    {
        const TensorField s2 = sigma2_raw(g, Gd, c);
        const TensorField s3 = sigma3_raw(g, J, s.d, s.ddot, c);
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) {
                double* a = sig.comp(i, j).data();
                const double* b = s2.comp(i, j).data();
                const double* d = s3.comp(i, j).data();
                kernels::parallel_for(
                    n, [=](std::size_t p) { a[p] += b[p] + d[p]; });
            }
    }
    g.dealias(sig);
    const VectorField div_sig = g.divergence(sig);

    FlowState t;
    t.mode = s.mode;
    t.eps = s.eps;
    t.time = s.time;
    t.phi = g.scalar();
    t.u = g.vector();
    t.d = g.vector();
    t.ddot = g.vector();

    const double* phi = s.phi.data();
    const double* u0 = s.u.comp(0).data();
    const double* u1 = s.u.comp(1).data();
    const double* d0 = s.d.comp(0).data();
    const double* d1 = s.d.comp(1).data();
    const double* e0 = s.ddot.comp(0).data();
    const double* e1 = s.ddot.comp(1).data();
    const double* j00 = J.comp(0, 0).data();
    const double* j01 = J.comp(0, 1).data();
    const double* j10 = J.comp(1, 0).data();
    const double* j11 = J.comp(1, 1).data();
    const double* g00 = Gd.comp(0, 0).data();
    const double* g01 = Gd.comp(0, 1).data();
    const double* g10 = Gd.comp(1, 0).data();
    const double* g11 = Gd.comp(1, 1).data();
    const double* h00 = Ge.comp(0, 0).data();
    const double* h01 = Ge.comp(0, 1).data();
    const double* h10 = Ge.comp(1, 0).data();
    const double* h11 = Ge.comp(1, 1).data();
    const double* gp0 = gphi.comp(0).data();
    const double* gp1 = gphi.comp(1).data();
    const double* ld0 = lap_d.comp(0).data();
    const double* ld1 = lap_d.comp(1).data();
    const double* ds0 = div_sig.comp(0).data();
    const double* ds1 = div_sig.comp(1).data();
    const double* r = rho.data();

    double* tphi = t.phi.data();
    double* tu0 = t.u.comp(0).data();
    double* tu1 = t.u.comp(1).data();
    double* td0 = t.d.comp(0).data();
    double* td1 = t.d.comp(1).data();
    double* te0 = t.ddot.comp(0).data();
    double* te1 = t.ddot.comp(1).data();

    const double eps = s.eps;
    const double kap = c.kappa, l1 = c.lambda1(), l2 = c.lambda2();
    const double ag = c.a_tilde * c.gamma;
    const double gm2 = c.gamma - 2.0;
    const bool full = (acoustics == AcousticTerms::included);

    kernels::parallel_for(n, [=](std::size_t i) {
        const double divu = j00[i] + j11[i];
        const double a00 = j00[i];
        const double a11 = j11[i];
        const double a01 = 0.5 * (j01[i] + j10[i]);
        const double b01 = 0.5 * (j01[i] - j10[i]);
        const double ad0 = a00 * d0[i] + a01 * d1[i];
        const double ad1 = a01 * d0[i] + a11 * d1[i];
        const double n0 = e0[i] + b01 * d1[i];
        const double n1 = e1[i] - b01 * d0[i];
        const double dad = d0[i] * ad0 + d1[i] * ad1;
        const double gd2 = g00[i] * g00[i] + g01[i] * g01[i] +
                           g10[i] * g10[i] + g11[i] * g11[i];
        const double ga =
            -r[i] * (e0[i] * e0[i] + e1[i] * e1[i]) + kap * gd2 - l2 * dad;

        tphi[i] = -(u0[i] * gp0[i] + u1[i] * gp1[i]) - phi[i] * divu -
                  (full ? divu / eps : 0.0);

        // Pressure force -(1/eps) (p'(rho)/rho) grad phi. Without the
        // acoustic couple only the deviation of p'(rho)/rho from its value
        // at rho = 1 remains; expm1/log1p keeps that difference accurate
        // for rho near 1 and makes it vanish identically when gamma = 2.
        const double w = full ? ag * std::pow(r[i], gm2)
                              : ag * std::expm1(gm2 * std::log1p(eps * phi[i]));
        tu0[i] = -(u0[i] * j00[i] + u1[i] * j01[i]) - w * gp0[i] / eps +
                 ds0[i] / r[i];
        tu1[i] = -(u0[i] * j10[i] + u1[i] * j11[i]) - w * gp1[i] / eps +
                 ds1[i] / r[i];

        te0[i] = -(u0[i] * h00[i] + u1[i] * h01[i]) +
                 (kap * ld0[i] + ga * d0[i] + l1 * n0 + l2 * ad0) / r[i];
        te1[i] = -(u0[i] * h10[i] + u1[i] * h11[i]) +
                 (kap * ld1[i] + ga * d1[i] + l1 * n1 + l2 * ad1) / r[i];

        td0[i] = e0[i] - (u0[i] * g00[i] + u1[i] * g01[i]);
        td1[i] = e1[i] - (u0[i] * g10[i] + u1[i] * g11[i]);
    });

    g.dealias(t.phi);
    g.dealias(t.u);
    g.dealias(t.d);
    g.dealias(t.ddot);
    return t;
}

FlowState incompressible_rhs(const FlowState& s, const LeslieCoefficients& c,
                             ScalarField* pressure_out) {
    assert(s.mode == FlowMode::incompressible);
    const Grid& g = *s.u.grid();
    const std::size_t n = s.u.size();

    {
        const double div_max = g.max_abs(g.divergence(s.u));
        if (div_max > 1e-10)
            throw NumericalError(
                "incompressible_rhs: input velocity not solenoidal, "
                "max |div u| = " +
                std::to_string(div_max));
    }

    const TensorField J = g.jacobian(s.u);
    const TensorField Gd = g.jacobian(s.d);
    const TensorField Ge = g.jacobian(s.ddot);
    const VectorField lap_u = g.laplacian(s.u);
    const VectorField lap_d = g.laplacian(s.d);

    // Elastic plus Leslie stress; the isotropic elastic part is left to the
    // pressure, so only -kappa (grad d o grad d) enters here.
    TensorField sig = sigma3_raw(g, J, s.d, s.ddot, c);
    {
        const double* g00 = Gd.comp(0, 0).data();
        const double* g01 = Gd.comp(0, 1).data();
        const double* g10 = Gd.comp(1, 0).data();
        const double* g11 = Gd.comp(1, 1).data();
        double* s00 = sig.comp(0, 0).data();
        double* s01 = sig.comp(0, 1).data();
        double* s10 = sig.comp(1, 0).data();
        double* s11 = sig.comp(1, 1).data();
        const double kap = c.kappa;
        kernels::parallel_for(n, [=](std::size_t i) {
            const double o00 = g00[i] * g00[i] + g10[i] * g10[i];
            const double o01 = g00[i] * g01[i] + g10[i] * g11[i];
            const double o11 = g01[i] * g01[i] + g11[i] * g11[i];
            s00[i] -= kap * o00;
            s01[i] -= kap * o01;
            s10[i] -= kap * o01;
            s11[i] -= kap * o11;
        });
    }
    g.dealias(sig);
    const VectorField div_sig = g.divergence(sig);

    FlowState t;
    t.mode = s.mode;
    t.eps = s.eps;
    t.time = s.time;
    t.u = g.vector();
    t.d = g.vector();
    t.ddot = g.vector();

    VectorField force = g.vector();
    {
        const double* u0 = s.u.comp(0).data();
        const double* u1 = s.u.comp(1).data();
        const double* j00 = J.comp(0, 0).data();
        const double* j01 = J.comp(0, 1).data();
        const double* j10 = J.comp(1, 0).data();
        const double* j11 = J.comp(1, 1).data();
        const double* lu0 = lap_u.comp(0).data();
        const double* lu1 = lap_u.comp(1).data();
        const double* ds0 = div_sig.comp(0).data();
        const double* ds1 = div_sig.comp(1).data();
        double* f0 = force.comp(0).data();
        double* f1 = force.comp(1).data();
        const double hmu4 = 0.5 * c.mu4;
        kernels::parallel_for(n, [=](std::size_t i) {
            f0[i] = -(u0[i] * j00[i] + u1[i] * j01[i]) + hmu4 * lu0[i] + ds0[i];
            f1[i] = -(u0[i] * j10[i] + u1[i] * j11[i]) + hmu4 * lu1[i] + ds1[i];
        });
    }
    g.dealias(force);
    ScalarField pi = g.scalar();
    t.u = g.leray_project(force, pi);
    if (pressure_out) *pressure_out = std::move(pi);

    const double* u0 = s.u.comp(0).data();
    const double* u1 = s.u.comp(1).data();
    const double* d0 = s.d.comp(0).data();
    const double* d1 = s.d.comp(1).data();
    const double* e0 = s.ddot.comp(0).data();
    const double* e1 = s.ddot.comp(1).data();
    const double* j00 = J.comp(0, 0).data();
    const double* j01 = J.comp(0, 1).data();
    const double* j10 = J.comp(1, 0).data();
    const double* j11 = J.comp(1, 1).data();
    const double* g00 = Gd.comp(0, 0).data();
    const double* g01 = Gd.comp(0, 1).data();
    const double* g10 = Gd.comp(1, 0).data();
    const double* g11 = Gd.comp(1, 1).data();
    const double* h00 = Ge.comp(0, 0).data();
    const double* h01 = Ge.comp(0, 1).data();
    const double* h10 = Ge.comp(1, 0).data();
    const double* h11 = Ge.comp(1, 1).data();
    const double* ld0 = lap_d.comp(0).data();
    const double* ld1 = lap_d.comp(1).data();
    double* td0 = t.d.comp(0).data();
    double* td1 = t.d.comp(1).data();
    double* te0 = t.ddot.comp(0).data();
    double* te1 = t.ddot.comp(1).data();
    const double kap = c.kappa, l1 = c.lambda1(), l2 = c.lambda2();

    kernels::parallel_for(n, [=](std::size_t i) {
        const double a00 = j00[i];
        const double a11 = j11[i];
        const double a01 = 0.5 * (j01[i] + j10[i]);
        const double b01 = 0.5 * (j01[i] - j10[i]);
        const double ad0 = a00 * d0[i] + a01 * d1[i];
        const double ad1 = a01 * d0[i] + a11 * d1[i];
        const double n0 = e0[i] + b01 * d1[i];
        const double n1 = e1[i] - b01 * d0[i];
        const double dad = d0[i] * ad0 + d1[i] * ad1;
        const double gd2 = g00[i] * g00[i] + g01[i] * g01[i] +
                           g10[i] * g10[i] + g11[i] * g11[i];
        const double ga =
            -(e0[i] * e0[i] + e1[i] * e1[i]) + kap * gd2 - l2 * dad;

        te0[i] = -(u0[i] * h00[i] + u1[i] * h01[i]) + kap * ld0[i] +
                 ga * d0[i] + l1 * n0 + l2 * ad0;
        te1[i] = -(u0[i] * h10[i] + u1[i] * h11[i]) + kap * ld1[i] +
                 ga * d1[i] + l1 * n1 + l2 * ad1;
        td0[i] = e0[i] - (u0[i] * g00[i] + u1[i] * g01[i]);
        td1[i] = e1[i] - (u0[i] * g10[i] + u1[i] * g11[i]);
    });

    g.dealias(t.d);
    g.dealias(t.ddot);
    return t;
}

}  // namespace lcflow::model
