/// @file stepper.cpp
/// @brief RK4, the additive acoustic-implicit scheme, and Picard iteration.

#include "lcflow/stepper.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <string>
#include <utility>

#include "lcflow/errors.hpp"
#include "lcflow/kernels.hpp"

namespace lcflow::stepper {

using model::FlowMode;
using model::FlowState;
using model::LeslieCoefficients;

namespace {

// ARS(2,2,2) coefficients; the implicit half is stiffly accurate and
// L-stable, the explicit half is the matching two-stage second-order pair.
constexpr double ars_gamma = 0.29289321881345247560;  // 1 - 1/sqrt(2)
constexpr double ars_delta = -0.70710678118654752440;  // 1 - 1/(2 gamma)

constexpr double pi_const = 3.14159265358979323846;

}  // namespace

Scheme scheme_from_string(const std::string& name) {
    if (name == "explicit-rk4") return Scheme::explicit_rk4;
    if (name == "imex-acoustic") return Scheme::imex_acoustic;
    if (name == "picard") return Scheme::picard;
    throw ConfigError("unknown scheme '" + name +
                      "' (expected explicit-rk4, imex-acoustic, or picard)");
}

const char* to_string(Scheme s) {
    switch (s) {
        case Scheme::explicit_rk4: return "explicit-rk4";
        case Scheme::imex_acoustic: return "imex-acoustic";
        case Scheme::picard: return "picard";
    }
    return "?";
}

double cfl_dt(const FlowState& s, const LeslieCoefficients& c, Scheme scheme,
              double cfl_safety) {
    assert(cfl_safety > 0.0 && cfl_safety <= 1.0);
    const Grid& g = *s.u.grid();
    const double dx = std::min(g.dx(), g.dy());
    const double inf = std::numeric_limits<double>::infinity();
    double dt = inf;

    if (s.mode == FlowMode::compressible) {
        const double cs = std::sqrt(c.a_tilde * c.gamma);
        const double scale = (scheme == Scheme::imex_acoustic) ? 1.0 : s.eps;
        dt = std::min(dt, scale * dx / cs);
    }
    const double umax = g.max_abs(s.u);
    if (umax > 0.0) dt = std::min(dt, dx / umax);
    // The director-velocity coupling through the Leslie stress acts as an
    // extra grad^2-type damping on the pair (vorticity, director rate) with
    // strength of order |lambda1|/4 plus the Ad couplings.
    const double nu_leslie = std::max(
        0.0, 0.25 * std::fabs(c.lambda1()) + 0.5 * (c.mu5 + c.mu6) +
                 0.25 * c.mu1);
    const double nu =
        std::max({0.5 * c.mu4, 0.5 * c.mu4 + c.xi, c.kappa, nu_leslie});
    if (nu > 0.0) dt = std::min(dt, dx * dx / (pi_const * nu));
    const double l1 = std::fabs(c.lambda1());
    if (l1 > 0.0) dt = std::min(dt, 1.0 / l1);

    return cfl_safety * dt;
}

FlowState state_axpy(const FlowState& a, double f, const FlowState& b) {
    FlowState out = a;
    const std::size_t n = a.u.size();
    auto add = [&](ScalarField& dst, const ScalarField& src) {
        assert(dst.size() == src.size());
        double* o = dst.data();
        const double* p = src.data();
        kernels::parallel_for(n, [=](std::size_t i) { o[i] += f * p[i]; });
    };
    if (a.phi.size() > 0) add(out.phi, b.phi);
    for (int k = 0; k < 2; ++k) {
        add(out.u[k], b.u[k]);
        add(out.d[k], b.d[k]);
        add(out.ddot[k], b.ddot[k]);
    }
    return out;
}

double state_distance(const FlowState& a, const FlowState& b) {
    const Grid& g = *a.u.grid();
    const double cell = g.cell_area();
    const std::size_t n = a.u.size();
    double acc = 0.0;
    auto add = [&](const ScalarField& x, const ScalarField& y) {
        const double* p = x.data();
        const double* q = y.data();
        acc += kernels::reduce_sum(n, [=](std::size_t i) {
            const double d = p[i] - q[i];
            return d * d;
        });
    };
    if (a.phi.size() > 0) add(a.phi, b.phi);
    for (int k = 0; k < 2; ++k) {
        add(a.u[k], b.u[k]);
        add(a.d[k], b.d[k]);
        add(a.ddot[k], b.ddot[k]);
    }
    return std::sqrt(acc * cell);
}

FlowState rhs(const FlowState& s, const LeslieCoefficients& c) {
    return s.mode == FlowMode::compressible ? model::compressible_rhs(s, c)
                                            : model::incompressible_rhs(s, c);
}

FlowState step_rk4(const FlowState& s, const LeslieCoefficients& c, double dt) {
    const FlowState k1 = rhs(s, c);
    const FlowState k2 = rhs(state_axpy(s, 0.5 * dt, k1), c);
    const FlowState k3 = rhs(state_axpy(s, 0.5 * dt, k2), c);
    const FlowState k4 = rhs(state_axpy(s, dt, k3), c);
    FlowState out = state_axpy(s, dt / 6.0, k1);
    out = state_axpy(out, dt / 3.0, k2);
    out = state_axpy(out, dt / 3.0, k3);
    out = state_axpy(out, dt / 6.0, k4);
    out.time = s.time + dt;
    return out;
}

namespace {

// In-place solve of (I - theta L_ac) y = y for the linearized acoustic
// couple L_ac: phi <- -(1/eps) div u, u <- -(1/eps) a gamma grad phi.
// Wavenumbers follow the grid's first-derivative convention so the solve
// inverts exactly the operator that acoustic_l applies; masked modes are
// zeroed in the same pass.
void acoustic_solve(const Grid& g, double theta, double eps, double agam,
                    FlowState& y) {
    Grid::Spectrum fp, f0, f1;
    g.forward(y.phi, fp);
    g.forward(y.u[0], f0);
    g.forward(y.u[1], f1);
    const std::size_t nk = g.nkx();
    const std::size_t ny = g.ny();
    const double toe = theta / eps;
    const std::complex<double> im(0.0, 1.0);
    for (std::size_t row = 0; row < ny; ++row) {
        const double ky = g.ky_odd_at(row);
        for (std::size_t jx = 0; jx < nk; ++jx) {
            const std::size_t idx = row * nk + jx;
            if (!g.mode_kept(row, jx)) {
                fp[idx] = 0.0;
                f0[idx] = 0.0;
                f1[idx] = 0.0;
                continue;
            }
            const double kx = g.kx_odd_at(jx);
            const double k2 = kx * kx + ky * ky;
            const std::complex<double> div_u = im * (kx * f0[idx] + ky * f1[idx]);
            const std::complex<double> phi =
                (fp[idx] - toe * div_u) / (1.0 + toe * toe * agam * k2);
            f0[idx] -= toe * agam * im * kx * phi;
            f1[idx] -= toe * agam * im * ky * phi;
            fp[idx] = phi;
        }
    }
    g.backward(fp, y.phi);
    g.backward(f0, y.u[0]);
    g.backward(f1, y.u[1]);
}

// L_ac applied to a state, as a tendency-shaped FlowState.
FlowState acoustic_l(const FlowState& s, double agam) {
    const Grid& g = *s.u.grid();
    FlowState out = s;
    out.phi = g.divergence(s.u);
    out.u = g.gradient(s.phi);
    const double a = -1.0 / s.eps;
    for (std::size_t i = 0; i < out.phi.size(); ++i) out.phi[i] *= a;
    for (int k = 0; k < 2; ++k)
        for (std::size_t i = 0; i < out.u[k].size(); ++i)
            out.u[k][i] *= a * agam;
    out.d[0].fill(0.0);
    out.d[1].fill(0.0);
    out.ddot[0].fill(0.0);
    out.ddot[1].fill(0.0);
    return out;
}

}  // namespace

FlowState step_imex(const FlowState& s, const LeslieCoefficients& c, double dt) {
    const double g1 = ars_gamma, de = ars_delta;

    if (s.mode == FlowMode::incompressible) {
        const FlowState f0 = rhs(s, c);
        const FlowState y1 = state_axpy(s, g1 * dt, f0);
        const FlowState f1 = rhs(y1, c);
        FlowState out = state_axpy(s, de * dt, f0);
        out = state_axpy(out, (1.0 - de) * dt, f1);
        out.time = s.time + dt;
        return out;
    }

    const Grid& g = *s.u.grid();
    const double agam = c.a_tilde * c.gamma;

    const FlowState f0 =
        model::compressible_rhs(s, c, model::AcousticTerms::excluded);
    FlowState y1 = state_axpy(s, g1 * dt, f0);
    acoustic_solve(g, g1 * dt, s.eps, agam, y1);

    const FlowState ly1 = acoustic_l(y1, agam);
    const FlowState f1 =
        model::compressible_rhs(y1, c, model::AcousticTerms::excluded);
    FlowState y2 = state_axpy(s, de * dt, f0);
    y2 = state_axpy(y2, (1.0 - de) * dt, f1);
    y2 = state_axpy(y2, (1.0 - g1) * dt, ly1);
    acoustic_solve(g, g1 * dt, s.eps, agam, y2);

    y2.time = s.time + dt;
    return y2;
}

namespace {

// Constant-coefficient linear core of the compressible system: the
// acoustic couple at rho = 1 plus viscosity and director relaxation.
FlowState full_l(const FlowState& s, const LeslieCoefficients& c) {
    const Grid& g = *s.u.grid();
    FlowState out = s;
    const double agam = c.a_tilde * c.gamma;
    const double inv_eps = 1.0 / s.eps;

    out.phi = g.divergence(s.u);
    for (std::size_t i = 0; i < out.phi.size(); ++i) out.phi[i] *= -inv_eps;

    const VectorField gphi = g.gradient(s.phi);
    const VectorField lap_u = g.laplacian(s.u);
    const VectorField gdiv = g.gradient(g.divergence(s.u));
    const VectorField lap_d = g.laplacian(s.d);
    const double hmu4 = 0.5 * c.mu4;
    const double nup = 0.5 * c.mu4 + c.xi;
    const double l1 = c.lambda1();
    for (int k = 0; k < 2; ++k) {
        for (std::size_t i = 0; i < s.u.size(); ++i) {
            out.u[k][i] = -inv_eps * agam * gphi[k][i] + hmu4 * lap_u[k][i] +
                          nup * gdiv[k][i];
            out.ddot[k][i] = c.kappa * lap_d[k][i] + l1 * s.ddot[k][i];
            out.d[k][i] = s.ddot[k][i];
        }
    }
    return out;
}

// Per-mode solve of (I - theta L) y = r for the full linear core.
// Laplacian terms carry the grid's full wavenumbers while divergence and
// gradient terms carry the first-derivative (Nyquist-zeroed) ones, so the
// solve inverts exactly the operator that full_l applies at every mode.
FlowState full_solve(const FlowState& r, const LeslieCoefficients& c,
                     double theta) {
    const Grid& g = *r.u.grid();
    const double eps = r.eps;
    const double agam = c.a_tilde * c.gamma;
    const double hmu4 = 0.5 * c.mu4;
    const double nup = 0.5 * c.mu4 + c.xi;
    const double kap = c.kappa;
    const double l1 = c.lambda1();
    const std::complex<double> im(0.0, 1.0);

    Grid::Spectrum fp, f0, f1, d0, d1, e0, e1;
    g.forward(r.phi, fp);
    g.forward(r.u[0], f0);
    g.forward(r.u[1], f1);
    g.forward(r.d[0], d0);
    g.forward(r.d[1], d1);
    g.forward(r.ddot[0], e0);
    g.forward(r.ddot[1], e1);

    const std::size_t nk = g.nkx();
    for (std::size_t row = 0; row < g.ny(); ++row) {
        const double ly = g.ky_at(row);
        const double qy = g.ky_odd_at(row);
        for (std::size_t jx = 0; jx < nk; ++jx) {
            const std::size_t p = row * nk + jx;
            const double lx = g.kx_at(jx);
            const double qx = g.kx_odd_at(jx);
            const double lap2 = lx * lx + ly * ly;
            const double q2 = qx * qx + qy * qy;

            // Director block, componentwise.
            const double den_d = 1.0 - theta * l1 + theta * theta * kap * lap2;
            const std::complex<double> ee0 =
                (e0[p] - theta * kap * lap2 * d0[p]) / den_d;
            const std::complex<double> ee1 =
                (e1[p] - theta * kap * lap2 * d1[p]) / den_d;
            d0[p] += theta * ee0;
            d1[p] += theta * ee1;
            e0[p] = ee0;
            e1[p] = ee1;

            if (lap2 == 0.0) continue;

            const double den_perp = 1.0 + theta * hmu4 * lap2;
            if (q2 == 0.0) {
                f0[p] /= den_perp;
                f1[p] /= den_perp;
                continue;
            }

            // Velocity split along and across q.
            const double qn = std::sqrt(q2);
            const double hx = qx / qn, hy = qy / qn;
            const std::complex<double> ra = hx * f0[p] + hy * f1[p];
            const std::complex<double> px = f0[p] - hx * ra;
            const std::complex<double> py = f1[p] - hy * ra;
            const double toe = theta / eps;
            const std::complex<double> a =
                (ra - im * toe * agam * qn * fp[p]) /
                (1.0 + theta * (hmu4 * lap2 + nup * q2) +
                 toe * toe * agam * q2);
            fp[p] -= toe * im * qn * a;
            f0[p] = px / den_perp + hx * a;
            f1[p] = py / den_perp + hy * a;
        }
    }

    FlowState out = r;
    g.backward(fp, out.phi);
    g.backward(f0, out.u[0]);
    g.backward(f1, out.u[1]);
    g.backward(d0, out.d[0]);
    g.backward(d1, out.d[1]);
    g.backward(e0, out.ddot[0]);
    g.backward(e1, out.ddot[1]);
    return out;
}

}  // namespace

PicardResult picard_solve(const FlowState& s, const LeslieCoefficients& c,
                          double dt, double tol, int max_iters) {
    if (s.mode != FlowMode::compressible)
        throw ConfigError("picard_solve: compressible mode only");

    FlowState x = s;
    for (int m = 1; m <= max_iters; ++m) {
        const FlowState f = model::compressible_rhs(x, c);
        const FlowState lx = full_l(x, c);
        FlowState r = state_axpy(s, dt, f);
        r = state_axpy(r, -dt, lx);
        FlowState xn = full_solve(r, c, dt);
        const double dist = state_distance(xn, x);
        x = std::move(xn);
        if (dist <= tol) {
            x.time = s.time + dt;
            return {std::move(x), m};
        }
    }
    throw NumericalError("picard_solve: no convergence within " +
                         std::to_string(max_iters) + " sweeps at dt = " +
                         std::to_string(dt));
}

FlowState advance(const FlowState& s, const LeslieCoefficients& c,
                  const StepConfig& cfg) {
    switch (cfg.scheme) {
        case Scheme::explicit_rk4: return step_rk4(s, c, cfg.dt);
        case Scheme::imex_acoustic: return step_imex(s, c, cfg.dt);
        case Scheme::picard:
            return picard_solve(s, c, cfg.dt, cfg.picard_tol,
                                cfg.picard_max_iters)
                .state;
    }
    throw ConfigError("advance: unknown scheme");
}

}  // namespace lcflow::stepper
