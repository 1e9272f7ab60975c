/// @file test_stepper.cpp
/// @brief Integrator checks: CFL bounds, an exact plane-wave oracle,
///        self-convergence orders, acoustic-implicit stability, and a dense
///        Newton oracle for the Picard mode.

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <cstddef>
#include <cstring>
#include <vector>

#include "lcflow/errors.hpp"
#include "lcflow/grid.hpp"
#include "lcflow/kernels.hpp"
#include "lcflow/model.hpp"
#include "lcflow/stepper.hpp"
#include "test_fields.hpp"
#include "test_harness.hpp"

namespace {

using namespace lcflow;
using namespace lcflow::model;
using namespace lcflow::stepper;
using lcflow::test::DirectorPair;
using lcflow::test::Rng;
using lcflow::test::harness::record;
using lcflow::test::qoi;

// All couplings off: pure barotropic acoustics.
LeslieCoefficients acoustics_only(double a_tilde) {
    LeslieCoefficients c;
    c.mu2 = 0.0;
    c.mu3 = 0.0;
    c.mu4 = 0.0;
    c.kappa = 0.0;
    c.a_tilde = a_tilde;
    return c;
}

// Nearly inviscid set so the acoustic branch of the CFL bound binds.
LeslieCoefficients nearly_inviscid() {
    LeslieCoefficients c;
    c.mu2 = -5e-10;
    c.mu3 = 5e-10;
    c.mu4 = 1e-9;
    c.kappa = 1e-9;
    return c;
}

FlowState random_state(const Grid& g, Rng& rng, double eps, int band,
                       double amp) {
    FlowState s = make_state(g, FlowMode::compressible, eps);
    s.phi = test::random_scalar(g, rng, band, amp);
    s.u = test::random_vector(g, rng, band, amp);
    const DirectorPair dp = test::random_director(g, rng, band, amp);
    s.d = dp.d;
    s.ddot = dp.ddot;
    return s;
}

void scheme_name_checks() {
    record("scheme names round-trip",
           scheme_from_string("explicit-rk4") == Scheme::explicit_rk4 &&
               scheme_from_string("imex-acoustic") == Scheme::imex_acoustic &&
               scheme_from_string("picard") == Scheme::picard &&
               std::string(to_string(Scheme::imex_acoustic)) == "imex-acoustic");
    bool threw = false;
    try {
        scheme_from_string("leapfrog");
    } catch (const ConfigError&) {
        threw = true;
    }
    record("unknown scheme rejected", threw);
}

void cfl_checks(const Grid& g) {
    const LeslieCoefficients c = nearly_inviscid();

    FlowState s = make_state(g, FlowMode::compressible, 1.0);
    const double dx = g.dx();
    const double pure = cfl_dt(s, c, Scheme::explicit_rk4);
    record("acoustic limit formula",
           std::fabs(pure - 0.4 * dx / std::sqrt(2.0)) <= 1e-15 * pure,
           qoi(pure));

    s.eps = 0.5;
    const double half = cfl_dt(s, c, Scheme::explicit_rk4);
    s.eps = 0.25;
    const double quarter = cfl_dt(s, c, Scheme::explicit_rk4);
    record("explicit bound proportional to eps",
           std::fabs(half - 2.0 * quarter) <= 1e-15 * half);

    s.eps = 0.01;
    const double im_small = cfl_dt(s, c, Scheme::imex_acoustic);
    s.eps = 1.0;
    const double im_one = cfl_dt(s, c, Scheme::imex_acoustic);
    record("imex bound independent of eps", im_small == im_one);

    Rng rng(91);
    FlowState fast = make_state(g, FlowMode::compressible, 1.0);
    fast.u = test::random_vector(g, rng, 3, 4.0);
    const double adv = cfl_dt(fast, c, Scheme::explicit_rk4);
    const double expect_adv = 0.4 * dx / g.max_abs(fast.u);
    record("advective branch binds for fast flow",
           std::fabs(adv - expect_adv) <= 1e-12 * expect_adv);

    const LeslieCoefficients base;  // mu4 = kappa = 1
    FlowState slow = make_state(g, FlowMode::compressible, 1.0);
    const double visc = cfl_dt(slow, base, Scheme::explicit_rk4);
    const double expect_visc = 0.4 * dx * dx / (3.14159265358979323846 * 1.0);
    record("viscous branch binds for unit viscosity",
           std::fabs(visc - expect_visc) <= 1e-12 * expect_visc);
}

void equilibrium_checks(const Grid& g) {
    const LeslieCoefficients c;
    const FlowState s = make_state(g, FlowMode::compressible, 0.7);

    record("rk4 fixes equilibrium",
           state_distance(step_rk4(s, c, 1e-3), s) == 0.0);
    record("imex fixes equilibrium",
           state_distance(step_imex(s, c, 1e-3), s) == 0.0);
    const PicardResult pr = picard_solve(s, c, 1e-3);
    record("picard fixes equilibrium in one sweep",
           pr.iterations == 1 && state_distance(pr.state, s) == 0.0);

    bool threw = false;
    try {
        picard_solve(make_state(g, FlowMode::incompressible), c, 1e-3);
    } catch (const ConfigError&) {
        threw = true;
    }
    record("picard rejects incompressible mode", threw);
}

// Exact eigenmode of the linearized acoustic subsystem: with p'(1) = 1 and
// eps = 1/4 the mode k = (1,0) travels as cos(x - 4t), returning to the
// initial state after T = pi/2. A 32^2 grid keeps the retained corner
// modes inside the RK4 stability region at the step sizes used here.
void plane_wave_checks() {
    const Grid g(32, 32);
    const LeslieCoefficients c = acoustics_only(0.5);
    const double eps = 0.25;
    const double amp = 1e-7;
    const double omega = 4.0;
    const double period = 2.0 * 3.14159265358979323846 / omega;

    FlowState s0 = make_state(g, FlowMode::compressible, eps);
    s0.phi = g.sample([&](double x, double) { return amp * std::cos(x); });
    s0.u[0] = g.sample([&](double x, double) { return amp * std::cos(x); });

    auto run = [&](int steps, double t_final) {
        FlowState x = s0;
        const double dt = t_final / steps;
        for (int i = 0; i < steps; ++i) x = step_rk4(x, c, dt);
        return x;
    };

    const FlowState quarter = run(8, 0.25 * period);
    const ScalarField target =
        g.sample([&](double x, double) { return amp * std::sin(x); });
    double phase_err = 0.0;
    for (std::size_t i = 0; i < target.size(); ++i)
        phase_err = std::max(phase_err, std::fabs(quarter.phi[i] - target[i]));
    record("quarter-period phase matches dispersion", phase_err <= 0.01 * amp,
           qoi(phase_err / amp, 0.01));

    const double e1 = state_distance(run(34, period), s0) / amp;
    const double e2 = state_distance(run(68, period), s0) / amp;
    record("plane-wave period error is fourth order", e1 / e2 >= 12.0,
           qoi(e1 / e2, 12.0));
}

void rk4_convergence(const Grid& g) {
    const LeslieCoefficients c;
    Rng rng(101);
    const FlowState s0 = random_state(g, rng, 0.5, 3, 0.05);
    const double T = 0.1;

    auto run = [&](double dt) {
        FlowState x = s0;
        const int n = static_cast<int>(std::lround(T / dt));
        for (int i = 0; i < n; ++i) x = step_rk4(x, c, dt);
        return x;
    };
    const FlowState ref = run(2.5e-4);
    const double e1 = state_distance(run(2e-3), ref);
    const double e2 = state_distance(run(1e-3), ref);
    record("rk4 global order near four", e1 / e2 >= 12.0, qoi(e1 / e2, 12.0));
}

// Spectral-radius sweep for the additive scheme on the per-mode 2x2
// acoustic symbol; L-stability means the radius never tops 1.
void imex_eigenvalue_checks() {
    using cd = std::complex<double>;
    const double g1 = 1.0 - 1.0 / std::sqrt(2.0);
    const double agam = 2.0;
    double worst = 0.0;
    for (double eps : {1.0, 1e-2, 1e-4})
        for (double h : {1e-3, 1e-2, 1e-1, 1.0})
            for (double k : {1.0, 5.0, 21.0, 45.25}) {
                const cd i(0.0, 1.0);
                const cd l01 = -i * k / eps;
                const cd l10 = -i * agam * k / eps;
                // S = (I - g1 h L)^{-1} for L = [[0, l01], [l10, 0]].
                const cd det = 1.0 - g1 * h * l01 * g1 * h * l10;
                const cd s00 = 1.0 / det, s11 = 1.0 / det;
                const cd s01 = g1 * h * l01 / det, s10 = g1 * h * l10 / det;
                // M = S + (1 - g1) h S L S.
                const cd ls00 = l01 * s10, ls01 = l01 * s11;
                const cd ls10 = l10 * s00, ls11 = l10 * s01;
                const cd sls00 = s00 * ls00 + s01 * ls10;
                const cd sls01 = s00 * ls01 + s01 * ls11;
                const cd sls10 = s10 * ls00 + s11 * ls10;
                const cd sls11 = s10 * ls01 + s11 * ls11;
                const double w = (1.0 - g1) * h;
                const cd m00 = s00 + w * sls00, m01 = s01 + w * sls01;
                const cd m10 = s10 + w * sls10, m11 = s11 + w * sls11;
                const cd tr = m00 + m11;
                const cd dt2 = m00 * m11 - m01 * m10;
                const cd disc = std::sqrt(tr * tr - 4.0 * dt2);
                const double rho = std::max(std::abs(0.5 * (tr + disc)),
                                            std::abs(0.5 * (tr - disc)));
                worst = std::max(worst, rho);
            }
    record("imex acoustic amplification bounded", worst <= 1.0 + 1e-12,
           qoi(worst - 1.0));
}

void imex_small_eps(const Grid& g) {
    LeslieCoefficients c;
    c.mu4 = 1e-3;
    c.kappa = 1e-3;
    Rng rng(111);
    FlowState s = make_state(g, FlowMode::compressible, 1e-3);
    s.phi = test::random_scalar(g, rng, 3, 0.05);
    s.u = test::random_solenoidal(g, rng, 3, 0.3);
    const DirectorPair dp = test::random_director(g, rng, 3, 0.05);
    s.d = dp.d;
    s.ddot = dp.ddot;

    const double dt = cfl_dt(s, c, Scheme::imex_acoustic);
    const double dt_explicit = cfl_dt(s, c, Scheme::explicit_rk4);
    record("imex step bound free of the acoustic scale", dt >= 100.0 * dt_explicit,
           qoi(dt / dt_explicit, 100.0));

    const double u0 = g.max_abs(s.u);
    double umax = 0.0;
    for (int i = 0; i < 100; ++i) {
        s = step_imex(s, c, dt);
        umax = std::max(umax, g.max_abs(s.u));
    }
    record("imex stable at eps = 1e-3 without acoustic blowup",
           s.u.finite() && s.phi.finite() && umax <= 10.0 * u0,
           qoi(umax / u0, 10.0));
}

void imex_accuracy(const Grid& g) {
    const LeslieCoefficients c;
    Rng rng(121);
    const FlowState s0 = random_state(g, rng, 0.5, 3, 0.05);
    const double T = 0.05;

    auto run = [&](double dt, bool imex) {
        FlowState x = s0;
        const int n = static_cast<int>(std::lround(T / dt));
        for (int i = 0; i < n; ++i)
            x = imex ? step_imex(x, c, dt) : step_rk4(x, c, dt);
        return x;
    };

    const double gap = state_distance(run(5e-4, true), run(5e-4, false));
    record("imex tracks rk4 at matched dt", gap <= 1e-6, qoi(gap, 1e-6));

    const FlowState ref = run(1e-4, false);
    const double e1 = state_distance(run(1e-3, true), ref);
    const double e2 = state_distance(run(5e-4, true), ref);
    record("imex self-convergence near second order", e1 / e2 >= 3.2,
           qoi(e1 / e2, 3.2));
}

// Dense Newton oracle on a coarse grid: solves the same backward-Euler
// equations R(X) = X - X0 - dt f(X) = 0 with a finite-difference Jacobian
// and compares against the Picard fixed point.
struct Packer {
    const Grid& g;
    std::size_t n;
    explicit Packer(const Grid& grid) : g(grid), n(grid.npoints()) {}

    Eigen::VectorXd pack(const FlowState& s) const {
        Eigen::VectorXd x(7 * n);
        const ScalarField* f[7] = {&s.phi,     &s.u[0], &s.u[1], &s.d[0],
                                   &s.d[1],    &s.ddot[0], &s.ddot[1]};
        for (int b = 0; b < 7; ++b)
            for (std::size_t i = 0; i < n; ++i)
                x[b * n + i] = (*f[b])[i];
        return x;
    }
    FlowState unpack(const Eigen::VectorXd& x, double eps) const {
        FlowState s = make_state(g, FlowMode::compressible, eps);
        ScalarField* f[7] = {&s.phi,  &s.u[0],    &s.u[1],   &s.d[0],
                             &s.d[1], &s.ddot[0], &s.ddot[1]};
        for (int b = 0; b < 7; ++b)
            for (std::size_t i = 0; i < n; ++i)
                (*f[b])[i] = x[b * n + i];
        return s;
    }
};

void picard_newton_oracle() {
    const Grid g(16, 16);
    const LeslieCoefficients c;
    const double eps = 0.5, dt = 1e-3;
    Rng rng(131);
    const FlowState s0 = random_state(g, rng, eps, 2, 0.05);

    const PicardResult pr = picard_solve(s0, c, dt);
    record("picard sweep count small at dt = 1e-3", pr.iterations <= 15,
           qoi(pr.iterations, 15));

    const Packer pk(g);
    const Eigen::VectorXd x0 = pk.pack(s0);
    const auto m = static_cast<Eigen::Index>(7 * pk.n);

    auto residual = [&](const Eigen::VectorXd& x) -> Eigen::VectorXd {
        const FlowState f = compressible_rhs(pk.unpack(x, eps), c);
        return x - x0 - dt * pk.pack(f);
    };

    const double h = 1e-7;
    const Eigen::VectorXd r0 = residual(x0);
    Eigen::MatrixXd jac(m, m);
    Eigen::VectorXd xp = x0;
    for (Eigen::Index j = 0; j < m; ++j) {
        xp[j] += h;
        jac.col(j) = (residual(xp) - r0) / h;
        xp[j] = x0[j];
    }
    const Eigen::PartialPivLU<Eigen::MatrixXd> lu(jac);

    Eigen::VectorXd x = x0;
    for (int it = 0; it < 12; ++it) {
        const Eigen::VectorXd step = lu.solve(residual(x));
        x -= step;
        if (step.lpNorm<Eigen::Infinity>() <= 1e-14) break;
    }
    const double newton_res = residual(x).lpNorm<Eigen::Infinity>();
    record("newton oracle converged", newton_res <= 1e-12,
           qoi(newton_res, 1e-12));

    const double gap = (pk.pack(pr.state) - x).lpNorm<Eigen::Infinity>();
    record("picard matches newton solve", gap <= 1e-9, qoi(gap, 1e-9));
}

void picard_contraction(const Grid& g) {
    const LeslieCoefficients c;
    Rng rng(141);
    const FlowState s = random_state(g, rng, 0.5, 3, 0.05);
    const int n1 = picard_solve(s, c, 1e-2).iterations;
    const int n2 = picard_solve(s, c, 5e-3).iterations;
    const int n3 = picard_solve(s, c, 2.5e-3).iterations;
    record("picard sweeps nonincreasing in dt", n1 >= n2 && n2 >= n3,
           qoi(n1) + qoi(n2) + qoi(n3));
}

void conservation_checks(const Grid& g) {
    const LeslieCoefficients c;
    Rng rng(151);
    const FlowState s = random_state(g, rng, 0.5, 3, 0.05);
    const double m0 = g.integral(s.phi);

    double worst = 0.0;
    worst = std::max(worst, std::fabs(g.integral(step_rk4(s, c, 1e-3).phi) - m0));
    worst = std::max(worst, std::fabs(g.integral(step_imex(s, c, 1e-3).phi) - m0));
    worst = std::max(worst,
                     std::fabs(g.integral(picard_solve(s, c, 1e-3).state.phi) - m0));
    record("mass conserved per step", worst <= 1e-11, qoi(worst, 1e-11));
}

void determinism_checks(const Grid& g) {
    const LeslieCoefficients c;
    Rng rng(161);
    const FlowState s = random_state(g, rng, 0.5, 4, 0.2);

    auto bits_equal = [&](const FlowState& a, const FlowState& b) {
        auto eq = [](const ScalarField& x, const ScalarField& y) {
            return std::memcmp(x.data(), y.data(),
                               x.size() * sizeof(double)) == 0;
        };
        bool ok = eq(a.phi, b.phi);
        for (int k = 0; k < 2; ++k)
            ok = ok && eq(a.u[k], b.u[k]) && eq(a.d[k], b.d[k]) &&
                 eq(a.ddot[k], b.ddot[k]);
        return ok;
    };

    const FlowState r1 = step_rk4(s, c, 1e-3);
    const FlowState r2 = step_rk4(s, c, 1e-3);
    record("repeated step bitwise identical", bits_equal(r1, r2));

    kernels::exec_mode() = kernels::Exec::serial;
    const FlowState r3 = step_rk4(s, c, 1e-3);
    kernels::exec_mode() = kernels::Exec::parallel;
    record("serial and parallel steps bitwise identical", bits_equal(r1, r3));
}

void incompressible_checks(const Grid& g) {
    const LeslieCoefficients c;
    Rng rng(171);
    FlowState s = make_state(g, FlowMode::incompressible);
    s.u = test::random_solenoidal(g, rng, 4, 0.3);
    const DirectorPair dp = test::random_director(g, rng, 3, 0.1);
    s.d = dp.d;
    s.ddot = dp.ddot;

    double div_rk4 = 0.0;
    FlowState a = s;
    for (int i = 0; i < 20; ++i) {
        a = step_rk4(a, c, 1e-3);
        div_rk4 = std::max(div_rk4, g.max_abs(g.divergence(a.u)));
    }
    record("rk4 keeps velocity solenoidal", div_rk4 <= 1e-9,
           qoi(div_rk4, 1e-9));

    double div_imex = 0.0;
    FlowState b = s;
    for (int i = 0; i < 20; ++i) {
        b = step_imex(b, c, 1e-3);
        div_imex = std::max(div_imex, g.max_abs(g.divergence(b.u)));
    }
    record("imex keeps velocity solenoidal", div_imex <= 1e-9,
           qoi(div_imex, 1e-9));
}

void director_drift(const Grid& g) {
    const LeslieCoefficients c;
    Rng rng(181);
    FlowState s = random_state(g, rng, 0.5, 3, 0.05);
    const double dt = 0.5 * cfl_dt(s, c, Scheme::explicit_rk4);
    const double T = 0.25;
    const int n = static_cast<int>(std::ceil(T / dt));
    for (int i = 0; i < n; ++i) s = step_rk4(s, c, dt);

    double len = 0.0, orth = 0.0;
    for (std::size_t i = 0; i < s.u.size(); ++i) {
        const double d0 = s.d[0][i], d1 = s.d[1][i];
        len = std::max(len, std::fabs(std::sqrt(d0 * d0 + d1 * d1) - 1.0));
        orth = std::max(orth, std::fabs(d0 * s.ddot[0][i] + d1 * s.ddot[1][i]));
    }
    const double t_end = dt * n;
    record("director length drift small", len / t_end <= 1e-6,
           qoi(len / t_end, 1e-6));
    record("director rate stays near tangent", orth / t_end <= 1e-6,
           qoi(orth / t_end, 1e-6));
}

}  // namespace

int main() {
    return lcflow::test::harness::run("stepper: integrators and implicit solves", [] {
        const Grid g(64, 64);
        scheme_name_checks();
        cfl_checks(g);
        equilibrium_checks(g);
        plane_wave_checks();
        rk4_convergence(g);
        imex_eigenvalue_checks();
        imex_small_eps(g);
        imex_accuracy(g);
        picard_newton_oracle();
        picard_contraction(g);
        conservation_checks(g);
        determinism_checks(g);
        incompressible_checks(g);
        director_drift(g);
    });
}
