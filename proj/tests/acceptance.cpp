/// @file acceptance.cpp
/// @brief Acceptance gate: the quantitative end-to-end criteria, one
///        pass/fail line each, at the stated tolerances.

#include <Eigen/Dense>
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "lcflow/diag.hpp"
#include "lcflow/errors.hpp"
#include "lcflow/grid.hpp"
#include "lcflow/model.hpp"
#include "lcflow/stepper.hpp"
#include "lcflow/sweep.hpp"
#include "test_fields.hpp"
#include "test_harness.hpp"

namespace {

using namespace lcflow;
using namespace lcflow::test;
using harness::record;
using model::FlowMode;
using model::FlowState;
using model::LeslieCoefficients;

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
        .count();
}

// ===========================================================================
// Criteria 1, 2, 6, 7: the two epsilon ladders
// ===========================================================================

struct LadderResults {
    sweep::SweepResult alpha2;
    sweep::SweepResult alpha1;
    double alpha2_seconds = 0.0;
};

LadderResults run_ladders() {
    LadderResults out;
    sweep::SweepConfig cfg;
    const auto t0 = std::chrono::steady_clock::now();
    out.alpha2 = sweep::mach_sweep(cfg);
    out.alpha2_seconds = seconds_since(t0);
    cfg.alpha0 = 1.0;
    out.alpha1 = sweep::mach_sweep(cfg);
    return out;
}

void criterion_rate(const LadderResults& lad) {
    const bool ok = lad.alpha2.ok() && lad.alpha2.fit.fitted &&
                    lad.alpha2.fit.beta_hat >= 1.6 &&
                    lad.alpha2_seconds <= 600.0;
    record("criterion 1: fitted Mach exponent reaches 1.6 at alpha0 = 2 "
           "within the time budget",
           ok,
           qoi(lad.alpha2.fit.beta_hat, 1.6) + " " +
               qoi(lad.alpha2_seconds, 600.0));
}

void criterion_alpha_dependence(const LadderResults& lad) {
    const double b1 = lad.alpha1.fit.beta_hat;
    const double b2 = lad.alpha2.fit.beta_hat;
    const bool ok = lad.alpha1.ok() && lad.alpha1.fit.fitted && b1 >= 0.8 &&
                    b1 < b2 - 0.3;
    record("criterion 2: alpha0 = 1 rate exceeds 0.8 and trails the "
           "alpha0 = 2 rate by 0.3",
           ok, qoi(b1, 0.8) + " vs " + qoi(b2));
}

void criterion_uniformity(const LadderResults& lad) {
    double lo = lad.alpha2.runs.front().max_div_monitor;
    double hi = lo;
    for (const sweep::RunSeries& run : lad.alpha2.runs) {
        lo = std::min(lo, run.max_div_monitor);
        hi = std::max(hi, run.max_div_monitor);
    }
    record("criterion 6: scaled divergence stays within a factor 10 "
           "across the ladder",
           lo > 0.0 && hi < 10.0 * lo, qoi(hi / lo, 10.0));
}

void criterion_density_ratio(const LadderResults& lad) {
    double worst = 0.0;
    for (const sweep::SweepResult* res : {&lad.alpha2, &lad.alpha1}) {
        for (const sweep::RunSeries& run : res->runs) {
            worst = std::max(worst, run.max_sqrt_rho_ratio);
        }
    }
    record("criterion 7: density-potential comparison ratio stays below 5 "
           "in every sweep run",
           worst <= 5.0, qoi(worst, 5.0));
}

// ===========================================================================
// Criteria 3 and 10: the discrete energy balance
// ===========================================================================

struct EnergyLawProbe {
    double ratio = 0.0;
    double finest = 0.0;
    double scale = 0.0;
    double max_div = 0.0;
    bool ok = false;
};

EnergyLawProbe energy_law_probe(const Grid& g, FlowMode mode,
                                double dt_coarse) {
    const LeslieCoefficients c;
    const sweep::InitialData id = sweep::well_prepared_ic(g, 0.5, 2.0, 1);
    const FlowState& start =
        mode == FlowMode::compressible ? id.compressible : id.incompressible;
    const double t_final = 0.2;

    EnergyLawProbe probe;
    double coarse = 0.0;
    for (const double dt : {dt_coarse, 0.5 * dt_coarse}) {
        const auto n = static_cast<std::size_t>(std::llround(t_final / dt));
        std::vector<FlowState> window{start};
        double worst = 0.0;
        double scale = std::abs(diag::basic_energy(start, c));
        for (std::size_t k = 0; k < n; ++k) {
            window.push_back(stepper::step_rk4(window.back(), c, dt));
            probe.max_div = std::max(
                probe.max_div, g.max_abs(g.divergence(window.back().u)));
            scale = std::max(scale,
                             std::abs(diag::basic_energy(window.back(), c)));
            if (window.size() == 3) {
                worst = std::max(
                    worst, diag::basic_energy_residuals(window, c).front());
                window.erase(window.begin());
            }
        }
        if (dt == dt_coarse) {
            coarse = worst;
        } else {
            probe.finest = worst;
            probe.scale = scale;
        }
    }
    probe.ratio = probe.finest > 0.0 ? coarse / probe.finest : 0.0;
    probe.ok = probe.ratio >= 3.5 && probe.finest <= 1e-6 * probe.scale;
    return probe;
}

void criterion_energy_law(const Grid& g) {
    const EnergyLawProbe p =
        energy_law_probe(g, FlowMode::compressible, 2.5e-4);
    record("criterion 3: energy balance residual drops 3.5x under dt "
           "halving and the finest stays below 1e-6 of scale",
           p.ok, qoi(p.ratio, 3.5) + " " + qoi(p.finest, 1e-6 * p.scale));
}

void criterion_incompressible_law(const Grid& g) {
    const EnergyLawProbe p =
        energy_law_probe(g, FlowMode::incompressible, 1e-3);
    record("criterion 10: incompressible energy balance matches the same "
           "contract with solenoidal states",
           p.ok && p.max_div <= 1e-9,
           qoi(p.ratio, 3.5) + " " + qoi(p.max_div, 1e-9));
}

// ===========================================================================
// Criterion 4: the singular-pairing identities on random states
// ===========================================================================

FlowState random_state(const Grid& g, Rng& rng, double eps, int max_mode,
                       double amp) {
    FlowState st = model::make_state(g, FlowMode::compressible, eps);
    st.phi = random_scalar(g, rng, max_mode, amp);
    st.u = random_vector(g, rng, max_mode, amp);
    const DirectorPair dir = random_director(g, rng, max_mode, 3.0 * amp);
    st.d = dir.d;
    st.ddot = dir.ddot;
    return st;
}

void criterion_cancellations(const Grid& g) {
    Rng rng(4242);
    double worst = 0.0;
    for (int trial = 0; trial < 200; ++trial) {
        const bool general = trial >= 100;
        const LeslieCoefficients c =
            general ? random_admissible(rng) : LeslieCoefficients{};
        const int band = general ? 4 : 8;
        const FlowState st =
            random_state(g, rng, rng.uniform(0.05, 0.9), band, 0.1);
        const diag::CancellationResiduals r =
            diag::cancellation_residuals(st, c);
        for (double v : {r.cs0.rel, r.cs1.rel, r.cs2.rel, r.dt_pair.rel}) {
            worst = std::max(worst, v);
        }
    }
    record("criterion 4: every named identity residual stays below 1e-9 "
           "over 200 random dealiased states",
           worst <= 1e-9, qoi(worst, 1e-9));
}

// ===========================================================================
// Criterion 5: sphere constraint without renormalization
// ===========================================================================

void criterion_sphere(const Grid& g) {
    const LeslieCoefficients c;
    const sweep::InitialData id = sweep::well_prepared_ic(g, 0.5, 2.0, 1);
    FlowState st = id.compressible;
    stepper::StepConfig sc;
    sc.scheme = stepper::Scheme::imex_acoustic;
    sc.dt = stepper::cfl_dt(st, c, sc.scheme);
    const double t_final = 1.0;
    const auto n = static_cast<std::size_t>(
        std::ceil(t_final / sc.dt - 1.0e-9));
    sc.dt = t_final / static_cast<double>(n);

    double unit = 0.0, orth = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        st = stepper::advance(st, c, sc);
        const auto drift = diag::constraint_drift(st);
        unit = std::max(unit, drift.first);
        orth = std::max(orth, drift.second);
    }
    record("criterion 5: director stays on the sphere through T = 1 "
           "without renormalization",
           unit <= 1e-6 && orth <= 1e-6, qoi(unit, 1e-6) + " " +
               qoi(orth, 1e-6));
}

// ===========================================================================
// Criterion 8: dissipation nonnegativity
// ===========================================================================

void criterion_dissipation() {
    const Grid g(32, 32);
    Rng rng(777);
    double worst = 0.0;
    for (int trial = 0; trial < 500; ++trial) {
        const LeslieCoefficients c = random_admissible(rng);
        const FlowState st = random_state(g, rng, 0.5, 5, 0.3);
        const diag::DsBreakdown b = diag::dissipation_Ds(st, c, 3);
        for (double v : {b.viscous_grad, b.viscous_div, b.stretch_mu1,
                         b.rotation, b.alignment, b.total}) {
            worst = std::min(worst, v);
        }
    }
    record("criterion 8: dissipation and each of its parts stay above "
           "-1e-12 over 500 admissible draws",
           worst >= -1e-12, qoi(worst, -1e-12));
}

// ===========================================================================
// Criterion 9: Picard against a dense Newton solve
// ===========================================================================

struct Packer {
    const Grid& g;
    std::size_t n;
    explicit Packer(const Grid& grid) : g(grid), n(grid.npoints()) {}

    Eigen::VectorXd pack(const FlowState& s) const {
        Eigen::VectorXd x(7 * n);
        const ScalarField* f[7] = {&s.phi,  &s.u[0],    &s.u[1],   &s.d[0],
                                   &s.d[1], &s.ddot[0], &s.ddot[1]};
        for (int b = 0; b < 7; ++b) {
            for (std::size_t i = 0; i < n; ++i) x[b * n + i] = (*f[b])[i];
        }
        return x;
    }
    FlowState unpack(const Eigen::VectorXd& x, double eps) const {
        FlowState s = model::make_state(g, FlowMode::compressible, eps);
        ScalarField* f[7] = {&s.phi,  &s.u[0],    &s.u[1],   &s.d[0],
                             &s.d[1], &s.ddot[0], &s.ddot[1]};
        for (int b = 0; b < 7; ++b) {
            for (std::size_t i = 0; i < n; ++i) (*f[b])[i] = x[b * n + i];
        }
        return s;
    }
};

void criterion_picard() {
    const Grid g(16, 16);
    const LeslieCoefficients c;
    const double eps = 0.5, dt = 1e-3;
    Rng rng(131);
    const FlowState s0 = random_state(g, rng, eps, 2, 0.05);

    const stepper::PicardResult pr = stepper::picard_solve(s0, c, dt);

    const Packer pk(g);
    const Eigen::VectorXd x0 = pk.pack(s0);
    const auto m = static_cast<Eigen::Index>(7 * pk.n);
    const auto residual = [&](const Eigen::VectorXd& x) -> Eigen::VectorXd {
        const FlowState f = model::compressible_rhs(pk.unpack(x, eps), c);
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
    const double gap = (pk.pack(pr.state) - x).lpNorm<Eigen::Infinity>();
    record("criterion 9: one implicit step matches the Newton solve within "
           "1e-9 in at most 15 sweeps",
           gap <= 1e-9 && pr.iterations <= 15,
           qoi(gap, 1e-9) + " " + qoi(static_cast<double>(pr.iterations), 15));
}

}  // namespace

int main() {
    return lcflow::test::harness::run("acceptance gate", [] {
        const Grid g64(64, 64);
        const LadderResults lad = run_ladders();
        criterion_rate(lad);
        criterion_alpha_dependence(lad);
        criterion_energy_law(g64);
        criterion_cancellations(g64);
        criterion_sphere(g64);
        criterion_uniformity(lad);
        criterion_density_ratio(lad);
        criterion_dissipation();
        criterion_picard();
        criterion_incompressible_law(g64);
    });
}
