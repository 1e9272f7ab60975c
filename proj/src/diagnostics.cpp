/// @file diagnostics.cpp
/// @brief Energy, dissipation, and identity observers over flow states.

#include "lcflow/diag.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <cstddef>
#include <utility>
#include <vector>

#include "lcflow/errors.hpp"
#include "lcflow/kernels.hpp"

namespace lcflow::diag {

namespace {

using model::FlowMode;

// ===========================================================================
// Pointwise helpers
// ===========================================================================

ScalarField pressure_weight(const Grid& g, const ScalarField& rho,
                            const LeslieCoefficients& c) {
    ScalarField w = g.scalar();
    const double* r = rho.data();
    double* out = w.data();
    kernels::parallel_for(w.size(),
                          [=, &c](std::size_t i) { out[i] = c.dp(r[i]); });
    return w;
}

ScalarField sound_weight(const Grid& g, const ScalarField& rho,
                         const LeslieCoefficients& c) {
    ScalarField w = g.scalar();
    const double* r = rho.data();
    double* out = w.data();
    kernels::parallel_for(
        w.size(), [=, &c](std::size_t i) { out[i] = c.dp(r[i]) / r[i]; });
    return w;
}

ScalarField inverse_field(const Grid& g, const ScalarField& rho) {
    ScalarField w = g.scalar();
    const double* r = rho.data();
    double* out = w.data();
    kernels::parallel_for(w.size(),
                          [=](std::size_t i) { out[i] = 1.0 / r[i]; });
    return w;
}

VectorField matvec(const Grid& g, const TensorField& m, const VectorField& v) {
    VectorField out = g.vector();
    const double* m00 = m.comp(0, 0).data();
    const double* m01 = m.comp(0, 1).data();
    const double* m10 = m.comp(1, 0).data();
    const double* m11 = m.comp(1, 1).data();
    const double* v0 = v.comp(0).data();
    const double* v1 = v.comp(1).data();
    double* o0 = out.comp(0).data();
    double* o1 = out.comp(1).data();
    kernels::parallel_for(out.size(), [=](std::size_t i) {
        o0[i] = m00[i] * v0[i] + m01[i] * v1[i];
        o1[i] = m10[i] * v0[i] + m11[i] * v1[i];
    });
    return out;
}

VectorField axpy(const Grid& g, double a, const VectorField& x,
                 const VectorField& y) {
    VectorField out = g.vector();
    const double* x0 = x.comp(0).data();
    const double* x1 = x.comp(1).data();
    const double* y0 = y.comp(0).data();
    const double* y1 = y.comp(1).data();
    double* o0 = out.comp(0).data();
    double* o1 = out.comp(1).data();
    kernels::parallel_for(out.size(), [=](std::size_t i) {
        o0[i] = a * x0[i] + y0[i];
        o1[i] = a * x1[i] + y1[i];
    });
    return out;
}

ScalarField quadratic_form(const Grid& g, const VectorField& d,
                           const TensorField& m) {
    ScalarField out = g.scalar();
    const double* d0 = d.comp(0).data();
    const double* d1 = d.comp(1).data();
    const double* m00 = m.comp(0, 0).data();
    const double* m01 = m.comp(0, 1).data();
    const double* m10 = m.comp(1, 0).data();
    const double* m11 = m.comp(1, 1).data();
    double* o = out.data();
    kernels::parallel_for(out.size(), [=](std::size_t i) {
        o[i] = d0[i] * (m00[i] * d0[i] + m01[i] * d1[i]) +
               d1[i] * (m10[i] * d0[i] + m11[i] * d1[i]);
    });
    return out;
}

double sq(double x) { return x * x; }

/// Pairing against a sign-changing weight, which the grid's weighted inner
/// product rejects by contract.
double signed_pairing(const Grid& g, const VectorField& a,
                      const VectorField& b, const ScalarField& w) {
    ScalarField prod = g.scalar();
    const double* a0 = a.comp(0).data();
    const double* a1 = a.comp(1).data();
    const double* b0 = b.comp(0).data();
    const double* b1 = b.comp(1).data();
    const double* ww = w.data();
    double* o = prod.data();
    kernels::parallel_for(prod.size(), [=](std::size_t i) {
        o[i] = ww[i] * (a0[i] * b0[i] + a1[i] * b1[i]);
    });
    return g.integral(prod);
}

void require_uniform_spacing(double dt0, double dt1) {
    if (!(dt0 > 0.0) || !(dt1 > 0.0))
        throw ConfigError("state history must advance in time");
    if (std::abs(dt1 - dt0) > 1e-9 * std::max(1.0, std::abs(dt0)))
        throw ConfigError("state history must be uniformly spaced in time");
}

/// (1+x)^gamma - gamma x - 1, organized so the quadratic leading order is
/// computed without cancellation for small |x|.
double pressure_bracket(double x, double gamma) {
    if (std::abs(x) <= 0.25) {
        double coef = 0.5 * gamma * (gamma - 1.0);
        double power = x * x;
        double sum = coef * power;
        for (int k = 2; k < 64; ++k) {
            coef *= (gamma - k) / (k + 1.0);
            power *= x;
            const double term = coef * power;
            sum += term;
            if (std::abs(term) <= 1e-18 * std::abs(sum)) break;
        }
        return sum;
    }
    return std::expm1(gamma * std::log1p(x)) - gamma * x;
}

/// <div sigma3, u> + lambda1 <ddot, ddot> + lambda1 <ddot, B d>
/// + lambda2 <ddot, A d>, the director coupling of the basic energy balance.
double coupling_rate(const FlowState& st, const LeslieCoefficients& c) {
    const Grid& g = *st.u.grid();
    const auto [A, B] = model::strain_and_vorticity(st.u);
    const VectorField Bd = matvec(g, B, st.d);
    const VectorField Ad = matvec(g, A, st.d);
    const TensorField s3 = model::stress_sigma3(st.u, st.d, st.ddot, c);
    const double l1 = c.lambda1();
    const double l2 = c.lambda2();
    return g.inner_product(g.divergence(s3), st.u) +
           l1 * g.inner_product(st.ddot, st.ddot) +
           l1 * g.inner_product(st.ddot, Bd) +
           l2 * g.inner_product(st.ddot, Ad);
}

Residual make_residual(double abs, double scale) {
    Residual r;
    r.abs = abs;
    r.rel = scale > 0.0 ? abs / scale : 0.0;
    return r;
}

}  // namespace

// ===========================================================================
// Core functionals
// ===========================================================================

double energy_Es(const FlowState& st, const LeslieCoefficients& c, int s) {
    assert(s >= 0 && s <= 4);
    const Grid& g = *st.u.grid();
    const ScalarField rho = model::density(st);
    double e = 0.0;
    if (st.mode == FlowMode::compressible) {
        const ScalarField wp = pressure_weight(g, rho, c);
        e += sq(g.sobolev_norm(st.phi, s, &wp));
    }
    e += sq(g.sobolev_norm(st.u, s, &rho));
    e += sq(g.sobolev_norm(st.ddot, s, &rho));
    e += c.kappa * sq(g.sobolev_norm(g.jacobian(st.d), s));
    return e;
}

DsBreakdown dissipation_Ds(const FlowState& st, const LeslieCoefficients& c,
                           int s) {
    assert(s >= 0 && s <= 4);
    const Grid& g = *st.u.grid();
    const double l1 = c.lambda1();
    const double l2 = c.lambda2();

    DsBreakdown out;
    out.viscous_grad = 0.5 * c.mu4 * sq(g.sobolev_norm(g.jacobian(st.u), s));
    out.viscous_div =
        (0.5 * c.mu4 + c.xi) * sq(g.sobolev_norm(g.divergence(st.u), s));

    double sum_mu1 = 0.0;
    double sum_align = 0.0;
    double sum_rot = 0.0;
    double sum_relax = 0.0;
    double sum_cross = 0.0;
    for (int mx = 0; mx <= s; ++mx) {
        for (int my = 0; my + mx <= s; ++my) {
            VectorField um = g.vector();
            VectorField em = g.vector();
            for (int i = 0; i < 2; ++i) {
                um.comp(i) = g.derivative(st.u.comp(i), mx, my);
                em.comp(i) = g.derivative(st.ddot.comp(i), mx, my);
            }
            const auto [Am, Bm] = model::strain_and_vorticity(um);
            const ScalarField dAd = quadratic_form(g, st.d, Am);
            const VectorField Ad = matvec(g, Am, st.d);
            const VectorField Nm = axpy(g, 1.0, matvec(g, Bm, st.d), em);
            sum_mu1 += sq(g.l2_norm(dAd));
            sum_align += sq(g.l2_norm(Ad));
            if (l1 != 0.0) {
                sum_rot += sq(g.l2_norm(axpy(g, l2 / l1, Ad, Nm)));
            } else {
                sum_relax += sq(g.l2_norm(Nm));
                sum_cross += g.inner_product(Nm, Ad);
            }
        }
    }
    out.stretch_mu1 = c.mu1 * sum_mu1;
    if (l1 != 0.0) {
        out.rotation_sum = sum_rot;
        out.rotation = -l1 * sum_rot;
        out.alignment = (c.mu5 + c.mu6 + l2 * l2 / l1) * sum_align;
    } else {
        out.rotation_sum = sum_relax;
        out.rotation = 0.0;
        out.alignment = (c.mu5 + c.mu6) * sum_align + 2.0 * l2 * sum_cross;
    }
    out.total = out.viscous_grad + out.viscous_div + out.stretch_mu1 +
                out.rotation + out.alignment;
    return out;
}

double advective_As(const FlowState& st, const LeslieCoefficients& c, int s) {
    (void)c;
    assert(s >= 0 && s <= 4);
    const Grid& g = *st.u.grid();
    const double phi_h =
        st.mode == FlowMode::compressible
            ? g.sobolev_norm(st.phi, s, nullptr, true)
            : 0.0;
    const double gd_h = g.sobolev_norm(g.jacobian(st.d), s, nullptr, true);
    const double dd = g.sobolev_norm(st.ddot, s);
    const double low = phi_h + g.sobolev_norm(st.u, s, nullptr, true) + gd_h +
                       dd;
    const double high =
        g.sobolev_norm(g.jacobian(st.u), s) + phi_h + gd_h + dd;
    return low * high;
}

double basic_energy(const FlowState& st, const LeslieCoefficients& c) {
    const Grid& g = *st.u.grid();
    const ScalarField rho = model::density(st);
    double e = 0.5 * g.inner_product(st.u, st.u, rho) +
               0.5 * g.inner_product(st.ddot, st.ddot, rho);
    const TensorField gd = g.jacobian(st.d);
    e += 0.5 * c.kappa * g.inner_product(gd, gd);
    if (st.mode == FlowMode::compressible)
        e += pi_functional(st, c).integral;
    return e;
}

std::vector<double> basic_energy_residuals(const std::vector<FlowState>& hist,
                                           const LeslieCoefficients& c) {
    if (hist.size() < 3)
        throw ConfigError("energy residuals need at least three states");
    const double dt = hist[1].time - hist[0].time;
    for (std::size_t i = 1; i + 1 < hist.size(); ++i)
        require_uniform_spacing(dt, hist[i + 1].time - hist[i].time);

    std::vector<double> energies(hist.size());
    for (std::size_t i = 0; i < hist.size(); ++i)
        energies[i] = basic_energy(hist[i], c);

    std::vector<double> out;
    out.reserve(hist.size() - 2);
    for (std::size_t i = 1; i + 1 < hist.size(); ++i) {
        const FlowState& st = hist[i];
        const Grid& g = *st.u.grid();
        const double rate = (energies[i + 1] - energies[i - 1]) / (2.0 * dt);
        double dissip =
            0.5 * c.mu4 * sq(g.l2_norm(g.jacobian(st.u)));
        if (st.mode == FlowMode::compressible)
            dissip += (0.5 * c.mu4 + c.xi) * sq(g.l2_norm(g.divergence(st.u)));
        out.push_back(std::abs(rate + dissip - coupling_rate(st, c)));
    }
    return out;
}

// ===========================================================================
// Pressure potential
// ===========================================================================

PiResult pi_functional(const FlowState& st, const LeslieCoefficients& c) {
    const Grid& g = *st.u.grid();
    PiResult out{g.scalar(), 0.0};
    if (st.mode == FlowMode::incompressible) return out;

    const double eps = st.eps;
    const double* phi = st.phi.data();
    double* pi = out.field.data();
    if (c.gamma == 2.0) {
        const double a = c.a_tilde;
        kernels::parallel_for(out.field.size(), [=](std::size_t i) {
            pi[i] = a * phi[i] * phi[i];
        });
    } else {
        const double scale = c.a_tilde / ((c.gamma - 1.0) * eps * eps);
        const double gamma = c.gamma;
        kernels::parallel_for(out.field.size(), [=](std::size_t i) {
            pi[i] = scale * pressure_bracket(eps * phi[i], gamma);
        });
    }
    if (g.min_value(model::density(st)) <= 0.0)
        throw NumericalError("pressure potential needs positive density");
    out.integral = g.integral(out.field);
    return out;
}

// ===========================================================================
// Modulated energy
// ===========================================================================

double modulated_energy(const FlowState& se, const FlowState& sref,
                        const LeslieCoefficients& c) {
    const Grid& g = *se.u.grid();
    const Grid& gr = *sref.u.grid();
    if (g.nx() != gr.nx() || g.ny() != gr.ny())
        throw ConfigError("modulated energy needs matching grids");
    if (std::abs(se.time - sref.time) >
        1e-12 * std::max(1.0, std::abs(se.time)))
        throw ConfigError("modulated energy needs matching times");

    const ScalarField rho = model::density(se);
    ScalarField sqrho = g.scalar();
    {
        const double* r = rho.data();
        double* q = sqrho.data();
        kernels::parallel_for(sqrho.size(),
                              [=](std::size_t i) { q[i] = std::sqrt(r[i]); });
    }

    auto weighted_diff = [&](const VectorField& a, const VectorField& b) {
        VectorField out = g.vector();
        const double* q = sqrho.data();
        for (int i = 0; i < 2; ++i) {
            const double* ai = a.comp(i).data();
            const double* bi = b.comp(i).data();
            double* oi = out.comp(i).data();
            kernels::parallel_for(out.size(), [=](std::size_t k) {
                oi[k] = q[k] * ai[k] - bi[k];
            });
        }
        return out;
    };

    double e = sq(g.l2_norm(weighted_diff(se.u, sref.u)));
    e += sq(g.l2_norm(weighted_diff(se.ddot, sref.ddot)));
    const VectorField dd = axpy(g, -1.0, sref.d, se.d);
    e += c.kappa * sq(g.l2_norm(g.jacobian(dd)));
    e += sq(g.l2_norm(dd));
    e += pi_functional(se, c).integral;
    return e;
}

// ===========================================================================
// Algebraic identities
// ===========================================================================

CancellationResiduals cancellation_residuals(const FlowState& st,
                                             const LeslieCoefficients& c) {
    const Grid& g = *st.u.grid();
    FlowState x = st;
    g.dealias(x.u);
    g.dealias(x.d);
    g.dealias(x.ddot);
    if (x.mode == FlowMode::compressible) g.dealias(x.phi);

    CancellationResiduals out;
    const double l1 = c.lambda1();
    const double l2 = c.lambda2();

    // Elastic stress against the transported director.
    {
        const TensorField gd = g.jacobian(x.d);
        VectorField advd = g.vector();
        const double* u0 = x.u.comp(0).data();
        const double* u1 = x.u.comp(1).data();
        for (int i = 0; i < 2; ++i) {
            const double* di0 = gd.comp(i, 0).data();
            const double* di1 = gd.comp(i, 1).data();
            double* o = advd.comp(i).data();
            kernels::parallel_for(advd.size(), [=](std::size_t k) {
                o[k] = u0[k] * di0[k] + u1[k] * di1[k];
            });
        }
        const double t1 =
            c.kappa * g.inner_product(g.laplacian(x.d), advd);
        const double t2 = g.inner_product(
            g.divergence(model::stress_sigma2(x.d, c)), x.u);
        out.cs1 =
            make_residual(std::abs(t1 + t2), std::max(std::abs(t1), std::abs(t2)));
    }

    // Leslie stress against the director relaxation.
    {
        const auto [A, B] = model::strain_and_vorticity(x.u);
        const VectorField Ad = matvec(g, A, x.d);
        const VectorField Bd = matvec(g, B, x.d);
        const VectorField N = axpy(g, 1.0, Bd, x.ddot);
        const ScalarField dAd = quadratic_form(g, x.d, A);
        const TensorField s3 = model::stress_sigma3(x.u, x.d, x.ddot, c);

        const double ta = g.inner_product(g.divergence(s3), x.u);
        const double tb = l1 * g.inner_product(x.ddot, x.ddot);
        const double tc = l1 * g.inner_product(x.ddot, Bd);
        const double td = l2 * g.inner_product(x.ddot, Ad);
        const double lhs = ta + tb + tc + td;

        const double r_mu1 = -c.mu1 * g.inner_product(dAd, dAd);
        double r_rot;
        double r_align;
        if (l1 != 0.0) {
            const VectorField relax = axpy(g, l2 / l1, Ad, N);
            r_rot = l1 * g.inner_product(relax, relax);
            r_align =
                -(c.mu5 + c.mu6 + l2 * l2 / l1) * g.inner_product(Ad, Ad);
        } else {
            r_rot = 2.0 * l2 * g.inner_product(N, Ad);
            r_align = -(c.mu5 + c.mu6) * g.inner_product(Ad, Ad);
        }
        const double rhs = r_mu1 + r_rot + r_align;
        const double scale = std::max(
            {std::abs(ta), std::abs(tb), std::abs(tc), std::abs(td),
             std::abs(r_mu1), std::abs(r_rot), std::abs(r_align)});
        out.cs2 = make_residual(std::abs(lhs - rhs), scale);
    }

    if (x.mode != FlowMode::compressible) return out;

    const ScalarField rho = model::density(x);
    const ScalarField wp = pressure_weight(g, rho, c);
    const VectorField gphi = g.gradient(x.phi);
    const double over_eps = 1.0 / x.eps;

    // Pressure gradient against the mass flux.
    {
        const double t1 =
            over_eps * g.inner_product(g.divergence(x.u), x.phi, wp);
        const double t2 = over_eps * g.inner_product(gphi, x.u, wp);
        ScalarField wz = g.scalar();
        {
            const double* r = rho.data();
            const double* phi = x.phi.data();
            double* o = wz.data();
            kernels::parallel_for(wz.size(), [=, &c](std::size_t i) {
                o[i] = c.ddp(r[i]) * phi[i];
            });
        }
        const double rhs = -signed_pairing(g, gphi, x.u, wz);
        out.cs0 = make_residual(
            std::abs(t1 + t2 - rhs),
            std::max({std::abs(t1), std::abs(t2), std::abs(rhs)}));
    }

    // The same pairing on the tendencies.
    {
        const FlowState f = model::compressible_rhs(x, c);
        const double sphi =
            over_eps * g.inner_product(g.divergence(f.u), f.phi, wp);
        const double su =
            over_eps * g.inner_product(g.gradient(f.phi), f.u, wp);
        ScalarField wz = g.scalar();
        {
            const double* r = rho.data();
            const double* fphi = f.phi.data();
            double* o = wz.data();
            kernels::parallel_for(wz.size(), [=, &c](std::size_t i) {
                o[i] = c.ddp(r[i]) * fphi[i];
            });
        }
        const double z = signed_pairing(g, gphi, f.u, wz);
        out.dt_pair = make_residual(
            std::abs(sphi + su + z),
            std::max({std::abs(sphi), std::abs(su), std::abs(z)}));
    }
    return out;
}

std::pair<double, double> constraint_drift(const FlowState& st) {
    const Grid& g = *st.u.grid();
    ScalarField len = g.scalar();
    ScalarField tang = g.scalar();
    const double* d0 = st.d.comp(0).data();
    const double* d1 = st.d.comp(1).data();
    const double* e0 = st.ddot.comp(0).data();
    const double* e1 = st.ddot.comp(1).data();
    double* l = len.data();
    double* t = tang.data();
    kernels::parallel_for(len.size(), [=](std::size_t i) {
        l[i] = std::sqrt(d0[i] * d0[i] + d1[i] * d1[i]) - 1.0;
        t[i] = d0[i] * e0[i] + d1[i] * e1[i];
    });
    return {g.max_abs(len), g.max_abs(tang)};
}

// ===========================================================================
// Uniform-bound monitors
// ===========================================================================

UniformMonitors uniform_bound_monitors(const FlowState& st,
                                       const LeslieCoefficients& c, int s) {
    const Grid& g = *st.u.grid();
    UniformMonitors out{};
    out.div_u_over_eps =
        g.sobolev_norm(g.divergence(st.u), std::max(s - 2, 0)) / st.eps;

    if (st.mode == FlowMode::incompressible) {
        out.sqrt_rho_ratio = 0.0;
        return out;
    }
    const ScalarField rho = model::density(st);
    ScalarField dev = g.scalar();
    {
        const double* r = rho.data();
        double* o = dev.data();
        kernels::parallel_for(dev.size(), [=](std::size_t i) {
            o[i] = std::sqrt(r[i]) - 1.0;
        });
    }
    const double num = g.l2_norm(dev);
    const double den =
        st.eps * std::sqrt(std::max(pi_functional(st, c).integral, 0.0));
    out.sqrt_rho_ratio = (num == 0.0 || den == 0.0) ? 0.0 : num / den;
    return out;
}

void QWeight::observe(double time, double divu_linf) {
    if (primed_)
        integral_ += 0.5 * (divu_linf + last_value_) * (time - last_time_);
    last_time_ = time;
    last_value_ = divu_linf;
    primed_ = true;
}

// ===========================================================================
// Instant and global functionals
// ===========================================================================

double instant_E_eta(const FlowState& st, const LeslieCoefficients& c,
                     const DiagConfig& cfg) {
    const Grid& g = *st.u.grid();
    const int s = cfg.s;
    const int sm1 = std::max(s - 1, 0);
    const double eta = cfg.eta;
    const double eps = st.eps;

    const VectorField gphi = st.mode == FlowMode::compressible
                                 ? g.gradient(st.phi)
                                 : g.vector();
    const VectorField upg = axpy(g, 1.0, gphi, st.u);
    const VectorField dpd = axpy(g, 1.0, st.d, st.ddot);

    double e = energy_Es(st, c, s);
    e += eps * eta * sq(g.sobolev_norm(upg, sm1));
    e += eta * sq(g.sobolev_norm(dpd, s, nullptr, true));
    e -= eps * eta * sq(g.sobolev_norm(st.u, sm1));
    e -= eps * eta * sq(g.sobolev_norm(gphi, sm1));
    e -= eta * sq(g.sobolev_norm(st.ddot, s, nullptr, true));
    e -= eta * sq(g.sobolev_norm(st.d, s, nullptr, true));
    return e;
}

double instant_D_eta(const FlowState& st, const LeslieCoefficients& c,
                     const DiagConfig& cfg) {
    const Grid& g = *st.u.grid();
    const int s = cfg.s;
    const double eta = cfg.eta;
    const DsBreakdown ds = dissipation_Ds(st, c, s);
    const ScalarField rho = model::density(st);

    double d = ds.total;
    if (st.mode == FlowMode::compressible) {
        const ScalarField w = sound_weight(g, rho, c);
        d += 0.5 * eta *
             sq(g.sobolev_norm(g.gradient(st.phi), std::max(s - 1, 0), &w));
    }
    const ScalarField invrho = inverse_field(g, rho);
    d += 0.75 * c.kappa * eta *
         sq(g.sobolev_norm(g.jacobian(st.d), s, &invrho, true));
    d -= eta * (cfg.big_c + cfg.big_c0) *
         (sq(g.sobolev_norm(g.jacobian(st.u), s)) + ds.rotation_sum);
    return d;
}

double global_D(const FlowState& st, const LeslieCoefficients& c, int s) {
    const Grid& g = *st.u.grid();
    const ScalarField rho = model::density(st);
    double d = dissipation_Ds(st, c, s).total;
    if (st.mode == FlowMode::compressible) {
        const ScalarField w = sound_weight(g, rho, c);
        d += sq(g.sobolev_norm(g.gradient(st.phi), std::max(s - 1, 0), &w));
    }
    const ScalarField invrho = inverse_field(g, rho);
    d += sq(g.sobolev_norm(g.jacobian(st.d), s, &invrho, true));
    return d;
}

double dt_energy(const FlowState& prev, const FlowState& cur,
                 const FlowState& next, const LeslieCoefficients& c, int s) {
    const Grid& g = *cur.u.grid();
    require_uniform_spacing(cur.time - prev.time, next.time - cur.time);
    const double inv2dt = 0.5 / (cur.time - prev.time);
    const int so = std::max(s - 2, 0);

    VectorField du = g.vector();
    for (int i = 0; i < 2; ++i) {
        const double* pn = next.u.comp(i).data();
        const double* pp = prev.u.comp(i).data();
        double* o = du.comp(i).data();
        kernels::parallel_for(du.size(), [=](std::size_t k) {
            o[k] = inv2dt * (pn[k] - pp[k]);
        });
    }
    const ScalarField rho = model::density(cur);
    double e = sq(g.sobolev_norm(du, so, &rho));

    if (cur.mode == FlowMode::compressible) {
        ScalarField dphi = g.scalar();
        const double* pn = next.phi.data();
        const double* pp = prev.phi.data();
        double* o = dphi.data();
        kernels::parallel_for(dphi.size(), [=](std::size_t k) {
            o[k] = inv2dt * (pn[k] - pp[k]);
        });
        const ScalarField wp = pressure_weight(g, rho, c);
        e += sq(g.sobolev_norm(dphi, so, &wp));
    }
    return e;
}

// ===========================================================================
// Flat report
// ===========================================================================

const std::vector<ReportField>& report_fields() {
    static const std::vector<ReportField> fields = {
        {"time", &EnergyReport::time},
        {"energy_Es", &EnergyReport::e_s},
        {"dissipation_Ds", &EnergyReport::d_s},
        {"advective_As", &EnergyReport::a_s},
        {"basic_energy", &EnergyReport::basic_energy},
        {"pi_integral", &EnergyReport::pi_integral},
        {"instant_E_eta", &EnergyReport::instant_e_eta},
        {"instant_D_eta", &EnergyReport::instant_d_eta},
        {"global_D", &EnergyReport::global_d},
        {"dt_energy", &EnergyReport::dt_energy},
        {"div_u_over_eps", &EnergyReport::div_u_over_eps},
        {"sqrt_rho_ratio", &EnergyReport::sqrt_rho_ratio},
        {"constraint_drift_max", &EnergyReport::constraint_drift_max},
        {"cs0_abs", &EnergyReport::cs0_abs},
        {"cs0_rel", &EnergyReport::cs0_rel},
        {"cs1_abs", &EnergyReport::cs1_abs},
        {"cs1_rel", &EnergyReport::cs1_rel},
        {"cs2_abs", &EnergyReport::cs2_abs},
        {"cs2_rel", &EnergyReport::cs2_rel},
        {"dt_pair_abs", &EnergyReport::dt_pair_abs},
        {"dt_pair_rel", &EnergyReport::dt_pair_rel},
        {"q_weight", &EnergyReport::q_weight},
    };
    return fields;
}

EnergyReport make_report(const FlowState& st, const LeslieCoefficients& c,
                         const DiagConfig& cfg, const FlowState* prev,
                         const FlowState* next, double q_integral) {
    EnergyReport r;
    r.time = st.time;
    r.e_s = energy_Es(st, c, cfg.s);
    r.d_s = dissipation_Ds(st, c, cfg.s).total;
    r.a_s = advective_As(st, c, cfg.s);
    r.basic_energy = basic_energy(st, c);
    r.pi_integral = pi_functional(st, c).integral;
    r.instant_e_eta = instant_E_eta(st, c, cfg);
    r.instant_d_eta = instant_D_eta(st, c, cfg);
    r.global_d = global_D(st, c, cfg.s);
    r.dt_energy =
        (prev != nullptr && next != nullptr)
            ? diag::dt_energy(*prev, st, *next, c, cfg.s)
            : 0.0;

    const UniformMonitors mon = uniform_bound_monitors(st, c, cfg.s);
    r.div_u_over_eps = mon.div_u_over_eps;
    r.sqrt_rho_ratio = mon.sqrt_rho_ratio;

    const auto drift = constraint_drift(st);
    r.constraint_drift_max = std::max(drift.first, drift.second);

    const CancellationResiduals cr = cancellation_residuals(st, c);
    r.cs0_abs = cr.cs0.abs;
    r.cs0_rel = cr.cs0.rel;
    r.cs1_abs = cr.cs1.abs;
    r.cs1_rel = cr.cs1.rel;
    r.cs2_abs = cr.cs2.abs;
    r.cs2_rel = cr.cs2.rel;
    r.dt_pair_abs = cr.dt_pair.abs;
    r.dt_pair_rel = cr.dt_pair.rel;

    r.q_weight = std::exp(cfg.q_c * q_integral);
    return r;
}

}  // namespace lcflow::diag
