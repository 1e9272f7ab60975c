/// @file sweep.cpp
/// @brief Mach-limit experiment driver: matched well-prepared initial data,
///        an epsilon ladder of compressible runs against one incompressible
///        reference, uniform-bound monitoring, and the rate fit.

#include "lcflow/sweep.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>
#include <utility>

#include "lcflow/diag.hpp"
#include "lcflow/errors.hpp"

namespace lcflow::sweep {
namespace {

constexpr double kAmplitudeBudget = 0.25;
constexpr int kScalingOrder = 3;

// ===========================================================================
// Seeded solenoidal velocity
// ===========================================================================

struct Splitmix {
    std::uint64_t state;
    std::uint64_t next() {
        state += 0x9e3779b97f4a7c15ull;
        std::uint64_t z = state;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }
    double symmetric() {
        return 2.0 * (static_cast<double>(next() >> 11) * 0x1.0p-53) - 1.0;
    }
};

/// Band-limited random trigonometric field per component, projected onto
/// the solenoidal subspace and rescaled to the requested Sobolev size.
VectorField seeded_velocity(const Grid& g, std::uint64_t seed,
                            double amplitude) {
    Splitmix rng{seed};
    VectorField u = g.vector();
    for (int comp = 0; comp < 2; ++comp) {
        std::vector<std::array<double, 4>> modes;
        for (int kx = 0; kx <= 3; ++kx) {
            for (int ky = -3; ky <= 3; ++ky) {
                if (kx == 0 && ky <= 0) continue;
                modes.push_back({static_cast<double>(kx),
                                 static_cast<double>(ky), rng.symmetric(),
                                 rng.symmetric()});
            }
        }
        u.comp(comp) = g.sample([&modes](double x, double y) {
            double v = 0.0;
            for (const auto& m : modes) {
                const double phase = m[0] * x + m[1] * y;
                v += m[2] * std::cos(phase) + m[3] * std::sin(phase);
            }
            return v;
        });
    }
    VectorField w = g.leray_project(u);
    const double size = g.sobolev_norm(w, kScalingOrder);
    if (!(size > 0.0)) throw NumericalError("seeded velocity collapsed to zero");
    const double scale = amplitude / size;
    for (int comp = 0; comp < 2; ++comp) {
        for (std::size_t i = 0; i < w.comp(comp).size(); ++i) {
            w.comp(comp)[i] *= scale;
        }
    }
    return w;
}

bool state_finite(const model::FlowState& st) {
    return st.phi.finite() && st.u.finite() && st.d.finite() &&
           st.ddot.finite();
}

std::string abort_message(const char* label, const char* detail) {
    std::ostringstream msg;
    msg << "numerical-abort " << label << ": " << detail;
    return msg.str();
}

}  // namespace

// ===========================================================================
// Well-prepared initial data
// ===========================================================================

double limit_exponent(double alpha0) {
    return std::min({2.0, alpha0, 1.0 + 0.5 * alpha0});
}

InitialData well_prepared_ic(const Grid& g, double eps, double alpha0,
                             std::uint64_t seed, double amplitude) {
    if (!(eps > 0.0) || eps > 1.0) {
        throw ConfigError("well-prepared data needs eps in (0, 1]");
    }
    if (!(alpha0 > 0.0)) {
        throw ConfigError("well-prepared data needs alpha0 > 0");
    }
    if (!(amplitude > 0.0) || amplitude > kAmplitudeBudget) {
        std::ostringstream msg;
        msg << "amplitude " << amplitude << " outside the smallness budget (0, "
            << kAmplitudeBudget << "]";
        throw ConfigError(msg.str());
    }

    InitialData out{model::make_state(g, model::FlowMode::compressible, eps),
                    model::make_state(g, model::FlowMode::incompressible, eps)};

    const double a = amplitude;
    const VectorField u0 = seeded_velocity(g, seed, a);
    const ScalarField theta = g.sample(
        [a](double x, double y) { return a * (std::sin(x) + std::cos(y)); });
    const ScalarField rate = g.sample([a](double x, double y) {
        return a * (std::cos(x) - 0.5 * std::sin(y));
    });

    const double phi_scale = std::pow(eps, 0.5 * alpha0);
    out.compressible.phi = g.sample([phi_scale](double x, double y) {
        const double psi = 0.125 * (std::cos(x) * std::cos(y) +
                                    0.5 * std::sin(2.0 * x) * std::sin(y));
        return phi_scale * psi;
    });

    for (model::FlowState* st : {&out.compressible, &out.incompressible}) {
        st->u = u0;
        for (std::size_t i = 0; i < theta.size(); ++i) {
            const double c = std::cos(theta[i]);
            const double s = std::sin(theta[i]);
            st->d.comp(0)[i] = c;
            st->d.comp(1)[i] = s;
            st->ddot.comp(0)[i] = -rate[i] * s;
            st->ddot.comp(1)[i] = rate[i] * c;
        }
    }
    return out;
}

// ===========================================================================
// Rate fit
// ===========================================================================

FitOutcome fit_rate(const std::vector<double>& eps_list,
                    const std::vector<double>& values) {
    if (eps_list.size() != values.size()) {
        throw ConfigError("rate fit needs matching ladder and value lengths");
    }
    if (eps_list.size() < 2) {
        throw ConfigError("rate fit needs at least two points");
    }
    const std::size_t n = eps_list.size();
    std::vector<double> lx(n), ly(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (!(eps_list[i] > 0.0)) {
            throw ConfigError("rate fit needs strictly positive eps");
        }
        if (!(values[i] > 0.0)) {
            throw ConfigError("rate fit needs strictly positive values");
        }
        lx[i] = std::log(eps_list[i]);
        ly[i] = std::log(values[i]);
    }
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += lx[i];
        my += ly[i];
    }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += (lx[i] - mx) * (lx[i] - mx);
        sxy += (lx[i] - mx) * (ly[i] - my);
    }
    if (!(sxx > 0.0)) {
        throw ConfigError("rate fit needs at least two distinct eps");
    }
    FitOutcome out;
    out.fitted = true;
    out.beta_hat = sxy / sxx;
    const double intercept = my - out.beta_hat * mx;
    double ss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double r = ly[i] - (intercept + out.beta_hat * lx[i]);
        ss += r * r;
    }
    out.residual_rms = std::sqrt(ss / static_cast<double>(n));
    return out;
}

// ===========================================================================
// The sweep
// ===========================================================================

SweepResult mach_sweep(const SweepConfig& cfg) {
    if (cfg.eps_ladder.empty()) {
        throw ConfigError("sweep needs a nonempty eps ladder");
    }
    for (std::size_t i = 0; i < cfg.eps_ladder.size(); ++i) {
        const double e = cfg.eps_ladder[i];
        if (!(e > 0.0) || e > 1.0) {
            throw ConfigError("sweep eps values must lie in (0, 1]");
        }
        if (i > 0 && !(e < cfg.eps_ladder[i - 1])) {
            throw ConfigError("sweep eps ladder must decrease strictly");
        }
    }
    if (!(cfg.alpha0 > 0.0)) throw ConfigError("sweep needs alpha0 > 0");
    if (!(cfg.t_final > 0.0)) throw ConfigError("sweep needs t_final > 0");
    const std::vector<std::string> violations =
        model::validate_coefficients(cfg.coefficients);
    if (!violations.empty()) {
        throw ConfigError("sweep coefficients inadmissible: " +
                          violations.front());
    }
    for (double t : cfg.sample_times) {
        if (!(t > 0.0) || !(t < cfg.t_final)) {
            throw ConfigError("sample times must lie inside (0, t_final)");
        }
    }

    const Grid g(cfg.nx, cfg.ny);
    SweepResult res;
    res.beta0 = limit_exponent(cfg.alpha0);

    std::vector<InitialData> data;
    data.reserve(cfg.eps_ladder.size());
    for (double e : cfg.eps_ladder) {
        data.push_back(well_prepared_ic(g, e, cfg.alpha0, cfg.seed,
                                        cfg.amplitude));
    }

    double dt = cfg.dt;
    if (!(dt > 0.0)) {
        dt = stepper::cfl_dt(data.front().incompressible, cfg.coefficients,
                             stepper::Scheme::explicit_rk4);
        for (const InitialData& d : data) {
            dt = std::min(dt, stepper::cfl_dt(d.compressible,
                                              cfg.coefficients, cfg.scheme));
        }
    }
    const auto n_steps = static_cast<std::size_t>(
        std::max(1.0, std::ceil(cfg.t_final / dt - 1.0e-9)));
    dt = cfg.t_final / static_cast<double>(n_steps);

    std::vector<std::size_t> sample_steps{0, n_steps};
    for (double t : cfg.sample_times) {
        const auto k = static_cast<std::size_t>(std::llround(t / dt));
        sample_steps.push_back(std::clamp<std::size_t>(k, 1, n_steps));
    }
    std::sort(sample_steps.begin(), sample_steps.end());
    sample_steps.erase(std::unique(sample_steps.begin(), sample_steps.end()),
                       sample_steps.end());

    // The incompressible reference runs first; every ladder rung compares
    // against the same stored snapshots.
    std::vector<model::FlowState> ref;
    ref.reserve(sample_steps.size());
    {
        model::FlowState st = data.front().incompressible;
        stepper::StepConfig sc;
        sc.dt = dt;
        sc.scheme = stepper::Scheme::explicit_rk4;
        std::size_t cursor = 0;
        if (sample_steps[cursor] == 0) {
            ref.push_back(st);
            ++cursor;
        }
        for (std::size_t k = 1; k <= n_steps; ++k) {
            try {
                st = stepper::advance(st, cfg.coefficients, sc);
            } catch (const NumericalError& err) {
                res.failure = abort_message("reference", err.what());
                return res;
            }
            if (!state_finite(st)) {
                res.failure = abort_message("reference", "nonfinite state");
                return res;
            }
            if (cursor < sample_steps.size() && sample_steps[cursor] == k) {
                ref.push_back(st);
                ++cursor;
            }
        }
    }

    for (std::size_t r = 0; r < cfg.eps_ladder.size(); ++r) {
        RunSeries run;
        run.eps = cfg.eps_ladder[r];
        model::FlowState st = data[r].compressible;
        stepper::StepConfig sc;
        sc.dt = dt;
        sc.scheme = cfg.scheme;

        const auto monitor = [&run, &cfg](const model::FlowState& s) {
            const diag::UniformMonitors m =
                diag::uniform_bound_monitors(s, cfg.coefficients, cfg.s);
            run.max_div_monitor = std::max(run.max_div_monitor,
                                           m.div_u_over_eps);
            run.max_sqrt_rho_ratio = std::max(run.max_sqrt_rho_ratio,
                                              m.sqrt_rho_ratio);
        };
        const auto sample = [&run, &ref, &cfg](const model::FlowState& s,
                                               std::size_t slot) {
            run.times.push_back(s.time);
            run.modulated.push_back(
                diag::modulated_energy(s, ref[slot], cfg.coefficients));
        };

        std::size_t cursor = 0;
        monitor(st);
        if (sample_steps[cursor] == 0) {
            sample(st, cursor);
            ++cursor;
        }
        bool aborted = false;
        std::ostringstream label;
        label << "eps=" << run.eps;
        const std::string rung = label.str();
        for (std::size_t k = 1; k <= n_steps; ++k) {
            try {
                st = stepper::advance(st, cfg.coefficients, sc);
            } catch (const NumericalError& err) {
                res.failure = abort_message(rung.c_str(), err.what());
                aborted = true;
                break;
            }
            if (!state_finite(st)) {
                res.failure = abort_message(rung.c_str(), "nonfinite state");
                aborted = true;
                break;
            }
            monitor(st);
            if (cursor < sample_steps.size() && sample_steps[cursor] == k) {
                sample(st, cursor);
                ++cursor;
            }
        }
        if (!aborted) run.terminal_modulated = run.modulated.back();
        res.runs.push_back(std::move(run));
        if (aborted) return res;
    }

    if (cfg.eps_ladder.size() >= 2) {
        std::vector<double> terminals;
        terminals.reserve(res.runs.size());
        for (const RunSeries& r : res.runs) {
            terminals.push_back(r.terminal_modulated);
        }
        try {
            res.fit = fit_rate(cfg.eps_ladder, terminals);
        } catch (const ConfigError&) {
            res.failure = "degenerate-terminal-values";
        }
    }
    return res;
}

}  // namespace lcflow::sweep
