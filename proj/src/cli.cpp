/// @file cli.cpp
/// @brief Mode orchestration (marching runs, sweeps, identity checks,
///        coefficient validation) and the command-line front end.

#include "lcflow/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <set>
#include <sstream>
#include <utility>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "CLI11.hpp"
#include "lcflow/errors.hpp"
#include "lcflow/sweep.hpp"

namespace lcflow::cli {
namespace {

namespace fs = std::filesystem;

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string fmt_list(const std::vector<double>& v) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i > 0) out += ", ";
        out += fmt(v[i]);
    }
    return out;
}

const std::set<std::string>& known_keys() {
    static const std::set<std::string> keys{
        "run.mode",          "run.eps",
        "run.t_final",       "run.dt",
        "run.scheme",        "run.cadence",
        "run.out",           "run.seed",
        "run.threads",       "run.snapshot_every",
        "grid.nx",           "grid.ny",
        "coefficients.mu1",  "coefficients.mu2",
        "coefficients.mu3",  "coefficients.mu4",
        "coefficients.mu5",  "coefficients.mu6",
        "coefficients.xi",   "coefficients.kappa",
        "coefficients.a_tilde", "coefficients.gamma",
        "diagnostics.s",     "diagnostics.eta",
        "diagnostics.big_c", "diagnostics.big_c0",
        "diagnostics.q_c",   "ic.amplitude",
        "ic.alpha0",         "sweep.ladder",
        "sweep.sample_times", "check.samples",
        "check.tol",
    };
    return keys;
}

std::size_t get_size(const io::ConfigMap& m, const std::string& key,
                     std::size_t fallback, std::size_t least) {
    const long long v =
        io::get_int(m, key, static_cast<long long>(fallback));
    if (v < static_cast<long long>(least)) {
        throw ConfigError("config key " + key + ": must be at least " +
                          std::to_string(least));
    }
    return static_cast<std::size_t>(v);
}

bool state_finite(const model::FlowState& st) {
    return st.phi.finite() && st.u.finite() && st.d.finite() &&
           st.ddot.finite();
}

void write_text_file(const fs::path& path, const std::string& text) {
    std::ofstream f(path);
    if (!f) throw ConfigError("cannot write " + path.string());
    f << text;
    f.flush();
    if (!f) throw ConfigError("failed writing " + path.string());
}

void require_admissible(const model::LeslieCoefficients& c) {
    const std::vector<std::string> violations = model::validate_coefficients(c);
    if (!violations.empty()) {
        throw ConfigError("coefficients inadmissible: " + violations.front());
    }
}

// ===========================================================================
// Deterministic probe states for check mode
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

/// Band-limited trigonometric field with max absolute value amp.
ScalarField trig_field(const Grid& g, Splitmix& rng, double amp) {
    std::vector<std::array<double, 4>> modes;
    for (int kx = 0; kx <= 3; ++kx) {
        for (int ky = -3; ky <= 3; ++ky) {
            if (kx == 0 && ky <= 0) continue;
            modes.push_back({static_cast<double>(kx), static_cast<double>(ky),
                             rng.symmetric(), rng.symmetric()});
        }
    }
    ScalarField f = g.sample([&modes](double x, double y) {
        double v = 0.0;
        for (const auto& m : modes) {
            const double phase = m[0] * x + m[1] * y;
            v += m[2] * std::cos(phase) + m[3] * std::sin(phase);
        }
        return v;
    });
    const double m = g.max_abs(f);
    if (m > 0.0) {
        const double scale = amp / m;
        for (std::size_t i = 0; i < f.size(); ++i) f[i] *= scale;
    }
    return f;
}

/// Compressible state with nonzero divergence and a unit director, used to
/// exercise the identities away from equilibrium.
model::FlowState probe_state(const Grid& g, double eps, std::uint64_t seed) {
    Splitmix rng{seed};
    model::FlowState st =
        model::make_state(g, model::FlowMode::compressible, eps);
    st.phi = trig_field(g, rng, 0.05);
    st.u.comp(0) = trig_field(g, rng, 0.08);
    st.u.comp(1) = trig_field(g, rng, 0.08);
    const ScalarField theta = trig_field(g, rng, 0.15);
    const ScalarField rate = trig_field(g, rng, 0.05);
    for (std::size_t i = 0; i < theta.size(); ++i) {
        const double c = std::cos(theta[i]);
        const double s = std::sin(theta[i]);
        st.d.comp(0)[i] = c;
        st.d.comp(1)[i] = s;
        st.ddot.comp(0)[i] = -rate[i] * s;
        st.ddot.comp(1)[i] = rate[i] * c;
    }
    return st;
}

// ===========================================================================
// Modes
// ===========================================================================

int run_validate(const RunConfig& cfg) {
    const std::vector<std::string> violations =
        model::validate_coefficients(cfg.coefficients);
    std::ostringstream text;
    for (const std::string& v : violations) text << v << '\n';
    write_text_file(fs::path(cfg.out_dir) / "violations.txt", text.str());
    std::cout << "validate-coeffs: " << violations.size() << " violation(s)\n";
    if (!violations.empty()) {
        throw ConfigError("coefficients inadmissible: " + violations.front());
    }
    return 0;
}

int run_check(const RunConfig& cfg) {
    require_admissible(cfg.coefficients);
    if (cfg.nx < 32 || cfg.ny < 32) {
        throw ConfigError("check mode needs resolution at least 32x32");
    }
    const Grid g(cfg.nx, cfg.ny);

    std::vector<std::pair<std::string, double>> rows;
    const auto eval = [&rows, &cfg](const model::FlowState& st,
                                    const std::string& tag) {
        const diag::CancellationResiduals r =
            diag::cancellation_residuals(st, cfg.coefficients);
        const auto drift = diag::constraint_drift(st);
        rows.emplace_back(tag + ".cs0", r.cs0.rel);
        rows.emplace_back(tag + ".cs1", r.cs1.rel);
        rows.emplace_back(tag + ".cs2", r.cs2.rel);
        rows.emplace_back(tag + ".dt_pair", r.dt_pair.rel);
        rows.emplace_back(tag + ".unit_drift", drift.first);
        rows.emplace_back(tag + ".orthogonality_drift", drift.second);
    };

    eval(model::make_state(g, model::FlowMode::compressible, cfg.eps),
         "equilibrium_compressible");
    eval(model::make_state(g, model::FlowMode::incompressible, cfg.eps),
         "equilibrium_incompressible");
    for (long long k = 0; k < cfg.check_samples; ++k) {
        eval(probe_state(g, cfg.eps, cfg.seed + static_cast<std::uint64_t>(k)),
             "probe_" + std::to_string(k));
    }

    double worst = 0.0;
    std::ostringstream text;
    for (const auto& [name, value] : rows) {
        worst = std::max(worst, value);
        text << name << ' ' << fmt(value) << '\n';
    }
    const bool pass = worst <= cfg.check_tol;
    text << "worst " << fmt(worst) << '\n';
    text << "tolerance " << fmt(cfg.check_tol) << '\n';
    text << "verdict " << (pass ? "PASS" : "FAIL") << '\n';
    write_text_file(fs::path(cfg.out_dir) / "check_report.txt", text.str());
    std::cout << "check: worst residual " << fmt(worst) << " against "
              << fmt(cfg.check_tol) << (pass ? " (pass)\n" : " (fail)\n");
    return pass ? 0 : 4;
}

int run_sweep_mode(const RunConfig& cfg) {
    sweep::SweepConfig sc;
    sc.eps_ladder = cfg.eps_ladder;
    sc.alpha0 = cfg.alpha0;
    sc.t_final = cfg.t_final;
    sc.nx = cfg.nx;
    sc.ny = cfg.ny;
    sc.coefficients = cfg.coefficients;
    sc.scheme = cfg.scheme;
    sc.seed = cfg.seed;
    sc.sample_times = cfg.sample_times;
    sc.amplitude = cfg.amplitude;
    sc.s = cfg.diagnostics.s;
    sc.dt = cfg.dt;

    const sweep::SweepResult res = sweep::mach_sweep(sc);

    {
        std::ofstream summary(fs::path(cfg.out_dir) / "summary.ndjson");
        if (!summary) throw ConfigError("cannot write sweep summary");
        io::write_sweep_summary(summary, res);
    }
    {
        std::ofstream series(fs::path(cfg.out_dir) / "sweep_series.csv");
        if (!series) throw ConfigError("cannot write sweep series");
        series << "eps,time,modulated\n";
        for (const sweep::RunSeries& run : res.runs) {
            for (std::size_t i = 0; i < run.times.size(); ++i) {
                series << fmt(run.eps) << ',' << fmt(run.times[i]) << ','
                       << fmt(run.modulated[i]) << '\n';
            }
        }
    }
    std::cout << "sweep: beta0 " << fmt(res.beta0);
    if (res.fit.fitted) std::cout << " beta_hat " << fmt(res.fit.beta_hat);
    std::cout << '\n';
    if (!res.ok()) {
        std::cerr << res.failure << '\n';
        return 3;
    }
    return 0;
}

int run_march(const RunConfig& cfg) {
    require_admissible(cfg.coefficients);
    if (!(cfg.t_final > 0.0)) throw ConfigError("run needs t_final > 0");
    const Grid g(cfg.nx, cfg.ny);

    const sweep::InitialData id = sweep::well_prepared_ic(
        g, cfg.eps, cfg.alpha0, cfg.seed, cfg.amplitude);
    model::FlowState st = cfg.mode == RunMode::compressible
                              ? id.compressible
                              : id.incompressible;

    double dt = cfg.dt;
    if (!(dt > 0.0)) dt = stepper::cfl_dt(st, cfg.coefficients, cfg.scheme);
    const auto n_steps = static_cast<std::size_t>(
        std::max(1.0, std::ceil(cfg.t_final / dt - 1.0e-9)));
    dt = cfg.t_final / static_cast<double>(n_steps);
    stepper::StepConfig sc;
    sc.dt = dt;
    sc.scheme = cfg.scheme;

    std::ofstream series(fs::path(cfg.out_dir) / "series.csv");
    if (!series) throw ConfigError("cannot write report series");
    io::write_report_header(series);

    const auto is_sample = [&cfg, n_steps](std::size_t k) {
        return k == 0 || k == n_steps || k % cfg.cadence == 0;
    };

    struct Pending {
        model::FlowState state;
        model::FlowState prev;
        bool has_prev;
        double q_integral;
        std::size_t step;
    };

    diag::QWeight qw;
    qw.observe(st.time, g.max_abs(g.divergence(st.u)));
    std::size_t rows = 0;
    const auto emit = [&](const Pending& p, const model::FlowState* next) {
        const diag::EnergyReport r = diag::make_report(
            p.state, cfg.coefficients, cfg.diagnostics,
            p.has_prev ? &p.prev : nullptr, next, p.q_integral);
        emit_report_row(series, r);
        ++rows;
        if (cfg.snapshot_every > 0 && rows % cfg.snapshot_every == 0) {
            std::ostringstream name;
            name << "snapshot_" << p.step << ".ckpt";
            io::write_checkpoint((fs::path(cfg.out_dir) / name.str()).string(),
                                 p.state);
        }
    };

    std::optional<Pending> pending;
    pending = Pending{st, st, false, qw.integral(), 0};
    std::string abort_msg;
    for (std::size_t k = 1; k <= n_steps; ++k) {
        model::FlowState next;
        try {
            next = stepper::advance(st, cfg.coefficients, sc);
        } catch (const NumericalError& err) {
            abort_msg = err.what();
            break;
        }
        if (!state_finite(next)) {
            abort_msg = "nonfinite state";
            break;
        }
        qw.observe(next.time, g.max_abs(g.divergence(next.u)));
        if (pending) {
            emit(*pending, &next);
            pending.reset();
        }
        if (is_sample(k)) pending = Pending{next, st, true, qw.integral(), k};
        st = std::move(next);
    }
    if (abort_msg.empty() && pending) emit(*pending, nullptr);
    series.flush();
    if (!series) throw ConfigError("failed writing report series");

    if (!abort_msg.empty()) {
        write_text_file(fs::path(cfg.out_dir) / "failure.txt",
                        "numerical-abort: " + abort_msg + "\n");
        std::cerr << "numerical-abort: " << abort_msg << '\n';
        return 3;
    }
    return 0;
}

}  // namespace

// ===========================================================================
// Configuration plumbing
// ===========================================================================

RunMode mode_from_string(const std::string& name) {
    if (name == "compressible") return RunMode::compressible;
    if (name == "incompressible") return RunMode::incompressible;
    if (name == "sweep") return RunMode::sweep;
    if (name == "check") return RunMode::check;
    if (name == "validate-coeffs") return RunMode::validate_coeffs;
    throw ConfigError("unknown mode: " + name);
}

const char* to_string(RunMode mode) {
    switch (mode) {
        case RunMode::compressible: return "compressible";
        case RunMode::incompressible: return "incompressible";
        case RunMode::sweep: return "sweep";
        case RunMode::check: return "check";
        case RunMode::validate_coeffs: return "validate-coeffs";
    }
    return "?";
}

RunConfig config_from_map(const io::ConfigMap& m) {
    for (const auto& [key, value] : m) {
        (void)value;
        if (known_keys().count(key) == 0) {
            throw ConfigError("unknown config key: " + key);
        }
    }
    RunConfig cfg;
    cfg.mode = mode_from_string(
        io::get_string(m, "run.mode", to_string(cfg.mode)));
    cfg.eps = io::get_double(m, "run.eps", cfg.eps);
    if (!(cfg.eps > 0.0)) throw ConfigError("run.eps must be positive");
    cfg.t_final = io::get_double(m, "run.t_final", cfg.t_final);
    cfg.dt = io::get_double(m, "run.dt", cfg.dt);
    cfg.scheme = stepper::scheme_from_string(
        io::get_string(m, "run.scheme", stepper::to_string(cfg.scheme)));
    cfg.cadence = get_size(m, "run.cadence", cfg.cadence, 1);
    cfg.out_dir = io::get_string(m, "run.out", cfg.out_dir);
    const long long seed = io::get_int(m, "run.seed",
                                       static_cast<long long>(cfg.seed));
    if (seed < 0) throw ConfigError("run.seed must be nonnegative");
    cfg.seed = static_cast<std::uint64_t>(seed);
    cfg.threads = io::get_int(m, "run.threads", cfg.threads);
    cfg.snapshot_every = get_size(m, "run.snapshot_every",
                                  cfg.snapshot_every, 0);
    cfg.nx = get_size(m, "grid.nx", cfg.nx, 4);
    cfg.ny = get_size(m, "grid.ny", cfg.ny, 4);

    model::LeslieCoefficients& c = cfg.coefficients;
    c.mu1 = io::get_double(m, "coefficients.mu1", c.mu1);
    c.mu2 = io::get_double(m, "coefficients.mu2", c.mu2);
    c.mu3 = io::get_double(m, "coefficients.mu3", c.mu3);
    c.mu4 = io::get_double(m, "coefficients.mu4", c.mu4);
    c.mu5 = io::get_double(m, "coefficients.mu5", c.mu5);
    c.mu6 = io::get_double(m, "coefficients.mu6", c.mu6);
    c.xi = io::get_double(m, "coefficients.xi", c.xi);
    c.kappa = io::get_double(m, "coefficients.kappa", c.kappa);
    c.a_tilde = io::get_double(m, "coefficients.a_tilde", c.a_tilde);
    c.gamma = io::get_double(m, "coefficients.gamma", c.gamma);

    const long long s = io::get_int(m, "diagnostics.s", cfg.diagnostics.s);
    if (s < 0 || s > 4) {
        throw ConfigError("diagnostics.s must lie in [0, 4]");
    }
    cfg.diagnostics.s = static_cast<int>(s);
    cfg.diagnostics.eta = io::get_double(m, "diagnostics.eta",
                                         cfg.diagnostics.eta);
    cfg.diagnostics.big_c = io::get_double(m, "diagnostics.big_c",
                                           cfg.diagnostics.big_c);
    cfg.diagnostics.big_c0 = io::get_double(m, "diagnostics.big_c0",
                                            cfg.diagnostics.big_c0);
    cfg.diagnostics.q_c = io::get_double(m, "diagnostics.q_c",
                                         cfg.diagnostics.q_c);

    cfg.amplitude = io::get_double(m, "ic.amplitude", cfg.amplitude);
    cfg.alpha0 = io::get_double(m, "ic.alpha0", cfg.alpha0);
    cfg.eps_ladder = io::get_double_list(m, "sweep.ladder", cfg.eps_ladder);
    cfg.sample_times = io::get_double_list(m, "sweep.sample_times",
                                           cfg.sample_times);
    cfg.check_samples = io::get_int(m, "check.samples", cfg.check_samples);
    if (cfg.check_samples < 0) {
        throw ConfigError("check.samples must be nonnegative");
    }
    cfg.check_tol = io::get_double(m, "check.tol", cfg.check_tol);
    return cfg;
}

io::ConfigMap map_from_config(const RunConfig& cfg) {
    io::ConfigMap m;
    m["run.mode"] = to_string(cfg.mode);
    m["run.eps"] = fmt(cfg.eps);
    m["run.t_final"] = fmt(cfg.t_final);
    m["run.dt"] = fmt(cfg.dt);
    m["run.scheme"] = stepper::to_string(cfg.scheme);
    m["run.cadence"] = std::to_string(cfg.cadence);
    m["run.out"] = cfg.out_dir;
    m["run.seed"] = std::to_string(cfg.seed);
    m["run.threads"] = std::to_string(cfg.threads);
    m["run.snapshot_every"] = std::to_string(cfg.snapshot_every);
    m["grid.nx"] = std::to_string(cfg.nx);
    m["grid.ny"] = std::to_string(cfg.ny);
    const model::LeslieCoefficients& c = cfg.coefficients;
    m["coefficients.mu1"] = fmt(c.mu1);
    m["coefficients.mu2"] = fmt(c.mu2);
    m["coefficients.mu3"] = fmt(c.mu3);
    m["coefficients.mu4"] = fmt(c.mu4);
    m["coefficients.mu5"] = fmt(c.mu5);
    m["coefficients.mu6"] = fmt(c.mu6);
    m["coefficients.xi"] = fmt(c.xi);
    m["coefficients.kappa"] = fmt(c.kappa);
    m["coefficients.a_tilde"] = fmt(c.a_tilde);
    m["coefficients.gamma"] = fmt(c.gamma);
    m["diagnostics.s"] = std::to_string(cfg.diagnostics.s);
    m["diagnostics.eta"] = fmt(cfg.diagnostics.eta);
    m["diagnostics.big_c"] = fmt(cfg.diagnostics.big_c);
    m["diagnostics.big_c0"] = fmt(cfg.diagnostics.big_c0);
    m["diagnostics.q_c"] = fmt(cfg.diagnostics.q_c);
    m["ic.amplitude"] = fmt(cfg.amplitude);
    m["ic.alpha0"] = fmt(cfg.alpha0);
    m["sweep.ladder"] = fmt_list(cfg.eps_ladder);
    m["sweep.sample_times"] = fmt_list(cfg.sample_times);
    m["check.samples"] = std::to_string(cfg.check_samples);
    m["check.tol"] = fmt(cfg.check_tol);
    return m;
}

// ===========================================================================
// Execution
// ===========================================================================

void emit_report_row(std::ostream& os, const diag::EnergyReport& r) {
    io::write_report_row(os, r);
}

int run(const RunConfig& cfg) {
    if (cfg.threads > 0) {
#ifdef _OPENMP
        omp_set_num_threads(static_cast<int>(cfg.threads));
#endif
    }
    try {
        fs::create_directories(cfg.out_dir);
    } catch (const fs::filesystem_error& err) {
        throw ConfigError(std::string("cannot create output directory: ") +
                          err.what());
    }
    write_text_file(fs::path(cfg.out_dir) / "manifest.ini",
                    io::render_config(map_from_config(cfg)));

    switch (cfg.mode) {
        case RunMode::validate_coeffs: return run_validate(cfg);
        case RunMode::check: return run_check(cfg);
        case RunMode::sweep: return run_sweep_mode(cfg);
        case RunMode::compressible:
        case RunMode::incompressible: return run_march(cfg);
    }
    throw ConfigError("unhandled mode");
}

namespace {

std::pair<std::size_t, std::size_t> parse_resolution(const std::string& text) {
    const std::size_t cross = text.find_first_of("xX");
    const auto parse_side = [&text](const std::string& part) {
        if (part.empty()) throw ConfigError("bad --resolution: " + text);
        char* end = nullptr;
        const long long v = std::strtoll(part.c_str(), &end, 10);
        if (end != part.c_str() + part.size() || v < 4) {
            throw ConfigError("bad --resolution: " + text);
        }
        return static_cast<std::size_t>(v);
    };
    if (cross == std::string::npos) {
        const std::size_t n = parse_side(text);
        return {n, n};
    }
    return {parse_side(text.substr(0, cross)),
            parse_side(text.substr(cross + 1))};
}

}  // namespace

int run_main(int argc, const char* const* argv) {
    CLI::App app{"Compressible nematic liquid-crystal flow laboratory"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir;
    std::string resolution;
    long long seed = 0;
    long long threads = 0;
    double eps = 0.0;

    CLI::App* cmd_run = app.add_subcommand("run", "march one configured run");
    CLI::App* cmd_sweep = app.add_subcommand("sweep", "epsilon-ladder study");
    CLI::App* cmd_check =
        app.add_subcommand("check", "identity and constraint checks");
    CLI::App* cmd_validate =
        app.add_subcommand("validate-coeffs", "coefficient admissibility");
    for (CLI::App* sub : {cmd_run, cmd_sweep, cmd_check, cmd_validate}) {
        sub->add_option("--config", config_path, "config file path");
        sub->add_option("--out", out_dir, "output directory");
        sub->add_option("--seed", seed, "random seed override");
        sub->add_option("--threads", threads, "worker thread count");
        sub->add_option("--eps", eps, "Mach-number override");
        sub->add_option("--resolution", resolution, "grid size as NxN");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        io::ConfigMap m;
        if (!config_path.empty()) m = io::load_config_file(config_path);
        io::apply_env_overrides(m);

        CLI::App* sub = app.get_subcommands().front();
        const std::string name = sub->get_name();
        if (name == "run") {
            const std::string mode = io::get_string(m, "run.mode",
                                                    "compressible");
            if (mode != "compressible" && mode != "incompressible") {
                throw ConfigError(
                    "subcommand 'run' needs mode compressible or "
                    "incompressible, got " + mode);
            }
            m["run.mode"] = mode;
        } else {
            m["run.mode"] = name;
        }
        if (sub->count("--out") > 0) m["run.out"] = out_dir;
        if (sub->count("--seed") > 0) m["run.seed"] = std::to_string(seed);
        if (sub->count("--threads") > 0) {
            m["run.threads"] = std::to_string(threads);
        }
        if (sub->count("--eps") > 0) m["run.eps"] = fmt(eps);
        if (sub->count("--resolution") > 0) {
            const auto [nx, ny] = parse_resolution(resolution);
            m["grid.nx"] = std::to_string(nx);
            m["grid.ny"] = std::to_string(ny);
        }

        const RunConfig cfg = config_from_map(m);
        return run(cfg);
    } catch (const ConfigError& err) {
        std::cerr << "config error: " << err.what() << '\n';
        return 2;
    } catch (const NumericalError& err) {
        std::cerr << "numerical-abort: " << err.what() << '\n';
        return 3;
    }
}

}  // namespace lcflow::cli
