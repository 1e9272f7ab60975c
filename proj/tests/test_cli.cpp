/// @file test_cli.cpp
/// @brief Serialization and front-end suite: config parsing and overrides,
///        CSV report round trips, checkpoints, and the four CLI modes.

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "lcflow/cli.hpp"
#include "lcflow/diag.hpp"
#include "lcflow/errors.hpp"
#include "lcflow/io.hpp"
#include "lcflow/model.hpp"
#include "test_fields.hpp"
#include "test_harness.hpp"

namespace {

namespace fs = std::filesystem;
using namespace lcflow;
using namespace lcflow::test;
using harness::record;
using model::FlowMode;
using model::FlowState;

fs::path work_dir() {
    static const fs::path base = [] {
        const fs::path p = fs::temp_directory_path() / "lcflow_cli_test";
        fs::remove_all(p);
        fs::create_directories(p);
        return p;
    }();
    return base;
}

/// Silences the tool's stdout/stderr for the duration of one call.
struct QuietStreams {
    std::stringstream sink;
    std::streambuf* out;
    std::streambuf* err;
    QuietStreams()
        : out(std::cout.rdbuf(sink.rdbuf())),
          err(std::cerr.rdbuf(sink.rdbuf())) {}
    ~QuietStreams() {
        std::cout.rdbuf(out);
        std::cerr.rdbuf(err);
    }
};

int tool(const std::vector<std::string>& args) {
    std::vector<const char*> argv{"lcflow"};
    for (const std::string& a : args) argv.push_back(a.c_str());
    QuietStreams quiet;
    return cli::run_main(static_cast<int>(argv.size()), argv.data());
}

std::string slurp(const fs::path& p) {
    std::ifstream f(p);
    std::ostringstream buf;
    buf << f.rdbuf();
    return buf.str();
}

void config_cases() {
    const std::string text =
        "# leading comment\n"
        "[run]\n"
        "mode = incompressible\n"
        "t_final = 0.25\n"
        "; another comment\n"
        "out = some dir/with spaces\n"
        "\n"
        "[grid]\n"
        "nx = 32\n"
        "nx = 48\n";
    const io::ConfigMap m = io::parse_config_text(text);
    record("config parser handles sections, comments, and rewrites",
           m.size() == 4 && m.at("run.mode") == "incompressible" &&
               m.at("run.out") == "some dir/with spaces" &&
               m.at("grid.nx") == "48",
           "");

    int caught = 0;
    for (const char* bad : {"[run]\nnonsense line\n", "stray = 1\n",
                            "[run\nmode = check\n"}) {
        try {
            io::parse_config_text(bad);
        } catch (const ConfigError&) {
            ++caught;
        }
    }
    record("config parser rejects malformed lines", caught == 3, qoi(caught));

    const io::ConfigMap back = io::parse_config_text(io::render_config(m));
    record("rendered config parses back to the same map", back == m, "");

    io::ConfigMap env = m;
    setenv("LCFLOW_RUN_SEED", "99", 1);
    setenv("LCFLOW_GRID_NY", "128", 1);
    setenv("OTHERPREFIX_RUN_SEED", "5", 1);
    io::apply_env_overrides(env);
    unsetenv("LCFLOW_RUN_SEED");
    unsetenv("LCFLOW_GRID_NY");
    unsetenv("OTHERPREFIX_RUN_SEED");
    record("environment overrides land on namespaced keys",
           env.at("run.seed") == "99" && env.at("grid.ny") == "128" &&
               env.count("run.mode") == 1 && env.size() == 6,
           "");

    record("typed getters parse values and honor fallbacks",
           io::get_double(m, "run.t_final", 0.0) == 0.25 &&
               io::get_int(m, "grid.nx", 0) == 48 &&
               io::get_double(m, "run.absent", 7.5) == 7.5 &&
               io::get_double_list(m, "run.absent", {1.0}).size() == 1,
           "");
    io::ConfigMap lists;
    lists["sweep.ladder"] = "0.2, 0.1 ,0.05";
    const std::vector<double> ladder =
        io::get_double_list(lists, "sweep.ladder", {});
    bool threw = false;
    try {
        io::get_double(m, "run.mode", 0.0);
    } catch (const ConfigError&) {
        threw = true;
    }
    record("list getter splits on commas and junk numbers throw",
           ladder.size() == 3 && ladder[1] == 0.1 && threw, "");
}

void report_csv_cases() {
    const Grid g(16, 16);
    const model::LeslieCoefficients c;
    const diag::DiagConfig dc;

    const FlowState eq = model::make_state(g, FlowMode::compressible, 0.5);
    const diag::EnergyReport eq_row = diag::make_report(eq, c, dc);
    diag::EnergyReport odd;
    for (const diag::ReportField& f : diag::report_fields()) {
        odd.*(f.member) = 0.1 + 1.0 / 3.0 + static_cast<double>(f.name[0]);
    }
    diag::EnergyReport later = eq_row;
    later.time = 0.125;

    std::stringstream buf;
    io::write_report_header(buf);
    io::write_report_row(buf, eq_row);
    io::write_report_row(buf, later);
    io::write_report_row(buf, odd);
    const std::vector<diag::EnergyReport> rows = io::read_report_csv(buf);

    bool eq_zero = rows.size() == 3;
    for (const diag::ReportField& f : diag::report_fields()) {
        const double v = rows[0].*(f.member);
        if (std::string(f.name) == "q_weight") {
            eq_zero = eq_zero && v == 1.0;
        } else {
            eq_zero = eq_zero && v == 0.0;
        }
    }
    record("equilibrium row is all zeros apart from the unit weight",
           eq_zero, "");
    record("consecutive rows carry strictly increasing time",
           rows[1].time > rows[0].time, qoi(rows[1].time));

    bool exact = true;
    for (const diag::ReportField& f : diag::report_fields()) {
        exact = exact && rows[2].*(f.member) == odd.*(f.member);
    }
    record("report values round-trip exactly through the CSV", exact, "");

    std::stringstream bad;
    bad << "time,wrong_name\n0,0\n";
    bool mismatch = false;
    try {
        io::read_report_csv(bad);
    } catch (const ConfigError&) {
        mismatch = true;
    }
    std::stringstream empty;
    bool headerless = false;
    try {
        io::read_report_csv(empty);
    } catch (const ConfigError&) {
        headerless = true;
    }
    record("schema mismatches and missing headers are rejected",
           mismatch && headerless, "");
}

void checkpoint_cases() {
    const Grid g(16, 16);
    Rng rng(2024);
    FlowState st = model::make_state(g, FlowMode::compressible, 0.3);
    st.time = 1.75;
    st.phi = random_scalar(g, rng, 4, 0.2);
    st.u = random_vector(g, rng, 4, 0.4);
    const DirectorPair dir = random_director(g, rng, 3, 0.5);
    st.d = dir.d;
    st.ddot = dir.ddot;

    const fs::path path = work_dir() / "state.ckpt";
    io::write_checkpoint(path.string(), st);
    const io::CheckpointInfo info = io::probe_checkpoint(path.string());
    record("checkpoint header carries version, dims, time, and eps",
           info.version == 1 && info.nx == 16 && info.ny == 16 &&
               info.time == st.time && info.eps == st.eps &&
               info.mode == FlowMode::compressible,
           qoi(info.time));

    const FlowState back = io::read_checkpoint(path.string(), g);
    bool bits = back.time == st.time && back.eps == st.eps;
    for (std::size_t i = 0; i < st.phi.size(); ++i) {
        bits = bits && back.phi[i] == st.phi[i];
    }
    for (int comp = 0; comp < 2; ++comp) {
        for (std::size_t i = 0; i < st.u.comp(comp).size(); ++i) {
            bits = bits && back.u.comp(comp)[i] == st.u.comp(comp)[i] &&
                   back.d.comp(comp)[i] == st.d.comp(comp)[i] &&
                   back.ddot.comp(comp)[i] == st.ddot.comp(comp)[i];
        }
    }
    record("checkpoint restores the state bit for bit", bits, "");

    const Grid other(32, 32);
    bool wrong_grid = false;
    try {
        io::read_checkpoint(path.string(), other);
    } catch (const ConfigError&) {
        wrong_grid = true;
    }
    const fs::path junk = work_dir() / "junk.ckpt";
    {
        std::ofstream f(junk, std::ios::binary);
        f << "this is not a checkpoint at all, padded to header size......";
    }
    bool bad_magic = false;
    try {
        io::probe_checkpoint(junk.string());
    } catch (const ConfigError&) {
        bad_magic = true;
    }
    bool missing = false;
    try {
        io::probe_checkpoint((work_dir() / "absent.ckpt").string());
    } catch (const ConfigError&) {
        missing = true;
    }
    record("checkpoint guards dims, magic, and missing files",
           wrong_grid && bad_magic && missing, "");
}

void run_config_cases() {
    const cli::RunConfig defaults = cli::config_from_map({});
    record("empty map resolves to the documented defaults",
           defaults.mode == cli::RunMode::compressible && defaults.nx == 64 &&
               defaults.scheme == stepper::Scheme::imex_acoustic &&
               defaults.cadence == 10 && defaults.eps_ladder.size() == 4,
           "");

    int rejected = 0;
    for (const char* text :
         {"[run]\nmood = sweep\n", "[typo]\nkey = 1\n",
          "[diagnostics]\ns = 7\n", "[run]\ncadence = 0\n"}) {
        try {
            cli::config_from_map(io::parse_config_text(text));
        } catch (const ConfigError&) {
            ++rejected;
        }
    }
    record("unknown keys and out-of-range values are rejected", rejected == 4,
           qoi(rejected));

    cli::RunConfig cfg;
    cfg.mode = cli::RunMode::sweep;
    cfg.eps = 0.3;
    cfg.dt = 0.01;
    cfg.coefficients.gamma = 1.7;
    cfg.coefficients.mu2 = -0.8;
    cfg.eps_ladder = {0.5, 0.25};
    cfg.sample_times = {0.1, 0.2};
    cfg.out_dir = "elsewhere";
    cfg.seed = 12345;
    const cli::RunConfig back = cli::config_from_map(cli::map_from_config(cfg));
    record("resolved config survives the manifest round trip",
           back.mode == cfg.mode && back.eps == cfg.eps && back.dt == cfg.dt &&
               back.coefficients.gamma == cfg.coefficients.gamma &&
               back.coefficients.mu2 == cfg.coefficients.mu2 &&
               back.eps_ladder == cfg.eps_ladder &&
               back.sample_times == cfg.sample_times &&
               back.out_dir == cfg.out_dir && back.seed == cfg.seed,
           "");
}

void validate_mode_cases() {
    const fs::path out = work_dir() / "validate_ok";
    const int code = tool({"validate-coeffs", "--out", out.string()});
    record("validate-coeffs accepts the baseline coefficients",
           code == 0 && slurp(out / "violations.txt").empty(), qoi(code));

    const fs::path cfg_path = work_dir() / "bad_coeffs.ini";
    {
        std::ofstream f(cfg_path);
        f << "[coefficients]\nmu4 = -1\n";
    }
    const fs::path out_bad = work_dir() / "validate_bad";
    const int bad = tool({"validate-coeffs", "--config", cfg_path.string(),
                          "--out", out_bad.string()});
    record("validate-coeffs flags an inadmissible set",
           bad == 2 && !slurp(out_bad / "violations.txt").empty(), qoi(bad));
}

void check_mode_cases() {
    const fs::path cfg_path = work_dir() / "check.ini";
    {
        std::ofstream f(cfg_path);
        f << "[check]\nsamples = 0\n";
    }
    const fs::path out = work_dir() / "check_eq";
    const int code = tool({"check", "--config", cfg_path.string(), "--out",
                           out.string(), "--resolution", "32"});
    bool zeros = true;
    std::istringstream report(slurp(out / "check_report.txt"));
    std::string name, value;
    int lines = 0;
    while (report >> name >> value) {
        if (name.rfind("equilibrium_", 0) == 0) {
            zeros = zeros && value == "0";
            ++lines;
        }
    }
    record("check mode reports exact zeros on equilibrium",
           code == 0 && zeros && lines == 12, qoi(lines));

    const fs::path strict = work_dir() / "check_strict.ini";
    {
        std::ofstream f(strict);
        f << "[check]\nsamples = 2\ntol = 0\n";
    }
    const fs::path out_strict = work_dir() / "check_fail";
    const int fail = tool({"check", "--config", strict.string(), "--out",
                           out_strict.string(), "--resolution", "32"});
    record("an unsatisfiable tolerance exits with the check-failure code",
           fail == 4, qoi(fail));
}

void march_mode_cases() {
    const fs::path cfg_path = work_dir() / "march.ini";
    {
        std::ofstream f(cfg_path);
        f << "[run]\nmode = compressible\neps = 0.5\nt_final = 0.02\n"
             "cadence = 1\nsnapshot_every = 2\n\n[grid]\nnx = 16\nny = 16\n";
    }
    const fs::path out_a = work_dir() / "march_a";
    const int code = tool({"run", "--config", cfg_path.string(), "--out",
                           out_a.string(), "--seed", "5"});
    std::ifstream series(out_a / "series.csv");
    const std::vector<diag::EnergyReport> rows = io::read_report_csv(series);
    bool increasing = rows.size() >= 2 && rows.front().time == 0.0;
    for (std::size_t i = 1; i < rows.size(); ++i) {
        increasing = increasing && rows[i].time > rows[i - 1].time;
    }
    record("march run writes a manifest and an ordered series",
           code == 0 && fs::exists(out_a / "manifest.ini") && increasing &&
               std::abs(rows.back().time - 0.02) <= 1e-12,
           qoi(rows.back().time));

    bool snapshot_ok = false;
    for (const auto& entry : fs::directory_iterator(out_a)) {
        const std::string name = entry.path().filename().string();
        if (name.rfind("snapshot_", 0) == 0) {
            const io::CheckpointInfo info =
                io::probe_checkpoint(entry.path().string());
            snapshot_ok = info.nx == 16 && info.ny == 16;
            break;
        }
    }
    record("snapshots are valid checkpoints", snapshot_ok, "");

    const fs::path out_b = work_dir() / "march_b";
    const int again = tool({"run", "--config", cfg_path.string(), "--out",
                            out_b.string(), "--seed", "5"});
    record("identical configs reproduce the series byte for byte",
           again == 0 &&
               slurp(out_a / "series.csv") == slurp(out_b / "series.csv"),
           "");

    const fs::path cfg_inc = work_dir() / "march_inc.ini";
    {
        std::ofstream f(cfg_inc);
        f << "[run]\nmode = incompressible\nt_final = 0.02\ncadence = 2\n"
             "scheme = explicit-rk4\n\n[grid]\nnx = 16\nny = 16\n";
    }
    const fs::path out_inc = work_dir() / "march_inc";
    const int inc = tool({"run", "--config", cfg_inc.string(), "--out",
                          out_inc.string()});
    record("incompressible marching runs complete", inc == 0, qoi(inc));
}

void sweep_mode_cases() {
    const fs::path cfg_path = work_dir() / "sweep.ini";
    {
        std::ofstream f(cfg_path);
        f << "[run]\nt_final = 0.02\n\n[grid]\nnx = 16\nny = 16\n\n"
             "[sweep]\nladder = 0.2, 0.1\n";
    }
    const fs::path out = work_dir() / "sweep_out";
    const int code =
        tool({"sweep", "--config", cfg_path.string(), "--out", out.string()});

    bool fit_ok = false;
    std::istringstream summary(slurp(out / "summary.ndjson"));
    std::string line;
    while (std::getline(summary, line)) {
        const nlohmann::json j = nlohmann::json::parse(line);
        if (j.at("record") == "fit") {
            fit_ok = j.at("beta0") == 2.0 && j.at("fitted") == true &&
                     std::isfinite(j.at("beta_hat").get<double>());
        }
    }
    record("sweep mode emits a summary with beta0 and a finite rate",
           code == 0 && fit_ok, qoi(code));
    record("sweep mode writes the flat series file",
           slurp(out / "sweep_series.csv").rfind("eps,time,modulated", 0) == 0,
           "");
}

void front_end_cases() {
    record("a missing config file maps to the config-error exit code",
           tool({"run", "--config", (work_dir() / "nope.ini").string()}) == 2,
           "");
    const fs::path clash = work_dir() / "clash.ini";
    {
        std::ofstream f(clash);
        f << "[run]\nmode = sweep\n";
    }
    record("subcommand run rejects a non-marching configured mode",
           tool({"run", "--config", clash.string(), "--out",
                 (work_dir() / "clash_out").string()}) == 2,
           "");
    record("a malformed resolution flag is a config error",
           tool({"check", "--resolution", "abc", "--out",
                 (work_dir() / "res_out").string()}) == 2,
           "");
    record("an unknown flag is a config error",
           tool({"run", "--frobnicate"}) == 2, "");
}

}  // namespace

int main() {
    return lcflow::test::harness::run("serialization and front end", [] {
        config_cases();
        report_csv_cases();
        checkpoint_cases();
        run_config_cases();
        validate_mode_cases();
        check_mode_cases();
        march_mode_cases();
        sweep_mode_cases();
        front_end_cases();
    });
}
