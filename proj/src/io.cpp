/// @file io.cpp
/// @brief Config parsing, CSV report serialization, sweep summaries, and
///        binary checkpoints.

#include "lcflow/io.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "lcflow/errors.hpp"

extern char** environ;

namespace lcflow::io {
namespace {

static_assert(std::endian::native == std::endian::little,
              "checkpoint format assumes a little-endian host");

std::string trim(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) {
        return static_cast<char>(std::tolower(c));
    });
    return s;
}

[[noreturn]] void line_error(std::size_t line_no, const std::string& what) {
    std::ostringstream msg;
    msg << "config line " << line_no << ": " << what;
    throw ConfigError(msg.str());
}

double parse_double(const std::string& key, const std::string& text) {
    const std::string v = trim(text);
    if (v.empty()) throw ConfigError("config key " + key + ": empty number");
    char* end = nullptr;
    const double x = std::strtod(v.c_str(), &end);
    if (end != v.c_str() + v.size()) {
        throw ConfigError("config key " + key + ": expected a number, got '" +
                          v + "'");
    }
    return x;
}

}  // namespace

// ===========================================================================
// Configuration
// ===========================================================================

ConfigMap parse_config_text(const std::string& text) {
    ConfigMap cfg;
    std::istringstream in(text);
    std::string raw;
    std::string section;
    std::size_t line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        const std::string line = trim(raw);
        if (line.empty() || line.front() == '#' || line.front() == ';') {
            continue;
        }
        if (line.front() == '[') {
            if (line.back() != ']') line_error(line_no, "unterminated section");
            section = trim(line.substr(1, line.size() - 2));
            if (section.empty()) line_error(line_no, "empty section name");
            if (section.find('.') != std::string::npos) {
                line_error(line_no, "section names may not contain '.'");
            }
            continue;
        }
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos) {
            line_error(line_no, "expected key = value");
        }
        const std::string key = trim(line.substr(0, eq));
        if (key.empty()) line_error(line_no, "empty key");
        if (section.empty()) line_error(line_no, "key outside any section");
        cfg[section + "." + key] = trim(line.substr(eq + 1));
    }
    return cfg;
}

ConfigMap load_config_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ConfigError("cannot open config file: " + path);
    std::ostringstream buf;
    buf << f.rdbuf();
    return parse_config_text(buf.str());
}

void apply_env_overrides(ConfigMap& cfg, const std::string& prefix) {
    const std::string lead = prefix + "_";
    for (char** e = environ; e != nullptr && *e != nullptr; ++e) {
        const std::string entry(*e);
        const std::size_t eq = entry.find('=');
        if (eq == std::string::npos) continue;
        const std::string name = entry.substr(0, eq);
        if (name.size() <= lead.size() || name.compare(0, lead.size(), lead) != 0) {
            continue;
        }
        const std::string rest = name.substr(lead.size());
        const std::size_t split = rest.find('_');
        if (split == std::string::npos || split == 0 ||
            split + 1 >= rest.size()) {
            continue;
        }
        const std::string key =
            lower(rest.substr(0, split)) + "." + lower(rest.substr(split + 1));
        cfg[key] = entry.substr(eq + 1);
    }
}

std::string render_config(const ConfigMap& cfg) {
    std::ostringstream out;
    std::string section;
    for (const auto& [key, value] : cfg) {
        const std::size_t dot = key.find('.');
        const std::string sec = key.substr(0, dot);
        if (sec != section) {
            if (!section.empty()) out << '\n';
            out << '[' << sec << "]\n";
            section = sec;
        }
        out << key.substr(dot + 1) << " = " << value << '\n';
    }
    return out.str();
}

std::string get_string(const ConfigMap& cfg, const std::string& key,
                       const std::string& fallback) {
    const auto it = cfg.find(key);
    return it == cfg.end() ? fallback : it->second;
}

double get_double(const ConfigMap& cfg, const std::string& key,
                  double fallback) {
    const auto it = cfg.find(key);
    if (it == cfg.end()) return fallback;
    return parse_double(key, it->second);
}

long long get_int(const ConfigMap& cfg, const std::string& key,
                  long long fallback) {
    const auto it = cfg.find(key);
    if (it == cfg.end()) return fallback;
    const std::string v = trim(it->second);
    if (v.empty()) throw ConfigError("config key " + key + ": empty integer");
    char* end = nullptr;
    const long long x = std::strtoll(v.c_str(), &end, 10);
    if (end != v.c_str() + v.size()) {
        throw ConfigError("config key " + key + ": expected an integer, got '" +
                          v + "'");
    }
    return x;
}

std::vector<double> get_double_list(const ConfigMap& cfg,
                                    const std::string& key,
                                    const std::vector<double>& fallback) {
    const auto it = cfg.find(key);
    if (it == cfg.end()) return fallback;
    std::vector<double> out;
    std::istringstream in(it->second);
    std::string item;
    while (std::getline(in, item, ',')) {
        const std::string v = trim(item);
        if (v.empty()) continue;
        out.push_back(parse_double(key, v));
    }
    return out;
}

// ===========================================================================
// CSV report series
// ===========================================================================

void write_report_header(std::ostream& os) {
    os << "# lcflow-report-v1\n";
    bool first = true;
    for (const diag::ReportField& f : diag::report_fields()) {
        if (!first) os << ',';
        os << f.name;
        first = false;
    }
    os << '\n';
}

void write_report_row(std::ostream& os, const diag::EnergyReport& r) {
    char buf[40];
    bool first = true;
    for (const diag::ReportField& f : diag::report_fields()) {
        std::snprintf(buf, sizeof(buf), "%.17g", r.*(f.member));
        if (!first) os << ',';
        os << buf;
        first = false;
    }
    os << '\n';
}

namespace {

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::istringstream in(line);
    std::string item;
    while (std::getline(in, item, ',')) out.push_back(trim(item));
    return out;
}

}  // namespace

std::vector<diag::EnergyReport> read_report_csv(std::istream& is) {
    const std::vector<diag::ReportField>& fields = diag::report_fields();
    std::vector<diag::EnergyReport> rows;
    std::string line;
    bool have_header = false;
    std::size_t line_no = 0;
    while (std::getline(is, line)) {
        ++line_no;
        const std::string t = trim(line);
        if (t.empty() || t.front() == '#') continue;
        const std::vector<std::string> cells = split_csv(t);
        if (!have_header) {
            if (cells.size() != fields.size()) {
                throw ConfigError("report schema mismatch: wrong column count");
            }
            for (std::size_t i = 0; i < cells.size(); ++i) {
                if (cells[i] != fields[i].name) {
                    throw ConfigError("report schema mismatch at column '" +
                                      cells[i] + "'");
                }
            }
            have_header = true;
            continue;
        }
        if (cells.size() != fields.size()) {
            std::ostringstream msg;
            msg << "report row at line " << line_no << " has " << cells.size()
                << " cells, expected " << fields.size();
            throw ConfigError(msg.str());
        }
        diag::EnergyReport r;
        for (std::size_t i = 0; i < cells.size(); ++i) {
            r.*(fields[i].member) = parse_double(fields[i].name, cells[i]);
        }
        rows.push_back(r);
    }
    if (!have_header) throw ConfigError("report stream has no header row");
    return rows;
}

// ===========================================================================
// Sweep summary
// ===========================================================================

void write_sweep_summary(std::ostream& os, const sweep::SweepResult& res) {
    using nlohmann::json;
    for (const sweep::RunSeries& run : res.runs) {
        json j;
        j["record"] = "run";
        j["eps"] = run.eps;
        j["samples"] = run.times.size();
        j["terminal_modulated"] = run.terminal_modulated;
        j["max_div_monitor"] = run.max_div_monitor;
        j["max_sqrt_rho_ratio"] = run.max_sqrt_rho_ratio;
        os << j.dump() << '\n';
    }
    json fit;
    fit["record"] = "fit";
    fit["fitted"] = res.fit.fitted;
    fit["beta_hat"] = res.fit.beta_hat;
    fit["residual_rms"] = res.fit.residual_rms;
    fit["beta0"] = res.beta0;
    os << fit.dump() << '\n';
    if (!res.ok()) {
        json fail;
        fail["record"] = "failure";
        fail["message"] = res.failure;
        os << fail.dump() << '\n';
    }
}

// ===========================================================================
// Binary checkpoints
// ===========================================================================

namespace {

constexpr char kMagic[8] = {'L', 'C', 'F', 'L', 'O', 'W', 'C', 'P'};
constexpr std::uint32_t kVersion = 1;
constexpr std::size_t kHeaderSize = 64;

void pack_header(unsigned char* h, const model::FlowState& st) {
    std::memset(h, 0, kHeaderSize);
    std::memcpy(h, kMagic, 8);
    const std::uint32_t version = kVersion;
    std::memcpy(h + 8, &version, 4);
    const std::uint32_t mode =
        st.mode == model::FlowMode::compressible ? 0u : 1u;
    std::memcpy(h + 12, &mode, 4);
    const std::uint64_t nx = st.u.comp(0).nx();
    const std::uint64_t ny = st.u.comp(0).ny();
    std::memcpy(h + 16, &nx, 8);
    std::memcpy(h + 24, &ny, 8);
    std::memcpy(h + 32, &st.time, 8);
    std::memcpy(h + 40, &st.eps, 8);
}

CheckpointInfo unpack_header(const unsigned char* h, const std::string& path) {
    if (std::memcmp(h, kMagic, 8) != 0) {
        throw ConfigError("not a checkpoint file: " + path);
    }
    CheckpointInfo info;
    std::memcpy(&info.version, h + 8, 4);
    if (info.version != kVersion) {
        throw ConfigError("unsupported checkpoint version in " + path);
    }
    std::uint32_t mode = 0;
    std::memcpy(&mode, h + 12, 4);
    if (mode > 1) throw ConfigError("corrupt mode field in " + path);
    info.mode = mode == 0 ? model::FlowMode::compressible
                          : model::FlowMode::incompressible;
    std::memcpy(&info.nx, h + 16, 8);
    std::memcpy(&info.ny, h + 24, 8);
    std::memcpy(&info.time, h + 32, 8);
    std::memcpy(&info.eps, h + 40, 8);
    return info;
}

void write_array(std::ofstream& f, const ScalarField& a) {
    f.write(reinterpret_cast<const char*>(a.data()),
            static_cast<std::streamsize>(a.size() * sizeof(double)));
}

void read_array(std::ifstream& f, ScalarField& a, const std::string& path) {
    f.read(reinterpret_cast<char*>(a.data()),
           static_cast<std::streamsize>(a.size() * sizeof(double)));
    if (!f) throw ConfigError("truncated checkpoint: " + path);
}

}  // namespace

void write_checkpoint(const std::string& path, const model::FlowState& st) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw ConfigError("cannot open checkpoint for writing: " + path);
    unsigned char header[kHeaderSize];
    pack_header(header, st);
    f.write(reinterpret_cast<const char*>(header), kHeaderSize);
    if (st.mode == model::FlowMode::compressible) write_array(f, st.phi);
    for (int c = 0; c < 2; ++c) write_array(f, st.u.comp(c));
    for (int c = 0; c < 2; ++c) write_array(f, st.d.comp(c));
    for (int c = 0; c < 2; ++c) write_array(f, st.ddot.comp(c));
    f.flush();
    if (!f) throw ConfigError("failed writing checkpoint: " + path);
}

CheckpointInfo probe_checkpoint(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw ConfigError("cannot open checkpoint: " + path);
    unsigned char header[kHeaderSize];
    f.read(reinterpret_cast<char*>(header), kHeaderSize);
    if (!f) throw ConfigError("truncated checkpoint: " + path);
    return unpack_header(header, path);
}

model::FlowState read_checkpoint(const std::string& path, const Grid& g) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw ConfigError("cannot open checkpoint: " + path);
    unsigned char header[kHeaderSize];
    f.read(reinterpret_cast<char*>(header), kHeaderSize);
    if (!f) throw ConfigError("truncated checkpoint: " + path);
    const CheckpointInfo info = unpack_header(header, path);
    if (info.nx != g.nx() || info.ny != g.ny()) {
        std::ostringstream msg;
        msg << "checkpoint grid " << info.nx << "x" << info.ny
            << " does not match " << g.nx() << "x" << g.ny();
        throw ConfigError(msg.str());
    }
    model::FlowState st = model::make_state(g, info.mode, info.eps);
    st.time = info.time;
    if (info.mode == model::FlowMode::compressible) read_array(f, st.phi, path);
    for (int c = 0; c < 2; ++c) read_array(f, st.u.comp(c), path);
    for (int c = 0; c < 2; ++c) read_array(f, st.d.comp(c), path);
    for (int c = 0; c < 2; ++c) read_array(f, st.ddot.comp(c), path);
    return st;
}

}  // namespace lcflow::io
