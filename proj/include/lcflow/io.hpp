#pragma once
/// @file io.hpp
/// @brief Serialization layer: sectioned key=value configs with environment
///        overrides, CSV report series, line-delimited sweep summaries, and
///        bit-exact binary checkpoints.

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "lcflow/diag.hpp"
#include "lcflow/grid.hpp"
#include "lcflow/model.hpp"
#include "lcflow/sweep.hpp"

namespace lcflow::io {

// ===========================================================================
// Sectioned key=value configuration
// ===========================================================================

/// Flat map keyed "section.key"; later assignments win.
using ConfigMap = std::map<std::string, std::string>;

/// Parses "[section]" headers and "key = value" lines; '#' and ';' start
/// comment lines. Throws ConfigError with the offending line number.
ConfigMap parse_config_text(const std::string& text);

ConfigMap load_config_file(const std::string& path);

/// Overlays environment variables named PREFIX_SECTION_KEY; the first
/// underscore after the prefix separates the section from the key and the
/// name is lowercased.
void apply_env_overrides(ConfigMap& cfg, const std::string& prefix = "LCFLOW");

/// Canonical text form; parsing it back yields an equal map.
std::string render_config(const ConfigMap& cfg);

// Typed getters; missing keys yield the fallback, malformed values throw
// ConfigError naming the key.
std::string get_string(const ConfigMap& cfg, const std::string& key,
                       const std::string& fallback);
double get_double(const ConfigMap& cfg, const std::string& key,
                  double fallback);
long long get_int(const ConfigMap& cfg, const std::string& key,
                  long long fallback);
std::vector<double> get_double_list(const ConfigMap& cfg,
                                    const std::string& key,
                                    const std::vector<double>& fallback);

// ===========================================================================
// CSV report series
// ===========================================================================

/// Writes the schema tag line "# lcflow-report-v1" and the mandatory header
/// row listing every report field.
void write_report_header(std::ostream& os);

/// One flat row per sample, every field at full round-trip precision.
void write_report_row(std::ostream& os, const diag::EnergyReport& r);

/// Reads a stream produced by the writers above; throws ConfigError on a
/// schema mismatch or a malformed row.
std::vector<diag::EnergyReport> read_report_csv(std::istream& is);

// ===========================================================================
// Sweep summary
// ===========================================================================

/// One structured record per line: each ladder rung, then the fit, then a
/// failure record when the sweep was tainted.
void write_sweep_summary(std::ostream& os, const sweep::SweepResult& res);

// ===========================================================================
// Binary checkpoints
// ===========================================================================

struct CheckpointInfo {
    std::uint32_t version = 0;
    model::FlowMode mode = model::FlowMode::compressible;
    std::uint64_t nx = 0;
    std::uint64_t ny = 0;
    double time = 0.0;
    double eps = 1.0;
};

/// Fixed 64-byte little-endian header (magic, version, mode, dims, time,
/// eps) followed by the raw field arrays.
void write_checkpoint(const std::string& path, const model::FlowState& st);

CheckpointInfo probe_checkpoint(const std::string& path);

/// Restores a state bit for bit; the grid must match the stored dims.
model::FlowState read_checkpoint(const std::string& path, const Grid& g);

}  // namespace lcflow::io
