#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "ensra/config.hpp"
#include "ensra/sim.hpp"
#include "ensra/topology.hpp"

namespace ensra {

struct ParsedConfig {
  SystemConfig cfg;
  Topology topo;
  Algorithm algorithm = Algorithm::kEnsra;
};

/// Reads a YAML scenario (flat keys plus `mac`, `dcf` and `solver` sections)
/// and applies dotted `key=value` overrides on top. Unknown keys, type
/// mismatches and constraint violations raise ConfigError naming the key.
/// An optional `wifi_cells` list of cell lists fixes the AP layout; otherwise
/// it is drawn from the seed.
ParsedConfig parse_config_text(const std::string& yaml, const std::vector<std::string>& overrides = {});
ParsedConfig parse_config(const std::string& path, const std::vector<std::string>& overrides = {});

/// All recognised keys in dotted form.
std::vector<std::string> config_keys();

extern const char* const kCsvHeader;

/// Header line plus one row per run, '.' decimal point, shortest round-trip
/// formatting.
void write_csv(std::ostream& out, const std::vector<RunRow>& rows);
void emit_csv(const std::vector<RunRow>& rows, const std::string& path);
std::vector<RunRow> read_csv(std::istream& in);

/// Per-frame series: frame,avg_power_w,q_0..q_{L-1},alpha_0..alpha_{L-1}.
void write_series(std::ostream& out, const std::vector<FrameRecord>& series);

}  // namespace ensra
