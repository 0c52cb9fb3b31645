#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "pnpqkd/experiments.hpp"
#include "pnpqkd/protocol.hpp"

namespace pnpqkd {

struct ScanSettings {
  int points = 24;
  double start = 0.0;
  double stop = 2.0 * std::numbers::pi;
  std::uint64_t trials_per_point = 100000;
  bool sync = false;
  int blocks = 10;
  double hwp1_angle_rad = 0.0;

  std::vector<double> grid() const;
};

struct FaradaySettings {
  int samples = 1000;
};

/// Parsed and validated run configuration (JSON, schema_version 1).
/// Unknown keys anywhere in the document are rejected.
struct SimulatorConfig {
  int schema_version = 1;
  std::uint64_t seed = 1;
  EngineKind engine = EngineKind::Analytic;

  std::vector<double> mu_a_values = {0.1};
  std::vector<double> mu_b_values = {0.1};  // same length as mu_a_values
  SessionConfig session;                    // mu fields filled per run
  bool fixed_polarizations = false;
  int blocks = 10;

  std::optional<ScanSettings> scan;
  FaradaySettings faraday{};

  /// Session config for entry `i` of the mu list.
  SessionConfig session_for(std::size_t i) const;
};

/// Throws ConfigError (field-level messages) or IoError.
SimulatorConfig load_config(const std::string& path);
SimulatorConfig parse_config_text(const std::string& text);

/// Canonical serialization of the parsed document (sorted keys), the input
/// to the manifest's config hash; stable under key reordering in the file.
std::string canonical_config_text(const std::string& path);

}  // namespace pnpqkd
