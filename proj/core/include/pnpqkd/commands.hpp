#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "pnpqkd/reports.hpp"

namespace pnpqkd {

enum class ScanKind { Hwp, Phase };

/// Command-line overrides applied on top of the config file.
struct CommandOverrides {
  std::optional<std::uint64_t> seed;
  std::optional<EngineKind> engine;
  std::optional<bool> sync;       // scan phase
  std::optional<int> samples;     // faraday-check
  bool non_reciprocal = false;    // faraday-check negative control
};

// Exit codes shared between the library commands and the CLI wrapper:
// 0 success, 2 config/validation, 3 I/O, 4 numeric failure.
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitIo = 3;
inline constexpr int kExitNumeric = 4;

/// Runs the sessions of the config's mu list and writes tally CSV(s),
/// qber.json and manifest.json into `out_dir`.
RunManifest cmd_simulate(const std::string& config_path,
                         const std::string& out_dir,
                         const CommandOverrides& overrides = {});

/// Runs an interference scan and writes scan.csv, fit.json and
/// manifest.json into `out_dir`.
RunManifest cmd_scan(ScanKind kind, const std::string& config_path,
                     const std::string& out_dir,
                     const CommandOverrides& overrides = {});

struct FaradayReport {
  int samples = 0;
  double worst_fidelity = 0.0;
  int worst_sample = 0;
  bool passed = false;
};

/// Samples Haar-random det-1 channels (the identity channel is always
/// sample 0) and verifies that a passive round trip returns the orthogonal
/// polarization with fidelity > 1 - 1e-10. `reciprocal = false` injects a
/// non-reciprocal return trip as a negative control.
FaradayReport run_faraday_check(int samples, std::uint64_t seed,
                                bool reciprocal = true);

/// Writes faraday.json and manifest.json; prints the worst case. The
/// config file is optional for this command (empty path = defaults).
RunManifest cmd_faraday_check(const std::string& config_path,
                              const std::string& out_dir,
                              const CommandOverrides& overrides = {});

}  // namespace pnpqkd
