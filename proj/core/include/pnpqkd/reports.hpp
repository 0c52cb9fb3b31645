#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "pnpqkd/experiments.hpp"
#include "pnpqkd/protocol.hpp"

namespace pnpqkd {

/// Metadata for one CLI run. Lists every emitted file.
struct RunManifest {
  std::string tool_version;
  std::string command;
  std::string config_hash;  // fnv1a64 of the canonical config text
  std::uint64_t seed = 0;
  std::string engine;
  std::vector<std::string> outputs;  // file names relative to the out dir
  double duration_ms = 0.0;
};

std::uint64_t fnv1a64(std::string_view bytes);
std::string config_hash_string(std::string_view canonical_text);

/// Formats a double with 12 significant digits (CSV convention).
std::string format_g12(double value);

// Writers throw IoError on failure. Row order and float formatting are
// fixed so identical inputs produce identical bytes.

/// Columns: pol_a,pol_b,outcome,count,stddev (32 rows).
void write_tally_csv(const std::string& path, const TallyTable& counts,
                     const TallyTable* stddev);

/// Columns: x,y,y_err.
void write_scan_csv(const std::string& path, const ScanCurve& curve);

struct QberEntry {
  double mu_a = 0.0;
  double mu_b = 0.0;
  QberReport report;
};

void write_qber_json(const std::string& path,
                     const std::vector<QberEntry>& entries);

struct FitRecord {
  SineFit fit;
  double v_sine = 0.0;
  std::optional<double> v_hom;     // HWP scans
  std::optional<double> v_direct;  // phase scans
};

void write_fit_json(const std::string& path, const FitRecord& record);

void write_manifest(const std::string& path, const RunManifest& manifest);

struct FaradayRecord {
  int samples = 0;
  double worst_fidelity = 0.0;
  int worst_sample = 0;
  bool passed = false;
};

void write_faraday_json(const std::string& path, const FaradayRecord& record);

}  // namespace pnpqkd
