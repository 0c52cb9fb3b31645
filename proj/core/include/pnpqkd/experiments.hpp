#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "pnpqkd/protocol.hpp"

namespace pnpqkd {

/// A measured curve: scan variable (radians), rate per trial, and the
/// standard deviation across accumulation blocks.
struct ScanCurve {
  std::vector<double> x;
  std::vector<double> y;
  std::vector<double> y_err;
};

/// Least-squares parameters of y = offset - amplitude * cos(k*x - phase).
struct SineFit {
  double offset = 0.0;
  double amplitude = 0.0;
  double phase = 0.0;
  double residual_norm = 0.0;
  int harmonic = 4;

  /// Peak-to-peak visibility A/B.
  double visibility() const { return offset > 0.0 ? amplitude / offset : 0.0; }
};

struct ScanOptions {
  std::vector<double> grid;  // radians
  std::uint64_t trials_per_point = 100000;
  int blocks = 10;
  double hwp1_angle_rad = 0.0;  // Alice's fixed encoder angle (HWP scans)
};

/// Single-photon interference: singles rate at Charlie's output port 1
/// versus the deterministic path phase. `synchronized` drives both phase
/// randomizers together (fixed phase per point); otherwise each trial draws
/// its own phase and first-order interference washes out.
ScanCurve scan_phase(bool synchronized, const SessionConfig& config,
                     const ScanOptions& options);

/// Two-photon interference: cross-port coincidence rate versus Bob's
/// encoder HWP angle with Alice's fixed and phase randomization active.
ScanCurve scan_hwp(const SessionConfig& config, const ScanOptions& options);

/// Unweighted least squares of y = B - A cos(k*x - delta). Flat data yields
/// a zero-amplitude fit. Requires >= 6 samples spanning at least half a
/// period of the k-th harmonic.
SineFit fit_sine(const ScanCurve& curve, int harmonic = 4);

/// (max - min) / (max + min) of the curve's y values.
double direct_visibility(const ScanCurve& curve);

/// Convert peak-to-peak sine visibility to the equivalent Hong-Ou-Mandel
/// dip visibility: V_HOM = 2 V / (1 + V). Domain [0, 1).
double hom_visibility(double v_sine);

/// Bell-state coincidence rates for all 16 fixed polarization-pair
/// settings at one mean photon number, with standard deviations across
/// accumulation blocks.
struct PairTallies {
  TallyTable counts;
  TallyTable stddev;
};

PairTallies reproduce_bsm_bars(const SessionConfig& config, int blocks = 10);

/// One QBER table row per mean photon number, from full sessions sharing
/// the same imperfection parameters.
struct TableEntry {
  double mu;
  QberReport report;
  TallyTable tally;
};

std::vector<TableEntry> reproduce_table1(std::span<const double> mu_values,
                                         const SessionConfig& base);

}  // namespace pnpqkd
