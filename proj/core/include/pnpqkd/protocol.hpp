#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "pnpqkd/bsm.hpp"
#include "pnpqkd/channel.hpp"
#include "pnpqkd/optics.hpp"

namespace pnpqkd {

enum class EngineKind { Analytic, MonteCarlo };

const char* engine_name(EngineKind engine);

struct BasisProbs {
  double z = 0.5;
  double x = 0.5;
};

/// Full parameterization of one measurement session. Mean photon numbers
/// are defined at the interference point (Charlie's beamsplitter input);
/// channel and component losses are folded in before this stage.
struct SessionConfig {
  double mu_a = 0.1;
  double mu_b = 0.1;
  double xi = 1.0;
  DetectorParams detector{};
  double misalignment_rad = 0.0;
  std::uint64_t n_trials = 100000;
  std::uint64_t rng_seed = 1;
  EngineKind engine = EngineKind::Analytic;
  BasisProbs basis_probs{};
  bool eq2_as_printed = false;
  int phase_nodes = 256;
  std::vector<IntensitySetting> intensity_settings = {IntensitySetting{}};

  /// One message per offending field; empty means valid.
  std::vector<std::string> validate() const;
};

/// Coincidence counts C[pol_a][pol_b][outcome] for outcome in {psi+, psi-}.
/// Monte-Carlo sessions hold integer counts; the analytic engine holds
/// expected (real) counts.
struct TallyTable {
  std::array<double, 32> counts{};

  double& at(Pol a, Pol b, BellOutcome outcome);
  double at(Pol a, Pol b, BellOutcome outcome) const;
  /// C_ij = C_ij(+) + C_ij(-).
  double c_ij(Pol a, Pol b) const;
  double basis_total(Basis basis) const;
};

struct TrialRecord {
  Encoding alice;
  Encoding bob;
  std::uint8_t intensity_a = 0;
  std::uint8_t intensity_b = 0;
  ClickPattern pattern{};
  BellOutcome outcome = BellOutcome::Inconclusive;
};

struct SessionResult {
  TallyTable tally;
  std::vector<TrialRecord> records;  // empty in analytic mode
};

/// Run a session. Monte-Carlo: n_trials independent trials, each drawing
/// bases, bits, intensity settings and phases from a per-trial derived
/// stream (deterministic in rng_seed, shard-invariant). Analytic: expected
/// counts n_trials * P(choices) * outcome probabilities.
/// Throws ConfigError listing offending fields on invalid config.
SessionResult run_session(const SessionConfig& config);

/// Monte-Carlo trials [first, first+count) only; used to shard work.
/// Summing shard tallies over a partition of 0..n_trials-1 reproduces the
/// single-run tally bit for bit.
TallyTable run_session_range(const SessionConfig& config, std::uint64_t first,
                             std::uint64_t count,
                             std::vector<TrialRecord>* records = nullptr);

/// Basis-matched, conclusive trials after the announcement bit-flip rule:
/// Z-basis -> Bob flips for both psi+ and psi- (both Bell states are
/// anti-correlated in Z); X-basis -> Bob flips only for psi-.
struct SiftedKeyPair {
  std::vector<std::uint8_t> alice_bits;
  std::vector<std::uint8_t> bob_bits;
  std::vector<Basis> bases;
};

SiftedKeyPair sift(std::span<const TrialRecord> records);

/// E_Z = (C_HH + C_VV) / (C_HH + C_VV + C_HV + C_VH).
/// Throws UndefinedStatisticError when the denominator is zero.
double qber_z(const TallyTable& tally);

/// X-basis error rate. Default numerator C_DD(-) + C_AA(-) + C_DA(+) +
/// C_AD(+) (the erroneous coincidences are psi- for DD or AA and psi+ for
/// DA or AD). `as_printed` selects the variant with C_DD(+) in the
/// numerator instead, kept for comparison with the published formula.
double qber_x(const TallyTable& tally, bool as_printed = false);

struct BasisErrorBars {
  double se_z = 0.0;
  double se_x = 0.0;
};

/// Binomial standard error sqrt(E(1-E)/N) per basis.
BasisErrorBars qber_uncertainty(const TallyTable& tally);

struct QberReport {
  double e_z = 0.0;
  double e_x = 0.0;
  double se_z = 0.0;
  double se_x = 0.0;
  double n_z = 0.0;  // Z-basis coincidence total
  double n_x = 0.0;  // X-basis coincidence total
};

QberReport make_qber_report(const TallyTable& tally, bool as_printed = false);

}  // namespace pnpqkd
