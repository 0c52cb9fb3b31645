#pragma once

#include <compare>
#include <cstdint>

#include "pnpqkd/optics.hpp"
#include "pnpqkd/rng.hpp"

namespace pnpqkd {

/// Per-trial click record of the four single-photon detectors.
/// bit i of `bits` is SPD(i+1); index() gives the total ordering 0..15.
struct ClickPattern {
  std::uint8_t bits = 0;

  bool spd(int detector) const { return (bits >> detector) & 1u; }
  void set_spd(int detector, bool clicked) {
    if (clicked)
      bits |= static_cast<std::uint8_t>(1u << detector);
    else
      bits &= static_cast<std::uint8_t>(~(1u << detector));
  }
  int click_count() const;
  int index() const { return bits; }
  static ClickPattern from_index(int idx) {
    return ClickPattern{static_cast<std::uint8_t>(idx & 0xf)};
  }

  friend auto operator<=>(const ClickPattern&, const ClickPattern&) = default;
};

enum class BellOutcome { PsiPlus, PsiMinus, Inconclusive };

const char* outcome_name(BellOutcome outcome);

// Linear-optics Bell-state discrimination: a coincidence between SPD1&SPD2
// or SPD3&SPD4 heralds psi+, between SPD1&SPD4 or SPD2&SPD3 heralds psi-.
// Everything else (no clicks, single clicks, same-polarization cross-port
// pairs {1,3}/{2,4}, three or four clicks) is inconclusive.
BellOutcome classify(ClickPattern pattern);

struct OutcomeProbabilities {
  double psi_plus = 0.0;
  double psi_minus = 0.0;
  double inconclusive = 0.0;
};

/// Sum a pattern distribution over the classification fibers.
OutcomeProbabilities outcome_probabilities(const PatternDistribution& dist);

/// Bell-outcome probabilities for a pair of encoded pulses with mean photon
/// numbers mu_a/mu_b, mode overlap xi, and phase randomization.
OutcomeProbabilities outcome_probabilities(const JonesVector& pol_a,
                                           const JonesVector& pol_b,
                                           double mu_a, double mu_b, double xi,
                                           const DetectorParams& params,
                                           int phase_nodes = 256);

/// Draw one click pattern from independent per-detector Bernoulli trials.
ClickPattern sample_pattern(const std::array<double, 4>& click_probs,
                            RngStream& rng);

}  // namespace pnpqkd
