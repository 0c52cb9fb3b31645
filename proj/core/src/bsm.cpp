#include "pnpqkd/bsm.hpp"

#include <bit>
#include <cmath>

namespace pnpqkd {

int ClickPattern::click_count() const { return std::popcount(bits); }

const char* outcome_name(BellOutcome outcome) {
  switch (outcome) {
    case BellOutcome::PsiPlus: return "psi_plus";
    case BellOutcome::PsiMinus: return "psi_minus";
    case BellOutcome::Inconclusive: return "inconclusive";
  }
  return "?";
}

BellOutcome classify(ClickPattern pattern) {
  if (pattern.click_count() != 2) return BellOutcome::Inconclusive;
  switch (pattern.bits) {
    case 0b0011:  // SPD1 & SPD2
    case 0b1100:  // SPD3 & SPD4
      return BellOutcome::PsiPlus;
    case 0b1001:  // SPD1 & SPD4
    case 0b0110:  // SPD2 & SPD3
      return BellOutcome::PsiMinus;
    default:  // same-polarization cross-port pairs {1,3}, {2,4}
      return BellOutcome::Inconclusive;
  }
}

OutcomeProbabilities outcome_probabilities(const PatternDistribution& dist) {
  OutcomeProbabilities out;
  for (int idx = 0; idx < 16; ++idx) {
    switch (classify(ClickPattern::from_index(idx))) {
      case BellOutcome::PsiPlus: out.psi_plus += dist[idx]; break;
      case BellOutcome::PsiMinus: out.psi_minus += dist[idx]; break;
      case BellOutcome::Inconclusive: out.inconclusive += dist[idx]; break;
    }
  }
  return out;
}

OutcomeProbabilities outcome_probabilities(const JonesVector& pol_a,
                                           const JonesVector& pol_b,
                                           double mu_a, double mu_b, double xi,
                                           const DetectorParams& params,
                                           int phase_nodes) {
  if (!(mu_a >= 0.0) || !(mu_b >= 0.0))
    throw std::invalid_argument("mean photon numbers must be >= 0");
  const double sa = std::sqrt(mu_a);
  const double sb = std::sqrt(mu_b);
  FieldState field;
  field.alpha_a = {sa * pol_a.h, sa * pol_a.v};
  field.alpha_b = {sb * pol_b.h, sb * pol_b.v};
  field.overlap = xi;
  return outcome_probabilities(
      joint_pattern_distribution(field, params, phase_nodes));
}

ClickPattern sample_pattern(const std::array<double, 4>& click_probs,
                            RngStream& rng) {
  ClickPattern pattern;
  for (int d = 0; d < 4; ++d)
    pattern.set_spd(d, rng.next_bernoulli(click_probs[d]));
  return pattern;
}

}  // namespace pnpqkd
