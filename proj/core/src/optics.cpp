#include "pnpqkd/optics.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace pnpqkd {

namespace {
constexpr double kInvSqrt2 = 0.70710678118654752440;
}

JonesVector JonesVector::normalized() const {
  const double n = std::sqrt(norm_sq());
  if (n <= 0.0) throw std::invalid_argument("cannot normalize a zero Jones vector");
  return {h / n, v / n};
}

Complex inner(const JonesVector& a, const JonesVector& b) {
  return std::conj(a.h) * b.h + std::conj(a.v) * b.v;
}

JonesVector jones_vector(Pol pol) {
  switch (pol) {
    case Pol::H: return {1.0, 0.0};
    case Pol::V: return {0.0, 1.0};
    case Pol::D: return {kInvSqrt2, kInvSqrt2};
    case Pol::A: return {kInvSqrt2, -kInvSqrt2};
  }
  throw std::invalid_argument("unknown polarization");
}

const char* pol_name(Pol pol) {
  switch (pol) {
    case Pol::H: return "H";
    case Pol::V: return "V";
    case Pol::D: return "D";
    case Pol::A: return "A";
  }
  return "?";
}

JonesMatrix JonesMatrix::operator*(const JonesMatrix& o) const {
  return {m00 * o.m00 + m01 * o.m10, m00 * o.m01 + m01 * o.m11,
          m10 * o.m00 + m11 * o.m10, m10 * o.m01 + m11 * o.m11};
}

JonesMatrix JonesMatrix::adjoint() const {
  return {std::conj(m00), std::conj(m10), std::conj(m01), std::conj(m11)};
}

JonesMatrix JonesMatrix::transpose() const { return {m00, m10, m01, m11}; }

bool JonesMatrix::is_unitary(double tol) const {
  const JonesMatrix p = adjoint() * (*this);
  return std::abs(p.m00 - 1.0) <= tol && std::abs(p.m11 - 1.0) <= tol &&
         std::abs(p.m01) <= tol && std::abs(p.m10) <= tol;
}

JonesMatrix hwp_matrix(double angle_rad) {
  if (!std::isfinite(angle_rad))
    throw std::invalid_argument("hwp_matrix: angle must be finite");
  const double c = std::cos(2.0 * angle_rad);
  const double s = std::sin(2.0 * angle_rad);
  return {Complex{c, 0.0}, Complex{s, 0.0}, Complex{s, 0.0}, Complex{-c, 0.0}};
}

JonesMatrix faraday_mirror_matrix() {
  return {Complex{0.0, 0.0}, Complex{1.0, 0.0}, Complex{-1.0, 0.0},
          Complex{0.0, 0.0}};
}

JonesMatrix rotation_matrix(double angle_rad) {
  if (!std::isfinite(angle_rad))
    throw std::invalid_argument("rotation_matrix: angle must be finite");
  const double c = std::cos(angle_rad);
  const double s = std::sin(angle_rad);
  return {Complex{c, 0.0}, Complex{-s, 0.0}, Complex{s, 0.0}, Complex{c, 0.0}};
}

void DetectorParams::validate() const {
  if (!(efficiency >= 0.0 && efficiency <= 1.0))
    throw std::invalid_argument("detector efficiency must be in [0,1]");
  if (!(dark_prob >= 0.0 && dark_prob <= 1.0))
    throw std::invalid_argument("detector dark probability must be in [0,1]");
}

DetectorMeans beamsplitter_outputs(const FieldState& field) {
  return beamsplitter_outputs(field, field.rel_phase);
}

DetectorMeans beamsplitter_outputs(const FieldState& field, double rel_phase) {
  const double xi = field.overlap;
  if (!(xi >= 0.0 && xi <= 1.0))
    throw std::invalid_argument("mode overlap must be in [0,1]");
  const Complex phase = std::polar(1.0, rel_phase);
  const Complex i_unit{0.0, 1.0};
  const double sqrt_xi = std::sqrt(xi);
  const double unmatched = 1.0 - xi;

  DetectorMeans out;
  for (int p = 0; p < 2; ++p) {
    const Complex a = field.alpha_a[p];
    const Complex matched_b = sqrt_xi * phase * field.alpha_b[p];
    const double leak = 0.5 * unmatched * std::norm(field.alpha_b[p]);
    // out1 = (a + i b)/sqrt2, out2 = (i a + b)/sqrt2; the unmatched part of
    // Bob's pulse splits 50:50 without an interference term.
    out.n[p] = 0.5 * std::norm(a + i_unit * matched_b) + leak;      // port 1
    out.n[p + 2] = 0.5 * std::norm(a - i_unit * matched_b) + leak;  // port 2
  }
  return out;
}

double click_probability(double mean_photons, const DetectorParams& params) {
  if (!(mean_photons >= 0.0))
    throw std::invalid_argument("mean photon number must be >= 0");
  params.validate();
  return 1.0 - (1.0 - params.dark_prob) *
                   std::exp(-params.efficiency * mean_photons);
}

std::array<double, 4> click_probabilities(const DetectorMeans& means,
                                          const DetectorParams& params) {
  return {click_probability(means.n[0], params),
          click_probability(means.n[1], params),
          click_probability(means.n[2], params),
          click_probability(means.n[3], params)};
}

PatternDistribution pattern_distribution_at_phase(const FieldState& field,
                                                  const DetectorParams& params,
                                                  double rel_phase) {
  const auto p = click_probabilities(beamsplitter_outputs(field, rel_phase), params);
  PatternDistribution dist{};
  for (int idx = 0; idx < 16; ++idx) {
    double prob = 1.0;
    for (int d = 0; d < 4; ++d)
      prob *= ((idx >> d) & 1) ? p[d] : (1.0 - p[d]);
    dist[idx] = prob;
  }
  return dist;
}

PatternDistribution joint_pattern_distribution(const FieldState& field,
                                               const DetectorParams& params,
                                               int phase_nodes) {
  if (phase_nodes < 1)
    throw std::invalid_argument("phase_nodes must be >= 1");
  PatternDistribution avg{};
  const double step = 2.0 * std::numbers::pi / phase_nodes;
  for (int k = 0; k < phase_nodes; ++k) {
    const auto node = pattern_distribution_at_phase(field, params, k * step);
    for (int idx = 0; idx < 16; ++idx) avg[idx] += node[idx];
  }
  for (double& p : avg) p /= phase_nodes;
  return avg;
}

}  // namespace pnpqkd
