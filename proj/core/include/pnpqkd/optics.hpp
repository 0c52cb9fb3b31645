#pragma once

#include <array>
#include <complex>

namespace pnpqkd {

using Complex = std::complex<double>;

/// Polarization amplitude pair (H, V). Dimensionless when used as a state,
/// in units of sqrt(photons) when used as a field amplitude.
struct JonesVector {
  Complex h{0.0, 0.0};
  Complex v{0.0, 0.0};

  double norm_sq() const { return std::norm(h) + std::norm(v); }
  JonesVector normalized() const;
};

/// <a|b> with the conjugate on the left argument.
Complex inner(const JonesVector& a, const JonesVector& b);

enum class Pol { H, V, D, A };

/// Unit Jones vector of a canonical polarization:
/// H=(1,0), V=(0,1), D=(1,1)/sqrt2, A=(1,-1)/sqrt2.
JonesVector jones_vector(Pol pol);
const char* pol_name(Pol pol);

/// 2x2 complex polarization transform, row-major.
struct JonesMatrix {
  Complex m00{1.0, 0.0}, m01{0.0, 0.0};
  Complex m10{0.0, 0.0}, m11{1.0, 0.0};

  JonesVector operator*(const JonesVector& x) const {
    return {m00 * x.h + m01 * x.v, m10 * x.h + m11 * x.v};
  }
  JonesMatrix operator*(const JonesMatrix& o) const;
  JonesMatrix adjoint() const;
  JonesMatrix transpose() const;
  Complex det() const { return m00 * m11 - m01 * m10; }
  /// max |(M†M - I)_ij| <= tol
  bool is_unitary(double tol = 1e-10) const;

  static JonesMatrix identity() { return {}; }
};

/// Half waveplate at `angle_rad` from horizontal:
/// [[cos 2t, sin 2t], [sin 2t, -cos 2t]]. Unitary and Hermitian.
JonesMatrix hwp_matrix(double angle_rad);

/// Faraday mirror, fixed to F = [[0,1],[-1,0]] (global phase dropped).
/// Maps every polarization to its orthogonal: <x|F|x> = 0, and satisfies
/// U^T F U = F for every U in SU(2) -- the algebraic core of the
/// plug-and-play auto-compensation.
JonesMatrix faraday_mirror_matrix();

/// Plain rotation by `angle_rad`: [[c,-s],[s,c]].
JonesMatrix rotation_matrix(double angle_rad);

/// Threshold (non-photon-number-resolving) detector.
struct DetectorParams {
  double efficiency = 0.5;  // eta, probability a photon registers
  double dark_prob = 1e-5;  // dark-click probability per trial slot

  /// Throws std::invalid_argument unless both values are in [0,1].
  void validate() const;
};

/// Coherent amplitudes of the two pulses meeting at Charlie's beamsplitter.
/// `overlap` is the temporal/spectral mode overlap xi in [0,1]; only the
/// matched fraction of Bob's amplitude interferes with Alice's. `rel_phase`
/// is Bob's optical phase relative to Alice for the current trial.
struct FieldState {
  std::array<Complex, 2> alpha_a{};  // Alice (H, V), sqrt(photons)
  std::array<Complex, 2> alpha_b{};  // Bob (H, V), sqrt(photons)
  double overlap = 1.0;
  double rel_phase = 0.0;

  double mu_a() const { return std::norm(alpha_a[0]) + std::norm(alpha_a[1]); }
  double mu_b() const { return std::norm(alpha_b[0]) + std::norm(alpha_b[1]); }
};

/// Mean photon numbers per trial slot at SPD1..SPD4.
/// SPD1 = output1-H, SPD2 = output1-V, SPD3 = output2-H, SPD4 = output2-V.
struct DetectorMeans {
  std::array<double, 4> n{};

  double total() const { return n[0] + n[1] + n[2] + n[3]; }
};

// 50:50 beamsplitter with the symmetric i-convention
//   out1 = (a + i b)/sqrt2,  out2 = (i a + b)/sqrt2
// applied per polarization. Bob's amplitude splits into a matched part
// sqrt(xi)*alpha_b that interferes and an unmatched part sqrt(1-xi)*alpha_b
// that adds in intensity only. Conserves energy: sum n = mu_a + mu_b.
DetectorMeans beamsplitter_outputs(const FieldState& field);
DetectorMeans beamsplitter_outputs(const FieldState& field, double rel_phase);

/// P(click) = 1 - (1 - dark_prob) * exp(-efficiency * mean_photons).
double click_probability(double mean_photons, const DetectorParams& params);

std::array<double, 4> click_probabilities(const DetectorMeans& means,
                                          const DetectorParams& params);

/// Probability of each of the 16 click patterns, indexed by
/// bit0=SPD1 .. bit3=SPD4, for a fixed relative phase.
using PatternDistribution = std::array<double, 16>;
PatternDistribution pattern_distribution_at_phase(const FieldState& field,
                                                  const DetectorParams& params,
                                                  double rel_phase);

/// Phase-averaged click-pattern distribution: uniform quadrature over
/// phase nodes 2*pi*k/K, k = 0..K-1. The integrand is smooth and
/// 2*pi-periodic, so the uniform rule converges spectrally in K.
PatternDistribution joint_pattern_distribution(const FieldState& field,
                                               const DetectorParams& params,
                                               int phase_nodes = 256);

}  // namespace pnpqkd
