#pragma once

#include <optional>
#include <string>
#include <vector>

#include "pnpqkd/optics.hpp"
#include "pnpqkd/rng.hpp"

namespace pnpqkd {

/// One party's fiber link. The forward trip applies `forward_unitary`;
/// a reciprocal return trip applies its transpose. `reciprocal = false`
/// (return trip reapplies the forward matrix) exists as a negative-control
/// hook for the auto-compensation check.
struct ChannelModel {
  JonesMatrix forward_unitary = JonesMatrix::identity();
  double one_way_loss_db = 0.0;
  bool reciprocal = true;

  /// Throws std::invalid_argument on a non-unitary matrix or negative loss.
  void validate() const;
};

/// One entry of the intensity-modulator program (signal/decoy levels).
struct IntensitySetting {
  std::string label = "signal";
  double attenuation = 1.0;  // multiplies the launch intensity
  double prob = 1.0;         // per-trial selection probability
};

struct SourceParams {
  double launch_intensity = 0.1;  // mean photons at Charlie's output
  std::vector<IntensitySetting> settings = {IntensitySetting{}};
};

/// Haar-distributed element of SU(2) (det = 1). Deterministic per stream.
JonesMatrix random_channel_unitary(RngStream& rng);

struct RoundTrip {
  JonesVector polarization;  // unit norm
  Complex amplitude_scale;   // multiplies sqrt(launch_intensity)
};

// Full plug-and-play round trip for one party: Charlie's pulse traverses
// the fiber (U), reflects off the Faraday mirror (F), gets its phase
// randomized, passes the encoder half waveplate and intensity modulator,
// and returns through the same fiber (U^T when reciprocal). Output
// polarization is U^T * HWP(encoder) * F * U * input; the amplitude scale is
// 10^(-2*loss_db/20) * sqrt(intensity_attenuation) * e^{i*phase}. With a
// passive encoder the output equals F * input for every det-1 channel.
RoundTrip round_trip(const JonesVector& input_pol, const ChannelModel& channel,
                     double encoder_angle_rad, double intensity_attenuation,
                     double phase_rad);

enum class Basis { Z, X };

const char* basis_name(Basis basis);

/// A party's per-trial preparation choice.
struct Encoding {
  Basis basis = Basis::Z;
  int bit = 0;
};

/// Bit-to-state convention: Z: 0->H, 1->V; X: 0->D, 1->A.
Pol target_polarization(Encoding encoding);

/// Encoder HWP angle that produces `target` from the post-Faraday-mirror
/// polarization, calibrated for the nominal identity channel (Charlie
/// launches H, so the encoder sees V up to phase).
double encoder_angle_for(Pol target);

struct PartySetup {
  ChannelModel channel;
  SourceParams source;
};

/// Both parties' pulses as they arrive back at Charlie's beamsplitter.
/// Draws one uniform phase per party (only the difference enters the
/// field), or uses `fixed_rel_phase` when the phase randomizers are run
/// synchronized. Bob's encoded state is additionally rotated by
/// `misalignment_rad`.
FieldState prepare_field_angles(double encoder_angle_a, double encoder_angle_b,
                                const PartySetup& alice, const PartySetup& bob,
                                double xi, double misalignment_rad,
                                std::size_t intensity_index_a,
                                std::size_t intensity_index_b, RngStream& rng,
                                std::optional<double> fixed_rel_phase = {});

FieldState prepare_field(Encoding choice_a, Encoding choice_b,
                         const PartySetup& alice, const PartySetup& bob,
                         double xi, double misalignment_rad,
                         std::size_t intensity_index_a,
                         std::size_t intensity_index_b, RngStream& rng,
                         std::optional<double> fixed_rel_phase = {});

}  // namespace pnpqkd
