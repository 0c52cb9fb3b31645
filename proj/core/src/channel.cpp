#include "pnpqkd/channel.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace pnpqkd {

void ChannelModel::validate() const {
  if (!forward_unitary.is_unitary(1e-10))
    throw std::invalid_argument("channel forward matrix must be unitary");
  if (!(one_way_loss_db >= 0.0) || !std::isfinite(one_way_loss_db))
    throw std::invalid_argument("channel loss must be a finite value >= 0 dB");
}

JonesMatrix random_channel_unitary(RngStream& rng) {
  // U = [[e^{ia} cos t, e^{ib} sin t], [-e^{-ib} sin t, e^{-ia} cos t]]
  // with a, b uniform on [0, 2pi) and cos^2 t uniform on [0, 1] samples the
  // Haar measure on SU(2); det U = 1 by construction.
  const double alpha = rng.next_phase();
  const double beta = rng.next_phase();
  const double t = std::acos(std::sqrt(rng.next_unit()));
  const double c = std::cos(t);
  const double s = std::sin(t);
  return {std::polar(c, alpha), std::polar(s, beta),
          -std::polar(s, -beta), std::polar(c, -alpha)};
}

const char* basis_name(Basis basis) { return basis == Basis::Z ? "Z" : "X"; }

Pol target_polarization(Encoding encoding) {
  if (encoding.bit != 0 && encoding.bit != 1)
    throw std::invalid_argument("encoding bit must be 0 or 1");
  if (encoding.basis == Basis::Z)
    return encoding.bit == 0 ? Pol::H : Pol::V;
  return encoding.bit == 0 ? Pol::D : Pol::A;
}

double encoder_angle_for(Pol target) {
  // The encoder HWP acts on the post-mirror state F*H = -V. HWP(t) maps V
  // to (sin 2t, -cos 2t), so: H needs t=45 deg, V t=0, D t=67.5, A t=22.5.
  constexpr double pi = std::numbers::pi;
  switch (target) {
    case Pol::H: return pi / 4.0;
    case Pol::V: return 0.0;
    case Pol::D: return 3.0 * pi / 8.0;
    case Pol::A: return pi / 8.0;
  }
  throw std::invalid_argument("unknown polarization");
}

RoundTrip round_trip(const JonesVector& input_pol, const ChannelModel& channel,
                     double encoder_angle_rad, double intensity_attenuation,
                     double phase_rad) {
  channel.validate();
  if (!(intensity_attenuation >= 0.0))
    throw std::invalid_argument("intensity attenuation must be >= 0");

  const JonesMatrix& fwd = channel.forward_unitary;
  const JonesMatrix ret = channel.reciprocal ? fwd.transpose() : fwd;
  const JonesMatrix enc = hwp_matrix(encoder_angle_rad);
  const JonesVector pol =
      ret * (enc * (faraday_mirror_matrix() * (fwd * input_pol)));

  const double field_loss = std::pow(10.0, -2.0 * channel.one_way_loss_db / 20.0);
  const Complex scale = std::polar(
      field_loss * std::sqrt(intensity_attenuation), phase_rad);
  return {pol.normalized(), scale};
}

namespace {

JonesVector party_amplitude(double encoder_angle, const PartySetup& party,
                            std::size_t intensity_index) {
  if (intensity_index >= party.source.settings.size())
    throw std::invalid_argument("intensity setting index out of range");
  if (!(party.source.launch_intensity >= 0.0))
    throw std::invalid_argument("launch intensity must be >= 0");
  const auto& setting = party.source.settings[intensity_index];
  // The per-party random phase is carried separately as the field's
  // relative phase, so the round trip here uses phase 0.
  const RoundTrip rt = round_trip(JonesVector{1.0, 0.0}, party.channel,
                                  encoder_angle, setting.attenuation, 0.0);
  const Complex amp = std::sqrt(party.source.launch_intensity) * rt.amplitude_scale;
  return {amp * rt.polarization.h, amp * rt.polarization.v};
}

}  // namespace

FieldState prepare_field_angles(double encoder_angle_a, double encoder_angle_b,
                                const PartySetup& alice, const PartySetup& bob,
                                double xi, double misalignment_rad,
                                std::size_t intensity_index_a,
                                std::size_t intensity_index_b, RngStream& rng,
                                std::optional<double> fixed_rel_phase) {
  if (!(xi >= 0.0 && xi <= 1.0))
    throw std::invalid_argument("mode overlap must be in [0,1]");

  FieldState field;
  const JonesVector a = party_amplitude(encoder_angle_a, alice, intensity_index_a);
  JonesVector b = party_amplitude(encoder_angle_b, bob, intensity_index_b);
  if (misalignment_rad != 0.0) b = rotation_matrix(misalignment_rad) * b;

  field.alpha_a = {a.h, a.v};
  field.alpha_b = {b.h, b.v};
  field.overlap = xi;
  if (fixed_rel_phase) {
    field.rel_phase = *fixed_rel_phase;
  } else {
    const double phase_a = rng.next_phase();
    const double phase_b = rng.next_phase();
    field.rel_phase = std::fmod(phase_b - phase_a + 2.0 * std::numbers::pi,
                                2.0 * std::numbers::pi);
  }
  return field;
}

FieldState prepare_field(Encoding choice_a, Encoding choice_b,
                         const PartySetup& alice, const PartySetup& bob,
                         double xi, double misalignment_rad,
                         std::size_t intensity_index_a,
                         std::size_t intensity_index_b, RngStream& rng,
                         std::optional<double> fixed_rel_phase) {
  return prepare_field_angles(
      encoder_angle_for(target_polarization(choice_a)),
      encoder_angle_for(target_polarization(choice_b)), alice, bob, xi,
      misalignment_rad, intensity_index_a, intensity_index_b, rng,
      fixed_rel_phase);
}

}  // namespace pnpqkd
