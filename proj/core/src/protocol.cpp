#include "pnpqkd/protocol.hpp"

#include <cmath>
#include <stdexcept>

#include "pnpqkd/errors.hpp"

namespace pnpqkd {

namespace {

constexpr std::uint64_t kTrialDomain = 0x74726961;  // per-trial stream tag

int pol_index(Pol p) { return static_cast<int>(p); }

int outcome_index(BellOutcome o) {
  switch (o) {
    case BellOutcome::PsiPlus: return 0;
    case BellOutcome::PsiMinus: return 1;
    default:
      throw std::invalid_argument("tally outcome must be psi+ or psi-");
  }
}

constexpr Pol kPols[4] = {Pol::H, Pol::V, Pol::D, Pol::A};

Encoding encoding_of(Pol pol) {
  switch (pol) {
    case Pol::H: return {Basis::Z, 0};
    case Pol::V: return {Basis::Z, 1};
    case Pol::D: return {Basis::X, 0};
    case Pol::A: return {Basis::X, 1};
  }
  throw std::invalid_argument("unknown polarization");
}

}  // namespace

const char* engine_name(EngineKind engine) {
  return engine == EngineKind::Analytic ? "analytic" : "mc";
}

std::vector<std::string> SessionConfig::validate() const {
  std::vector<std::string> issues;
  auto check = [&](bool ok, const char* msg) {
    if (!ok) issues.emplace_back(msg);
  };
  check(mu_a >= 0.0 && std::isfinite(mu_a), "mu_a: must be a finite value >= 0");
  check(mu_b >= 0.0 && std::isfinite(mu_b), "mu_b: must be a finite value >= 0");
  check(xi >= 0.0 && xi <= 1.0, "xi: must be in [0,1]");
  check(detector.efficiency >= 0.0 && detector.efficiency <= 1.0,
        "detector.efficiency: must be in [0,1]");
  check(detector.dark_prob >= 0.0 && detector.dark_prob <= 1.0,
        "detector.dark_prob: must be in [0,1]");
  check(std::isfinite(misalignment_rad),
        "misalignment_rad: must be finite");
  check(n_trials >= 1, "n_trials: must be >= 1");
  check(phase_nodes >= 1, "phase_nodes: must be >= 1");
  const bool probs_in_range = basis_probs.z >= 0.0 && basis_probs.z <= 1.0 &&
                              basis_probs.x >= 0.0 && basis_probs.x <= 1.0;
  check(probs_in_range, "basis_probs: probabilities must be in [0,1]");
  if (probs_in_range)
    check(std::abs(basis_probs.z + basis_probs.x - 1.0) <= 1e-9,
          "basis_probs: z + x must sum to 1");
  check(!intensity_settings.empty(),
        "intensity_settings: at least one setting required");
  double prob_sum = 0.0;
  bool settings_ok = true;
  for (const auto& s : intensity_settings) {
    if (s.label.empty() || !(s.attenuation >= 0.0) || !(s.prob >= 0.0))
      settings_ok = false;
    prob_sum += s.prob;
  }
  check(settings_ok,
        "intensity_settings: labels must be nonempty, attenuation and prob >= 0");
  if (!intensity_settings.empty() && settings_ok)
    check(std::abs(prob_sum - 1.0) <= 1e-9,
          "intensity_settings: probabilities must sum to 1");
  return issues;
}

double& TallyTable::at(Pol a, Pol b, BellOutcome outcome) {
  return counts[(pol_index(a) * 4 + pol_index(b)) * 2 + outcome_index(outcome)];
}

double TallyTable::at(Pol a, Pol b, BellOutcome outcome) const {
  return counts[(pol_index(a) * 4 + pol_index(b)) * 2 + outcome_index(outcome)];
}

double TallyTable::c_ij(Pol a, Pol b) const {
  return at(a, b, BellOutcome::PsiPlus) + at(a, b, BellOutcome::PsiMinus);
}

double TallyTable::basis_total(Basis basis) const {
  const Pol p0 = basis == Basis::Z ? Pol::H : Pol::D;
  const Pol p1 = basis == Basis::Z ? Pol::V : Pol::A;
  return c_ij(p0, p0) + c_ij(p0, p1) + c_ij(p1, p0) + c_ij(p1, p1);
}

namespace {

struct SessionContext {
  PartySetup alice;
  PartySetup bob;
};

SessionContext make_context(const SessionConfig& config) {
  // Mean photon numbers are specified at the interference point, so the
  // session uses lossless identity channels with the launch intensity set
  // to the configured mu.
  SessionContext ctx;
  ctx.alice.source.launch_intensity = config.mu_a;
  ctx.alice.source.settings = config.intensity_settings;
  ctx.bob.source.launch_intensity = config.mu_b;
  ctx.bob.source.settings = config.intensity_settings;
  return ctx;
}

TallyTable run_analytic(const SessionConfig& config) {
  const SessionContext ctx = make_context(config);
  TallyTable tally;
  RngStream dummy(0);

  auto choice_prob = [&](Pol pol) {
    const Encoding e = encoding_of(pol);
    return 0.5 * (e.basis == Basis::Z ? config.basis_probs.z
                                      : config.basis_probs.x);
  };

  for (Pol pa : kPols) {
    for (Pol pb : kPols) {
      const double pair_prob = choice_prob(pa) * choice_prob(pb);
      if (pair_prob == 0.0) continue;
      double p_plus = 0.0;
      double p_minus = 0.0;
      for (std::size_t ia = 0; ia < config.intensity_settings.size(); ++ia) {
        for (std::size_t ib = 0; ib < config.intensity_settings.size(); ++ib) {
          const double w = config.intensity_settings[ia].prob *
                           config.intensity_settings[ib].prob;
          if (w == 0.0) continue;
          const FieldState field = prepare_field(
              encoding_of(pa), encoding_of(pb), ctx.alice, ctx.bob, config.xi,
              config.misalignment_rad, ia, ib, dummy, 0.0);
          const auto probs = outcome_probabilities(joint_pattern_distribution(
              field, config.detector, config.phase_nodes));
          p_plus += w * probs.psi_plus;
          p_minus += w * probs.psi_minus;
        }
      }
      const double n = static_cast<double>(config.n_trials) * pair_prob;
      tally.at(pa, pb, BellOutcome::PsiPlus) = n * p_plus;
      tally.at(pa, pb, BellOutcome::PsiMinus) = n * p_minus;
    }
  }
  return tally;
}

std::size_t draw_intensity(const std::vector<IntensitySetting>& settings,
                           RngStream& rng) {
  if (settings.size() == 1) return 0;
  const double u = rng.next_unit();
  double acc = 0.0;
  for (std::size_t i = 0; i < settings.size(); ++i) {
    acc += settings[i].prob;
    if (u < acc) return i;
  }
  return settings.size() - 1;
}

}  // namespace

TallyTable run_session_range(const SessionConfig& config, std::uint64_t first,
                             std::uint64_t count,
                             std::vector<TrialRecord>* records) {
  const SessionContext ctx = make_context(config);
  const RngStream root = RngStream(config.rng_seed).child(kTrialDomain);
  TallyTable tally;
  if (records) records->reserve(records->size() + count);

  for (std::uint64_t t = first; t < first + count; ++t) {
    RngStream rng = root.child(t);
    TrialRecord rec;
    rec.alice.basis = rng.next_bernoulli(config.basis_probs.z) ? Basis::Z : Basis::X;
    rec.alice.bit = rng.next_bernoulli(0.5) ? 1 : 0;
    rec.bob.basis = rng.next_bernoulli(config.basis_probs.z) ? Basis::Z : Basis::X;
    rec.bob.bit = rng.next_bernoulli(0.5) ? 1 : 0;
    rec.intensity_a = static_cast<std::uint8_t>(
        draw_intensity(config.intensity_settings, rng));
    rec.intensity_b = static_cast<std::uint8_t>(
        draw_intensity(config.intensity_settings, rng));

    const FieldState field = prepare_field(
        rec.alice, rec.bob, ctx.alice, ctx.bob, config.xi,
        config.misalignment_rad, rec.intensity_a, rec.intensity_b, rng);
    const auto probs =
        click_probabilities(beamsplitter_outputs(field), config.detector);
    rec.pattern = sample_pattern(probs, rng);
    rec.outcome = classify(rec.pattern);

    if (rec.outcome != BellOutcome::Inconclusive)
      tally.at(target_polarization(rec.alice), target_polarization(rec.bob),
               rec.outcome) += 1.0;
    if (records) records->push_back(rec);
  }
  return tally;
}

SessionResult run_session(const SessionConfig& config) {
  if (auto issues = config.validate(); !issues.empty())
    throw ConfigError(std::move(issues));

  SessionResult result;
  if (config.engine == EngineKind::Analytic) {
    result.tally = run_analytic(config);
  } else {
    result.tally =
        run_session_range(config, 0, config.n_trials, &result.records);
  }
  return result;
}

SiftedKeyPair sift(std::span<const TrialRecord> records) {
  SiftedKeyPair key;
  for (const TrialRecord& rec : records) {
    if ((rec.alice.bit != 0 && rec.alice.bit != 1) ||
        (rec.bob.bit != 0 && rec.bob.bit != 1))
      throw DataError("trial record carries a non-binary bit");
    if (classify(rec.pattern) != rec.outcome)
      throw DataError("trial record outcome disagrees with its click pattern");
    if (rec.outcome == BellOutcome::Inconclusive) continue;
    if (rec.alice.basis != rec.bob.basis) continue;

    int bob_bit = rec.bob.bit;
    if (rec.alice.basis == Basis::Z)
      bob_bit ^= 1;  // psi+ and psi- are both anti-correlated in Z
    else if (rec.outcome == BellOutcome::PsiMinus)
      bob_bit ^= 1;  // only psi- is anti-correlated in X
    key.alice_bits.push_back(static_cast<std::uint8_t>(rec.alice.bit));
    key.bob_bits.push_back(static_cast<std::uint8_t>(bob_bit));
    key.bases.push_back(rec.alice.basis);
  }
  return key;
}

double qber_z(const TallyTable& t) {
  const double err = t.c_ij(Pol::H, Pol::H) + t.c_ij(Pol::V, Pol::V);
  const double total = t.basis_total(Basis::Z);
  if (total <= 0.0)
    throw UndefinedStatisticError("no Z-basis coincidences: E_Z undefined");
  return err / total;
}

double qber_x(const TallyTable& t, bool as_printed) {
  const double dd = as_printed ? t.at(Pol::D, Pol::D, BellOutcome::PsiPlus)
                               : t.at(Pol::D, Pol::D, BellOutcome::PsiMinus);
  const double err = dd + t.at(Pol::A, Pol::A, BellOutcome::PsiMinus) +
                     t.at(Pol::D, Pol::A, BellOutcome::PsiPlus) +
                     t.at(Pol::A, Pol::D, BellOutcome::PsiPlus);
  const double total = t.basis_total(Basis::X);
  if (total <= 0.0)
    throw UndefinedStatisticError("no X-basis coincidences: E_X undefined");
  return err / total;
}

BasisErrorBars qber_uncertainty(const TallyTable& t) {
  const double n_z = t.basis_total(Basis::Z);
  const double n_x = t.basis_total(Basis::X);
  if (n_z <= 0.0 || n_x <= 0.0)
    throw UndefinedStatisticError("empty basis: QBER uncertainty undefined");
  const double e_z = qber_z(t);
  const double e_x = qber_x(t);
  return {std::sqrt(e_z * (1.0 - e_z) / n_z),
          std::sqrt(e_x * (1.0 - e_x) / n_x)};
}

QberReport make_qber_report(const TallyTable& t, bool as_printed) {
  QberReport report;
  report.e_z = qber_z(t);
  report.e_x = qber_x(t, as_printed);
  report.n_z = t.basis_total(Basis::Z);
  report.n_x = t.basis_total(Basis::X);
  report.se_z = std::sqrt(report.e_z * (1.0 - report.e_z) / report.n_z);
  report.se_x = std::sqrt(report.e_x * (1.0 - report.e_x) / report.n_x);
  return report;
}

}  // namespace pnpqkd
