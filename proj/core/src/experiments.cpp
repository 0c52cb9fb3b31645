#include "pnpqkd/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "pnpqkd/errors.hpp"

namespace pnpqkd {

namespace {

constexpr std::uint64_t kScanDomain = 0x7363616e;
constexpr std::uint64_t kBarsDomain = 0x62617273;
constexpr std::uint64_t kTableDomain = 0x7461626c;

struct PortProbs {
  double port1;
  double port2;
};

// The interference scans route each beamsplitter output straight to one
// detector (no polarizing splitter), so a port detector sees the summed
// H+V mean photon number.
PortProbs port_click_probs(const FieldState& field, double phase,
                           const DetectorParams& det) {
  const DetectorMeans m = beamsplitter_outputs(field, phase);
  return {click_probability(m.n[0] + m.n[1], det),
          click_probability(m.n[2] + m.n[3], det)};
}

PartySetup setup_with_mu(double mu) {
  PartySetup party;
  party.source.launch_intensity = mu;
  return party;
}

void validate_scan(const SessionConfig& config, const ScanOptions& options) {
  if (auto issues = config.validate(); !issues.empty())
    throw ConfigError(std::move(issues));
  if (options.grid.empty())
    throw ConfigError("scan: angle/phase grid must not be empty");
  if (options.blocks < 1) throw ConfigError("scan: blocks must be >= 1");
  if (config.engine == EngineKind::MonteCarlo &&
      options.trials_per_point < static_cast<std::uint64_t>(options.blocks))
    throw ConfigError("scan: trials_per_point must be >= blocks");
}

/// Mean of per-block rates and their sample standard deviation.
struct BlockStats {
  double mean = 0.0;
  double stddev = 0.0;
};

BlockStats block_stats(const std::vector<double>& block_rates) {
  BlockStats s;
  const std::size_t n = block_rates.size();
  for (double r : block_rates) s.mean += r;
  s.mean /= static_cast<double>(n);
  if (n > 1) {
    double ss = 0.0;
    for (double r : block_rates) ss += (r - s.mean) * (r - s.mean);
    s.stddev = std::sqrt(ss / static_cast<double>(n - 1));
  }
  return s;
}

}  // namespace

ScanCurve scan_phase(bool synchronized, const SessionConfig& config,
                     const ScanOptions& options) {
  validate_scan(config, options);
  const PartySetup alice = setup_with_mu(config.mu_a);
  const PartySetup bob = setup_with_mu(config.mu_b);
  // Both parties keep a fixed identical encoding (Z bit 0); only the phase
  // varies across the scan.
  const Encoding enc{Basis::Z, 0};
  const RngStream root = RngStream(config.rng_seed).child(kScanDomain);

  ScanCurve curve;
  for (std::size_t i = 0; i < options.grid.size(); ++i) {
    const double phase = options.grid[i];
    RngStream point_rng = root.child(i);

    if (config.engine == EngineKind::Analytic) {
      RngStream dummy(0);
      const FieldState field =
          prepare_field(enc, enc, alice, bob, config.xi,
                        config.misalignment_rad, 0, 0, dummy, 0.0);
      double rate;
      if (synchronized) {
        rate = port_click_probs(field, phase, config.detector).port1;
      } else {
        // independently randomized phases: the flat phase average
        double acc = 0.0;
        const double step = 2.0 * std::numbers::pi / config.phase_nodes;
        for (int k = 0; k < config.phase_nodes; ++k)
          acc += port_click_probs(field, k * step, config.detector).port1;
        rate = acc / config.phase_nodes;
      }
      curve.x.push_back(phase);
      curve.y.push_back(rate);
      curve.y_err.push_back(0.0);
      continue;
    }

    const std::uint64_t per_block = options.trials_per_point / options.blocks;
    std::vector<double> block_rates;
    std::uint64_t trial = 0;
    for (int b = 0; b < options.blocks; ++b) {
      const std::uint64_t n_block =
          b + 1 == options.blocks ? options.trials_per_point - trial : per_block;
      std::uint64_t clicks = 0;
      for (std::uint64_t t = 0; t < n_block; ++t, ++trial) {
        RngStream rng = point_rng.child(trial);
        const FieldState field = prepare_field(
            enc, enc, alice, bob, config.xi, config.misalignment_rad, 0, 0,
            rng, synchronized ? std::optional<double>(phase) : std::nullopt);
        const PortProbs p =
            port_click_probs(field, field.rel_phase, config.detector);
        if (rng.next_bernoulli(p.port1)) ++clicks;
      }
      block_rates.push_back(static_cast<double>(clicks) /
                            static_cast<double>(n_block));
    }
    const BlockStats stats = block_stats(block_rates);
    curve.x.push_back(phase);
    curve.y.push_back(stats.mean);
    curve.y_err.push_back(stats.stddev);
  }
  return curve;
}

ScanCurve scan_hwp(const SessionConfig& config, const ScanOptions& options) {
  validate_scan(config, options);
  const PartySetup alice = setup_with_mu(config.mu_a);
  const PartySetup bob = setup_with_mu(config.mu_b);
  const RngStream root = RngStream(config.rng_seed).child(kScanDomain + 1);

  ScanCurve curve;
  for (std::size_t i = 0; i < options.grid.size(); ++i) {
    const double angle = options.grid[i];
    RngStream point_rng = root.child(i);

    if (config.engine == EngineKind::Analytic) {
      RngStream dummy(0);
      const FieldState field = prepare_field_angles(
          options.hwp1_angle_rad, angle, alice, bob, config.xi,
          config.misalignment_rad, 0, 0, dummy, 0.0);
      double acc = 0.0;
      const double step = 2.0 * std::numbers::pi / config.phase_nodes;
      for (int k = 0; k < config.phase_nodes; ++k) {
        const PortProbs p = port_click_probs(field, k * step, config.detector);
        acc += p.port1 * p.port2;
      }
      curve.x.push_back(angle);
      curve.y.push_back(acc / config.phase_nodes);
      curve.y_err.push_back(0.0);
      continue;
    }

    const std::uint64_t per_block = options.trials_per_point / options.blocks;
    std::vector<double> block_rates;
    std::uint64_t trial = 0;
    for (int b = 0; b < options.blocks; ++b) {
      const std::uint64_t n_block =
          b + 1 == options.blocks ? options.trials_per_point - trial : per_block;
      std::uint64_t coincidences = 0;
      for (std::uint64_t t = 0; t < n_block; ++t, ++trial) {
        RngStream rng = point_rng.child(trial);
        const FieldState field = prepare_field_angles(
            options.hwp1_angle_rad, angle, alice, bob, config.xi,
            config.misalignment_rad, 0, 0, rng);
        const PortProbs p =
            port_click_probs(field, field.rel_phase, config.detector);
        const bool c1 = rng.next_bernoulli(p.port1);
        const bool c2 = rng.next_bernoulli(p.port2);
        if (c1 && c2) ++coincidences;
      }
      block_rates.push_back(static_cast<double>(coincidences) /
                            static_cast<double>(n_block));
    }
    const BlockStats stats = block_stats(block_rates);
    curve.x.push_back(angle);
    curve.y.push_back(stats.mean);
    curve.y_err.push_back(stats.stddev);
  }
  return curve;
}

SineFit fit_sine(const ScanCurve& curve, int harmonic) {
  const std::size_t n = curve.x.size();
  if (n != curve.y.size())
    throw std::invalid_argument("fit_sine: x and y lengths differ");
  if (harmonic < 1) throw std::invalid_argument("fit_sine: harmonic must be >= 1");
  if (n < 6) throw std::invalid_argument("fit_sine: need at least 6 samples");
  const auto [xmin, xmax] = std::minmax_element(curve.x.begin(), curve.x.end());
  const double half_period = std::numbers::pi / harmonic;
  if (*xmax - *xmin < half_period * (1.0 - 1e-9))
    throw std::invalid_argument("fit_sine: samples must span at least half a period");

  // y = B - A cos(k x - d) = B + u cos(k x) + v sin(k x) is linear in
  // (B, u, v); solve the 3x3 normal equations directly.
  double s_c = 0, s_s = 0, s_cc = 0, s_ss = 0, s_cs = 0;
  double s_y = 0, s_yc = 0, s_ys = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double c = std::cos(harmonic * curve.x[i]);
    const double s = std::sin(harmonic * curve.x[i]);
    s_c += c;
    s_s += s;
    s_cc += c * c;
    s_ss += s * s;
    s_cs += c * s;
    s_y += curve.y[i];
    s_yc += curve.y[i] * c;
    s_ys += curve.y[i] * s;
  }
  const double nn = static_cast<double>(n);
  double m[3][4] = {{nn, s_c, s_s, s_y},
                    {s_c, s_cc, s_cs, s_yc},
                    {s_s, s_cs, s_ss, s_ys}};
  // Gaussian elimination with partial pivoting.
  for (int col = 0; col < 3; ++col) {
    int pivot = col;
    for (int r = col + 1; r < 3; ++r)
      if (std::abs(m[r][col]) > std::abs(m[pivot][col])) pivot = r;
    std::swap(m[col], m[pivot]);
    if (std::abs(m[col][col]) < 1e-14)
      throw std::invalid_argument("fit_sine: degenerate sample grid");
    for (int r = 0; r < 3; ++r) {
      if (r == col) continue;
      const double f = m[r][col] / m[col][col];
      for (int k = col; k < 4; ++k) m[r][k] -= f * m[col][k];
    }
  }
  const double offset = m[0][3] / m[0][0];
  const double u = m[1][3] / m[1][1];
  const double v = m[2][3] / m[2][2];

  SineFit fit;
  fit.harmonic = harmonic;
  fit.offset = offset;
  fit.amplitude = std::hypot(u, v);
  fit.phase = fit.amplitude > 0.0 ? std::atan2(-v, -u) : 0.0;
  double ss_res = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double model = offset + u * std::cos(harmonic * curve.x[i]) +
                         v * std::sin(harmonic * curve.x[i]);
    ss_res += (curve.y[i] - model) * (curve.y[i] - model);
  }
  fit.residual_norm = std::sqrt(ss_res);
  return fit;
}

double direct_visibility(const ScanCurve& curve) {
  if (curve.y.empty()) throw std::invalid_argument("empty curve");
  const auto [lo, hi] = std::minmax_element(curve.y.begin(), curve.y.end());
  const double sum = *hi + *lo;
  return sum > 0.0 ? (*hi - *lo) / sum : 0.0;
}

double hom_visibility(double v_sine) {
  if (!(v_sine >= 0.0 && v_sine < 1.0))
    throw std::invalid_argument("hom_visibility: v_sine must be in [0,1)");
  return 2.0 * v_sine / (1.0 + v_sine);
}

PairTallies reproduce_bsm_bars(const SessionConfig& config, int blocks) {
  if (auto issues = config.validate(); !issues.empty())
    throw ConfigError(std::move(issues));
  if (blocks < 1) throw ConfigError("blocks must be >= 1");

  constexpr Pol kPols[4] = {Pol::H, Pol::V, Pol::D, Pol::A};
  const PartySetup alice = setup_with_mu(config.mu_a);
  const PartySetup bob = setup_with_mu(config.mu_b);
  const RngStream root = RngStream(config.rng_seed).child(kBarsDomain);

  PairTallies result;
  int pair_index = 0;
  for (Pol pa : kPols) {
    for (Pol pb : kPols) {
      ++pair_index;
      const Encoding ea{pa == Pol::H || pa == Pol::V ? Basis::Z : Basis::X,
                        pa == Pol::H || pa == Pol::D ? 0 : 1};
      const Encoding eb{pb == Pol::H || pb == Pol::V ? Basis::Z : Basis::X,
                        pb == Pol::H || pb == Pol::D ? 0 : 1};

      if (config.engine == EngineKind::Analytic) {
        RngStream dummy(0);
        const FieldState field =
            prepare_field(ea, eb, alice, bob, config.xi,
                          config.misalignment_rad, 0, 0, dummy, 0.0);
        const auto probs = outcome_probabilities(joint_pattern_distribution(
            field, config.detector, config.phase_nodes));
        const double n = static_cast<double>(config.n_trials);
        result.counts.at(pa, pb, BellOutcome::PsiPlus) = n * probs.psi_plus;
        result.counts.at(pa, pb, BellOutcome::PsiMinus) = n * probs.psi_minus;
        result.stddev.at(pa, pb, BellOutcome::PsiPlus) =
            std::sqrt(n * probs.psi_plus * (1.0 - probs.psi_plus));
        result.stddev.at(pa, pb, BellOutcome::PsiMinus) =
            std::sqrt(n * probs.psi_minus * (1.0 - probs.psi_minus));
        continue;
      }

      RngStream pair_rng = root.child(static_cast<std::uint64_t>(pair_index));
      const std::uint64_t per_block = config.n_trials / blocks;
      std::vector<double> plus_blocks, minus_blocks;
      std::uint64_t trial = 0;
      for (int b = 0; b < blocks; ++b) {
        const std::uint64_t n_block =
            b + 1 == blocks ? config.n_trials - trial : per_block;
        std::uint64_t n_plus = 0, n_minus = 0;
        for (std::uint64_t t = 0; t < n_block; ++t, ++trial) {
          RngStream rng = pair_rng.child(trial);
          const FieldState field =
              prepare_field(ea, eb, alice, bob, config.xi,
                            config.misalignment_rad, 0, 0, rng);
          const auto probs = click_probabilities(beamsplitter_outputs(field),
                                                 config.detector);
          switch (classify(sample_pattern(probs, rng))) {
            case BellOutcome::PsiPlus: ++n_plus; break;
            case BellOutcome::PsiMinus: ++n_minus; break;
            default: break;
          }
        }
        plus_blocks.push_back(static_cast<double>(n_plus));
        minus_blocks.push_back(static_cast<double>(n_minus));
      }
      double total_plus = 0, total_minus = 0;
      for (double c : plus_blocks) total_plus += c;
      for (double c : minus_blocks) total_minus += c;
      result.counts.at(pa, pb, BellOutcome::PsiPlus) = total_plus;
      result.counts.at(pa, pb, BellOutcome::PsiMinus) = total_minus;
      // Independent blocks: stddev of the total is sqrt(B) times the
      // per-block sample deviation.
      const double root_b = std::sqrt(static_cast<double>(blocks));
      result.stddev.at(pa, pb, BellOutcome::PsiPlus) =
          block_stats(plus_blocks).stddev * root_b;
      result.stddev.at(pa, pb, BellOutcome::PsiMinus) =
          block_stats(minus_blocks).stddev * root_b;
    }
  }
  return result;
}

std::vector<TableEntry> reproduce_table1(std::span<const double> mu_values,
                                         const SessionConfig& base) {
  std::vector<TableEntry> table;
  const RngStream root = RngStream(base.rng_seed).child(kTableDomain);
  for (std::size_t i = 0; i < mu_values.size(); ++i) {
    SessionConfig config = base;
    config.mu_a = mu_values[i];
    config.mu_b = mu_values[i];
    config.rng_seed = root.child(i).base_seed();
    const SessionResult session = run_session(config);
    TableEntry entry;
    entry.mu = mu_values[i];
    entry.tally = session.tally;
    entry.report = make_qber_report(session.tally, config.eq2_as_printed);
    table.push_back(std::move(entry));
  }
  return table;
}

}  // namespace pnpqkd
