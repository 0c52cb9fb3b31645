#include "pnpqkd/commands.hpp"

#include <chrono>
#include <cstdio>
#include <filesystem>

#include "pnpqkd/config.hpp"
#include "pnpqkd/errors.hpp"
#include "pnpqkd/experiments.hpp"
#include "pnpqkd/version.hpp"

namespace pnpqkd {

namespace {

namespace fs = std::filesystem;

using Clock = std::chrono::steady_clock;

void ensure_out_dir(const std::string& out_dir) {
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec || !fs::is_directory(out_dir))
    throw IoError("cannot create output directory: " + out_dir);
}

std::string join_path(const std::string& dir, const std::string& name) {
  return (fs::path(dir) / name).string();
}

SimulatorConfig load_with_overrides(const std::string& config_path,
                                    const CommandOverrides& overrides) {
  SimulatorConfig config = load_config(config_path);
  if (overrides.seed) {
    config.seed = *overrides.seed;
    config.session.rng_seed = *overrides.seed;
  }
  if (overrides.engine) {
    config.engine = *overrides.engine;
    config.session.engine = *overrides.engine;
  }
  return config;
}

RunManifest start_manifest(const std::string& command,
                           const std::string& config_path,
                           const SimulatorConfig& config) {
  RunManifest manifest;
  manifest.tool_version = kToolVersion;
  manifest.command = command;
  manifest.config_hash =
      config_hash_string(canonical_config_text(config_path));
  manifest.seed = config.seed;
  manifest.engine = engine_name(config.engine);
  return manifest;
}

std::string mu_file_suffix(double mu) {
  std::string s = format_g12(mu);
  for (char& c : s)
    if (c == '.') c = 'p';
  return s;
}

}  // namespace

RunManifest cmd_simulate(const std::string& config_path,
                         const std::string& out_dir,
                         const CommandOverrides& overrides) {
  const auto t0 = Clock::now();
  SimulatorConfig config = load_with_overrides(config_path, overrides);
  ensure_out_dir(out_dir);
  RunManifest manifest = start_manifest("simulate", config_path, config);

  const bool single_mu = config.mu_a_values.size() == 1;
  std::vector<QberEntry> qber_entries;

  for (std::size_t i = 0; i < config.mu_a_values.size(); ++i) {
    const SessionConfig session = config.session_for(i);
    TallyTable counts;
    TallyTable stddev;

    if (config.fixed_polarizations) {
      const PairTallies bars = reproduce_bsm_bars(session, config.blocks);
      counts = bars.counts;
      stddev = bars.stddev;
    } else {
      const SessionResult result = run_session(session);
      counts = result.tally;
      const double n = static_cast<double>(session.n_trials);
      for (std::size_t c = 0; c < counts.counts.size(); ++c) {
        const double p = counts.counts[c] / n;
        stddev.counts[c] = std::sqrt(n * p * (1.0 - p));
      }
    }

    QberEntry entry;
    entry.mu_a = session.mu_a;
    entry.mu_b = session.mu_b;
    entry.report = make_qber_report(counts, session.eq2_as_printed);
    qber_entries.push_back(entry);

    const std::string tally_name =
        single_mu ? "tally.csv" : "tally_mu_" + mu_file_suffix(session.mu_a) + ".csv";
    write_tally_csv(join_path(out_dir, tally_name), counts, &stddev);
    manifest.outputs.push_back(tally_name);
  }

  write_qber_json(join_path(out_dir, "qber.json"), qber_entries);
  manifest.outputs.push_back("qber.json");

  manifest.duration_ms =
      std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
  manifest.outputs.push_back("manifest.json");
  write_manifest(join_path(out_dir, "manifest.json"), manifest);
  return manifest;
}

RunManifest cmd_scan(ScanKind kind, const std::string& config_path,
                     const std::string& out_dir,
                     const CommandOverrides& overrides) {
  const auto t0 = Clock::now();
  SimulatorConfig config = load_with_overrides(config_path, overrides);
  if (!config.scan)
    throw ConfigError("scan: section required for scan commands");
  if (config.mu_a_values.size() != 1)
    throw ConfigError("session.mu: scans require a single mu value");
  if (overrides.sync) config.scan->sync = *overrides.sync;
  ensure_out_dir(out_dir);

  RunManifest manifest = start_manifest(
      kind == ScanKind::Hwp ? "scan hwp" : "scan phase", config_path, config);

  const SessionConfig session = config.session_for(0);
  ScanOptions options;
  options.grid = config.scan->grid();
  options.trials_per_point = config.scan->trials_per_point;
  options.blocks = config.scan->blocks;
  options.hwp1_angle_rad = config.scan->hwp1_angle_rad;

  ScanCurve curve;
  FitRecord record;
  if (kind == ScanKind::Hwp) {
    curve = scan_hwp(session, options);
    record.fit = fit_sine(curve, 4);
    record.v_sine = record.fit.visibility();
    record.v_hom = hom_visibility(std::min(record.v_sine, 1.0 - 1e-12));
  } else {
    curve = scan_phase(config.scan->sync, session, options);
    record.fit = fit_sine(curve, 1);
    record.v_sine = record.fit.visibility();
    record.v_direct = direct_visibility(curve);
  }

  write_scan_csv(join_path(out_dir, "scan.csv"), curve);
  manifest.outputs.push_back("scan.csv");
  write_fit_json(join_path(out_dir, "fit.json"), record);
  manifest.outputs.push_back("fit.json");

  manifest.duration_ms =
      std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
  manifest.outputs.push_back("manifest.json");
  write_manifest(join_path(out_dir, "manifest.json"), manifest);
  return manifest;
}

FaradayReport run_faraday_check(int samples, std::uint64_t seed,
                                bool reciprocal) {
  if (samples < 1) throw ConfigError("faraday.samples: must be >= 1");

  RngStream rng(seed);
  FaradayReport report;
  report.samples = samples;
  report.worst_fidelity = 1.0;

  const JonesVector input{1.0, 0.0};
  const JonesVector expected =
      (faraday_mirror_matrix() * input).normalized();

  for (int i = 0; i < samples; ++i) {
    ChannelModel channel;
    // Sample 0 is always the identity channel as a sanity anchor.
    if (i > 0) channel.forward_unitary = random_channel_unitary(rng);
    channel.reciprocal = reciprocal;
    const RoundTrip rt = round_trip(input, channel, 0.0, 1.0, 0.0);
    const double fidelity = std::norm(inner(expected, rt.polarization));
    if (fidelity < report.worst_fidelity) {
      report.worst_fidelity = fidelity;
      report.worst_sample = i;
    }
  }
  report.passed = report.worst_fidelity > 1.0 - 1e-10;
  return report;
}

RunManifest cmd_faraday_check(const std::string& config_path,
                              const std::string& out_dir,
                              const CommandOverrides& overrides) {
  const auto t0 = Clock::now();

  int samples = 1000;
  std::uint64_t seed = 1;
  std::string config_hash = "fnv1a64:none";
  std::string engine = "analytic";
  if (!config_path.empty()) {
    const SimulatorConfig config = load_with_overrides(config_path, overrides);
    samples = config.faraday.samples;
    seed = config.seed;
    config_hash = config_hash_string(canonical_config_text(config_path));
    engine = engine_name(config.engine);
  }
  if (overrides.samples) samples = *overrides.samples;
  if (overrides.seed) seed = *overrides.seed;

  const FaradayReport report =
      run_faraday_check(samples, seed, !overrides.non_reciprocal);

  std::printf("faraday-check: %d channels, worst fidelity %.3e below 1 "
              "(sample %d) -> %s\n",
              report.samples, 1.0 - report.worst_fidelity, report.worst_sample,
              report.passed ? "PASS" : "FAIL");

  ensure_out_dir(out_dir);
  RunManifest manifest;
  manifest.tool_version = kToolVersion;
  manifest.command = "faraday-check";
  manifest.config_hash = config_hash;
  manifest.seed = seed;
  manifest.engine = engine;

  FaradayRecord record;
  record.samples = report.samples;
  record.worst_fidelity = report.worst_fidelity;
  record.worst_sample = report.worst_sample;
  record.passed = report.passed;
  write_faraday_json(join_path(out_dir, "faraday.json"), record);
  manifest.outputs.push_back("faraday.json");

  manifest.duration_ms =
      std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
  manifest.outputs.push_back("manifest.json");
  write_manifest(join_path(out_dir, "manifest.json"), manifest);
  if (!report.passed)
    throw UndefinedStatisticError("faraday-check failed: worst fidelity " +
                                  format_g12(report.worst_fidelity));
  return manifest;
}

}  // namespace pnpqkd
