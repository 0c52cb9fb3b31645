// Command-line front end: simulate / scan hwp / scan phase / faraday-check.

#include <cstdio>
#include <exception>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "pnpqkd/commands.hpp"
#include "pnpqkd/errors.hpp"
#include "pnpqkd/version.hpp"

namespace {

struct CliArgs {
  std::string config;
  std::string out = "out";
  std::optional<std::uint64_t> seed;
  std::optional<std::string> engine;
  bool sync = false;
  bool no_sync = false;
  std::optional<int> samples;
  bool non_reciprocal = false;
};

pnpqkd::CommandOverrides to_overrides(const CliArgs& args) {
  pnpqkd::CommandOverrides overrides;
  overrides.seed = args.seed;
  if (args.engine) {
    if (*args.engine == "analytic")
      overrides.engine = pnpqkd::EngineKind::Analytic;
    else if (*args.engine == "mc")
      overrides.engine = pnpqkd::EngineKind::MonteCarlo;
  }
  if (args.sync) overrides.sync = true;
  if (args.no_sync) overrides.sync = false;
  overrides.samples = args.samples;
  overrides.non_reciprocal = args.non_reciprocal;
  return overrides;
}

void add_common_options(CLI::App* cmd, CliArgs& args, bool config_required) {
  auto* config_opt =
      cmd->add_option("--config", args.config, "JSON config file");
  if (config_required) config_opt->required();
  cmd->add_option("--out", args.out, "output directory (default: out)");
  cmd->add_option("--seed", args.seed, "master seed (overrides config)");
  cmd->add_option("--engine", args.engine, "engine: analytic | mc")
      ->check(CLI::IsMember({"analytic", "mc"}));
}

int dispatch(const CLI::App& app, CLI::App* simulate, CLI::App* scan,
             CLI::App* scan_hwp, CLI::App* scan_phase, CLI::App* faraday,
             const CliArgs& args) {
  using namespace pnpqkd;
  const CommandOverrides overrides = to_overrides(args);

  if (app.got_subcommand(simulate)) {
    const RunManifest manifest = cmd_simulate(args.config, args.out, overrides);
    std::printf("simulate: wrote %zu files to %s\n", manifest.outputs.size(),
                args.out.c_str());
    return kExitOk;
  }
  if (app.got_subcommand(scan)) {
    const ScanKind kind =
        scan->got_subcommand(scan_hwp) ? ScanKind::Hwp : ScanKind::Phase;
    const RunManifest manifest = cmd_scan(kind, args.config, args.out, overrides);
    std::printf("scan %s: wrote %zu files to %s\n",
                kind == ScanKind::Hwp ? "hwp" : "phase",
                manifest.outputs.size(), args.out.c_str());
    return kExitOk;
  }
  if (app.got_subcommand(faraday)) {
    cmd_faraday_check(args.config, args.out, overrides);
    return kExitOk;
  }
  return kExitConfig;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Plug-and-play MDI-QKD simulator"};
  app.set_version_flag("--version", pnpqkd::kToolVersion);
  app.require_subcommand(1);

  CliArgs args;

  auto* simulate = app.add_subcommand(
      "simulate", "run sessions and write tally.csv / qber.json");
  add_common_options(simulate, args, /*config_required=*/true);

  auto* scan = app.add_subcommand("scan", "interference scans");
  scan->require_subcommand(1);
  auto* scan_hwp = scan->add_subcommand(
      "hwp", "two-photon interference vs Bob's HWP angle");
  add_common_options(scan_hwp, args, /*config_required=*/true);
  auto* scan_phase = scan->add_subcommand(
      "phase", "single-photon interference vs path phase");
  add_common_options(scan_phase, args, /*config_required=*/true);
  scan_phase->add_flag("--sync", args.sync,
                       "synchronize the phase randomizers");
  scan_phase->add_flag("--no-sync", args.no_sync,
                       "force independent phase randomization");

  auto* faraday = app.add_subcommand(
      "faraday-check", "verify polarization auto-compensation over random channels");
  add_common_options(faraday, args, /*config_required=*/false);
  faraday->add_option("--samples", args.samples, "number of random channels");
  faraday->add_flag("--non-reciprocal", args.non_reciprocal,
                    "negative control: break fiber reciprocity");

  CLI11_PARSE(app, argc, argv);

  try {
    return dispatch(app, simulate, scan, scan_hwp, scan_phase, faraday, args);
  } catch (const pnpqkd::ConfigError& e) {
    std::fprintf(stderr, "config error:\n");
    for (const auto& issue : e.issues())
      std::fprintf(stderr, "  %s\n", issue.c_str());
    return pnpqkd::kExitConfig;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "invalid argument: %s\n", e.what());
    return pnpqkd::kExitConfig;
  } catch (const pnpqkd::IoError& e) {
    std::fprintf(stderr, "i/o error: %s\n", e.what());
    return pnpqkd::kExitIo;
  } catch (const pnpqkd::UndefinedStatisticError& e) {
    std::fprintf(stderr, "numeric failure: %s\n", e.what());
    return pnpqkd::kExitNumeric;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}
