#include <CLI11.hpp>

#include "wgmr/commands.hpp"

using wgmr::cli::CorrelateArgs;
using wgmr::cli::GlobalOptions;

int main(int argc, char** argv) {
  CLI::App app{"whispering-gallery photon-pair toolkit"};
  app.require_subcommand(1);

  GlobalOptions g;
  std::uint64_t seed_value = 0;
  bool seed_given = false;
  app.add_option("--config", g.config_path, "run configuration file");
  auto* seed_opt =
      app.add_option("--seed", seed_value, "random seed (overrides [run] seed)");
  app.add_option("--out", g.out_dir, "output directory");
  app.add_option("--threads", g.threads, "parallelism cap")
      ->check(CLI::PositiveNumber);
  app.add_option("--format", g.format, "output format")
      ->check(CLI::IsMember({"csv", "bin", "svg"}));

  auto* modes = app.add_subcommand("modes", "tabulate mode frequencies");
  std::string q_range = "1", m_range = "1", p_range = "0", pol = "both";
  modes->add_option("--q", q_range, "radial index range N or N:M");
  modes->add_option("--m", m_range, "azimuthal index range")->required();
  modes->add_option("--p", p_range, "polar index range");
  modes->add_option("--pol", pol, "ordinary | extraordinary | both");

  auto* pm = app.add_subcommand("phasematch",
                                "enumerate solutions and cluster spectrum");

  auto* sim = app.add_subcommand("simulate", "generate time-tag streams");
  std::string sim_duration;
  sim->add_option("--duration", sim_duration,
                  "measurement duration (overrides [run] duration)");

  auto* corr = app.add_subcommand("correlate",
                                  "histogram + g2 fit of tag files");
  CorrelateArgs ca;
  corr->add_option("--signal", ca.signal_file, "signal tag file (cross mode)");
  corr->add_option("--idler", ca.idler_file, "idler tag file (cross mode)");
  corr->add_option("--input", ca.input_file,
                   "single tag file (auto mode: 50/50 split)");
  corr->add_option("--bin", ca.bin, "bin width (default 1ns)");
  corr->add_option("--max-lag", ca.max_lag, "max lag (default 200ns)");
  corr->add_option("--normalization", ca.normalization,
                   "total | gated | envelope");
  corr->add_option("--duration", ca.duration,
                   "measurement duration if no metadata sidecar");

  auto* rep = app.add_subcommand("report", "end-to-end reproduction report");
  std::string rep_duration;
  rep->add_option("--duration", rep_duration,
                  "measurement duration (overrides [run] duration)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }
  seed_given = seed_opt->count() > 0;
  if (seed_given) g.seed = seed_value;

  return wgmr::cli::run_guarded([&]() -> int {
    if (modes->parsed())
      return wgmr::cli::cmd_modes(g, wgmr::cli::parse_range(q_range),
                                  wgmr::cli::parse_range(m_range),
                                  wgmr::cli::parse_range(p_range), pol);
    if (pm->parsed()) return wgmr::cli::cmd_phasematch(g);
    if (sim->parsed()) return wgmr::cli::cmd_simulate(g, sim_duration);
    if (corr->parsed()) return wgmr::cli::cmd_correlate(g, ca);
    if (rep->parsed()) return wgmr::cli::cmd_report(g, rep_duration);
    return 2;
  });
}
