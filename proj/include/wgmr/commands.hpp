#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "wgmr/config.hpp"
#include "wgmr/fit.hpp"
#include "wgmr/histogram.hpp"
#include "wgmr/modes.hpp"
#include "wgmr/phasematch.hpp"
#include "wgmr/photonstream.hpp"

namespace wgmr::cli {

struct GlobalOptions {
  std::string config_path;
  std::optional<std::uint64_t> seed; // overrides [run] seed
  std::string out_dir;               // overrides [run] out_dir
  int threads = 1;
  std::string format = "csv"; // csv | bin | svg
};

struct IndexRange {
  int lo = 0, hi = 0;
};
IndexRange parse_range(const std::string& text); // "a:b" or "a"

// config-section loaders shared by the commands and the test suites
ResonatorGeometry load_geometry(const Config& cfg);
MaterialModel load_material(const Config& cfg, const std::string& config_dir);
ModeIndex load_pump(const Config& cfg, const ResonatorGeometry& geom,
                    const MaterialModel& mat, double temperature_c);
SourceModel load_source(const Config& cfg);
PumpSchedule load_pulse(const Config& cfg);
DetectorModel load_detector(const Config& cfg, const std::string& section);

int cmd_modes(const GlobalOptions& g, const IndexRange& q, const IndexRange& m,
              const IndexRange& p, const std::string& pol);
int cmd_phasematch(const GlobalOptions& g);
int cmd_simulate(const GlobalOptions& g, const std::string& duration_override);

struct CorrelateArgs {
  std::string signal_file;
  std::string idler_file; // cross mode when set
  std::string input_file; // auto mode: split this stream
  std::string bin = "1ns";
  std::string max_lag = "200ns";
  std::string normalization; // total | gated | envelope; default from config
  std::string duration;      // overrides sidecar metadata
};
int cmd_correlate(const GlobalOptions& g, const CorrelateArgs& args);

struct ReportResult {
  std::string text;
  double rate_ratio = 0;        // filtered/unfiltered, loss-corrected
  double k_eff_unfiltered = 0;
  double k_eff_filtered = 0;
  double g2_cross_zero_unfiltered = 0;
  double g2_cross_zero_filtered = 0;
  double mean_n_unfiltered = 0;
  double bandwidth_fit_hz = 0;
};
// Library-level pipeline behind cmd_report; throws with the failing stage
// named.
ReportResult run_report(const Config& cfg, const GlobalOptions& g,
                        double duration_override_s = 0);
int cmd_report(const GlobalOptions& g, const std::string& duration_override);

// exception -> exit code mapping (0 ok, 2 config, 3 numerical, 4 I/O)
int run_guarded(const std::function<int()>& body);

} // namespace wgmr::cli
