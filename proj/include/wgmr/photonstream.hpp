#pragma once

#include <cstdint>
#include <set>
#include <utility>
#include <vector>

#include "wgmr/timetags.hpp"

namespace wgmr {

struct PumpSchedule {
  enum class Shape { rectangular, smoothed };

  double pulse_length_s = 0;
  double repetition_rate_hz = 0;
  Shape shape = Shape::rectangular;

  double period_s() const { return 1.0 / repetition_rate_hz; }
  double duty() const { return pulse_length_s * repetition_rate_hz; }
  void validate() const;

  static PumpSchedule cw();
};

struct SourceMode {
  double weight = 1.0;  // share of the pair rate; weights sum to 1
  int cluster_a = 0;    // spectral cluster this mode belongs to
};

// k-mode thermal pair source. pair_rate_hz is the total pair generation
// rate while the pump gate is open; bandwidth_hz is the Lorentzian FWHM nu,
// so intensity correlations decay as exp(-2 pi nu |tau|) and the per-photon
// cavity ring-down delay is exponential with mean 1/(2 pi nu).
struct SourceModel {
  double pair_rate_hz = 0;
  double bandwidth_hz = 0;
  std::vector<SourceMode> modes = {SourceMode{}};

  int mode_count() const { return static_cast<int>(modes.size()); }
  void validate() const;
};

// Pair rate while the gate is open that yields a mean photon number <n>
// per coherence interval, defined operationally through the cross-
// correlation fit g2_si(0) = 2 + 1/<n>.
double pair_rate_for_mean_photon_number(double mean_n, double bandwidth_hz);

struct DetectorModel {
  double efficiency = 1.0;   // [0, 1]
  double dark_rate_hz = 0;   // counts/s
  double jitter_fwhm_s = 0;  // Gaussian FWHM
  double dead_time_s = 0;    // non-paralyzable; 0 disables

  void validate() const;
};

// Monte Carlo signal/idler detection record for a pulsed, resonator-
// bandwidth-limited SPDC source. Pair emission is a Poisson process of
// burst seeds inside the pump gate with geometric pair multiplicity per
// seed (thermal pair-number statistics); every photon is delayed by an
// independent exponential cavity ring-down of mean 1/(2 pi nu). Detector
// efficiency, Gaussian jitter, dark counts and dead time are applied per
// channel. Identical (inputs, seed) give identical streams; randomness is
// drawn from per-(mode, pulse) counter-based substreams, so the result is
// independent of evaluation order.
std::pair<TimeTagStream, TimeTagStream> simulate_pair_stream(
    const SourceModel& source, const PumpSchedule& pump,
    const DetectorModel& det_signal, const DetectorModel& det_idler,
    double duration_s, std::uint64_t seed);

// 50/50-style beamsplitter: each tag goes to port A with probability
// `transmission`, otherwise to port B. Labels are preserved; the union of
// the outputs is exactly the input.
std::pair<TimeTagStream, TimeTagStream> split_stream(const TimeTagStream& input,
                                                     double transmission,
                                                     std::uint64_t seed);

// Cluster-selecting bandpass filter: drops tags whose cluster label is not
// in `clusters`, then thins survivors with probability `transmission`.
// Dark-count tags are detector-side noise and pass unfiltered. Requires a
// labeled stream.
TimeTagStream apply_bandpass(const TimeTagStream& input,
                             const std::set<int>& clusters, double transmission,
                             std::uint64_t seed);

} // namespace wgmr
