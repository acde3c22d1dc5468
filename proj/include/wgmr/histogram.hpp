#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "wgmr/photonstream.hpp"
#include "wgmr/timetags.hpp"

namespace wgmr {

// Coincidence histogram over signed lag tau = t_y - t_x. An odd number of
// bins centred on tau = 0; bin k (k in [-K, K]) covers
// ((k-1/2) w, (k+1/2) w] around k*w with w = bin width.
struct CorrelationHistogram {
  double bin_width_s = 0;
  double max_lag_s = 0;
  std::vector<std::uint64_t> counts; // size 2K+1
  std::vector<double> g2;            // filled by normalize_g2
  std::vector<double> g2_sigma;      // per-bin Poisson uncertainty
  double rate_x_hz = 0;
  double rate_y_hz = 0;
  double duration_s = 0;

  int half_bins() const { return (static_cast<int>(counts.size()) - 1) / 2; }
  double lag_of(int index) const {
    return (index - half_bins()) * bin_width_s;
  }
  bool normalized() const { return g2.size() == counts.size(); }
};

// Two-pointer sliding-window pairing of two sorted streams; counts every
// ordered pair whose lag falls in one of the bins. When x and y are the
// same stream the (i == j) self-pair at tau = 0 is excluded.
CorrelationHistogram coincidence_histogram(const TimeTagStream& x,
                                           const TimeTagStream& y,
                                           double bin_width_s,
                                           double max_lag_s);

enum class NormalizationMode {
  total_duration, // g2 = C / (Rx Ry tau_bin T); default
  gated,          // rates and per-lag overlap computed on the ideal gate
  envelope,       // gate convolved with the cavity ring-down tail
};

struct PulseContext {
  PumpSchedule schedule;
  double bandwidth_hz = 0; // ring-down for envelope mode
};

// Fills g2 and g2_sigma. Pulsed-aware modes need a PulseContext; they
// divide out the gate-gate (or envelope-envelope) lag correlation so a
// cw-like flat baseline of 1 remains.
void normalize_g2(CorrelationHistogram& hist,
                  NormalizationMode mode = NormalizationMode::total_duration,
                  const std::optional<PulseContext>& pulse = std::nullopt);

// CSV columns: lag_s,counts,g2,g2_sigma (g2 columns empty if unnormalized).
void histogram_to_csv(const CorrelationHistogram& hist, std::ostream& os);

} // namespace wgmr
