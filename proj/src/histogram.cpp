#include "wgmr/histogram.hpp"

#include <algorithm>
#include <cmath>

#include "wgmr/errors.hpp"

namespace wgmr {

CorrelationHistogram coincidence_histogram(const TimeTagStream& x,
                                           const TimeTagStream& y,
                                           double bin_width_s,
                                           double max_lag_s) {
  if (!(bin_width_s > 0))
    throw DomainError("coincidence_histogram: bin_width must be > 0");
  if (max_lag_s < bin_width_s)
    throw DomainError("coincidence_histogram: max_lag must be >= bin_width");
  x.validate_sorted();
  y.validate_sorted();

  const std::int64_t w = std::llround(bin_width_s * 1e12);
  if (w <= 0) throw DomainError("coincidence_histogram: bin width under 1 ps");
  const int K = static_cast<int>(std::llround(max_lag_s * 1e12) / w);
  const std::int64_t window = static_cast<std::int64_t>(K) * w + w / 2;

  CorrelationHistogram h;
  h.bin_width_s = bin_width_s;
  h.max_lag_s = max_lag_s;
  h.counts.assign(2 * K + 1, 0);
  h.duration_s = x.duration_s > 0 ? x.duration_s : y.duration_s;
  if (h.duration_s > 0) {
    h.rate_x_hz = static_cast<double>(x.tags_ps.size()) / h.duration_s;
    h.rate_y_hz = static_cast<double>(y.tags_ps.size()) / h.duration_s;
  }

  const bool same_stream = &x == &y;
  size_t lo = 0;
  for (size_t i = 0; i < x.tags_ps.size(); ++i) {
    const std::int64_t tx = static_cast<std::int64_t>(x.tags_ps[i]);
    while (lo < y.tags_ps.size() &&
           static_cast<std::int64_t>(y.tags_ps[lo]) < tx - window)
      ++lo;
    for (size_t j = lo; j < y.tags_ps.size(); ++j) {
      const std::int64_t dt = static_cast<std::int64_t>(y.tags_ps[j]) - tx;
      if (dt > window) break;
      if (same_stream && i == j) continue;
      // round-to-nearest bin via floor((dt + w/2) / w) with flooring division
      std::int64_t num = dt + w / 2;
      std::int64_t k = num >= 0 ? num / w : -((-num + w - 1) / w);
      if (k < -K || k > K) continue;
      ++h.counts[static_cast<size_t>(k + K)];
    }
  }
  return h;
}

namespace {

// Periodic emission envelope over one pump period, sampled on a uniform
// grid: the gate profile convolved with the exponential ring-down tail
// (envelope mode) or the bare gate (gated mode).
std::vector<double> periodic_envelope(const PulseContext& ctx, bool with_tail,
                                      int n_grid) {
  const double period = ctx.schedule.period_s();
  const double w = ctx.schedule.pulse_length_s;
  std::vector<double> gate(n_grid, 0.0);
  for (int i = 0; i < n_grid; ++i) {
    double t = (i + 0.5) * period / n_grid;
    if (t < w) {
      double u = t / w;
      if (ctx.schedule.shape == PumpSchedule::Shape::smoothed) {
        constexpr double ramp = 0.1;
        if (u < ramp)
          gate[i] = 0.5 * (1.0 - std::cos(M_PI * u / ramp));
        else if (u > 1.0 - ramp)
          gate[i] = 0.5 * (1.0 - std::cos(M_PI * (1.0 - u) / ramp));
        else
          gate[i] = 1.0;
      } else {
        gate[i] = 1.0;
      }
    }
  }
  if (!with_tail) return gate;
  if (!(ctx.bandwidth_hz > 0))
    throw DomainError("normalize_g2: envelope mode requires bandwidth");
  const double tau_r = 1.0 / (2.0 * M_PI * ctx.bandwidth_hz);
  const double dt = period / n_grid;
  // recursive exponential smoothing wrapped around the period until settled
  std::vector<double> env(n_grid, 0.0);
  const double decay = std::exp(-dt / tau_r);
  double state = 0.0;
  for (int pass = 0; pass < 64; ++pass) {
    double start = state;
    for (int i = 0; i < n_grid; ++i) {
      state = state * decay + gate[i] * (1.0 - decay);
      env[i] = state;
    }
    if (std::fabs(state - start) < 1e-12 * std::max(1.0, state)) break;
  }
  return env;
}

// <e(t) e(t+tau)> / <e>^2 for the periodic envelope.
double envelope_correlation(const std::vector<double>& env, double period,
                            double tau) {
  const int n = static_cast<int>(env.size());
  double shift = std::fmod(tau, period);
  if (shift < 0) shift += period;
  const double fidx = shift / period * n;
  const int s0 = static_cast<int>(fidx) % n;
  const double frac = fidx - std::floor(fidx);
  double acc = 0, mean = 0;
  for (int i = 0; i < n; ++i) {
    int j = i + s0;
    if (j >= n) j -= n;
    int j1 = j + 1 == n ? 0 : j + 1;
    double e_shift = env[j] * (1.0 - frac) + env[j1] * frac;
    acc += env[i] * e_shift;
    mean += env[i];
  }
  mean /= n;
  if (mean <= 0) throw DomainError("normalize_g2: empty pump gate");
  return (acc / n) / (mean * mean);
}

} // namespace

void normalize_g2(CorrelationHistogram& hist, NormalizationMode mode,
                  const std::optional<PulseContext>& pulse) {
  if (!(hist.rate_x_hz > 0) || !(hist.rate_y_hz > 0))
    throw DomainError("normalize_g2: zero source rate");
  if (!(hist.duration_s > 0))
    throw DomainError("normalize_g2: zero measurement duration");
  const double base =
      hist.rate_x_hz * hist.rate_y_hz * hist.bin_width_s * hist.duration_s;

  std::vector<double> overlap(hist.counts.size(), 1.0);
  if (mode != NormalizationMode::total_duration) {
    if (!pulse)
      throw DomainError("normalize_g2: pulsed normalization needs a PulseContext");
    pulse->schedule.validate();
    auto env = periodic_envelope(*pulse, mode == NormalizationMode::envelope,
                                 1 << 14);
    for (size_t k = 0; k < hist.counts.size(); ++k)
      overlap[k] = envelope_correlation(env, pulse->schedule.period_s(),
                                        hist.lag_of(static_cast<int>(k)));
  }

  hist.g2.assign(hist.counts.size(), 0.0);
  hist.g2_sigma.assign(hist.counts.size(), 0.0);
  for (size_t k = 0; k < hist.counts.size(); ++k) {
    const double norm = base * overlap[k];
    hist.g2[k] = static_cast<double>(hist.counts[k]) / norm;
    hist.g2_sigma[k] =
        std::sqrt(static_cast<double>(std::max<std::uint64_t>(hist.counts[k], 1))) /
        norm;
  }
}

void histogram_to_csv(const CorrelationHistogram& hist, std::ostream& os) {
  os << "lag_s,counts,g2,g2_sigma\n";
  os.precision(12);
  for (size_t k = 0; k < hist.counts.size(); ++k) {
    os << hist.lag_of(static_cast<int>(k)) << ',' << hist.counts[k] << ',';
    if (hist.normalized())
      os << hist.g2[k] << ',' << hist.g2_sigma[k];
    else
      os << ',';
    os << '\n';
  }
}

} // namespace wgmr
