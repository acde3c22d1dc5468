#include "wgmr/photonstream.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <sstream>

#include "wgmr/constants.hpp"
#include "wgmr/errors.hpp"
#include "wgmr/rng.hpp"

namespace wgmr {

void PumpSchedule::validate() const {
  if (!(pulse_length_s > 0))
    throw DomainError("pump schedule: pulse_length must be > 0");
  if (!(repetition_rate_hz > 0))
    throw DomainError("pump schedule: repetition_rate must be > 0");
  if (pulse_length_s * repetition_rate_hz > 1.0 + 1e-9)
    throw DomainError("pump schedule: duty cycle exceeds 1");
}

PumpSchedule PumpSchedule::cw() {
  PumpSchedule s;
  s.pulse_length_s = 1e-3;
  s.repetition_rate_hz = 1e3;
  s.shape = Shape::rectangular;
  return s;
}

void SourceModel::validate() const {
  if (modes.empty()) throw DomainError("source model: mode_count must be >= 1");
  if (!(bandwidth_hz > 0))
    throw DomainError("source model: bandwidth must be > 0");
  if (pair_rate_hz < 0)
    throw DomainError("source model: pair_rate must be >= 0");
  double wsum = 0;
  for (const auto& m : modes) {
    if (m.weight < 0) throw DomainError("source model: weights must be >= 0");
    if (m.cluster_a < 0 || (m.cluster_a % 2) != 0)
      throw DomainError("source model: cluster labels must be even and >= 0");
    wsum += m.weight;
  }
  if (std::fabs(wsum - 1.0) > 1e-9)
    throw DomainError("source model: weights must sum to 1 (got " +
                      std::to_string(wsum) + ")");
}

double pair_rate_for_mean_photon_number(double mean_n, double bandwidth_hz) {
  if (!(mean_n > 0)) throw DomainError("mean photon number must be > 0");
  if (!(bandwidth_hz > 0)) throw DomainError("bandwidth must be > 0");
  // g2_si(0) - 2 = gamma / rate with gamma = pi * nu, so rate = <n> pi nu.
  return mean_n * kPi * bandwidth_hz;
}

void DetectorModel::validate() const {
  if (efficiency < 0 || efficiency > 1)
    throw DomainError("detector model: efficiency must be in [0, 1]");
  if (dark_rate_hz < 0)
    throw DomainError("detector model: dark_rate must be >= 0");
  if (jitter_fwhm_s < 0)
    throw DomainError("detector model: jitter_fwhm must be >= 0");
  if (dead_time_s < 0)
    throw DomainError("detector model: dead_time must be >= 0");
}

namespace {

struct RawTag {
  double t_s;
  std::uint16_t label;
};

double shape_value(PumpSchedule::Shape shape, double u /* 0..1 in gate */) {
  if (shape == PumpSchedule::Shape::rectangular) return 1.0;
  // smoothed: raised-cosine ramps over the first and last 10% of the gate
  constexpr double ramp = 0.1;
  if (u < ramp) return 0.5 * (1.0 - std::cos(kPi * u / ramp));
  if (u > 1.0 - ramp) return 0.5 * (1.0 - std::cos(kPi * (1.0 - u) / ramp));
  return 1.0;
}

// Detector chain for one channel. Consumes per-(mode, pulse) substreams in
// generation order, so results do not depend on scheduling.
class DetectorStage {
public:
  DetectorStage(const DetectorModel& det, std::uint64_t seed,
                CounterRng::Stream stream)
      : det_(det), seed_(seed), stream_(stream),
        sigma_(det.jitter_fwhm_s / 2.3548200450309493) {}

  void accept(double t, std::uint16_t label, std::uint64_t substream,
              std::vector<RawTag>& out) {
    CounterRng* rng = rng_for(substream);
    if (det_.efficiency <= 0.0) return;
    if (det_.efficiency < 1.0 && !rng->bernoulli(det_.efficiency)) return;
    if (sigma_ > 0) t += rng->gaussian(sigma_);
    out.push_back({t, label});
  }

private:
  CounterRng* rng_for(std::uint64_t substream) {
    if (!rng_ || substream != current_) {
      rng_.emplace(seed_, stream_, substream);
      current_ = substream;
    }
    return &*rng_;
  }

  DetectorModel det_;
  std::uint64_t seed_;
  CounterRng::Stream stream_;
  double sigma_;
  std::optional<CounterRng> rng_;
  std::uint64_t current_ = ~0ull;
};

void add_dark_counts(const DetectorModel& det, double duration_s,
                     std::uint64_t seed, CounterRng::Stream stream,
                     std::vector<RawTag>& out) {
  if (det.dark_rate_hz <= 0) return;
  CounterRng rng(seed, stream, 0);
  double t = rng.exponential(1.0 / det.dark_rate_hz);
  while (t < duration_s) {
    out.push_back({t, TimeTagStream::kDarkLabel});
    t += rng.exponential(1.0 / det.dark_rate_hz);
  }
}

TimeTagStream finalize(std::vector<RawTag>& raw, const DetectorModel& det,
                       double duration_s, const std::string& channel,
                       int channel_id) {
  const std::uint64_t duration_ps =
      static_cast<std::uint64_t>(std::llround(duration_s * 1e12));
  std::vector<std::pair<std::uint64_t, std::uint16_t>> ticks;
  ticks.reserve(raw.size());
  for (size_t i = 0; i < raw.size(); ++i) {
    if (raw[i].t_s < 0) continue;
    std::uint64_t ps = static_cast<std::uint64_t>(std::llround(raw[i].t_s * 1e12));
    if (ps > duration_ps) continue;
    ticks.emplace_back(ps, raw[i].label);
  }
  std::sort(ticks.begin(), ticks.end());
  // break ties by +1 ps to keep ordering strict
  for (size_t i = 1; i < ticks.size(); ++i)
    if (ticks[i].first <= ticks[i - 1].first)
      ticks[i].first = ticks[i - 1].first + 1;
  while (!ticks.empty() && ticks.back().first > duration_ps) ticks.pop_back();

  TimeTagStream s;
  s.channel = channel;
  s.duration_s = duration_s;
  s.metadata["channel_id"] = std::to_string(channel_id);
  const std::uint64_t dead_ps =
      static_cast<std::uint64_t>(std::llround(det.dead_time_s * 1e12));
  std::uint64_t last_accept = 0;
  bool any = false;
  for (const auto& [ps, label] : ticks) {
    if (dead_ps > 0 && any && ps - last_accept < dead_ps) continue;
    s.tags_ps.push_back(ps);
    s.mode_labels.push_back(label);
    last_accept = ps;
    any = true;
  }
  return s;
}

} // namespace

std::pair<TimeTagStream, TimeTagStream> simulate_pair_stream(
    const SourceModel& source, const PumpSchedule& pump,
    const DetectorModel& det_signal, const DetectorModel& det_idler,
    double duration_s, std::uint64_t seed) {
  source.validate();
  pump.validate();
  det_signal.validate();
  det_idler.validate();
  if (!(duration_s > 0)) throw DomainError("simulate: duration must be > 0");

  const double gamma = kPi * source.bandwidth_hz; // amplitude decay rate
  const double ringdown_mean = 1.0 / (2.0 * gamma);
  const double period = pump.period_s();
  const std::uint64_t n_pulses =
      static_cast<std::uint64_t>(std::ceil(duration_s / period));

  std::vector<RawTag> raw_s, raw_i;
  DetectorStage stage_s(det_signal, seed, CounterRng::kDetectorSignal);
  DetectorStage stage_i(det_idler, seed, CounterRng::kDetectorIdler);

  for (int j = 0; j < source.mode_count(); ++j) {
    const double r_j = source.pair_rate_hz * source.modes[j].weight;
    if (r_j <= 0) continue;
    const std::uint16_t label =
        static_cast<std::uint16_t>(source.modes[j].cluster_a);
    // Thermal pair-number statistics: geometric multiplicity with
    // success parameter s = n/(n+2), seed rate rho = r (1 - s).
    const double n_j = r_j / gamma;
    const double s_j = n_j / (n_j + 2.0);
    const double rho_j = r_j * (1.0 - s_j);
    const double seed_mean = 1.0 / rho_j;

    for (std::uint64_t pulse = 0; pulse < n_pulses; ++pulse) {
      const double gate_start = pulse * period;
      const double gate_end =
          std::min(gate_start + pump.pulse_length_s, duration_s);
      if (gate_start >= duration_s) break;
      const std::uint64_t sub =
          (static_cast<std::uint64_t>(j) << 48) | pulse;
      CounterRng rng(seed, CounterRng::kPairSeeds, sub);
      double t = gate_start + rng.exponential(seed_mean);
      while (t < gate_end) {
        bool keep = true;
        if (pump.shape == PumpSchedule::Shape::smoothed) {
          double u = (t - gate_start) / pump.pulse_length_s;
          keep = rng.bernoulli(shape_value(pump.shape, u));
        }
        if (keep) {
          int pairs = rng.geometric_from_one(s_j);
          for (int g = 0; g < pairs; ++g) {
            double ts = t + rng.exponential(ringdown_mean);
            double ti = t + rng.exponential(ringdown_mean);
            stage_s.accept(ts, label, sub, raw_s);
            stage_i.accept(ti, label, sub, raw_i);
          }
        }
        t += rng.exponential(seed_mean);
      }
    }
  }

  add_dark_counts(det_signal, duration_s, seed, CounterRng::kDarkSignal, raw_s);
  add_dark_counts(det_idler, duration_s, seed, CounterRng::kDarkIdler, raw_i);

  TimeTagStream out_s = finalize(raw_s, det_signal, duration_s, "signal", 0);
  TimeTagStream out_i = finalize(raw_i, det_idler, duration_s, "idler", 1);

  auto describe = [&](TimeTagStream& s, const DetectorModel& det) {
    s.metadata["seed"] = std::to_string(seed);
    s.metadata["pair_rate_hz"] = std::to_string(source.pair_rate_hz);
    s.metadata["bandwidth_hz"] = std::to_string(source.bandwidth_hz);
    s.metadata["mode_count"] = std::to_string(source.mode_count());
    std::ostringstream w, c;
    for (int j = 0; j < source.mode_count(); ++j) {
      if (j) {
        w << ',';
        c << ',';
      }
      w << source.modes[j].weight;
      c << source.modes[j].cluster_a;
    }
    s.metadata["mode_weights"] = w.str();
    s.metadata["mode_clusters"] = c.str();
    s.metadata["pulse_length_s"] = std::to_string(pump.pulse_length_s);
    s.metadata["repetition_rate_hz"] = std::to_string(pump.repetition_rate_hz);
    s.metadata["pulse_shape"] =
        pump.shape == PumpSchedule::Shape::rectangular ? "rectangular"
                                                       : "smoothed";
    s.metadata["efficiency"] = std::to_string(det.efficiency);
    s.metadata["dark_rate_hz"] = std::to_string(det.dark_rate_hz);
    s.metadata["jitter_fwhm_s"] = std::to_string(det.jitter_fwhm_s);
    s.metadata["dead_time_s"] = std::to_string(det.dead_time_s);
    s.metadata["rng"] = "philox4x32-10";
  };
  describe(out_s, det_signal);
  describe(out_i, det_idler);
  return {std::move(out_s), std::move(out_i)};
}

std::pair<TimeTagStream, TimeTagStream> split_stream(const TimeTagStream& input,
                                                     double transmission,
                                                     std::uint64_t seed) {
  if (transmission < 0 || transmission > 1)
    throw DomainError("split_stream: transmission must be in [0, 1]");
  input.validate_sorted();
  TimeTagStream a, b;
  a.channel = input.channel + ".portA";
  b.channel = input.channel + ".portB";
  a.duration_s = b.duration_s = input.duration_s;
  a.metadata = b.metadata = input.metadata;
  a.metadata["split_transmission"] = std::to_string(transmission);
  b.metadata["split_transmission"] = std::to_string(1.0 - transmission);
  a.metadata["channel_id"] = "2";
  b.metadata["channel_id"] = "3";
  const bool labeled = input.labeled();
  CounterRng rng(seed, CounterRng::kSplit, 0);
  for (size_t i = 0; i < input.tags_ps.size(); ++i) {
    TimeTagStream& dst = rng.bernoulli(transmission) ? a : b;
    dst.tags_ps.push_back(input.tags_ps[i]);
    if (labeled) dst.mode_labels.push_back(input.mode_labels[i]);
  }
  return {std::move(a), std::move(b)};
}

TimeTagStream apply_bandpass(const TimeTagStream& input,
                             const std::set<int>& clusters, double transmission,
                             std::uint64_t seed) {
  if (transmission < 0 || transmission > 1)
    throw DomainError("apply_bandpass: transmission must be in [0, 1]");
  if (!input.labeled())
    throw ContractError("apply_bandpass: stream has no mode labels "
                        "(only simulator output can be filtered)");
  input.validate_sorted();
  TimeTagStream out;
  out.channel = input.channel + ".bandpass";
  out.duration_s = input.duration_s;
  out.metadata = input.metadata;
  {
    std::ostringstream sel;
    for (int a : clusters) sel << a << ';';
    out.metadata["bandpass_clusters"] = sel.str();
    out.metadata["bandpass_transmission"] = std::to_string(transmission);
  }
  CounterRng rng(seed, CounterRng::kBandpass, 0);
  for (size_t i = 0; i < input.tags_ps.size(); ++i) {
    std::uint16_t label = input.mode_labels[i];
    if (label == TimeTagStream::kDarkLabel) { // detector-side noise
      out.tags_ps.push_back(input.tags_ps[i]);
      out.mode_labels.push_back(label);
      continue;
    }
    if (!clusters.count(label)) continue;
    if (transmission < 1.0 && !rng.bernoulli(transmission)) continue;
    out.tags_ps.push_back(input.tags_ps[i]);
    out.mode_labels.push_back(label);
  }
  return out;
}

} // namespace wgmr
