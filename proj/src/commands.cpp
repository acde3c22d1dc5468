#include "wgmr/commands.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <iostream>
#include <sstream>

#include "wgmr/constants.hpp"
#include "wgmr/errors.hpp"
#include "wgmr/timetags.hpp"

namespace fs = std::filesystem;

namespace wgmr::cli {
namespace {

std::string dir_of(const std::string& path) {
  fs::path p(path);
  auto parent = p.parent_path();
  return parent.empty() ? std::string(".") : parent.string();
}

std::string join(const std::string& dir, const std::string& name) {
  return (fs::path(dir) / name).string();
}

struct RunContext {
  Config cfg;
  std::string out_dir;
  std::uint64_t seed = 0;
  bool seed_set = false;
  double temperature_c = 25.0;
};

RunContext make_context(const GlobalOptions& g, bool need_seed) {
  if (g.config_path.empty()) throw DomainError("--config is required");
  RunContext ctx{Config::load(g.config_path), "", 0, false, 25.0};
  ctx.out_dir = !g.out_dir.empty()
                    ? g.out_dir
                    : ctx.cfg.get_string("run", "out_dir", ".");
  if (g.seed) {
    ctx.seed = *g.seed;
    ctx.seed_set = true;
  } else if (ctx.cfg.has("run", "seed")) {
    ctx.seed = static_cast<std::uint64_t>(ctx.cfg.get_integer("run", "seed"));
    ctx.seed_set = true;
  }
  if (need_seed && !ctx.seed_set)
    throw DomainError("no seed given: set [run] seed or pass --seed "
                      "(time-based seeding is not supported)");
  ctx.temperature_c = ctx.cfg.get_temperature("run", "temperature", 25.0);
  fs::create_directories(ctx.out_dir);
  return ctx;
}

double excess_coincidence_rate(const CorrelationHistogram& h,
                               double window_s) {
  // baseline from the far-lag quarter on each side
  std::vector<double> far;
  int K = h.half_bins();
  for (int k = -K; k <= K; ++k)
    if (std::fabs(k * h.bin_width_s) > 0.75 * h.max_lag_s)
      far.push_back(static_cast<double>(h.counts[k + K]));
  std::sort(far.begin(), far.end());
  double baseline = far.empty() ? 0.0 : far[far.size() / 2];
  double excess = 0;
  for (int k = -K; k <= K; ++k)
    if (std::fabs(k * h.bin_width_s) <= window_s)
      excess += static_cast<double>(h.counts[k + K]) - baseline;
  return excess / h.duration_s;
}

std::string format_fit_report(const ExpFitResult& f, bool cross) {
  std::ostringstream os;
  os.precision(6);
  os << "model: g2(t) = A + B*exp(-C*|t|)\n";
  os << "A = " << f.a << "   95% CI [" << f.a_ci.lower << ", " << f.a_ci.upper
     << "]\n";
  os << "B = " << f.b << "   95% CI [" << f.b_ci.lower << ", " << f.b_ci.upper
     << "]\n";
  os << "C = " << f.c << " 1/s   95% CI [" << f.c_ci.lower << ", "
     << f.c_ci.upper << "]\n";
  os << "bandwidth nu = C/(2 pi) = " << f.bandwidth_hz * 1e-6 << " MHz   CI ["
     << f.bandwidth_ci.lower * 1e-6 << ", " << f.bandwidth_ci.upper * 1e-6
     << "] MHz\n";
  os << "g2(0) = A + B = " << f.g2_zero << "\n";
  if (cross) {
    if (f.g2_zero > 2.0)
      os << "mean photon number <n> = 1/(g2(0)-2) = "
         << mean_photon_number(f.g2_zero) << "  (1/B = " << 1.0 / f.b << ")\n";
    else
      os << "mean photon number: not defined (g2(0) <= 2)\n";
  } else {
    if (f.g2_zero > 1.0)
      os << "effective modes k = 1/(g2(0)-1) = " << effective_modes(f.g2_zero)
         << "\n";
    else
      os << "effective modes: not defined (g2(0) <= 1)\n";
  }
  os << "reduced chi^2 = " << f.chi2_reduced << ", iterations = "
     << f.iterations << (f.wide_ci ? ", WARNING: near-singular covariance" : "")
     << "\n";
  return os.str();
}

std::string histogram_svg(const CorrelationHistogram& h,
                          const ExpFitResult* fit) {
  const int W = 640, H = 400, ml = 60, mr = 15, mt = 15, mb = 40;
  double ymax = 1e-12, ymin = 0;
  for (size_t i = 0; i < h.g2.size(); ++i) ymax = std::max(ymax, h.g2[i]);
  ymax *= 1.05;
  double x0 = -h.max_lag_s, x1 = h.max_lag_s;
  auto X = [&](double t) {
    return ml + (t - x0) / (x1 - x0) * (W - ml - mr);
  };
  auto Y = [&](double v) {
    return H - mb - (v - ymin) / (ymax - ymin) * (H - mt - mb);
  };
  std::ostringstream os;
  os << "<svg xmlns='http://www.w3.org/2000/svg' width='" << W << "' height='"
     << H << "'>\n";
  os << "<rect width='100%' height='100%' fill='white'/>\n";
  os << "<line x1='" << ml << "' y1='" << H - mb << "' x2='" << W - mr
     << "' y2='" << H - mb << "' stroke='black'/>\n";
  os << "<line x1='" << ml << "' y1='" << mt << "' x2='" << ml << "' y2='"
     << H - mb << "' stroke='black'/>\n";
  os << "<text x='" << (W / 2) << "' y='" << H - 8
     << "' text-anchor='middle' font-size='13'>lag (ns)</text>\n";
  os << "<text x='15' y='" << (H / 2)
     << "' font-size='13' transform='rotate(-90 15 " << H / 2
     << ")' text-anchor='middle'>g2</text>\n";
  os << "<polyline fill='none' stroke='#1f77b4' stroke-width='1' points='";
  for (size_t i = 0; i < h.g2.size(); ++i)
    os << X(h.lag_of(static_cast<int>(i))) << ',' << Y(h.g2[i]) << ' ';
  os << "'/>\n";
  if (fit) {
    os << "<polyline fill='none' stroke='#d62728' stroke-width='1.5' points='";
    for (int i = 0; i <= 400; ++i) {
      double t = x0 + (x1 - x0) * i / 400.0;
      double v = fit->a + fit->b * std::exp(-fit->c * std::fabs(t));
      os << X(t) << ',' << Y(v) << ' ';
    }
    os << "'/>\n";
  }
  for (int tick = 0; tick <= 4; ++tick) {
    double t = x0 + (x1 - x0) * tick / 4.0;
    os << "<text x='" << X(t) << "' y='" << H - mb + 16
       << "' text-anchor='middle' font-size='11'>" << t * 1e9 << "</text>\n";
    double v = ymin + (ymax - ymin) * tick / 4.0;
    os << "<text x='" << ml - 6 << "' y='" << Y(v) + 4
       << "' text-anchor='end' font-size='11'>" << v << "</text>\n";
  }
  os << "</svg>\n";
  return os.str();
}

std::string spectrum_svg(const ClusterSpectrum& spec) {
  const int W = 640, H = 240, ml = 60, mr = 15, mt = 15, mb = 40;
  double lmin = 1e99, lmax = 0;
  for (const auto& g : spec.groups) {
    lmin = std::min(lmin, g.signal_centroid_wavelength_m);
    lmax = std::max(lmax, g.signal_centroid_wavelength_m);
  }
  if (spec.groups.empty()) {
    lmin = 1e-6;
    lmax = 2e-6;
  }
  double pad = (lmax - lmin) * 0.08 + 1e-9;
  lmin -= pad;
  lmax += pad;
  auto X = [&](double l) {
    return ml + (l - lmin) / (lmax - lmin) * (W - ml - mr);
  };
  std::ostringstream os;
  os << "<svg xmlns='http://www.w3.org/2000/svg' width='" << W << "' height='"
     << H << "'>\n<rect width='100%' height='100%' fill='white'/>\n";
  os << "<line x1='" << ml << "' y1='" << H - mb << "' x2='" << W - mr
     << "' y2='" << H - mb << "' stroke='black'/>\n";
  os << "<text x='" << W / 2 << "' y='" << H - 8
     << "' text-anchor='middle' font-size='13'>signal wavelength (nm)</text>\n";
  for (const auto& g : spec.groups) {
    double x = X(g.signal_centroid_wavelength_m);
    os << "<line x1='" << x << "' y1='" << mt + 20 << "' x2='" << x << "' y2='"
       << H - mb << "' stroke='#2ca02c' stroke-width='2'/>\n";
    os << "<text x='" << x << "' y='" << mt + 14
       << "' text-anchor='middle' font-size='12'>a=" << g.cluster_a
       << "</text>\n";
  }
  for (int tick = 0; tick <= 4; ++tick) {
    double l = lmin + (lmax - lmin) * tick / 4.0;
    os << "<text x='" << X(l) << "' y='" << H - mb + 16
       << "' text-anchor='middle' font-size='11'>" << l * 1e9 << "</text>\n";
  }
  os << "</svg>\n";
  return os.str();
}

} // namespace

IndexRange parse_range(const std::string& text) {
  auto colon = text.find(':');
  try {
    if (colon == std::string::npos) {
      int v = std::stoi(text);
      return {v, v};
    }
    IndexRange r{std::stoi(text.substr(0, colon)),
                 std::stoi(text.substr(colon + 1))};
    if (r.hi < r.lo) throw DomainError("range '" + text + "' is descending");
    return r;
  } catch (const DomainError&) {
    throw;
  } catch (const std::exception&) {
    throw DomainError("bad index range '" + text + "' (use N or N:M)");
  }
}

ResonatorGeometry load_geometry(const Config& cfg) {
  ResonatorGeometry geom;
  geom.major_radius_m = cfg.get_length("geometry", "major_radius");
  geom.polar_radius_m = cfg.get_length("geometry", "polar_radius");
  geom.validate();
  return geom;
}

MaterialModel load_material(const Config& cfg, const std::string& config_dir) {
  if (cfg.has("material", "constant_index"))
    return MaterialModel::constant_index(
        cfg.get_number("material", "constant_index"));
  std::string file = cfg.get_string("material", "file");
  fs::path p(file);
  if (p.is_relative()) p = fs::path(config_dir) / p;
  return MaterialModel::load(p.string());
}

ModeIndex load_pump(const Config& cfg, const ResonatorGeometry& geom,
                    const MaterialModel& mat, double temperature_c) {
  ModeIndex pump;
  pump.q = static_cast<int>(cfg.get_integer("pump", "q", 1));
  pump.p = static_cast<int>(cfg.get_integer("pump", "p", 0));
  pump.polarization = polarization_from_string(
      cfg.get_string("pump", "polarization", "extraordinary"));
  if (cfg.has("pump", "m")) {
    pump.m = static_cast<int>(cfg.get_integer("pump", "m"));
  } else {
    double lam = cfg.get_length("pump", "wavelength");
    pump.m = azimuthal_order_near(geom, mat, pump.q, pump.p, pump.polarization,
                                  kSpeedOfLight / lam, temperature_c);
  }
  pump.validate();
  return pump;
}

SourceModel load_source(const Config& cfg) {
  SourceModel src;
  src.bandwidth_hz = cfg.get_frequency("source", "bandwidth");
  if (cfg.has("source", "pair_rate")) {
    src.pair_rate_hz = cfg.get_frequency("source", "pair_rate");
    if (cfg.has("source", "mean_photon_number"))
      throw DomainError("[source]: give pair_rate or mean_photon_number, "
                        "not both");
  } else {
    src.pair_rate_hz = pair_rate_for_mean_photon_number(
        cfg.get_number("source", "mean_photon_number"), src.bandwidth_hz);
  }
  int k = static_cast<int>(cfg.get_integer("source", "mode_count", 1));
  src.modes.clear();
  std::vector<double> weights(k, 1.0 / k);
  if (cfg.has("source", "weights")) {
    weights = cfg.get_number_list("source", "weights");
    if (static_cast<int>(weights.size()) != k)
      throw DomainError("[source]: weights length must equal mode_count");
  }
  std::vector<std::int64_t> clusters(k);
  for (int j = 0; j < k; ++j) clusters[j] = 2 * j;
  if (cfg.has("source", "clusters")) {
    clusters = cfg.get_integer_list("source", "clusters");
    if (static_cast<int>(clusters.size()) != k)
      throw DomainError("[source]: clusters length must equal mode_count");
  }
  for (int j = 0; j < k; ++j)
    src.modes.push_back({weights[j], static_cast<int>(clusters[j])});
  src.validate();
  return src;
}

PumpSchedule load_pulse(const Config& cfg) {
  PumpSchedule sched;
  sched.pulse_length_s = cfg.get_time("pulse", "length");
  sched.repetition_rate_hz = cfg.get_frequency("pulse", "repetition_rate");
  std::string shape = cfg.get_string("pulse", "shape", "rectangular");
  if (shape == "rectangular")
    sched.shape = PumpSchedule::Shape::rectangular;
  else if (shape == "smoothed")
    sched.shape = PumpSchedule::Shape::smoothed;
  else
    throw DomainError("[pulse]: shape must be rectangular or smoothed");
  sched.validate();
  return sched;
}

DetectorModel load_detector(const Config& cfg, const std::string& section) {
  DetectorModel det;
  det.efficiency = cfg.get_number(section, "efficiency", 1.0);
  det.dark_rate_hz = cfg.get_frequency(section, "dark_rate", 0.0);
  det.jitter_fwhm_s = cfg.get_time(section, "jitter_fwhm", 0.0);
  det.dead_time_s = cfg.get_time(section, "dead_time", 0.0);
  det.validate();
  return det;
}

int cmd_modes(const GlobalOptions& g, const IndexRange& q, const IndexRange& m,
              const IndexRange& p, const std::string& pol) {
  RunContext ctx = make_context(g, false);
  ResonatorGeometry geom = load_geometry(ctx.cfg);
  MaterialModel mat = load_material(ctx.cfg, dir_of(g.config_path));
  ctx.cfg.reject_unknown();

  std::vector<Polarization> pols;
  if (pol == "both")
    pols = {Polarization::ordinary, Polarization::extraordinary};
  else
    pols = {polarization_from_string(pol)};

  std::ostringstream os;
  os << "q,m,p,polarization,frequency_hz,wavelength_nm,size_parameter\n";
  os.precision(12);
  for (Polarization pp : pols)
    for (int qi = q.lo; qi <= q.hi; ++qi)
      for (int mi = m.lo; mi <= m.hi; ++mi)
        for (int pi = p.lo; pi <= p.hi; ++pi) {
          ModeIndex idx{qi, mi, pi, pp};
          ModeFrequency f = mode_frequency(geom, mat, idx, ctx.temperature_c);
          os << qi << ',' << mi << ',' << pi << ',' << to_string(pp) << ','
             << f.frequency_hz << ',' << f.vacuum_wavelength_m * 1e9 << ','
             << f.size_parameter << '\n';
        }
  atomic_write_text(join(ctx.out_dir, "modes.csv"), os.str());
  std::cout << "wrote " << join(ctx.out_dir, "modes.csv") << "\n";
  return 0;
}

int cmd_phasematch(const GlobalOptions& g) {
  RunContext ctx = make_context(g, false);
  ResonatorGeometry geom = load_geometry(ctx.cfg);
  MaterialModel mat = load_material(ctx.cfg, dir_of(g.config_path));
  ModeIndex pump = load_pump(ctx.cfg, geom, mat, ctx.temperature_c);

  EnumerationCaps caps;
  caps.q_max = static_cast<int>(ctx.cfg.get_integer("enumerate", "q_max", 3));
  caps.p_max = static_cast<int>(ctx.cfg.get_integer("enumerate", "p_max", 8));
  caps.threads = g.threads;
  // Default tolerance: one cavity linewidth of the down-converted modes.
  double tol = ctx.cfg.get_frequency("enumerate", "tolerance", 27e6);
  WavelengthRange window;
  window.min_m = ctx.cfg.get_length("enumerate", "signal_min", 1000e-9);
  window.max_m = ctx.cfg.get_length("enumerate", "signal_max", 1075e-9);
  int a_max = static_cast<int>(ctx.cfg.get_integer("enumerate", "a_max", 10));
  ctx.cfg.reject_unknown();

  auto sols = enumerate_phase_matches(pump, geom, mat, ctx.temperature_c,
                                      window, caps, tol);
  {
    std::ostringstream os;
    solutions_to_csv(sols, os);
    atomic_write_text(join(ctx.out_dir, "solutions.csv"), os.str());
  }
  ClusterSpectrum spec =
      cluster_spectrum(pump, geom, mat, ctx.temperature_c, a_max);
  {
    std::ostringstream os;
    spectrum_to_csv(spec, os);
    atomic_write_text(join(ctx.out_dir, "cluster_spectrum.csv"), os.str());
  }
  if (g.format == "svg")
    atomic_write_text(join(ctx.out_dir, "cluster_spectrum.svg"),
                      spectrum_svg(spec));
  std::cout << "wrote " << join(ctx.out_dir, "solutions.csv") << " ("
            << sols.size() << " solutions) and cluster_spectrum.csv ("
            << spec.groups.size() << " clusters)\n";
  return 0;
}

int cmd_simulate(const GlobalOptions& g, const std::string& duration_override) {
  RunContext ctx = make_context(g, true);
  SourceModel src = load_source(ctx.cfg);
  PumpSchedule sched = load_pulse(ctx.cfg);
  DetectorModel det_s = load_detector(ctx.cfg, "detector_signal");
  DetectorModel det_i = load_detector(ctx.cfg, "detector_idler");
  double duration = !duration_override.empty()
                        ? parse_time(duration_override)
                        : ctx.cfg.get_time("run", "duration");
  ctx.cfg.reject_unknown();

  auto [sig, idl] =
      simulate_pair_stream(src, sched, det_s, det_i, duration, ctx.seed);
  bool csv = g.format == "csv";
  std::string sig_path =
      join(ctx.out_dir, csv ? "signal.csv" : "signal.bin");
  std::string idl_path = join(ctx.out_dir, csv ? "idler.csv" : "idler.bin");
  if (csv) {
    write_tags_csv(sig, sig_path);
    write_tags_csv(idl, idl_path);
  } else {
    write_tags_binary(sig, sig_path);
    write_tags_binary(idl, idl_path);
  }
  write_metadata(sig, sig_path + ".meta.txt");
  write_metadata(idl, idl_path + ".meta.txt");
  std::cout << "wrote " << sig_path << " (" << sig.tags_ps.size()
            << " tags) and " << idl_path << " (" << idl.tags_ps.size()
            << " tags)\n";
  return 0;
}

namespace {

TimeTagStream load_stream(const std::string& path, double duration_hint) {
  double duration = duration_hint;
  if (duration <= 0) {
    std::string meta = path + ".meta.txt";
    if (fs::exists(meta)) {
      auto kv = read_metadata(meta);
      auto it = kv.find("duration_s");
      if (it != kv.end()) duration = std::stod(it->second);
    }
  }
  if (duration <= 0)
    throw DomainError("duration unknown for '" + path +
                      "': pass --duration or provide a metadata sidecar");
  if (path.size() > 4 && path.compare(path.size() - 4, 4, ".csv") == 0)
    return read_tags_csv(path, duration);
  return read_tags_binary(path, duration);
}

} // namespace

int cmd_correlate(const GlobalOptions& g, const CorrelateArgs& args) {
  // config optional unless pulsed normalization requested
  Config cfg = !g.config_path.empty() ? Config::load(g.config_path)
                                      : Config::from_string("", "<none>");
  std::string out_dir = !g.out_dir.empty()
                            ? g.out_dir
                            : cfg.get_string("run", "out_dir", ".");
  fs::create_directories(out_dir);

  double bin = parse_time(args.bin);
  double max_lag = parse_time(args.max_lag);
  double duration = args.duration.empty() ? 0 : parse_time(args.duration);
  std::string norm_mode = !args.normalization.empty()
                              ? args.normalization
                              : cfg.get_string("correlate", "normalization",
                                               "total");

  TimeTagStream x, y;
  bool cross = !args.signal_file.empty();
  if (cross) {
    if (args.idler_file.empty())
      throw DomainError("cross mode needs --signal and --idler");
    x = load_stream(args.signal_file, duration);
    y = load_stream(args.idler_file, duration);
  } else {
    if (args.input_file.empty())
      throw DomainError("give --signal/--idler (cross) or --input (auto)");
    TimeTagStream in = load_stream(args.input_file, duration);
    std::uint64_t seed = 0;
    if (g.seed)
      seed = *g.seed;
    else if (cfg.has("run", "seed"))
      seed = static_cast<std::uint64_t>(cfg.get_integer("run", "seed"));
    else
      throw DomainError("auto mode splits the stream and needs --seed or "
                        "[run] seed");
    auto [a, b] = split_stream(in, 0.5, seed);
    x = std::move(a);
    y = std::move(b);
  }

  CorrelationHistogram hist = coincidence_histogram(x, y, bin, max_lag);
  NormalizationMode mode = NormalizationMode::total_duration;
  std::optional<PulseContext> pulse;
  if (norm_mode == "gated" || norm_mode == "envelope") {
    mode = norm_mode == "gated" ? NormalizationMode::gated
                                : NormalizationMode::envelope;
    PulseContext pc;
    pc.schedule = load_pulse(cfg);
    pc.bandwidth_hz = cfg.get_frequency("source", "bandwidth", 0.0);
    pulse = pc;
  } else if (norm_mode != "total") {
    throw DomainError("normalization must be total, gated or envelope");
  }
  normalize_g2(hist, mode, pulse);
  ExpFitResult fit = fit_exponential(hist);

  {
    std::ostringstream os;
    histogram_to_csv(hist, os);
    atomic_write_text(join(out_dir, "histogram.csv"), os.str());
  }
  {
    std::ostringstream os;
    os << (cross ? "cross" : "auto") << "-correlation of "
       << (cross ? args.signal_file + " x " + args.idler_file
                 : args.input_file + " (50/50 split)")
       << "\nbin " << bin * 1e9 << " ns, max lag " << max_lag * 1e9
       << " ns, normalization " << norm_mode << "\n\n"
       << format_fit_report(fit, cross);
    atomic_write_text(join(out_dir, "fit_report.txt"), os.str());
  }
  if (g.format == "svg")
    atomic_write_text(join(out_dir, "histogram.svg"),
                      histogram_svg(hist, &fit));
  std::cout << "wrote " << join(out_dir, "histogram.csv") << " and "
            << join(out_dir, "fit_report.txt") << "\n";
  std::cout << format_fit_report(fit, cross);
  return 0;
}

ReportResult run_report(const Config& cfg, const GlobalOptions& g,
                        double duration_override_s) {
  std::string stage = "setup";
  try {
    std::uint64_t seed = 0;
    if (g.seed)
      seed = *g.seed;
    else
      seed = static_cast<std::uint64_t>(cfg.get_integer("run", "seed"));
    double duration = 0;
    if (duration_override_s > 0) {
      cfg.get_time("run", "duration", 0); // mark as consumed if present
      duration = duration_override_s;
    } else {
      duration = cfg.get_time("run", "duration");
    }
    double temperature = cfg.get_temperature("run", "temperature", 25.0);

    SourceModel src = load_source(cfg);
    PumpSchedule sched = load_pulse(cfg);
    DetectorModel det_s = load_detector(cfg, "detector_signal");
    DetectorModel det_i = load_detector(cfg, "detector_idler");
    std::set<int> filter_clusters;
    for (auto a : cfg.get_integer_list("filter", "clusters"))
      filter_clusters.insert(static_cast<int>(a));
    double filter_transmission = cfg.get_number("filter", "transmission");
    double bin = cfg.get_time("correlate", "bin", 1e-9);
    double max_lag = cfg.get_time("correlate", "max_lag", 200e-9);
    std::string norm_mode = cfg.get_string("correlate", "normalization",
                                           "envelope");

    std::ostringstream rep;
    rep.precision(4);
    rep << "photon-pair source reproduction report\n";
    rep << "=======================================\n";
    rep << "seed " << seed << ", duration " << duration << " s, temperature "
        << temperature << " C\n";
    rep << "source: k=" << src.mode_count() << ", bandwidth "
        << src.bandwidth_hz * 1e-6 << " MHz, gated pair rate "
        << src.pair_rate_hz << " /s\n";
    rep << "pump: " << sched.pulse_length_s * 1e9 << " ns pulses at "
        << sched.repetition_rate_hz * 1e-6 << " MHz (duty " << sched.duty()
        << ")\n\n";

    ReportResult result;

    // optional dispersion stage
    if (cfg.has("geometry", "major_radius")) {
      stage = "cluster-spectrum";
      ResonatorGeometry geom = load_geometry(cfg);
      MaterialModel mat = load_material(cfg, dir_of(g.config_path.empty()
                                                        ? "."
                                                        : g.config_path));
      ModeIndex pump = load_pump(cfg, geom, mat, temperature);
      int a_max =
          static_cast<int>(cfg.get_integer("enumerate", "a_max", 10));
      ClusterSpectrum spec =
          cluster_spectrum(pump, geom, mat, temperature, a_max);
      rep << "cluster spectrum (fundamental pump, m=" << pump.m << ")\n";
      rep << "  a  families  signal_nm   spread_MHz  gap_to_next_nm\n";
      for (size_t i = 0; i < spec.groups.size(); ++i) {
        const auto& grp = spec.groups[i];
        rep << "  " << grp.cluster_a << "  " << grp.families.size()
            << "         " << grp.signal_centroid_wavelength_m * 1e9 << "   "
            << grp.internal_spread_hz * 1e-6 << "        ";
        if (i + 1 < spec.groups.size())
          rep << spec.adjacent_gaps_m[i] * 1e9;
        rep << "\n";
      }
      rep << "\n";
    }

    stage = "simulate";
    auto [sig, idl] =
        simulate_pair_stream(src, sched, det_s, det_i, duration, seed);
    rep << "detected tags: signal " << sig.tags_ps.size() << ", idler "
        << idl.tags_ps.size() << "\n\n";

    NormalizationMode mode = NormalizationMode::envelope;
    if (norm_mode == "total")
      mode = NormalizationMode::total_duration;
    else if (norm_mode == "gated")
      mode = NormalizationMode::gated;
    else if (norm_mode != "envelope")
      throw DomainError("correlate.normalization must be total, gated or "
                        "envelope");
    PulseContext pc{sched, src.bandwidth_hz};
    std::optional<PulseContext> pulse;
    if (mode != NormalizationMode::total_duration) pulse = pc;

    auto analyze = [&](const TimeTagStream& s, const TimeTagStream& i,
                       std::uint64_t split_seed, double& rate_out,
                       ExpFitResult& cross_out, ExpFitResult& auto_out) {
      CorrelationHistogram ch = coincidence_histogram(s, i, bin, max_lag);
      normalize_g2(ch, mode, pulse);
      cross_out = fit_exponential(ch);
      rate_out = excess_coincidence_rate(ch, 6.0 / cross_out.c);
      auto [pa, pb] = split_stream(s, 0.5, split_seed);
      CorrelationHistogram ah = coincidence_histogram(pa, pb, bin, max_lag);
      normalize_g2(ah, mode, pulse);
      auto_out = fit_exponential(ah);
    };

    stage = "unfiltered-analysis";
    double rate_u = 0;
    ExpFitResult cross_u, auto_u;
    analyze(sig, idl, seed + 1, rate_u, cross_u, auto_u);
    rep << "unfiltered\n";
    rep << "  singles: signal " << sig.tags_ps.size() / duration
        << " /s, idler " << idl.tags_ps.size() / duration << " /s\n";
    rep << "  coincidence rate (baseline-subtracted): " << rate_u << " /s\n";
    rep << "  cross: g2_si(0) = " << cross_u.g2_zero << ", nu = "
        << cross_u.bandwidth_hz * 1e-6 << " MHz, <n> = "
        << (cross_u.g2_zero > 2 ? mean_photon_number(cross_u.g2_zero) : 0.0)
        << " (1/B = " << 1.0 / cross_u.b << ")\n";
    rep << "  auto (signal arm): g2_ss(0) = " << auto_u.g2_zero
        << ", k_eff = "
        << (auto_u.g2_zero > 1 ? effective_modes(auto_u.g2_zero) : 0.0)
        << "\n\n";

    stage = "filtered-analysis";
    TimeTagStream sig_f =
        apply_bandpass(sig, filter_clusters, filter_transmission, seed + 2);
    double rate_f = 0;
    ExpFitResult cross_f, auto_f;
    analyze(sig_f, idl, seed + 3, rate_f, cross_f, auto_f);
    double rate_f_corrected = rate_f / filter_transmission;
    rep << "filtered (clusters {";
    for (int a : filter_clusters) rep << a << ' ';
    rep << "}, transmission " << filter_transmission << ")\n";
    rep << "  singles: signal " << sig_f.tags_ps.size() / duration
        << " /s\n";
    rep << "  coincidence rate: " << rate_f << " /s; loss-corrected "
        << rate_f_corrected << " /s\n";
    rep << "  cross: g2_si(0) = " << cross_f.g2_zero << ", nu = "
        << cross_f.bandwidth_hz * 1e-6 << " MHz\n";
    rep << "  auto (signal arm): g2_ss(0) = " << auto_f.g2_zero
        << ", k_eff = "
        << (auto_f.g2_zero > 1 ? effective_modes(auto_f.g2_zero) : 0.0)
        << "\n\n";

    stage = "summary";
    result.rate_ratio = rate_f_corrected / rate_u;
    result.k_eff_unfiltered =
        auto_u.g2_zero > 1 ? effective_modes(auto_u.g2_zero) : 0.0;
    result.k_eff_filtered =
        auto_f.g2_zero > 1 ? effective_modes(auto_f.g2_zero) : 0.0;
    result.g2_cross_zero_unfiltered = cross_u.g2_zero;
    result.g2_cross_zero_filtered = cross_f.g2_zero;
    result.mean_n_unfiltered =
        cross_u.g2_zero > 2 ? mean_photon_number(cross_u.g2_zero) : 0.0;
    result.bandwidth_fit_hz = cross_u.bandwidth_hz;
    rep << "summary\n";
    rep << "  filtered/unfiltered pair-rate ratio (loss-corrected): "
        << result.rate_ratio << "\n";
    rep << "  effective modes: unfiltered " << result.k_eff_unfiltered
        << ", filtered " << result.k_eff_filtered << "\n";
    rep << "  bandwidth: fitted " << result.bandwidth_fit_hz * 1e-6
        << " MHz vs configured " << src.bandwidth_hz * 1e-6 << " MHz\n";
    result.text = rep.str();
    return result;
  } catch (const DomainError& e) {
    throw DomainError("report stage '" + stage + "' failed: " + e.what());
  } catch (const IoError& e) {
    throw IoError("report stage '" + stage + "' failed: " + e.what());
  } catch (const std::exception& e) {
    throw NumericalError("report stage '" + stage + "' failed: " + e.what());
  }
}

int cmd_report(const GlobalOptions& g, const std::string& duration_override) {
  RunContext ctx = make_context(g, true);
  GlobalOptions g2 = g;
  if (!g2.seed) g2.seed = ctx.seed;
  double dur = duration_override.empty() ? 0 : parse_time(duration_override);
  ReportResult res = run_report(ctx.cfg, g2, dur);
  ctx.cfg.reject_unknown();
  atomic_write_text(join(ctx.out_dir, "report.txt"), res.text);
  std::cout << res.text;
  std::cout << "wrote " << join(ctx.out_dir, "report.txt") << "\n";
  return 0;
}

int run_guarded(const std::function<int()>& body) {
  try {
    return body();
  } catch (const DomainError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const ContractError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const IoError& e) {
    std::cerr << "I/O error: " << e.what() << "\n";
    return 4;
  } catch (const NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
}

} // namespace wgmr::cli
