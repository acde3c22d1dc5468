#include "wgmr/phasematch.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <map>
#include <sstream>

#include "wgmr/constants.hpp"
#include "wgmr/errors.hpp"
#include "wgmr/wigner.hpp"

namespace wgmr {

bool is_type_i(const ModeTriple& t) {
  return t.pump.polarization == Polarization::extraordinary &&
         t.signal.polarization == Polarization::ordinary &&
         t.idler.polarization == Polarization::ordinary;
}

bool selection_rules_satisfied(const ModeTriple& t) {
  int lp = t.pump.l(), ls = t.signal.l(), li = t.idler.l();
  if (t.pump.m != t.signal.m + t.idler.m) return false;
  if (lp < std::abs(ls - li) || lp > ls + li) return false;
  return ((lp + ls + li) % 2) == 0;
}

std::optional<int> cluster_number(int p_p, int p_s, int p_i) {
  if (p_p < 0 || p_s < 0 || p_i < 0)
    throw DomainError("cluster_number: p indices must be >= 0");
  int a = p_s + p_i - p_p;
  if (a < 0 || (a % 2) != 0) return std::nullopt;
  return a;
}

int cluster_size(int p_p, int a) {
  if (p_p < 0) throw DomainError("cluster_size: p_p must be >= 0");
  if (a < 0 || (a % 2) != 0)
    throw DomainError("cluster_size: a must be even and >= 0");
  return p_p + a + 1;
}

double angular_overlap(int l_p, int m_p, int l_s, int m_s, int l_i, int m_i) {
  return gaunt_coefficient(l_p, m_p, l_s, m_s, l_i, m_i);
}

namespace {

// Interior radial wavefunction j_l(k r) with k fixed by the sphere
// dispersion solution for (q, l).
struct RadialProfile {
  int l = 0;
  double k = 0; // internal wavenumber, rad/m
};

RadialProfile radial_profile(int q, int l, const RadialOverlapBasis& b) {
  ResonatorGeometry sphere{b.radius_m, b.radius_m};
  MaterialModel mat = MaterialModel::constant_index(b.index);
  ModeIndex idx{q, std::max(1, l), l - std::max(1, l), b.polarization};
  // l >= 1 always here (callers validate); use m = l, p = 0.
  idx.m = l;
  idx.p = 0;
  ModeFrequency f = mode_frequency(sphere, mat, idx, 25.0);
  return {l, f.size_parameter / b.radius_m};
}

// Composite 8-point Gauss-Legendre over [0, R].
template <typename F>
double integrate(F&& fn, double R, int panels) {
  static const double xs[4] = {0.1834346424956498, 0.5255324099163290,
                               0.7966664774136267, 0.9602898564975363};
  static const double ws[4] = {0.3626837833783620, 0.3137066458778873,
                               0.2223810344533745, 0.1012285362903763};
  double sum = 0.0;
  double h = R / panels;
  for (int p = 0; p < panels; ++p) {
    double c = (p + 0.5) * h, half = 0.5 * h;
    for (int i = 0; i < 4; ++i) {
      sum += ws[i] * half * (fn(c + half * xs[i]) + fn(c - half * xs[i]));
    }
  }
  return sum;
}

} // namespace

double radial_overlap(int q_p, int q_s, int q_i,
                      const RadialOverlapBasis& b) {
  if (q_p < 1 || q_s < 1 || q_i < 1)
    throw DomainError("radial_overlap: q must be >= 1");
  int lmax = std::max({b.l_p, b.l_s, b.l_i});
  if (std::min({b.l_p, b.l_s, b.l_i}) < 1)
    throw DomainError("radial_overlap: l must be >= 1");
  if (lmax > kRadialOverlapMaxL)
    throw UnsupportedScaleError(
        "radial_overlap: l = " + std::to_string(lmax) +
        " above the desk-scale cap " + std::to_string(kRadialOverlapMaxL));
  RadialProfile P = radial_profile(q_p, b.l_p, b);
  RadialProfile S = radial_profile(q_s, b.l_s, b);
  RadialProfile I = radial_profile(q_i, b.l_i, b);
  double xmax = std::max({P.k, S.k, I.k}) * b.radius_m;
  int panels = b.resolution > 0
                   ? b.resolution
                   : std::max(64, 4 * static_cast<int>(std::ceil(xmax)));
  auto mode = [&](const RadialProfile& rp, double r) {
    return std::sph_bessel(rp.l, rp.k * r);
  };
  auto norm = [&](const RadialProfile& rp) {
    double n2 = integrate(
        [&](double r) {
          double v = mode(rp, r);
          return v * v * r * r;
        },
        b.radius_m, panels);
    return std::sqrt(n2);
  };
  double np = norm(P), ns = norm(S), ni = norm(I);
  double ov = integrate(
      [&](double r) {
        return mode(S, r) * mode(I, r) * mode(P, r) * r * r;
      },
      b.radius_m, panels);
  return ov / (np * ns * ni);
}

namespace {

// Memoized dispersion evaluations for one (geom, mat, T) context.
class FrequencyCache {
public:
  FrequencyCache(const ResonatorGeometry& g, const MaterialModel& m, double t,
                 const DispersionOptions& o)
      : geom_(g), mat_(m), temp_(t), opts_(o) {}

  double at(const ModeIndex& idx) {
    Key k{idx.q, idx.m, idx.p, idx.polarization == Polarization::ordinary};
    auto it = cache_.find(k);
    if (it != cache_.end()) return it->second;
    double v = mode_frequency(geom_, mat_, idx, temp_, opts_).frequency_hz;
    cache_.emplace(k, v);
    return v;
  }

private:
  using Key = std::tuple<int, int, int, bool>;
  const ResonatorGeometry& geom_;
  const MaterialModel& mat_;
  double temp_;
  DispersionOptions opts_;
  std::map<Key, double> cache_;
};

struct Family {
  int q_s, q_i, p_s, p_i, a;
};

std::vector<Family> make_families(int p_p, const EnumerationCaps& caps) {
  std::vector<Family> fams;
  for (int q_s = 1; q_s <= caps.q_max; ++q_s)
    for (int q_i = 1; q_i <= caps.q_max; ++q_i)
      for (int p_s = 0; p_s <= caps.p_max; ++p_s)
        for (int p_i = 0; p_i <= caps.p_max; ++p_i) {
          auto a = cluster_number(p_p, p_s, p_i);
          if (a) fams.push_back({q_s, q_i, p_s, p_i, *a});
        }
  return fams;
}

bool solution_order(const PhaseMatchSolution& x, const PhaseMatchSolution& y) {
  double ax = std::fabs(x.detuning_hz), ay = std::fabs(y.detuning_hz);
  if (ax != ay) return ax < ay;
  auto key = [](const PhaseMatchSolution& s) {
    return std::tuple(s.cluster_a, s.triple.signal.q, s.triple.idler.q,
                      s.triple.signal.p, s.triple.idler.p, s.triple.signal.m);
  };
  return key(x) < key(y);
}

} // namespace

std::vector<PhaseMatchSolution> enumerate_phase_matches(
    const ModeIndex& pump, const ResonatorGeometry& geom,
    const MaterialModel& mat, double temperature_c,
    const WavelengthRange& signal_window, const EnumerationCaps& caps,
    double tolerance_hz, const DispersionOptions& opts) {
  if (!(tolerance_hz > 0))
    throw DomainError("enumerate_phase_matches: tolerance must be > 0");
  if (!(signal_window.min_m > 0) || !(signal_window.max_m > signal_window.min_m))
    throw DomainError("enumerate_phase_matches: invalid signal window");
  if (caps.require_type_i && pump.polarization != Polarization::extraordinary)
    throw DomainError("enumerate_phase_matches: Type I requires an "
                      "extraordinary pump (set require_type_i=false to override)");
  const Polarization down_pol = Polarization::ordinary;
  const double nu_p =
      mode_frequency(geom, mat, pump, temperature_c, opts).frequency_hz;

  auto fams = make_families(pump.p, caps);
  int nthreads = std::max(1, caps.threads);
  auto run_chunk = [&](size_t begin, size_t end) {
    FrequencyCache cache(geom, mat, temperature_c, opts);
    std::vector<PhaseMatchSolution> out;
    for (size_t fi = begin; fi < end; ++fi) {
      const Family& f = fams[fi];
      // Bracket the scan by the window edges for this (q_s, p_s) branch.
      int m_lo = azimuthal_order_near(geom, mat, f.q_s, f.p_s, down_pol,
                                      kSpeedOfLight / signal_window.max_m,
                                      temperature_c, opts);
      int m_hi = azimuthal_order_near(geom, mat, f.q_s, f.p_s, down_pol,
                                      kSpeedOfLight / signal_window.min_m,
                                      temperature_c, opts);
      for (int m_s = std::max(1, m_lo - 1); m_s <= m_hi + 1; ++m_s) {
        int m_i = pump.m - m_s;
        if (m_i < 1) continue;
        ModeIndex sidx{f.q_s, m_s, f.p_s, down_pol};
        ModeIndex iidx{f.q_i, m_i, f.p_i, down_pol};
        double nu_s = cache.at(sidx);
        double lam_s = kSpeedOfLight / nu_s;
        if (lam_s < signal_window.min_m || lam_s > signal_window.max_m)
          continue;
        double nu_i = cache.at(iidx);
        double det = nu_p - nu_s - nu_i;
        if (std::fabs(det) > tolerance_hz) continue;
        PhaseMatchSolution sol;
        sol.triple = ModeTriple{pump, sidx, iidx};
        if (!selection_rules_satisfied(sol.triple)) continue;
        if (caps.require_type_i && !is_type_i(sol.triple)) continue;
        sol.pump_frequency_hz = nu_p;
        sol.signal_frequency_hz = nu_s;
        sol.idler_frequency_hz = nu_i;
        sol.detuning_hz = det;
        sol.cluster_a = f.a;
        out.push_back(sol);
      }
    }
    return out;
  };

  std::vector<PhaseMatchSolution> all;
  if (nthreads == 1 || fams.size() < 2) {
    all = run_chunk(0, fams.size());
  } else {
    size_t per = (fams.size() + nthreads - 1) / nthreads;
    std::vector<std::future<std::vector<PhaseMatchSolution>>> futs;
    for (size_t b = 0; b < fams.size(); b += per)
      futs.push_back(std::async(std::launch::async, run_chunk, b,
                                std::min(b + per, fams.size())));
    for (auto& fu : futs) {
      auto part = fu.get();
      all.insert(all.end(), part.begin(), part.end());
    }
  }
  std::sort(all.begin(), all.end(), solution_order);
  return all;
}

ClusterSpectrum cluster_spectrum(const ModeIndex& pump,
                                 const ResonatorGeometry& geom,
                                 const MaterialModel& mat, double temperature_c,
                                 int a_max, const DispersionOptions& opts) {
  if (pump.q != 1 || pump.p != 0)
    throw DomainError("cluster_spectrum: pump must be fundamental (q=1, p=0)");
  if (a_max < 0) throw DomainError("cluster_spectrum: a_max must be >= 0");
  const Polarization down_pol = Polarization::ordinary;
  const double nu_p =
      mode_frequency(geom, mat, pump, temperature_c, opts).frequency_hz;

  ClusterSpectrum spec;
  spec.pump_frequency_hz = nu_p;
  FrequencyCache cache(geom, mat, temperature_c, opts);

  for (int a = 0; a <= a_max; a += 2) {
    ClusterGroup group;
    group.cluster_a = a;
    for (int p_s = 0; p_s <= a; ++p_s) {
      int p_i = a - p_s;
      // Signal is the short-wavelength arm: scan nu_s in [nu_p/2, ~0.64 nu_p]
      // and interpolate the detuning sign change to exact conservation.
      int m_lo = azimuthal_order_near(geom, mat, 1, p_s, down_pol, nu_p / 2.0,
                                      temperature_c, opts);
      int m_hi = azimuthal_order_near(geom, mat, 1, p_s, down_pol,
                                      0.64 * nu_p, temperature_c, opts);
      double prev_det = 0;
      bool have_prev = false;
      bool found = false;
      ClusterFamilySolution best;
      double best_absdet = -1;
      for (int m_s = m_lo; m_s <= m_hi && !found; ++m_s) {
        int m_i = pump.m - m_s;
        if (m_i < 1) break;
        ModeIndex sidx{1, m_s, p_s, down_pol};
        ModeIndex iidx{1, m_i, p_i, down_pol};
        double nu_s = cache.at(sidx);
        double nu_i = cache.at(iidx);
        if (nu_s < nu_i) continue; // keep the signal on the blue side
        double det = nu_p - nu_s - nu_i;
        if (have_prev && prev_det * det <= 0.0 && prev_det != det) {
          double frac = prev_det / (prev_det - det);
          ModeIndex sprev{1, m_s - 1, p_s, down_pol};
          double nu_s_prev = cache.at(sprev);
          double nu_s_star = nu_s_prev + frac * (nu_s - nu_s_prev);
          best.cluster_a = a;
          best.p_s = p_s;
          best.p_i = p_i;
          best.m_s = frac < 0.5 ? m_s - 1 : m_s;
          best.m_i = pump.m - best.m_s;
          best.signal_frequency_hz = nu_s_star;
          best.idler_frequency_hz = nu_p - nu_s_star;
          found = true;
          break;
        }
        if (best_absdet < 0 || std::fabs(det) < best_absdet) {
          best_absdet = std::fabs(det);
        }
        prev_det = det;
        have_prev = true;
      }
      if (found) group.families.push_back(best);
    }
    if (group.families.empty()) continue;
    double fmin = group.families.front().signal_frequency_hz;
    double fmax = fmin, fsum = 0;
    for (const auto& fam : group.families) {
      fmin = std::min(fmin, fam.signal_frequency_hz);
      fmax = std::max(fmax, fam.signal_frequency_hz);
      fsum += fam.signal_frequency_hz;
    }
    group.internal_spread_hz = fmax - fmin;
    group.signal_centroid_wavelength_m =
        kSpeedOfLight / (fsum / group.families.size());
    spec.groups.push_back(group);
  }
  for (size_t i = 0; i + 1 < spec.groups.size(); ++i)
    spec.adjacent_gaps_m.push_back(
        std::fabs(spec.groups[i + 1].signal_centroid_wavelength_m -
                  spec.groups[i].signal_centroid_wavelength_m));
  return spec;
}

double phase_match_temperature(const ResonatorGeometry& geom,
                               const MaterialModel& mat,
                               const ModeTriple& triple, double t_lo_c,
                               double t_hi_c, double pump_linewidth_hz,
                               const DispersionOptions& opts) {
  if (!(pump_linewidth_hz > 0))
    throw DomainError("phase_match_temperature: pump linewidth must be > 0");
  if (!(t_hi_c > t_lo_c))
    throw DomainError("phase_match_temperature: empty temperature range");
  auto det = [&](double t) {
    return mode_frequency(geom, mat, triple.pump, t, opts).frequency_hz -
           mode_frequency(geom, mat, triple.signal, t, opts).frequency_hz -
           mode_frequency(geom, mat, triple.idler, t, opts).frequency_hz;
  };
  double dlo = det(t_lo_c), dhi = det(t_hi_c);
  if (dlo * dhi > 0.0) {
    std::ostringstream msg;
    msg << "phase_match_temperature: no detuning sign change in ["
        << t_lo_c << ", " << t_hi_c << "] C (endpoints " << dlo << " Hz, "
        << dhi << " Hz)";
    throw NumericalError(msg.str());
  }
  double lo = t_lo_c, hi = t_hi_c;
  double threshold = 0.1 * pump_linewidth_hz;
  double mid = 0.5 * (lo + hi);
  for (int it = 0; it < 200; ++it) {
    mid = 0.5 * (lo + hi);
    double dm = det(mid);
    if (std::fabs(dm) < threshold && hi - lo < 1e-3) return mid;
    if (dlo * dm <= 0.0) {
      hi = mid;
    } else {
      lo = mid;
      dlo = dm;
    }
    if (hi - lo < 1e-9) break;
  }
  double dm = det(mid);
  if (std::fabs(dm) < threshold) return mid;
  throw NumericalError(
      "phase_match_temperature: bisection converged without reaching "
      "0.1 x linewidth (residual " + std::to_string(dm) + " Hz)");
}

void solutions_to_csv(const std::vector<PhaseMatchSolution>& sols,
                      std::ostream& os) {
  os << "q_p,m_p,p_p,q_s,m_s,p_s,q_i,m_i,p_i,cluster_a,"
        "pump_hz,signal_hz,idler_hz,signal_nm,idler_nm,detuning_hz\n";
  os.precision(12);
  for (const auto& s : sols) {
    os << s.triple.pump.q << ',' << s.triple.pump.m << ',' << s.triple.pump.p
       << ',' << s.triple.signal.q << ',' << s.triple.signal.m << ','
       << s.triple.signal.p << ',' << s.triple.idler.q << ','
       << s.triple.idler.m << ',' << s.triple.idler.p << ',' << s.cluster_a
       << ',' << s.pump_frequency_hz << ',' << s.signal_frequency_hz << ','
       << s.idler_frequency_hz << ','
       << 1e9 * kSpeedOfLight / s.signal_frequency_hz << ','
       << 1e9 * kSpeedOfLight / s.idler_frequency_hz << ',' << s.detuning_hz
       << '\n';
  }
}

void spectrum_to_csv(const ClusterSpectrum& spec, std::ostream& os) {
  os << "cluster_a,n_families,cluster_size_expected,signal_centroid_nm,"
        "internal_spread_hz,gap_to_next_nm\n";
  os.precision(12);
  for (size_t i = 0; i < spec.groups.size(); ++i) {
    const auto& g = spec.groups[i];
    os << g.cluster_a << ',' << g.families.size() << ','
       << cluster_size(0, g.cluster_a) << ','
       << 1e9 * g.signal_centroid_wavelength_m << ',' << g.internal_spread_hz
       << ',';
    if (i + 1 < spec.groups.size())
      os << 1e9 * spec.adjacent_gaps_m[i];
    else
      os << "";
    os << '\n';
  }
}

} // namespace wgmr
