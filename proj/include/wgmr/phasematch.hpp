#pragma once

#include <optional>
#include <ostream>
#include <vector>

#include "wgmr/modes.hpp"

namespace wgmr {

struct ModeTriple {
  ModeIndex pump;
  ModeIndex signal;
  ModeIndex idler;
};

// Natural Type I: extraordinary pump, ordinary signal and idler.
bool is_type_i(const ModeTriple& t);

// Angular selection rules on (m, l = m + p):
//   m_p = m_s + m_i,  |l_s - l_i| <= l_p <= l_s + l_i,  l_p+l_s+l_i even.
bool selection_rules_satisfied(const ModeTriple& t);

// Cluster number a = p_s + p_i - p_p; empty when a is negative or odd
// (no phase-matching solution exists there).
std::optional<int> cluster_number(int p_p, int p_s, int p_i);

// Number of (p_s, p_i) combinations in cluster a for pump layer p_p:
// k = p_p + a + 1.
int cluster_size(int p_p, int a);

// Angular part of the three-mode overlap (Gaunt coefficient).
double angular_overlap(int l_p, int m_p, int l_s, int m_s, int l_i, int m_i);

// Desk-scale sphere parameters for the radial overlap integral.
struct RadialOverlapBasis {
  double radius_m = 1.0;
  double index = 1.45;
  int l_p = 0, l_s = 0, l_i = 0;
  Polarization polarization = Polarization::ordinary;
  int resolution = 0; // quadrature panels; 0 = automatic
};
inline constexpr int kRadialOverlapMaxL = 100;

// Integral of the three normalized radial mode profiles
// j_l(k_q r) r^2 over the resonator interior.
double radial_overlap(int q_p, int q_s, int q_i, const RadialOverlapBasis& basis);

struct PhaseMatchSolution {
  ModeTriple triple;
  double pump_frequency_hz = 0;
  double signal_frequency_hz = 0;
  double idler_frequency_hz = 0;
  double detuning_hz = 0; // nu_p - nu_s - nu_i
  int cluster_a = 0;
};

struct WavelengthRange {
  double min_m = 0;
  double max_m = 0;
};

struct EnumerationCaps {
  int q_max = 3;
  int p_max = 8;
  bool require_type_i = true;
  int threads = 1;
};

// Scans integer m_s (m_i = m_p - m_s) for every (q_s, q_i, p_s, p_i) within
// caps whose cluster number is valid, keeping triples with
// |nu_p - nu_s - nu_i| <= tolerance and signal wavelength inside the window.
// Sorted by |detuning|; deterministic for any thread count.
std::vector<PhaseMatchSolution> enumerate_phase_matches(
    const ModeIndex& pump, const ResonatorGeometry& geom,
    const MaterialModel& mat, double temperature_c,
    const WavelengthRange& signal_window, const EnumerationCaps& caps,
    double tolerance_hz, const DispersionOptions& opts = {});

// One exact-energy-conservation solution per (p_s, p_i) family, obtained by
// interpolating the integer m_s scan across the sign change of the detuning.
struct ClusterFamilySolution {
  int cluster_a = 0;
  int p_s = 0, p_i = 0;
  int q_s = 1, q_i = 1;
  int m_s = 0, m_i = 0; // nearest integer orders
  double signal_frequency_hz = 0;
  double idler_frequency_hz = 0;
};

struct ClusterGroup {
  int cluster_a = 0;
  std::vector<ClusterFamilySolution> families;
  double signal_centroid_wavelength_m = 0;
  double internal_spread_hz = 0; // max - min family signal frequency
};

struct ClusterSpectrum {
  double pump_frequency_hz = 0;
  std::vector<ClusterGroup> groups; // ascending a
  // Signal-side wavelength gaps between adjacent cluster centroids (size
  // groups.size()-1, metres).
  std::vector<double> adjacent_gaps_m;
};

// Spectral distribution of the clusters a <= a_max phase-matched with a
// fundamental pump mode (q_p = 1, p_p = 0). Fundamental radial signal and
// idler families (q_s = q_i = 1); the signal is the short-wavelength arm.
ClusterSpectrum cluster_spectrum(const ModeIndex& pump,
                                 const ResonatorGeometry& geom,
                                 const MaterialModel& mat, double temperature_c,
                                 int a_max, const DispersionOptions& opts = {});

// Temperature at which the triple's detuning crosses zero, to better than
// 0.1 x pump linewidth. Requires a sign change over [t_lo, t_hi].
double phase_match_temperature(const ResonatorGeometry& geom,
                               const MaterialModel& mat, const ModeTriple& triple,
                               double t_lo_c, double t_hi_c,
                               double pump_linewidth_hz,
                               const DispersionOptions& opts = {});

// CSV emission; column schema documented in the README.
void solutions_to_csv(const std::vector<PhaseMatchSolution>& sols,
                      std::ostream& os);
void spectrum_to_csv(const ClusterSpectrum& spec, std::ostream& os);

} // namespace wgmr
