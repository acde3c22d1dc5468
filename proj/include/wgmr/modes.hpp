#pragma once

#include "wgmr/material.hpp"

namespace wgmr {

// Oblate spheroidal resonator: equatorial rim radius R and polar radius of
// curvature r at the rim (r <= R; r == R is a sphere).
struct ResonatorGeometry {
  double major_radius_m = 0;
  double polar_radius_m = 0;

  void validate() const;
};

// Whispering-gallery eigenmode label. l = m + p.
struct ModeIndex {
  int q = 1; // radial, >= 1
  int m = 1; // azimuthal magnitude, >= 1
  int p = 0; // polar node count, >= 0
  Polarization polarization = Polarization::ordinary;

  int l() const { return m + p; }
  void validate() const;
};

struct ModeFrequency {
  double frequency_hz = 0;
  double vacuum_wavelength_m = 0;
  double size_parameter = 0; // x = 2 pi R n nu / c
};

struct DispersionOptions {
  // Refine the asymptotic expansion root on the effective-order
  // characteristic equation (spherical Bessel log-derivative matching).
  // Above refine_max_order the truncated expansion is already accurate to
  // ~1e-9 relative and refinement is skipped.
  bool refine = true;
  double refine_max_order = 300.0;
  int max_iterations = 50;          // self-consistency loop on n(lambda)
  double frequency_tolerance_hz = 1e3;
};

// Self-consistent eigenfrequency of a spheroidal WGM. The size parameter
// follows the asymptotic expansion
//   x = nu_eff + alpha_q (nu_eff/2)^{1/3} + (3/20) alpha_q^2 (nu_eff/2)^{-1/3}
//       - P / sqrt(n^2 - 1),
// with effective angular order nu_eff = m + (2p+1) sqrt(R/r) / 2 and
// P = n (extraordinary, E tangential at the rim) or 1/n (ordinary).
// In the sphere limit nu_eff = l + 1/2, so all (m,p) splittings of one l
// are exactly degenerate.
ModeFrequency mode_frequency(const ResonatorGeometry& geom,
                             const MaterialModel& mat, const ModeIndex& mode,
                             double temperature_c,
                             const DispersionOptions& opts = {});

// nu(q, m+1, p) - nu(q, m, p); always positive.
double free_spectral_range(const ResonatorGeometry& geom,
                           const MaterialModel& mat, const ModeIndex& mode,
                           double temperature_c,
                           const DispersionOptions& opts = {});

// Q = nu / FWHM linewidth.
double linewidth_to_q_factor(double optical_frequency_hz,
                             double linewidth_fwhm_hz);

// Azimuthal order whose (q, p, pol) mode lies closest to target_frequency_hz.
int azimuthal_order_near(const ResonatorGeometry& geom,
                         const MaterialModel& mat, int q, int p,
                         Polarization pol, double target_frequency_hz,
                         double temperature_c,
                         const DispersionOptions& opts = {});

} // namespace wgmr
