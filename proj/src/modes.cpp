#include "wgmr/modes.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "wgmr/airy.hpp"
#include "wgmr/constants.hpp"
#include "wgmr/errors.hpp"

namespace wgmr {

void ResonatorGeometry::validate() const {
  if (!(major_radius_m > 0))
    throw DomainError("geometry: major_radius must be > 0");
  if (!(polar_radius_m > 0))
    throw DomainError("geometry: polar_radius must be > 0");
  if (polar_radius_m > major_radius_m * (1.0 + 1e-12))
    throw DomainError("geometry: polar_radius must be <= major_radius (oblate)");
}

void ModeIndex::validate() const {
  if (q < 1) throw DomainError("mode index: q must be >= 1");
  if (m < 1) throw DomainError("mode index: m must be >= 1");
  if (p < 0) throw DomainError("mode index: p must be >= 0");
}

namespace {

double boundary_p(Polarization pol, double n) {
  return pol == Polarization::extraordinary ? n : 1.0 / n;
}

// Truncated asymptotic expansion for the internal size parameter n k R.
double size_parameter_expansion(int q, double nu_eff, double n,
                                Polarization pol) {
  double aq = airy_negative_zero(q);
  double h = std::cbrt(nu_eff / 2.0);
  return nu_eff + aq * h + (3.0 / 20.0) * aq * aq / h -
         boundary_p(pol, n) / std::sqrt(n * n - 1.0);
}

// Characteristic function of the bound-mode matching condition for
// non-integer effective order mu, as a function of the internal size
// parameter z = n k R (outside argument x = z / n). Pole-free form:
//   TE:  n J'(z) Y(x) - J(z) Y'(x)
//   TM:  (1/n) J'(z) Y(x) - J(z) Y'(x) - (1 - 1/n^2)/(2x) J(z) Y(x)
double characteristic(double z, double mu, double n, Polarization pol) {
  double x = z / n;
  double J = std::cyl_bessel_j(mu, z);
  double Jp = std::cyl_bessel_j(mu - 1.0, z) - (mu / z) * J;
  double Y = std::cyl_neumann(mu, x);
  double Yp = std::cyl_neumann(mu - 1.0, x) - (mu / x) * Y;
  if (pol == Polarization::extraordinary) // TE-like: E tangential at the rim
    return n * Jp * Y - J * Yp;
  return (1.0 / n) * Jp * Y - J * Yp -
         (1.0 - 1.0 / (n * n)) / (2.0 * x) * J * Y;
}

double refine_root(double z0, double mu, double n, Polarization pol) {
  // Neighbouring-q roots are >~ 3 apart in z and the expansion lands within
  // ~1.5 of the true root, so scan +-2 and keep the sign change closest to
  // the guess.
  const double span = 2.0, step = 0.2;
  double lo = 0, hi = 0, flo = 0, fhi = 0;
  bool ok = false;
  double best_dist = 1e300;
  double prev_z = z0 - span;
  double prev_f = characteristic(prev_z, mu, n, pol);
  for (double z = prev_z + step; z <= z0 + span + 1e-12; z += step) {
    double f = characteristic(z, mu, n, pol);
    if (std::isfinite(prev_f) && std::isfinite(f) && prev_f * f < 0.0) {
      double mid = 0.5 * (prev_z + z);
      if (std::fabs(mid - z0) < best_dist) {
        best_dist = std::fabs(mid - z0);
        lo = prev_z;
        hi = z;
        flo = prev_f;
        fhi = f;
        ok = true;
      }
    }
    prev_z = z;
    prev_f = f;
  }
  (void)fhi;
  if (!ok)
    throw NumericalError("mode_frequency: failed to bracket dispersion root "
                         "near z=" + std::to_string(z0));
  for (int it = 0; it < 200 && hi - lo > 1e-14 * hi; ++it) {
    double mid = 0.5 * (lo + hi);
    double fm = characteristic(mid, mu, n, pol);
    if (fm == 0.0) return mid;
    if (flo * fm < 0.0) {
      hi = mid;
    } else {
      lo = mid;
      flo = fm;
    }
  }
  return 0.5 * (lo + hi);
}

double solve_size_parameter(int q, double nu_eff, double n, Polarization pol,
                            const DispersionOptions& opts) {
  double z = size_parameter_expansion(q, nu_eff, n, pol);
  if (opts.refine && nu_eff <= opts.refine_max_order)
    z = refine_root(z, nu_eff, n, pol);
  return z;
}

} // namespace

ModeFrequency mode_frequency(const ResonatorGeometry& geom,
                             const MaterialModel& mat, const ModeIndex& mode,
                             double temperature_c,
                             const DispersionOptions& opts) {
  geom.validate();
  mode.validate();
  const double R = geom.major_radius_m;
  const double nu_eff =
      mode.m + (2.0 * mode.p + 1.0) *
                   std::sqrt(R / geom.polar_radius_m) / 2.0;

  // Bootstrap n from the middle of the validity window, then iterate to the
  // self-consistent (nu, n(lambda)) fixed point. The index varies slowly
  // with wavelength, so plain fixed-point iteration converges in a few steps.
  double lam = std::sqrt(mat.wavelength_min_m * mat.wavelength_max_m);
  double nu_prev = 0, z = 0, n = 0;
  bool converged = false;
  for (int it = 0; it < opts.max_iterations; ++it) {
    double lam_eval = lam;
    if (it < 2) // first guesses may undershoot the window; clamp to bootstrap
      lam_eval = std::clamp(lam, mat.wavelength_min_m, mat.wavelength_max_m);
    n = refractive_index(mat, mode.polarization, lam_eval, temperature_c);
    z = solve_size_parameter(mode.q, nu_eff, n, mode.polarization, opts);
    double nu = z * kSpeedOfLight / (kTwoPi * R * n);
    lam = kSpeedOfLight / nu;
    if (it > 0 && std::fabs(nu - nu_prev) < opts.frequency_tolerance_hz) {
      converged = true;
      nu_prev = nu;
      break;
    }
    nu_prev = nu;
  }
  if (!converged)
    throw NumericalError("mode_frequency: self-consistency loop did not reach " +
                         std::to_string(opts.frequency_tolerance_hz) +
                         " Hz in " + std::to_string(opts.max_iterations) +
                         " iterations");
  ModeFrequency out;
  out.frequency_hz = nu_prev;
  out.vacuum_wavelength_m = kSpeedOfLight / nu_prev;
  out.size_parameter = z;
  return out;
}

double free_spectral_range(const ResonatorGeometry& geom,
                           const MaterialModel& mat, const ModeIndex& mode,
                           double temperature_c, const DispersionOptions& opts) {
  ModeIndex up = mode;
  up.m += 1;
  double fsr = mode_frequency(geom, mat, up, temperature_c, opts).frequency_hz -
               mode_frequency(geom, mat, mode, temperature_c, opts).frequency_hz;
  if (!(fsr > 0))
    throw NumericalError("free_spectral_range: nonpositive FSR");
  return fsr;
}

double linewidth_to_q_factor(double optical_frequency_hz,
                             double linewidth_fwhm_hz) {
  if (!(optical_frequency_hz > 0))
    throw DomainError("linewidth_to_q_factor: optical_frequency must be > 0");
  if (!(linewidth_fwhm_hz > 0))
    throw DomainError("linewidth_to_q_factor: linewidth must be > 0");
  return optical_frequency_hz / linewidth_fwhm_hz;
}

int azimuthal_order_near(const ResonatorGeometry& geom,
                         const MaterialModel& mat, int q, int p,
                         Polarization pol, double target_frequency_hz,
                         double temperature_c, const DispersionOptions& opts) {
  if (!(target_frequency_hz > 0))
    throw DomainError("azimuthal_order_near: target frequency must be > 0");
  geom.validate();
  double lam = kSpeedOfLight / target_frequency_hz;
  double n = refractive_index(mat, pol, lam, temperature_c);
  double z = kTwoPi * geom.major_radius_m * n * target_frequency_hz /
             kSpeedOfLight;
  // Invert the expansion's leading terms for the effective order.
  double aq = airy_negative_zero(q);
  double nu_eff = z;
  for (int it = 0; it < 10; ++it) {
    double h = std::cbrt(nu_eff / 2.0);
    nu_eff = z - aq * h - (3.0 / 20.0) * aq * aq / h +
             boundary_p(pol, n) / std::sqrt(n * n - 1.0);
  }
  double polar_shift = (2.0 * p + 1.0) *
                       std::sqrt(geom.major_radius_m / geom.polar_radius_m) /
                       2.0;
  int m0 = std::max(1, static_cast<int>(std::lround(nu_eff - polar_shift)));
  // Settle on the closest of the neighbourhood (expansion inversion is
  // approximate at small m).
  int best = m0;
  double best_err = -1;
  for (int m = std::max(1, m0 - 2); m <= m0 + 2; ++m) {
    ModeIndex idx{q, m, p, pol};
    double err = std::fabs(
        mode_frequency(geom, mat, idx, temperature_c, opts).frequency_hz -
        target_frequency_hz);
    if (best_err < 0 || err < best_err) {
      best_err = err;
      best = m;
    }
  }
  return best;
}

} // namespace wgmr
