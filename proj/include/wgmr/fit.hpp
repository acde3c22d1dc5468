#pragma once

#include <vector>

#include "wgmr/histogram.hpp"

namespace wgmr {

struct ConfidenceInterval {
  double lower = 0;
  double upper = 0;
};

// Parameters of g2(t) = A + B exp(-C |t|) with 95% confidence limits from
// the linearized covariance at the optimum, scaled by the reduced chi^2.
struct ExpFitResult {
  double a = 0, b = 0, c = 0;
  ConfidenceInterval a_ci, b_ci, c_ci;
  double bandwidth_hz = 0;  // nu = C / (2 pi)
  ConfidenceInterval bandwidth_ci;
  double g2_zero = 0;       // A + B
  double chi2_reduced = 0;
  bool wide_ci = false;     // covariance was near-singular
  int iterations = 0;
};

// Weighted Levenberg-Marquardt fit of A + B exp(-C|t|) to a normalized
// histogram (weights = inverse Poisson variance).
ExpFitResult fit_exponential(const CorrelationHistogram& hist);

// Same fit on explicit samples; sigmas may be empty for unit weights.
ExpFitResult fit_exponential_samples(const std::vector<double>& t,
                                     const std::vector<double>& y,
                                     const std::vector<double>& sigma = {});

struct LorentzFitResult {
  double center = 0;
  double fwhm = 0;
  double amplitude = 0; // negative for a transmission dip
  double offset = 0;
  ConfidenceInterval center_ci, fwhm_ci, amplitude_ci, offset_ci;
  double chi2_reduced = 0;
  int iterations = 0;
};

// Least-squares Lorentzian dip/peak fit to a (detuning, transmission) sweep.
LorentzFitResult fit_lorentzian(const std::vector<double>& x,
                                const std::vector<double>& y);

// <n> from the cross-correlation peak: g2_si(0) = 2 + 1/<n>.
double mean_photon_number(double g2_cross_zero);

// Effective mode count from the autocorrelation peak: g2(0) = 1 + 1/k.
double effective_modes(double g2_auto_zero);

// pairs/s per mW pump power per 20 MHz bandwidth.
double normalized_pair_rate(double coincidence_rate_hz, double pump_power_mw,
                            double bandwidth_mhz);

} // namespace wgmr
