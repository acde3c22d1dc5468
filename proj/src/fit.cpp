#include "wgmr/fit.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "wgmr/constants.hpp"
#include "wgmr/errors.hpp"

namespace wgmr {
namespace {

// Dense Levenberg-Marquardt for a handful of parameters. model(t, p, grad)
// returns the model value and fills the parameter gradient. `accept`
// rejects out-of-bounds steps (e.g. nonpositive decay rates).
struct LmProblem {
  std::function<double(double, const std::vector<double>&, std::vector<double>&)>
      model;
  std::function<bool(const std::vector<double>&)> accept = [](const auto&) {
    return true;
  };
};

struct LmOutcome {
  std::vector<double> params;
  std::vector<double> sigma; // 1-sigma from covariance * reduced chi2
  double chi2 = 0;
  double chi2_reduced = 0;
  bool wide_ci = false;
  int iterations = 0;
};

// Cholesky solve of (JtWJ + lambda diag) step = JtW r; returns false if the
// damped normal matrix is not positive definite.
bool solve_damped(const std::vector<double>& jtj, const std::vector<double>& rhs,
                  double lambda, int n, std::vector<double>& step) {
  std::vector<double> a(jtj);
  for (int i = 0; i < n; ++i) a[i * n + i] += lambda * (jtj[i * n + i] + 1e-30);
  std::vector<double> chol(n * n, 0.0);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j <= i; ++j) {
      double s = a[i * n + j];
      for (int k = 0; k < j; ++k) s -= chol[i * n + k] * chol[j * n + k];
      if (i == j) {
        if (s <= 0) return false;
        chol[i * n + i] = std::sqrt(s);
      } else {
        chol[i * n + j] = s / chol[j * n + j];
      }
    }
  }
  std::vector<double> ytmp(n);
  for (int i = 0; i < n; ++i) {
    double s = rhs[i];
    for (int k = 0; k < i; ++k) s -= chol[i * n + k] * ytmp[k];
    ytmp[i] = s / chol[i * n + i];
  }
  step.assign(n, 0.0);
  for (int i = n - 1; i >= 0; --i) {
    double s = ytmp[i];
    for (int k = i + 1; k < n; ++k) s -= chol[k * n + i] * step[k];
    step[i] = s / chol[i * n + i];
  }
  return true;
}

bool invert_spd(const std::vector<double>& a, int n, std::vector<double>& inv) {
  // invert via Cholesky; returns false when singular
  std::vector<double> chol(n * n, 0.0);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j <= i; ++j) {
      double s = a[i * n + j];
      for (int k = 0; k < j; ++k) s -= chol[i * n + k] * chol[j * n + k];
      if (i == j) {
        if (s <= 1e-300) return false;
        chol[i * n + i] = std::sqrt(s);
      } else {
        chol[i * n + j] = s / chol[j * n + j];
      }
    }
  }
  inv.assign(n * n, 0.0);
  for (int col = 0; col < n; ++col) {
    std::vector<double> e(n, 0.0), ytmp(n);
    e[col] = 1.0;
    for (int i = 0; i < n; ++i) {
      double s = e[i];
      for (int k = 0; k < i; ++k) s -= chol[i * n + k] * ytmp[k];
      ytmp[i] = s / chol[i * n + i];
    }
    for (int i = n - 1; i >= 0; --i) {
      double s = ytmp[i];
      for (int k = i + 1; k < n; ++k) s -= chol[k * n + i] * inv[k * n + col];
      inv[i * n + col] = s / chol[i * n + i];
    }
  }
  return true;
}

LmOutcome levenberg_marquardt(const LmProblem& prob, const std::vector<double>& t,
                              const std::vector<double>& y,
                              const std::vector<double>& sigma,
                              std::vector<double> params, int max_iter = 400) {
  const int n = static_cast<int>(params.size());
  const size_t m = t.size();
  auto weight = [&](size_t i) {
    if (sigma.empty()) return 1.0;
    double s = sigma[i];
    return s > 0 ? 1.0 / (s * s) : 1.0;
  };
  std::vector<double> grad(n);
  auto chi2_of = [&](const std::vector<double>& p) {
    double c = 0;
    for (size_t i = 0; i < m; ++i) {
      double r = y[i] - prob.model(t[i], p, grad);
      c += weight(i) * r * r;
    }
    return c;
  };

  double lambda = 1e-3;
  double chi2 = chi2_of(params);
  LmOutcome out;
  int it = 0;
  for (; it < max_iter; ++it) {
    std::vector<double> jtj(n * n, 0.0), rhs(n, 0.0);
    for (size_t i = 0; i < m; ++i) {
      double f = prob.model(t[i], params, grad);
      double wr = weight(i);
      double r = y[i] - f;
      for (int a = 0; a < n; ++a) {
        rhs[a] += wr * grad[a] * r;
        for (int b = 0; b <= a; ++b) jtj[a * n + b] += wr * grad[a] * grad[b];
      }
    }
    for (int a = 0; a < n; ++a)
      for (int b = a + 1; b < n; ++b) jtj[a * n + b] = jtj[b * n + a];

    bool improved = false;
    for (int attempt = 0; attempt < 60; ++attempt) {
      std::vector<double> step;
      if (solve_damped(jtj, rhs, lambda, n, step)) {
        std::vector<double> trial(params);
        for (int a = 0; a < n; ++a) trial[a] += step[a];
        if (prob.accept(trial)) {
          double c_trial = chi2_of(trial);
          if (c_trial <= chi2) {
            double rel = (chi2 - c_trial) / std::max(chi2, 1e-300);
            params = trial;
            chi2 = c_trial;
            lambda = std::max(lambda * 0.3, 1e-14);
            improved = true;
            if (rel < 1e-14) it = max_iter; // converged
            break;
          }
        }
      }
      lambda *= 4.0;
      if (lambda > 1e14) break;
    }
    if (!improved) break;
  }

  out.params = params;
  out.chi2 = chi2;
  int dof = static_cast<int>(m) - n;
  out.chi2_reduced = dof > 0 ? chi2 / dof : 0.0;
  out.iterations = it;

  // covariance of the weighted problem, scaled by reduced chi^2
  std::vector<double> jtj(n * n, 0.0);
  for (size_t i = 0; i < m; ++i) {
    prob.model(t[i], params, grad);
    double wr = weight(i);
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b) jtj[a * n + b] += wr * grad[a] * grad[b];
  }
  std::vector<double> cov;
  out.sigma.assign(n, 0.0);
  if (invert_spd(jtj, n, cov)) {
    double scale = dof > 0 ? std::max(out.chi2_reduced, 0.0) : 0.0;
    for (int a = 0; a < n; ++a) {
      double v = cov[a * n + a] * scale;
      out.sigma[a] = v > 0 ? std::sqrt(v) : 0.0;
    }
  } else {
    out.wide_ci = true;
    for (int a = 0; a < n; ++a)
      out.sigma[a] = std::fabs(params[a]) + 1.0; // flagged, not silent
  }
  return out;
}

constexpr double kZ95 = 1.959963984540054;

ConfidenceInterval ci_of(double value, double sigma) {
  return {value - kZ95 * sigma, value + kZ95 * sigma};
}

} // namespace

ExpFitResult fit_exponential_samples(const std::vector<double>& t,
                                     const std::vector<double>& y,
                                     const std::vector<double>& sigma) {
  if (t.size() != y.size() || (!sigma.empty() && sigma.size() != t.size()))
    throw DomainError("fit_exponential: size mismatch");
  if (t.size() < 4)
    throw DomainError("fit_exponential: need at least 4 samples");

  // Initial values: A from the far-lag median, B from the peak excess,
  // C from the lag where the excess halves.
  std::vector<double> far;
  double tmax = 0;
  for (double v : t) tmax = std::max(tmax, std::fabs(v));
  for (size_t i = 0; i < t.size(); ++i)
    if (std::fabs(t[i]) > 0.75 * tmax) far.push_back(y[i]);
  std::sort(far.begin(), far.end());
  double a0 = far.empty() ? y.back() : far[far.size() / 2];
  double peak = a0;
  for (size_t i = 0; i < t.size(); ++i) peak = std::max(peak, y[i]);
  double b0 = std::max(peak - a0, 1e-9);
  double c0 = 0;
  {
    double half = a0 + 0.5 * b0;
    double best = tmax;
    for (size_t i = 0; i < t.size(); ++i)
      if (y[i] <= half && std::fabs(t[i]) > 1e-15)
        best = std::min(best, std::fabs(t[i]));
    c0 = std::log(2.0) / std::max(best, tmax * 1e-4);
  }

  LmProblem prob;
  prob.model = [](double tt, const std::vector<double>& p,
                  std::vector<double>& g) {
    double e = std::exp(-p[2] * std::fabs(tt));
    g.assign({1.0, e, -p[1] * std::fabs(tt) * e});
    return p[0] + p[1] * e;
  };
  prob.accept = [](const std::vector<double>& p) { return p[2] > 0; };

  LmOutcome lm = levenberg_marquardt(prob, t, y, sigma, {a0, b0, c0});
  if (!std::isfinite(lm.params[0]) || !std::isfinite(lm.params[1]) ||
      !std::isfinite(lm.params[2]))
    throw NumericalError("fit_exponential: diverged (chi2 " +
                         std::to_string(lm.chi2) + ")");

  ExpFitResult r;
  r.a = lm.params[0];
  r.b = lm.params[1];
  r.c = lm.params[2];
  r.a_ci = ci_of(r.a, lm.sigma[0]);
  r.b_ci = ci_of(r.b, lm.sigma[1]);
  r.c_ci = ci_of(r.c, lm.sigma[2]);
  r.bandwidth_hz = r.c / kTwoPi;
  r.bandwidth_ci = {r.c_ci.lower / kTwoPi, r.c_ci.upper / kTwoPi};
  r.g2_zero = r.a + r.b;
  r.chi2_reduced = lm.chi2_reduced;
  r.wide_ci = lm.wide_ci;
  r.iterations = lm.iterations;
  return r;
}

ExpFitResult fit_exponential(const CorrelationHistogram& hist) {
  if (!hist.normalized())
    throw ContractError("fit_exponential: histogram is not normalized");
  int nonzero_neg = 0, nonzero_pos = 0;
  int K = hist.half_bins();
  for (size_t i = 0; i < hist.counts.size(); ++i) {
    if (hist.counts[i] == 0) continue;
    if (static_cast<int>(i) < K) ++nonzero_neg;
    if (static_cast<int>(i) > K) ++nonzero_pos;
  }
  if (nonzero_neg < 20 || nonzero_pos < 20)
    throw DomainError("fit_exponential: need >= 20 nonzero bins on each side");
  std::vector<double> t, y, s;
  for (size_t i = 0; i < hist.counts.size(); ++i) {
    t.push_back(hist.lag_of(static_cast<int>(i)));
    y.push_back(hist.g2[i]);
    s.push_back(hist.g2_sigma[i]);
  }
  return fit_exponential_samples(t, y, s);
}

LorentzFitResult fit_lorentzian(const std::vector<double>& x,
                                const std::vector<double>& y) {
  if (x.size() != y.size())
    throw DomainError("fit_lorentzian: size mismatch");
  if (x.size() < 10)
    throw DomainError("fit_lorentzian: need at least 10 points");

  // Initialization from the extremum relative to the edge baseline.
  double edge = 0.5 * (y.front() + y.back());
  size_t ext = 0;
  for (size_t i = 1; i < y.size(); ++i)
    if (std::fabs(y[i] - edge) > std::fabs(y[ext] - edge)) ext = i;
  double span = std::fabs(x.back() - x.front());
  double amp0 = y[ext] - edge;
  if (amp0 == 0) amp0 = 1e-9;
  std::vector<double> p0 = {edge, amp0, x[ext], span / 4.0};

  LmProblem prob;
  prob.model = [](double xx, const std::vector<double>& p,
                  std::vector<double>& g) {
    double hw = 0.5 * p[3];
    double dx = xx - p[2];
    double denom = dx * dx + hw * hw;
    double l = hw * hw / denom;
    g.assign(4, 0.0);
    g[0] = 1.0;
    g[1] = l;
    g[2] = p[1] * 2.0 * dx * hw * hw / (denom * denom);
    g[3] = p[1] * (hw * dx * dx) / (denom * denom); // d l / d fwhm
    return p[0] + p[1] * l;
  };
  prob.accept = [](const std::vector<double>& p) { return p[3] > 0; };

  LmOutcome lm = levenberg_marquardt(prob, x, y, {}, p0);
  for (double v : lm.params)
    if (!std::isfinite(v))
      throw NumericalError("fit_lorentzian: diverged");

  LorentzFitResult r;
  r.offset = lm.params[0];
  r.amplitude = lm.params[1];
  r.center = lm.params[2];
  r.fwhm = lm.params[3];
  r.offset_ci = ci_of(r.offset, lm.sigma[0]);
  r.amplitude_ci = ci_of(r.amplitude, lm.sigma[1]);
  r.center_ci = ci_of(r.center, lm.sigma[2]);
  r.fwhm_ci = ci_of(r.fwhm, lm.sigma[3]);
  r.chi2_reduced = lm.chi2_reduced;
  r.iterations = lm.iterations;
  return r;
}

double mean_photon_number(double g2_cross_zero) {
  if (!(g2_cross_zero > 2.0))
    throw DomainError("mean_photon_number: g2_si(0) must exceed 2 "
                      "(classical regime below)");
  return 1.0 / (g2_cross_zero - 2.0);
}

double effective_modes(double g2_auto_zero) {
  if (!(g2_auto_zero > 1.0))
    throw DomainError("effective_modes: g2_auto(0) must exceed 1");
  return 1.0 / (g2_auto_zero - 1.0);
}

double normalized_pair_rate(double coincidence_rate_hz, double pump_power_mw,
                            double bandwidth_mhz) {
  if (!(coincidence_rate_hz > 0))
    throw DomainError("normalized_pair_rate: rate must be > 0");
  if (!(pump_power_mw > 0))
    throw DomainError("normalized_pair_rate: pump power must be > 0");
  if (!(bandwidth_mhz > 0))
    throw DomainError("normalized_pair_rate: bandwidth must be > 0");
  return coincidence_rate_hz / pump_power_mw * (20.0 / bandwidth_mhz);
}

} // namespace wgmr
