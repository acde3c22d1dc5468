#include "wgmr/airy.hpp"

#include <cmath>

#include "wgmr/constants.hpp"
#include "wgmr/errors.hpp"

namespace wgmr {
namespace {

// Ai(0) = 3^(-2/3)/Gamma(2/3), -Ai'(0) = 3^(-1/3)/Gamma(1/3)
constexpr double kAi0 = 0.3550280538878172;
constexpr double kAip0 = 0.2588194037928068;

// Maclaurin series Ai(x) = Ai(0) f(x) + Ai'(0) g(x). Alternating growth
// limits it to |x| <~ 8 in double precision.
double ai_series(double x) {
  double f = 1.0, g = x;
  double tf = 1.0, tg = x;
  double x3 = x * x * x;
  for (int k = 1; k < 80; ++k) {
    tf *= x3 / ((3.0 * k) * (3.0 * k - 1.0));
    tg *= x3 / ((3.0 * k + 1.0) * (3.0 * k));
    f += tf;
    g += tg;
    if (std::fabs(tf) < 1e-18 * std::fabs(f) && std::fabs(tg) < 1e-18 * std::fabs(g))
      break;
  }
  return kAi0 * f - kAip0 * g;
}

// Oscillatory asymptotic form for Ai(-z), z >> 1 (accurate to ~1e-12 for
// z >= 6). u_k follows the standard recurrence u_0 = 1,
// u_k = u_{k-1} (6k-5)(6k-3)(6k-1) / (216 k (2k-1)).
double ai_asymptotic_neg(double z) {
  double zeta = (2.0 / 3.0) * std::pow(z, 1.5);
  double P = 0.0, Q = 0.0;
  double u = 1.0;
  int sign = 1;
  for (int k = 0; k < 8; ++k) {
    double even = u; // u_{2k}
    double unext = even;
    {
      int kk = 2 * k + 1;
      unext = even * (6.0 * kk - 5.0) * (6.0 * kk - 3.0) * (6.0 * kk - 1.0) /
              (216.0 * kk * (2.0 * kk - 1.0));
    }
    double odd = unext; // u_{2k+1}
    P += sign * even / std::pow(zeta, 2.0 * k);
    Q += sign * odd / std::pow(zeta, 2.0 * k + 1.0);
    sign = -sign;
    {
      int kk = 2 * k + 2;
      u = odd * (6.0 * kk - 5.0) * (6.0 * kk - 3.0) * (6.0 * kk - 1.0) /
          (216.0 * kk * (2.0 * kk - 1.0));
    }
    if (even / std::pow(zeta, 2.0 * k) < 1e-17) break;
  }
  double phase = zeta - kPi / 4.0;
  return (std::cos(phase) * P + std::sin(phase) * Q) /
         (std::sqrt(kPi) * std::pow(z, 0.25));
}

} // namespace

double airy_ai(double x) {
  if (x < -8.0) return ai_asymptotic_neg(-x);
  return ai_series(x);
}

double airy_negative_zero(int q) {
  if (q < 1) throw DomainError("airy_negative_zero: q must be >= 1");
  // McMahon-style initial guess, DLMF 9.9.18 leading terms.
  double t = 3.0 * kPi * (4.0 * q - 1.0) / 8.0;
  double t2 = 1.0 / (t * t);
  double guess = std::pow(t, 2.0 / 3.0) *
                 (1.0 + t2 * (5.0 / 48.0 - t2 * (5.0 / 36.0)));
  // Bisection on Ai(-z); the guess is well inside half the zero spacing.
  double lo = guess - 0.2, hi = guess + 0.2;
  double flo = airy_ai(-lo), fhi = airy_ai(-hi);
  for (int widen = 0; flo * fhi > 0.0 && widen < 8; ++widen) {
    lo -= 0.1;
    hi += 0.1;
    flo = airy_ai(-lo);
    fhi = airy_ai(-hi);
  }
  if (flo * fhi > 0.0)
    throw NumericalError("airy_negative_zero: failed to bracket zero");
  for (int it = 0; it < 200 && hi - lo > 1e-13 * hi; ++it) {
    double mid = 0.5 * (lo + hi);
    double fm = airy_ai(-mid);
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

} // namespace wgmr
