#include "wgmr/wigner.hpp"

#include <boost/multiprecision/cpp_int.hpp>
#include <cmath>
#include <cstdlib>
#include <vector>

#include "wgmr/constants.hpp"
#include "wgmr/errors.hpp"

namespace wgmr {
namespace {

using boost::multiprecision::cpp_int;
using boost::multiprecision::cpp_rational;

cpp_int factorial(int n) {
  cpp_int f = 1;
  for (int k = 2; k <= n; ++k) f *= k;
  return f;
}

bool triangle_ok(int l1, int l2, int l3) {
  return l3 >= std::abs(l1 - l2) && l3 <= l1 + l2;
}

// Racah single-sum formula evaluated exactly. The square of the 3j symbol
// is rational; the sign comes from the alternating sum and the phase.
double wigner_3j_exact(int l1, int l2, int l3, int m1, int m2, int m3) {
  cpp_rational delta =
      cpp_rational(factorial(l1 + l2 - l3) * factorial(l1 - l2 + l3) *
                       factorial(-l1 + l2 + l3),
                   factorial(l1 + l2 + l3 + 1));
  cpp_int prods = factorial(l1 + m1) * factorial(l1 - m1) * factorial(l2 + m2) *
                  factorial(l2 - m2) * factorial(l3 + m3) * factorial(l3 - m3);
  int kmin = std::max({0, l2 - l3 - m1, l1 - l3 + m2});
  int kmax = std::min({l1 + l2 - l3, l1 - m1, l2 + m2});
  cpp_rational sum = 0;
  for (int k = kmin; k <= kmax; ++k) {
    cpp_int denom = factorial(k) * factorial(l1 + l2 - l3 - k) *
                    factorial(l1 - m1 - k) * factorial(l2 + m2 - k) *
                    factorial(l3 - l2 + m1 + k) * factorial(l3 - l1 - m2 + k);
    cpp_rational term(1, denom);
    if (k & 1) term = -term;
    sum += term;
  }
  if (sum == 0) return 0.0;
  cpp_rational sq = delta * cpp_rational(prods) * sum * sum;
  double mag = std::sqrt(sq.convert_to<double>());
  int sign = sum < 0 ? -1 : 1;
  if ((l1 - l2 - m3) & 1) sign = -sign;
  return sign * mag;
}

// Closed forms used to seed the recurrence when the family starts at l3 = 0
// (which forces l1 == l2 and m3 == 0, where the generic two-term start
// degenerates).
double f_at_l3_0(int l, int m) { // (l l 0; m -m 0)
  double v = 1.0 / std::sqrt(2.0 * l + 1.0);
  return ((l - m) & 1) ? -v : v;
}

double f_at_l3_1(int l, int m) { // (l l 1; m -m 0)
  double v = 2.0 * m / std::sqrt((2.0 * l + 2.0) * (2.0 * l + 1.0) * (2.0 * l));
  return ((l - m) & 1) ? -v : v;
}

// Schulten-Gordon style l3 recurrence:
//   j A(j+1) f(j+1) + B(j) f(j) + (j+1) A(j) f(j-1) = 0
// A vanishes at both family ends, which supplies the two-term starts. Both
// ends are swept toward the |f| maximum, matched there, then the family is
// normalized with sum (2j+1) f(j)^2 = 1 and the sign of f(l1+l2) pinned to
// (-1)^(l1-l2-m3).
double wigner_3j_recurrence(int l1, int l2, int l3, int m1, int m2, int m3) {
  const int jmin = std::max(std::abs(l1 - l2), std::abs(m3));
  const int jmax = l1 + l2;
  const int nfam = jmax - jmin + 1;
  auto A = [&](double j) {
    double d1 = j * j - double(l1 - l2) * (l1 - l2);
    double d2 = double(l1 + l2 + 1) * (l1 + l2 + 1) - j * j;
    double d3 = j * j - double(m3) * m3;
    return std::sqrt(std::max(0.0, d1 * d2 * d3));
  };
  auto B = [&](double j) {
    return (2.0 * j + 1.0) *
           (double(m3) * (double(l1) * (l1 + 1) - double(l2) * (l2 + 1)) -
            double(m1 - m2) * j * (j + 1.0));
  };

  std::vector<double> f(nfam, 0.0);
  if (nfam == 1) {
    double v = 1.0 / std::sqrt(2.0 * jmin + 1.0);
    return ((l1 - l2 - m3) & 1) ? -v : v;
  }

  // forward sweep from jmin
  int fwd_end = 0; // last index filled by the forward sweep
  {
    if (jmin == 0) {
      f[0] = f_at_l3_0(l1, m1);
      f[1] = f_at_l3_1(l1, m1);
      fwd_end = 1;
    } else {
      f[0] = 1.0;
      double a = double(jmin) * A(jmin + 1.0);
      if (a == 0.0) { // singleton-like degenerate start; fall back
        f[0] = 1.0;
        fwd_end = 0;
      } else {
        f[1] = -B(jmin) * f[0] / a;
        fwd_end = 1;
      }
    }
    double prev_mag = std::max(std::fabs(f[fwd_end]), 1e-300);
    for (int i = fwd_end; i + 1 < nfam; ++i) {
      double j = jmin + i;
      double denom = j * A(j + 1.0);
      if (denom == 0.0) break;
      double next = -(B(j) * f[i] + (j + 1.0) * A(j) * (i > 0 ? f[i - 1] : 0.0)) / denom;
      f[i + 1] = next;
      fwd_end = i + 1;
      double mag = std::fabs(next);
      if (mag > 1e250) { // rescale to avoid overflow
        for (int k = 0; k <= fwd_end; ++k) f[k] *= 1e-250;
        mag *= 1e-250;
      }
      // stop once past the classical maximum and decaying
      if (mag < prev_mag && mag > 0 && i > (nfam / 2)) break;
      prev_mag = std::max(mag, 1e-300);
    }
  }

  // backward sweep from jmax
  std::vector<double> g(nfam, 0.0);
  int bwd_end = nfam - 1; // smallest index filled by the backward sweep
  {
    g[nfam - 1] = 1.0;
    double a = (jmax + 1.0) * A(jmax);
    if (a != 0.0) {
      g[nfam - 2] = -B(jmax) * g[nfam - 1] / a;
      bwd_end = nfam - 2;
      for (int i = nfam - 2; i > 0; --i) {
        double j = jmin + i;
        double denom = (j + 1.0) * A(j);
        if (denom == 0.0) break;
        double next = -(j * A(j + 1.0) * g[i + 1] + B(j) * g[i]) / denom;
        g[i - 1] = next;
        bwd_end = i - 1;
        if (std::fabs(next) > 1e250) {
          for (int k = nfam - 1; k >= bwd_end; --k) g[k] *= 1e-250;
        }
        if (bwd_end <= fwd_end) break;
      }
    }
  }
  if (bwd_end > fwd_end)
    throw NumericalError("wigner_3j: recurrence sweeps failed to overlap");

  // match the backward branch onto the forward one at the largest forward
  // element inside the overlap
  int match = fwd_end;
  for (int i = bwd_end; i <= fwd_end; ++i)
    if (std::fabs(f[i]) > std::fabs(f[match])) match = i;
  if (g[match] == 0.0 || f[match] == 0.0)
    throw NumericalError("wigner_3j: degenerate recurrence match point");
  double scale = f[match] / g[match];
  for (int i = match + 1; i < nfam; ++i) f[i] = g[i] * scale;

  double norm = 0.0;
  for (int i = 0; i < nfam; ++i)
    norm += (2.0 * (jmin + i) + 1.0) * f[i] * f[i];
  norm = std::sqrt(norm);
  int sign_top = ((l1 - l2 - m3) & 1) ? -1 : 1;
  double fmax_signed = f[nfam - 1];
  double fix = (fmax_signed < 0) == (sign_top < 0) ? 1.0 : -1.0;
  return f[l3 - jmin] * fix / norm;
}

} // namespace

double wigner_3j(int l1, int l2, int l3, int m1, int m2, int m3) {
  if (l1 < 0 || l2 < 0 || l3 < 0) return 0.0;
  if (std::abs(m1) > l1 || std::abs(m2) > l2 || std::abs(m3) > l3) return 0.0;
  if (m1 + m2 + m3 != 0) return 0.0;
  if (!triangle_ok(l1, l2, l3)) return 0.0;
  if (l1 + l2 + l3 <= kWigner3jExactMax)
    return wigner_3j_exact(l1, l2, l3, m1, m2, m3);
  return wigner_3j_recurrence(l1, l2, l3, m1, m2, m3);
}

double gaunt_coefficient(int lp, int mp, int ls, int ms, int li, int mi) {
  if (lp < 0 || ls < 0 || li < 0)
    throw DomainError("gaunt_coefficient: l must be >= 0");
  if (std::abs(mp) > lp || std::abs(ms) > ls || std::abs(mi) > li)
    throw DomainError("gaunt_coefficient: |m| must be <= l");
  double pref = std::sqrt((2.0 * ls + 1.0) * (2.0 * li + 1.0) *
                          (2.0 * lp + 1.0) / (4.0 * kPi));
  double w0 = wigner_3j(ls, li, lp, 0, 0, 0);
  if (w0 == 0.0) return 0.0;
  double wm = wigner_3j(ls, li, lp, ms, mi, -mp);
  double v = pref * w0 * wm;
  return (mp & 1) ? -v : v;
}

} // namespace wgmr
