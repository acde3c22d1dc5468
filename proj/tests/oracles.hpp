// Test-only reference implementations, kept independent of the library
// code paths they check.
#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <vector>

namespace oracle {

// ---- Airy: RK4 integration of y'' = x y from x = 0 downward --------------
// Returns Ai and Ai' at x = -z (z >= 0) using exact initial conditions.
inline void airy_ode(double z, double& ai, double& aip, double h = 1e-4) {
  double y = 0.3550280538878172;   // Ai(0)
  double yp = -0.2588194037928068; // Ai'(0)
  double x = 0.0;
  auto f = [](double xx, double yy) { return xx * yy; };
  long steps = std::lround(z / h);
  double hh = steps > 0 ? -z / steps : -h;
  for (long i = 0; i < steps; ++i) {
    // RK4 on the system (y, y')
    double k1y = yp, k1p = f(x, y);
    double k2y = yp + 0.5 * hh * k1p, k2p = f(x + 0.5 * hh, y + 0.5 * hh * k1y);
    double k3y = yp + 0.5 * hh * k2p, k3p = f(x + 0.5 * hh, y + 0.5 * hh * k2y);
    double k4y = yp + hh * k3p, k4p = f(x + hh, y + hh * k3y);
    y += hh / 6.0 * (k1y + 2 * k2y + 2 * k3y + k4y);
    yp += hh / 6.0 * (k1p + 2 * k2p + 2 * k3p + k4p);
    x += hh;
  }
  ai = y;
  aip = yp;
}

// q-th zero of Ai on the negative axis by scanning + bisection on the
// ODE-integrated Ai.
inline double airy_zero(int q) {
  auto ai = [](double z) {
    double a, ap;
    airy_ode(z, a, ap);
    return a;
  };
  int found = 0;
  double prev = ai(0.0), lo = 0.0;
  for (double z = 0.05; z < 40.0; z += 0.05) {
    double cur = ai(z);
    if (prev * cur < 0) {
      ++found;
      if (found == q) {
        double hi = z;
        double flo = prev;
        lo = z - 0.05;
        for (int it = 0; it < 60; ++it) {
          double mid = 0.5 * (lo + hi);
          double fm = ai(mid);
          if (flo * fm <= 0)
            hi = mid;
          else {
            lo = mid;
            flo = fm;
          }
        }
        return 0.5 * (lo + hi);
      }
    }
    prev = cur;
    lo = z;
  }
  throw std::runtime_error("airy_zero oracle: zero not found");
}

// ---- sphere characteristic equation (integer l) ---------------------------
// Bound-WGM matching of j_l inside to the decaying y_l outside.
//   TE: n j'(nx) y(x) - j(nx) y'(x) = 0
//   TM: (1/n)(j(z)/ (2z) ... ) -- expressed pole-free below
inline double sphere_char(double x, int l, double n, bool te) {
  double z = n * x;
  double j = std::sph_bessel(l, z);
  double jp = (l > 0 ? std::sph_bessel(l - 1, z) : std::cos(z) / z) -
              (l + 1.0) / z * j;
  double y = std::sph_neumann(l, x);
  double yp = (l > 0 ? std::sph_neumann(l - 1, x) : std::sin(x) / x) -
              (l + 1.0) / x * y;
  if (te) return n * jp * y - j * yp;
  // TM: (1/n^2) d/dr ln(r j) = d/dr ln(r y)
  double lhs = (1.0 / (n * n)) * (1.0 / x + n * jp / j);
  double rhs = 1.0 / x + yp / y;
  return (lhs - rhs) * j * y; // pole-free product form
}

// Brute-force bisection for the q-th root above x = l/n (inner turning).
inline double sphere_root(int l, int q, double n, bool te) {
  double x0 = (l + 0.5) / n; // internal caustic in vacuum units
  double step = 0.02 / n;
  int found = 0;
  double prev = sphere_char(x0, l, n, te);
  for (double x = x0 + step; x < (l + 0.5) * 1.4; x += step) {
    double cur = sphere_char(x, l, n, te);
    if (std::isfinite(prev) && std::isfinite(cur) && prev * cur < 0) {
      ++found;
      if (found == q) {
        double lo = x - step, hi = x, flo = prev;
        for (int it = 0; it < 100; ++it) {
          double mid = 0.5 * (lo + hi);
          double fm = sphere_char(mid, l, n, te);
          if (flo * fm <= 0)
            hi = mid;
          else {
            lo = mid;
            flo = fm;
          }
        }
        return 0.5 * (lo + hi);
      }
    }
    prev = cur;
  }
  throw std::runtime_error("sphere_root oracle: root not found");
}

// ---- normalized associated Legendre (Condon-Shortley included) ------------
inline double assoc_legendre_norm(int l, int m, double x) {
  bool neg = m < 0;
  int am = std::abs(m);
  if (am > l) return 0.0;
  double pmm = 1.0 / std::sqrt(4.0 * M_PI);
  if (am > 0) {
    double s = std::sqrt((1.0 - x) * (1.0 + x));
    for (int k = 1; k <= am; ++k)
      pmm *= -s * std::sqrt((2.0 * k + 1.0) / (2.0 * k));
  } else {
    pmm *= std::sqrt(1.0); // (2*0+1)/(4pi) handled below
  }
  // pmm currently equals Ptilde_am^am up to the (2am+1) factor baked in
  // by the loop; fix the m = 0 start:
  if (am == 0) pmm = std::sqrt(1.0 / (4.0 * M_PI));
  if (l == am) return neg && (am & 1) ? -pmm : pmm;
  double pm1 = x * std::sqrt(2.0 * am + 3.0) * pmm;
  if (l == am + 1) return neg && (am & 1) ? -pm1 : pm1;
  double plm = 0;
  for (int ll = am + 2; ll <= l; ++ll) {
    double a = std::sqrt((4.0 * ll * ll - 1.0) / (ll * ll - am * am));
    double b = std::sqrt(((ll - 1.0) * (ll - 1.0) - am * am) /
                         (4.0 * (ll - 1.0) * (ll - 1.0) - 1.0));
    plm = a * (x * pm1 - b * pmm);
    pmm = pm1;
    pm1 = plm;
  }
  return neg && (am & 1) ? -plm : plm;
}

// Gauss-Legendre nodes/weights on [-1, 1] by Newton iteration.
inline void gauss_legendre(int n, std::vector<double>& xs,
                           std::vector<double>& ws) {
  xs.resize(n);
  ws.resize(n);
  for (int i = 0; i < n; ++i) {
    double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      double dp = n * (x * p1 - p0) / (x * x - 1.0);
      double dx = p1 / dp;
      x -= dx;
      if (std::fabs(dx) < 1e-15) break;
    }
    double p0 = 1.0, p1 = x;
    for (int k = 2; k <= n; ++k) {
      double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    double dp = n * (x * p1 - p0) / (x * x - 1.0);
    xs[i] = x;
    ws[i] = 2.0 / ((1.0 - x * x) * dp * dp);
  }
}

// Quadrature of Y_{ls ms} Y_{li mi} conj(Y_{lp mp}) over the sphere: the
// phi integral is 2 pi delta(ms + mi - mp); the theta part is exact
// Gauss-Legendre (the integrand is polynomial in cos theta).
inline double gaunt_quadrature(int lp, int mp, int ls, int ms, int li, int mi,
                               int n_nodes = 0) {
  if (ms + mi != mp) return 0.0;
  if (n_nodes <= 0) n_nodes = (ls + li + lp) / 2 + 8;
  std::vector<double> xs, ws;
  gauss_legendre(n_nodes, xs, ws);
  double acc = 0;
  for (int i = 0; i < n_nodes; ++i)
    acc += ws[i] * assoc_legendre_norm(ls, ms, xs[i]) *
           assoc_legendre_norm(li, mi, xs[i]) *
           assoc_legendre_norm(lp, mp, xs[i]);
  return 2.0 * M_PI * acc;
}

// ---- adaptive Simpson ------------------------------------------------------
inline double adaptive_simpson_rec(const std::function<double(double)>& f,
                                   double a, double b, double fa, double fb,
                                   double fm, double eps, int depth) {
  double m = 0.5 * (a + b);
  double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  double flm = f(lm), frm = f(rm);
  double whole = (b - a) / 6.0 * (fa + 4 * fm + fb);
  double left = (m - a) / 6.0 * (fa + 4 * flm + fm);
  double right = (b - m) / 6.0 * (fm + 4 * frm + fb);
  if (depth <= 0 || std::fabs(left + right - whole) < 15 * eps)
    return left + right + (left + right - whole) / 15.0;
  return adaptive_simpson_rec(f, a, m, fa, fm, flm, eps / 2, depth - 1) +
         adaptive_simpson_rec(f, m, b, fm, fb, frm, eps / 2, depth - 1);
}

inline double adaptive_simpson(const std::function<double(double)>& f, double a,
                               double b, double eps = 1e-12, int depth = 30) {
  double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
  return adaptive_simpson_rec(f, a, b, fa, fb, fm, eps, depth);
}

// ---- brute-force coincidence counting -------------------------------------
// Identical binning convention to the library: k = floor((dt + w/2)/w),
// kept iff |k| <= K.
inline std::vector<std::uint64_t> brute_force_histogram(
    const std::vector<std::uint64_t>& x, const std::vector<std::uint64_t>& y,
    std::int64_t w_ps, int K, bool same_stream = false) {
  std::vector<std::uint64_t> counts(2 * K + 1, 0);
  for (size_t i = 0; i < x.size(); ++i)
    for (size_t j = 0; j < y.size(); ++j) {
      if (same_stream && i == j) continue;
      std::int64_t dt =
          static_cast<std::int64_t>(y[j]) - static_cast<std::int64_t>(x[i]);
      std::int64_t num = dt + w_ps / 2;
      std::int64_t k = num >= 0 ? num / w_ps : -((-num + w_ps - 1) / w_ps);
      if (k < -K || k > K) continue;
      ++counts[static_cast<size_t>(k + K)];
    }
  return counts;
}

} // namespace oracle
