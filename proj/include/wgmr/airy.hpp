#pragma once

namespace wgmr {

// Airy function Ai(x). Maclaurin series for |x| <= 8, trigonometric
// asymptotic form on the negative axis beyond that.
double airy_ai(double x);

// Magnitude of the q-th zero of Ai on the negative axis (q >= 1), i.e.
// Ai(-airy_negative_zero(q)) == 0. Accurate to better than 1e-9.
double airy_negative_zero(int q);

} // namespace wgmr
