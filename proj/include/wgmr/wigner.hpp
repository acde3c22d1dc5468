#pragma once

namespace wgmr {

// Wigner 3j symbol (l1 l2 l3; m1 m2 m3) for integer arguments. Returns 0
// for selection-rule violations (m sum, triangle, |m| > l). Exact rational
// evaluation (Racah sum over arbitrary-precision rationals) up to
// l1+l2+l3 <= kWigner3jExactMax; above that a two-sided normalized
// three-term recurrence in l3 is used.
inline constexpr int kWigner3jExactMax = 96;

double wigner_3j(int l1, int l2, int l3, int m1, int m2, int m3);

// Gaunt coefficient: integral over the sphere of
// Y_{ls ms} Y_{li mi} conj(Y_{lp mp}). Zero exactly when the angular
// selection rules fail.
double gaunt_coefficient(int lp, int mp, int ls, int ms, int li, int mi);

} // namespace wgmr
