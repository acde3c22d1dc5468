#pragma once

#include <array>
#include <string>

namespace wgmr {

enum class Polarization { ordinary, extraordinary };

std::string to_string(Polarization p);
Polarization polarization_from_string(const std::string& s);

// Thermo-optic Sellmeier coefficient set of the generalized form
//   n^2 = a1 + b1 f + (a2 + b2 f)/(L^2 - (a3 + b3 f)^2)
//              + (a4 + b4 f)/(L^2 - a5^2) - a6 L^2,
//   f = (T - t0)(T + t1),  L in micrometres, T in deg C.
// A constant-index set is a1 = n^2 with everything else zero.
struct SellmeierSet {
  double a1 = 0, a2 = 0, a3 = 0, a4 = 0, a5 = 0, a6 = 0;
  double b1 = 0, b2 = 0, b3 = 0, b4 = 0;
  double t0 = 24.5, t1 = 570.82;

  double evaluate(double wavelength_um, double temperature_c) const;
};

// Dispersion model for a uniaxial crystal. Evaluation outside the validity
// window is a DomainError, never an extrapolation.
struct MaterialModel {
  std::string name;
  SellmeierSet ordinary;
  SellmeierSet extraordinary;
  double wavelength_min_m = 0;
  double wavelength_max_m = 0;
  double temperature_min_c = 0;
  double temperature_max_c = 0;

  static MaterialModel constant_index(double n);
  // Plain-text key=value file, see materials/mgo_cln.mat for the schema.
  static MaterialModel load(const std::string& path);
};

// Refractive index at vacuum wavelength (m) and temperature (deg C).
double refractive_index(const MaterialModel& mat, Polarization pol,
                        double wavelength_m, double temperature_c);

} // namespace wgmr
