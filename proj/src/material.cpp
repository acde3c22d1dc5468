#include "wgmr/material.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>

#include "wgmr/errors.hpp"

namespace wgmr {

std::string to_string(Polarization p) {
  return p == Polarization::ordinary ? "ordinary" : "extraordinary";
}

Polarization polarization_from_string(const std::string& s) {
  if (s == "ordinary" || s == "o") return Polarization::ordinary;
  if (s == "extraordinary" || s == "e") return Polarization::extraordinary;
  throw DomainError("unknown polarization '" + s + "'");
}

double SellmeierSet::evaluate(double lum, double tc) const {
  double f = (tc - t0) * (tc + t1);
  double l2 = lum * lum;
  double p3 = a3 + b3 * f;
  double n2 = a1 + b1 * f + (a2 + b2 * f) / (l2 - p3 * p3) +
              (a4 + b4 * f) / (l2 - a5 * a5) - a6 * l2;
  if (!(n2 > 1.0))
    throw NumericalError("Sellmeier evaluation gave n^2 <= 1 at " +
                         std::to_string(lum) + " um");
  return std::sqrt(n2);
}

MaterialModel MaterialModel::constant_index(double n) {
  if (!(n > 1.0)) throw DomainError("constant_index: n must be > 1");
  MaterialModel m;
  m.name = "constant_n" + std::to_string(n);
  m.ordinary.a1 = m.extraordinary.a1 = n * n;
  m.ordinary.t0 = m.ordinary.t1 = 0;
  m.extraordinary.t0 = m.extraordinary.t1 = 0;
  m.wavelength_min_m = 1e-9;
  m.wavelength_max_m = 1.0;
  m.temperature_min_c = -273.0;
  m.temperature_max_c = 1e4;
  return m;
}

namespace {

void assign_coeff(SellmeierSet& s, const std::string& key, double v) {
  if (key == "a1") s.a1 = v;
  else if (key == "a2") s.a2 = v;
  else if (key == "a3") s.a3 = v;
  else if (key == "a4") s.a4 = v;
  else if (key == "a5") s.a5 = v;
  else if (key == "a6") s.a6 = v;
  else if (key == "b1") s.b1 = v;
  else if (key == "b2") s.b2 = v;
  else if (key == "b3") s.b3 = v;
  else if (key == "b4") s.b4 = v;
  else if (key == "t0") s.t0 = v;
  else if (key == "t1") s.t1 = v;
  else throw DomainError("material file: unknown coefficient '" + key + "'");
}

} // namespace

MaterialModel MaterialModel::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open material file '" + path + "'");
  MaterialModel m;
  bool have_name = false, have_wl = false, have_t = false;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    // trim
    auto b = line.find_first_not_of(" \t\r");
    if (b == std::string::npos) continue;
    auto e = line.find_last_not_of(" \t\r");
    line = line.substr(b, e - b + 1);
    auto eq = line.find('=');
    if (eq == std::string::npos)
      throw DomainError("material file line " + std::to_string(lineno) +
                        ": expected key=value");
    std::string key = line.substr(0, eq);
    std::string val = line.substr(eq + 1);
    while (!key.empty() && (key.back() == ' ' || key.back() == '\t')) key.pop_back();
    while (!val.empty() && (val.front() == ' ' || val.front() == '\t')) val.erase(0, 1);
    if (key == "name") {
      m.name = val;
      have_name = true;
      continue;
    }
    if (key == "wavelength_window_um" || key == "temperature_window_c") {
      std::istringstream ss(val);
      double lo, hi;
      char comma;
      if (!(ss >> lo >> comma >> hi) || comma != ',')
        throw DomainError("material file line " + std::to_string(lineno) +
                          ": expected 'lo,hi'");
      if (key[0] == 'w') {
        m.wavelength_min_m = lo * 1e-6;
        m.wavelength_max_m = hi * 1e-6;
        have_wl = true;
      } else {
        m.temperature_min_c = lo;
        m.temperature_max_c = hi;
        have_t = true;
      }
      continue;
    }
    auto dot = key.find('.');
    if (dot == std::string::npos)
      throw DomainError("material file line " + std::to_string(lineno) +
                        ": unknown key '" + key + "'");
    std::string pol = key.substr(0, dot), coeff = key.substr(dot + 1);
    double v = 0;
    try {
      v = std::stod(val);
    } catch (const std::exception&) {
      throw DomainError("material file line " + std::to_string(lineno) +
                        ": bad number '" + val + "'");
    }
    if (pol == "o") assign_coeff(m.ordinary, coeff, v);
    else if (pol == "e") assign_coeff(m.extraordinary, coeff, v);
    else
      throw DomainError("material file line " + std::to_string(lineno) +
                        ": polarization prefix must be 'o' or 'e'");
  }
  if (!have_name || !have_wl || !have_t)
    throw DomainError("material file '" + path +
                      "': name, wavelength_window_um and temperature_window_c "
                      "are required");
  return m;
}

double refractive_index(const MaterialModel& mat, Polarization pol,
                        double wavelength_m, double temperature_c) {
  if (wavelength_m < mat.wavelength_min_m)
    throw DomainError("refractive_index: wavelength " +
                      std::to_string(wavelength_m * 1e9) + " nm below window min " +
                      std::to_string(mat.wavelength_min_m * 1e9) + " nm");
  if (wavelength_m > mat.wavelength_max_m)
    throw DomainError("refractive_index: wavelength " +
                      std::to_string(wavelength_m * 1e9) + " nm above window max " +
                      std::to_string(mat.wavelength_max_m * 1e9) + " nm");
  if (temperature_c < mat.temperature_min_c)
    throw DomainError("refractive_index: temperature " +
                      std::to_string(temperature_c) + " C below window min " +
                      std::to_string(mat.temperature_min_c) + " C");
  if (temperature_c > mat.temperature_max_c)
    throw DomainError("refractive_index: temperature " +
                      std::to_string(temperature_c) + " C above window max " +
                      std::to_string(mat.temperature_max_c) + " C");
  const SellmeierSet& s =
      pol == Polarization::ordinary ? mat.ordinary : mat.extraordinary;
  return s.evaluate(wavelength_m * 1e6, temperature_c);
}

} // namespace wgmr
