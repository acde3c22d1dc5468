#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "oracles.hpp"
#include "wgmr/airy.hpp"
#include "wgmr/constants.hpp"
#include "wgmr/errors.hpp"
#include "wgmr/material.hpp"
#include "wgmr/modes.hpp"

using namespace wgmr;

namespace {

std::string repo_path(const char* rel) {
  namespace fs = std::filesystem;
  for (fs::path base : {fs::path("."), fs::path(".."), fs::path("../..")}) {
    if (fs::exists(base / rel)) return (base / rel).string();
  }
  return rel;
}

MaterialModel mgo_cln() {
  return MaterialModel::load(repo_path("materials/mgo_cln.mat"));
}

} // namespace

TEST_CASE("airy zeros match frozen values") {
  CHECK(airy_negative_zero(1) == doctest::Approx(2.338107410).epsilon(1e-9));
  CHECK(airy_negative_zero(2) == doctest::Approx(4.087949444).epsilon(1e-9));
  CHECK(airy_negative_zero(3) == doctest::Approx(5.520559828).epsilon(1e-9));
}

TEST_CASE("airy zeros match the ODE-integration oracle") {
  for (int q = 1; q <= 10; ++q) {
    double ref = oracle::airy_zero(q);
    CHECK(std::fabs(airy_negative_zero(q) - ref) < 2e-8);
  }
}

TEST_CASE("airy zero rejects q < 1") {
  CHECK_THROWS_AS(airy_negative_zero(0), DomainError);
}

TEST_CASE("refractive index golden constants") {
  MaterialModel mat = mgo_cln();
  // Anchor values recorded in materials/mgo_cln.mat.
  CHECK(refractive_index(mat, Polarization::ordinary, 1064e-9, 25.0) ==
        doctest::Approx(2.229580).epsilon(2e-6));
  CHECK(refractive_index(mat, Polarization::extraordinary, 1064e-9, 25.0) ==
        doctest::Approx(2.148170).epsilon(2e-6));
  CHECK(refractive_index(mat, Polarization::ordinary, 532e-9, 25.0) ==
        doctest::Approx(2.319408).epsilon(2e-6));
  CHECK(refractive_index(mat, Polarization::extraordinary, 532e-9, 25.0) ==
        doctest::Approx(2.224467).epsilon(2e-6));
}

TEST_CASE("refractive index is deterministic bit-for-bit") {
  MaterialModel mat = mgo_cln();
  double a = refractive_index(mat, Polarization::ordinary, 987.6e-9, 41.3);
  double b = refractive_index(mat, Polarization::ordinary, 987.6e-9, 41.3);
  CHECK(a == b);
}

TEST_CASE("refractive index rejects out-of-window input naming the bound") {
  MaterialModel mat = mgo_cln();
  CHECK_THROWS_WITH_AS(
      refractive_index(mat, Polarization::ordinary, 0.3e-6, 25.0),
      doctest::Contains("below window min"), DomainError);
  CHECK_THROWS_WITH_AS(
      refractive_index(mat, Polarization::ordinary, 5e-6, 25.0),
      doctest::Contains("above window max"), DomainError);
  CHECK_THROWS_WITH_AS(
      refractive_index(mat, Polarization::ordinary, 1e-6, 400.0),
      doctest::Contains("above window max"), DomainError);
  CHECK_THROWS_AS(refractive_index(mat, Polarization::ordinary, 1e-6, -50.0),
                  DomainError);
}

TEST_CASE("material file loading validates schema") {
  namespace fs = std::filesystem;
  auto tmp = fs::temp_directory_path() / "wgmr_bad.mat";
  {
    std::ofstream f(tmp);
    f << "name=x\no.a1=4.0\no.bogus=1\n";
  }
  CHECK_THROWS_AS(MaterialModel::load(tmp.string()), DomainError);
  {
    std::ofstream f(tmp);
    f << "name=x\no.a1=4.0\ne.a1=4.0\n"; // missing windows
  }
  CHECK_THROWS_AS(MaterialModel::load(tmp.string()), DomainError);
  CHECK_THROWS_AS(MaterialModel::load("/nonexistent/file.mat"), IoError);
  fs::remove(tmp);
}

TEST_CASE("sphere limit: (m,p) splittings of one l are degenerate") {
  ResonatorGeometry sphere{1e-4, 1e-4};
  MaterialModel cn = MaterialModel::constant_index(1.45);
  MaterialModel mat = mgo_cln();
  for (int l : {20, 33}) {
    for (auto pol : {Polarization::ordinary, Polarization::extraordinary}) {
      double f_const = 0, f_mat = 0;
      for (int p = 0; p <= 4; ++p) {
        ModeIndex idx{1, l - p, p, pol};
        double fc = mode_frequency(sphere, cn, idx, 25.0).frequency_hz;
        double fm = mode_frequency(sphere, mat, idx, 25.0).frequency_hz;
        if (p == 0) {
          f_const = fc;
          f_mat = fm;
        } else {
          CHECK(std::fabs(fc - f_const) / f_const < 1e-9);
          CHECK(std::fabs(fm - f_mat) / f_mat < 1e-9);
        }
      }
    }
  }
}

TEST_CASE("sphere limit matches the characteristic-equation oracle") {
  ResonatorGeometry sphere{1e-4, 1e-4};
  MaterialModel cn = MaterialModel::constant_index(1.45);
  const double n = 1.45;
  for (int q = 1; q <= 3; ++q) {
    for (int l = 20; l <= 50; l += 10) {
      for (auto pol : {Polarization::ordinary, Polarization::extraordinary}) {
        ModeIndex idx{q, l, 0, pol};
        ModeFrequency f = mode_frequency(sphere, cn, idx, 25.0);
        bool te = pol == Polarization::extraordinary;
        double x_ref = oracle::sphere_root(l, q, n, te); // vacuum size param
        double nu_ref =
            x_ref * kSpeedOfLight / (kTwoPi * sphere.major_radius_m);
        CHECK(std::fabs(f.frequency_hz - nu_ref) / nu_ref < 1e-6);
      }
    }
  }
}

TEST_CASE("expansion-only path stays close to the refined root") {
  ResonatorGeometry sphere{1e-4, 1e-4};
  MaterialModel cn = MaterialModel::constant_index(1.45);
  DispersionOptions no_refine;
  no_refine.refine = false;
  ModeIndex idx{1, 200, 0, Polarization::ordinary};
  double f_exp = mode_frequency(sphere, cn, idx, 25.0, no_refine).frequency_hz;
  double f_ref = mode_frequency(sphere, cn, idx, 25.0).frequency_hz;
  CHECK(std::fabs(f_exp - f_ref) / f_ref < 2e-5);
}

TEST_CASE("frequency is monotone in m, p and q") {
  ResonatorGeometry geom{1.61e-3, 0.4e-3};
  MaterialModel mat = mgo_cln();
  auto freq = [&](int q, int m, int p) {
    return mode_frequency(geom, mat, ModeIndex{q, m, p, Polarization::ordinary},
                          25.0)
        .frequency_hz;
  };
  double base = freq(1, 20000, 0);
  CHECK(freq(1, 20001, 0) > base);
  CHECK(freq(1, 20000, 1) > base);
  CHECK(freq(2, 20000, 0) > base);
}

TEST_CASE("self-consistency residual of the dispersion fixed point") {
  ResonatorGeometry geom{1.61e-3, 0.4e-3};
  MaterialModel mat = mgo_cln();
  ModeIndex idx{1, 42305, 0, Polarization::extraordinary};
  ModeFrequency f = mode_frequency(geom, mat, idx, 85.0);
  double n = refractive_index(mat, idx.polarization, f.vacuum_wavelength_m, 85.0);
  double x_back = kTwoPi * geom.major_radius_m * n * f.frequency_hz /
                  kSpeedOfLight;
  CHECK(std::fabs(x_back - f.size_parameter) / f.size_parameter < 1e-9);
  CHECK(f.size_parameter > idx.m);
  CHECK(f.vacuum_wavelength_m * f.frequency_hz ==
        doctest::Approx(kSpeedOfLight).epsilon(1e-12));
}

TEST_CASE("free spectral range approaches c/(2 pi R n) for large m") {
  ResonatorGeometry sphere{1e-3, 1e-3};
  MaterialModel cn = MaterialModel::constant_index(1.45);
  ModeIndex idx{1, 1000, 0, Polarization::ordinary};
  double fsr = free_spectral_range(sphere, cn, idx, 25.0);
  double analytic = kSpeedOfLight / (kTwoPi * sphere.major_radius_m * 1.45);
  CHECK(std::fabs(fsr - analytic) / analytic < 0.01);
  CHECK(free_spectral_range(sphere, cn, idx, 25.0) == fsr); // deterministic
}

TEST_CASE("paper geometry FSR near 1064 nm is of order 10 GHz") {
  ResonatorGeometry geom{1.61e-3, 0.4e-3};
  MaterialModel mat = mgo_cln();
  int m = azimuthal_order_near(geom, mat, 1, 0, Polarization::ordinary,
                               kSpeedOfLight / 1064e-9, 25.0);
  double fsr = free_spectral_range(
      geom, mat, ModeIndex{1, m, 0, Polarization::ordinary}, 25.0);
  CHECK(fsr > 5e9);
  CHECK(fsr < 30e9);
}

TEST_CASE("linewidth to Q factor") {
  double nu532 = kSpeedOfLight / 532e-9;
  CHECK(linewidth_to_q_factor(nu532, 78.1e6) ==
        doctest::Approx(7.2e6).epsilon(0.01));
  CHECK(linewidth_to_q_factor(1e9, 1e9) == doctest::Approx(1.0));
  // Q = 3e7 corresponds to ~18.8 MHz at 532 nm
  CHECK(nu532 / 3e7 == doctest::Approx(18.8e6).epsilon(0.01));
  CHECK_THROWS_AS(linewidth_to_q_factor(0, 1e6), DomainError);
  CHECK_THROWS_AS(linewidth_to_q_factor(1e14, 0), DomainError);
}

TEST_CASE("mode index and geometry validation") {
  ResonatorGeometry bad{0.4e-3, 1.61e-3}; // prolate
  CHECK_THROWS_AS(bad.validate(), DomainError);
  ModeIndex idx{0, 5, 0, Polarization::ordinary};
  CHECK_THROWS_AS(idx.validate(), DomainError);
  ModeIndex idx2{1, 0, 0, Polarization::ordinary};
  CHECK_THROWS_AS(idx2.validate(), DomainError);
  ModeIndex idx3{1, 1, -1, Polarization::ordinary};
  CHECK_THROWS_AS(idx3.validate(), DomainError);
}

TEST_CASE("azimuthal_order_near finds the closest order") {
  ResonatorGeometry geom{1.61e-3, 0.4e-3};
  MaterialModel mat = mgo_cln();
  double target = kSpeedOfLight / 532e-9;
  int m = azimuthal_order_near(geom, mat, 1, 0, Polarization::extraordinary,
                               target, 85.0);
  auto err = [&](int mm) {
    return std::fabs(mode_frequency(geom, mat,
                                    ModeIndex{1, mm, 0,
                                              Polarization::extraordinary},
                                    85.0)
                         .frequency_hz -
                     target);
  };
  CHECK(err(m) <= err(m - 1));
  CHECK(err(m) <= err(m + 1));
}
