#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "support.hpp"
#include "wqed/elimination.hpp"
#include "wqed/semiclassical.hpp"
#include "wqed/thle.hpp"

#include <cmath>

using namespace wqed;

namespace {

std::string error_key(const ModelConfig& cfg) {
  try {
    build_model(cfg);
  } catch (const ConfigError& e) {
    return e.key();
  }
  return "<none>";
}

ModelConfig fig1_single() {
  return {{"medium", std::string("direct")}, {"n", 1.0},      {"omega_q", 1.0},
          {"gamma_l", 0.02},                 {"gamma_r", 0.02}, {"u", 1.05}};
}

}  // namespace

TEST_CASE("build_model accepts the single-qubit direct parameters") {
  const LatticeModel m = build_model(fig1_single());
  CHECK(m.medium == Medium::Direct);
  CHECK(m.n_sites == 1);
  CHECK(m.qubit_freq[0] == 1.0);
  CHECK(m.onsite_U == 1.05);
  CHECK(m.boundary_gamma(0) == doctest::Approx(0.04));
  CHECK(m.resonator_freq.size() == 0);
}

TEST_CASE("build_model keeps inhomogeneous per-site arrays") {
  const LatticeModel m = build_model({{"medium", std::string("side")},
                                      {"n", 3.0},
                                      {"omega_q", std::vector<double>{0.95, 1.0, 1.06}},
                                      {"omega_r", 1.0},
                                      {"g", std::vector<double>{0.04, 0.01, 0.04}},
                                      {"u", 1.05},
                                      {"jx", 0.01},
                                      {"gamma_l", 0.02},
                                      {"gamma_r", 0.02}});
  CHECK(m.qubit_freq[2] == 1.06);
  CHECK(m.qr_coupling[1] == 0.01);
  CHECK(m.resonator_freq == Eigen::VectorXd::Ones(3));
  CHECK(m.boundary_gamma(0) == 0.02);
  CHECK(m.boundary_gamma(1) == 0.0);
  CHECK(m.boundary_gamma(2) == 0.02);
}

TEST_CASE("build_model errors name the offending key") {
  ModelConfig cfg = fig1_single();
  cfg["n"] = 0.0;
  CHECK(error_key(cfg) == "n");

  cfg = fig1_single();
  cfg["u"] = -1.0;
  CHECK(error_key(cfg) == "u");

  cfg = fig1_single();
  cfg.erase("gamma_r");
  CHECK(error_key(cfg) == "gamma_r");

  cfg = fig1_single();
  cfg["g"] = 0.02;
  CHECK(error_key(cfg) == "g");

  cfg = fig1_single();
  cfg["omega_q"] = std::vector<double>{1.0, 1.0};
  CHECK(error_key(cfg) == "omega_q");
}

TEST_CASE("to_config round-trips through build_model") {
  test::Gen gen(11);
  for (int trial = 0; trial < 20; ++trial) {
    const Medium medium = trial % 2 ? Medium::SideCoupled : Medium::Direct;
    const LatticeModel m = gen.model(medium, gen.integer(1, 4));
    const LatticeModel back = build_model(to_config(m));
    CHECK(back.medium == m.medium);
    CHECK(back.n_sites == m.n_sites);
    CHECK(back.qubit_freq == m.qubit_freq);
    CHECK(back.resonator_freq == m.resonator_freq);
    CHECK(back.qr_coupling == m.qr_coupling);
    CHECK(back.onsite_U == m.onsite_U);
    CHECK(back.hop_Jx == m.hop_Jx);
  }
}

TEST_CASE("drive_from_intensity") {
  const LatticeModel m = build_model(fig1_single());
  CHECK(drive_from_intensity(m, 1.0, 1.12e-6).Omega_L == doctest::Approx(2.1166010488516724e-4).epsilon(1e-12));
  CHECK(drive_from_intensity(m, 1.0, 0.0).Omega_L == 0.0);
  CHECK(drive_from_intensity(m, 1.0, 0.68).Omega_L == doctest::Approx(std::sqrt(0.0272)).epsilon(1e-14));
  CHECK_THROWS_AS(drive_from_intensity(m, 1.0, -1e-3), ConfigError);

  const DriveSpec d = drive_from_intensity(m, 0.97, 0.01);
  CHECK(d.detunings.dq[0] == doctest::Approx(0.03));
}

TEST_CASE("elimination constants: A has nonnegative real part, zero in the bulk") {
  const LatticeModel m = test::side(4, 0.02, 0.01);
  const DriveSpec d = drive_from_intensity(m, 0.99, 1e-4);
  const auto& A = d.detunings.A;
  REQUIRE(A.size() == 4);
  CHECK(A[0].real() == doctest::Approx(0.02));
  CHECK(A[1].real() == 0.0);
  CHECK(A[2].real() == 0.0);
  CHECK(A[3].real() == doctest::Approx(0.02));
  CHECK(A[1].imag() == doctest::Approx(0.01));

  // N = 1: f = -i Omega / A - i g b / A
  const LatticeModel one = test::side(1, 0.03);
  const DriveSpec d1 = drive_from_intensity(one, 0.98, 1e-4);
  const ResonatorElimination e = eliminate_resonators(one, d1);
  const cplx A1 = I * 0.02 + 0.04;
  CHECK(std::abs(e.c0[0] - (-I * d1.Omega_L / A1)) < 1e-15);
  CHECK(std::abs(e.C(0, 0) - (-I * 0.03 / A1)) < 1e-15);
}

TEST_CASE("property: spectra are invariant under a common rescaling of all rates") {
  test::Gen gen(23);
  for (int trial = 0; trial < 12; ++trial) {
    const Medium medium = trial % 2 ? Medium::SideCoupled : Medium::Direct;
    const LatticeModel m = gen.model(medium, gen.integer(1, 2));
    const double wp = gen.real(0.95, 1.05);
    const double i_in = std::pow(10.0, gen.real(-6.0, -2.0));
    const double factor = gen.real(0.5, 3.0);
    const LatticeModel ms = m.scaled(factor);

    const double t = thle_point(m, wp, i_in, 2).transmission;
    const double ts = thle_point(ms, wp * factor, i_in * factor, 2).transmission;
    CHECK(ts == doctest::Approx(t).epsilon(1e-8));

    const double q = qca_steady(m, drive_from_intensity(m, wp, i_in), m.onsite_U).transmission;
    const double qs = qca_steady(ms, drive_from_intensity(ms, wp * factor, i_in * factor), ms.onsite_U).transmission;
    CHECK(qs == doctest::Approx(q).epsilon(1e-6));
  }
}

TEST_CASE("property: weak-drive transmission is intensity independent") {
  test::Gen gen(5);
  for (int trial = 0; trial < 10; ++trial) {
    const Medium medium = trial % 2 ? Medium::SideCoupled : Medium::Direct;
    const LatticeModel m = gen.model(medium, gen.integer(1, 2));
    const double wp = gen.real(0.9, 1.1);
    const double a = thle_point(m, wp, 1e-8, 2).transmission;
    const double b = thle_point(m, wp, 1e-7, 2).transmission;
    CHECK(std::abs(a - b) < 1e-4);
  }
}
