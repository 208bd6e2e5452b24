#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "support.hpp"
#include "wqed/elimination.hpp"
#include "wqed/semiclassical.hpp"
#include "wqed/thle.hpp"

#include <cmath>

using namespace wqed;

namespace {

NormalMonomial mono(int j, int k) {
  NormalMonomial m(1);
  m.set(0, j, k);
  return m;
}

// Steady state of the THLE restricted to `ops` (terms outside the set dropped).
Eigen::VectorXcd restricted_steady_state(const LatticeModel& model, const DriveSpec& drive,
                                         const std::vector<NormalMonomial>& ops) {
  const HeisenbergGenerator gen(model, drive);
  const Eigen::Index n = static_cast<Eigen::Index>(ops.size());
  Eigen::MatrixXcd Z = Eigen::MatrixXcd::Zero(n, n);
  Eigen::VectorXcd c = Eigen::VectorXcd::Zero(n);
  for (Eigen::Index r = 0; r < n; ++r) {
    for (const auto& [m, coeff] : gen.rhs(ops[r])) {
      if (m.is_identity()) {
        c[r] += coeff;
        continue;
      }
      for (Eigen::Index col = 0; col < n; ++col) {
        if (ops[col] == m) Z(r, col) += coeff;
      }
    }
  }
  return Z.partialPivLu().solve(-c);
}

const std::vector<NormalMonomial> kFive = {mono(0, 1), mono(1, 0), mono(1, 1), mono(1, 2), mono(2, 1)};
const std::vector<NormalMonomial> kSeven = {mono(0, 1), mono(1, 0), mono(1, 1), mono(1, 2),
                                            mono(2, 1), mono(0, 2), mono(2, 0)};

LatticeModel single_direct(double U, double gl, double gr) {
  LatticeModel m = test::direct(1);
  m.onsite_U = U;
  m.gamma_L = gl;
  m.gamma_R = gr;
  return m;
}

}  // namespace

TEST_CASE("property: direct moments solve the five-operator system") {
  test::Gen gen(53);
  for (int trial = 0; trial < 30; ++trial) {
    const LatticeModel m = single_direct(gen.real(0.05, 2.0), gen.real(0.005, 0.05), gen.real(0.005, 0.05));
    const DriveSpec d = drive_from_intensity(m, gen.real(0.9, 1.1), std::pow(10.0, gen.real(-7.0, 0.0)));
    const Eigen::VectorXcd S = restricted_steady_state(m, d, kFive);
    const DirectMoments mom = direct_moments(d.detunings.dq[0], m.total_gamma(), d.Omega_L, m.onsite_U);
    CHECK(mom.Sx == doctest::Approx(S[0].real()).epsilon(1e-9));
    CHECK(mom.Sy == doctest::Approx(S[0].imag()).epsilon(1e-9));
    CHECK(std::norm(mom.beta_ss) == doctest::Approx(S[2].real()).epsilon(1e-9));
    CHECK(std::arg(mom.beta_ss) == doctest::Approx(std::arg(S[0])).epsilon(1e-9));
  }
}

TEST_CASE("property: direct U_eff makes beta_ss a QCA fixed point") {
  test::Gen gen(59);
  for (int trial = 0; trial < 30; ++trial) {
    const double delta = gen.real(-0.1, 0.1), Gamma = gen.real(0.01, 0.08);
    const double Omega = std::pow(10.0, gen.real(-4.0, -0.5)), U = gen.real(0.05, 2.0);
    const cplx beta = direct_moments(delta, Gamma, Omega, U).beta_ss;
    const cplx u = ueff_direct(delta, Gamma, Omega, U).u_eff;
    const cplx residual = -(I * delta + Gamma) * beta - 2.0 * I * u * std::norm(beta) * beta - I * Omega;
    CHECK(std::abs(residual) < 1e-10 * std::max(Omega, 1e-3));
  }
}

TEST_CASE("property: side moments solve the seven-operator system") {
  test::Gen gen(61);
  for (int trial = 0; trial < 30; ++trial) {
    LatticeModel m = test::side(1, gen.real(0.01, 0.08));
    m.onsite_U = gen.real(0.05, 2.0);
    m.resonator_freq[0] = gen.real(0.97, 1.03);
    const DriveSpec d = drive_from_intensity(m, gen.real(0.9, 1.1), std::pow(10.0, gen.real(-7.0, 0.0)));
    const Eigen::VectorXcd S = restricted_steady_state(m, d, kSeven);
    const SideMoments mom = side_moments(d.detunings.dq[0], d.detunings.dr[0], m.total_gamma(), m.qr_coupling[0],
                                         d.Omega_L, m.onsite_U);
    CHECK(std::abs(mom.S01 - S[0]) < 1e-9 * std::abs(S[0]));
    CHECK(mom.S11 == doctest::Approx(S[2].real()).epsilon(1e-8));

    const cplx u = ueff_side(d.detunings.dq[0], d.detunings.dr[0], m.total_gamma(), m.qr_coupling[0], d.Omega_L,
                             m.onsite_U)
                       .u_eff;
    const cplx b = mom.S01, a = mom.F01;
    const cplx rb = -I * d.detunings.dq[0] * b - 2.0 * I * u * std::norm(b) * b - I * m.qr_coupling[0] * a;
    const cplx ra = -d.detunings.A[0] * a - I * m.qr_coupling[0] * b - I * d.Omega_L;
    CHECK(std::abs(rb) < 1e-9 * std::abs(b) * std::max(1.0, std::abs(u)));
    CHECK(std::abs(ra) < 1e-12);
  }
}

TEST_CASE("single-site MQCA reproduces the truncated THLE by construction") {
  for (double wp : {0.95, 0.98, 1.0, 1.02}) {
    for (double i_in : {1.12e-6, 1.5e-4, 0.01, 0.68}) {
      const LatticeModel m = test::direct(1);
      const DriveSpec d = drive_from_intensity(m, wp, i_in);
      const QcaResult r = qca_steady(m, d, ueff_for(m, d, Placement::Homogeneous));
      const Eigen::VectorXcd S = restricted_steady_state(m, d, kFive);
      CHECK(r.state.status == SolverStatus::Converged);
      CHECK(r.transmission == doctest::Approx(2.0 * m.gamma_R * S[2].real() / i_in).epsilon(1e-6));
    }
  }
}

TEST_CASE("weak-drive QCA: Lorentzian line and side-coupled dip") {
  const LatticeModel m = test::direct(1);
  for (double wp : {0.9, 0.97, 1.0, 1.05}) {
    const double delta = 1.0 - wp;
    const double expected = 4.0 * 0.02 * 0.02 / (delta * delta + 0.04 * 0.04);
    CHECK(qca_steady(m, drive_from_intensity(m, wp, 1e-10), m.onsite_U).transmission ==
          doctest::Approx(expected).epsilon(1e-6));
  }
  const LatticeModel s = test::side(1, 0.02);
  CHECK(qca_steady(s, drive_from_intensity(s, 1.0, 1e-10), s.onsite_U).transmission < 1e-3);
  CHECK(qca_steady(m, drive_from_intensity(m, 1.0, 0.0), m.onsite_U).transmission == 0.0);
}

TEST_CASE("property: QCA Jacobian matches finite differences") {
  test::Gen gen(67);
  for (int trial = 0; trial < 12; ++trial) {
    const Medium medium = trial % 2 ? Medium::SideCoupled : Medium::Direct;
    const LatticeModel m = gen.model(medium, gen.integer(1, 4));
    const DriveSpec d = drive_from_intensity(m, gen.real(0.95, 1.05), gen.real(1e-4, 0.1));
    const Eigen::VectorXcd u = Eigen::VectorXcd::NullaryExpr(m.n_sites, [&] { return gen.complex(1.0); });
    const Eigen::Index n = medium == Medium::Direct ? m.n_sites : 2 * m.n_sites;
    const Eigen::VectorXcd y = Eigen::VectorXcd::NullaryExpr(n, [&] { return gen.complex(0.3); });

    const Eigen::MatrixXd J = qca_jacobian(y, m, d, u);
    REQUIRE(J.rows() == 2 * n);
    const double h = 1e-6;
    for (Eigen::Index c = 0; c < 2 * n; ++c) {
      Eigen::VectorXcd yp = y, ym = y;
      const cplx step = c % 2 ? cplx(0.0, h) : cplx(h, 0.0);
      yp[c / 2] += step;
      ym[c / 2] -= step;
      const Eigen::VectorXcd df = (qca_rhs(yp, m, d, u) - qca_rhs(ym, m, d, u)) / (2.0 * h);
      for (Eigen::Index r = 0; r < n; ++r) {
        CHECK(J(2 * r, c) == doctest::Approx(df[r].real()).epsilon(1e-6).scale(1.0));
        CHECK(J(2 * r + 1, c) == doctest::Approx(df[r].imag()).epsilon(1e-6).scale(1.0));
      }
    }
  }
}

TEST_CASE("placement policies") {
  const LatticeModel m = test::direct(5, 0.02);
  ComplexInteraction u{cplx(0.5, -0.2), Placement::EndsOnly};
  const Eigen::VectorXcd ends = site_interactions(m, u);
  CHECK(ends[0] == u.u_eff);
  CHECK(ends[4] == u.u_eff);
  CHECK(ends[2] == cplx(u.u_eff.real()));
  u.placement = Placement::Homogeneous;
  CHECK(site_interactions(m, u) == Eigen::VectorXcd::Constant(5, u.u_eff));
  CHECK(placement_from_string(to_string(Placement::EndsOnly)) == Placement::EndsOnly);
  CHECK_THROWS_AS(placement_from_string("middle"), ConfigError);

  const DriveSpec off = drive_from_intensity(m, 1.0, 0.0);
  CHECK(ueff_for(m, off, Placement::EndsOnly).u_eff == cplx(m.onsite_U));
}

TEST_CASE("status names round-trip") {
  for (SolverStatus s : {SolverStatus::Converged, SolverStatus::Oscillatory, SolverStatus::Diverged}) {
    CHECK(status_from_string(to_string(s)) == s);
  }
  CHECK_THROWS_AS(status_from_string("Maybe"), ConfigError);
}

TEST_CASE("corrected mean field equals QCA, uncorrected does not") {
  const LatticeModel m = test::direct(2, 0.02);
  for (double wp : {0.97, 0.99, 1.0, 1.01}) {
    const DriveSpec d = drive_from_intensity(m, wp, 0.01);
    const double q = qca_steady(m, d, m.onsite_U).transmission;
    const MeanFieldResult mf = mean_field_steady(m, d);
    CHECK(mf.status == SolverStatus::Converged);
    CHECK(mf.transmission == doctest::Approx(q).epsilon(1e-6));
  }
  const LatticeModel one = test::direct(1);
  MeanFieldOptions raw;
  raw.uncorrected = true;
  const DriveSpec d = drive_from_intensity(one, 0.99, 0.01);
  CHECK(std::abs(mean_field_steady(one, d, raw).transmission - mean_field_steady(one, d).transmission) > 1e-3);
  CHECK_THROWS_AS(mean_field_steady(test::side(1, 0.02), d), ConfigError);
}

TEST_CASE("state packing") {
  const LatticeModel m = test::side(3, 0.02, 0.01);
  SemiclassicalState s;
  s.alpha = Eigen::VectorXcd::LinSpaced(3, cplx(1, 0), cplx(3, 0));
  s.beta = Eigen::VectorXcd::LinSpaced(3, cplx(0, 1), cplx(0, 3));
  const Eigen::VectorXcd y = pack(m, s);
  CHECK(y.size() == 6);
  SemiclassicalState back;
  unpack(m, y, back);
  CHECK(back.alpha == s.alpha);
  CHECK(back.beta == s.beta);
}
