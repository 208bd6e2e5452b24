#pragma once

#include "wqed/boson.hpp"
#include "wqed/lattice.hpp"

#include <random>

namespace wqed::test {

inline LatticeModel direct(int n, double jx = 0.0) {
  return build_model({{"medium", std::string("direct")},
                      {"n", double(n)},
                      {"omega_q", 1.0},
                      {"u", 1.05},
                      {"jx", jx},
                      {"gamma_l", 0.02},
                      {"gamma_r", 0.02}});
}

inline LatticeModel side(int n, double g, double jx = 0.0) {
  return build_model({{"medium", std::string("side")},
                      {"n", double(n)},
                      {"omega_q", 1.0},
                      {"omega_r", 1.0},
                      {"g", g},
                      {"u", 1.05},
                      {"jx", jx},
                      {"gamma_l", 0.02},
                      {"gamma_r", 0.02}});
}

// Seeded generators for property tests.
class Gen {
 public:
  explicit Gen(unsigned seed) : rng_(seed) {}

  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }
  double real(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
  cplx complex(double scale = 1.0) { return {real(-scale, scale), real(-scale, scale)}; }

  NormalMonomial monomial(int n_sites, int max_exp) {
    NormalMonomial m(n_sites);
    for (int s = 0; s < n_sites; ++s) m.set(s, integer(0, max_exp), integer(0, max_exp));
    return m;
  }

  OperatorPolynomial polynomial(int n_sites, int max_exp, int terms) {
    OperatorPolynomial p;
    for (int i = 0; i < terms; ++i) p.add(monomial(n_sites, max_exp), complex());
    return p;
  }

  // Random physical lattice with per-site disorder in frequencies and couplings.
  LatticeModel model(Medium medium, int n) {
    LatticeModel m;
    m.medium = medium;
    m.n_sites = n;
    m.qubit_freq = Eigen::VectorXd::NullaryExpr(n, [&] { return real(0.95, 1.05); });
    m.onsite_U = real(0.1, 1.5);
    m.hop_Jx = n > 1 ? real(0.0, 0.03) : 0.0;
    m.gamma_L = real(0.01, 0.04);
    m.gamma_R = real(0.01, 0.04);
    if (medium == Medium::SideCoupled) {
      m.resonator_freq = Eigen::VectorXd::NullaryExpr(n, [&] { return real(0.97, 1.03); });
      m.qr_coupling = Eigen::VectorXd::NullaryExpr(n, [&] { return real(0.01, 0.06); });
    }
    m.validate();
    return m;
  }

  std::mt19937& engine() { return rng_; }

 private:
  std::mt19937 rng_;
};

inline double max_difference(const OperatorPolynomial& a, const OperatorPolynomial& b) {
  double worst = 0.0;
  for (const auto& [mono, c] : a) worst = std::max(worst, std::abs(c - b.coefficient(mono)));
  for (const auto& [mono, c] : b) worst = std::max(worst, std::abs(c - a.coefficient(mono)));
  return worst;
}

}  // namespace wqed::test
