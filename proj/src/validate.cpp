#include "wqed/validate.hpp"

#include "oracle/fock_oracle.hpp"
#include "wqed/output.hpp"
#include "wqed/semiclassical.hpp"
#include "wqed/thle.hpp"

#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <sstream>

namespace wqed {

namespace {

LatticeModel direct_chain(int n, double jx, double gamma_l = 0.02, double gamma_r = 0.02) {
  LatticeModel m;
  m.medium = Medium::Direct;
  m.n_sites = n;
  m.qubit_freq = Eigen::VectorXd::Ones(n);
  m.onsite_U = 1.05;
  m.hop_Jx = jx;
  m.gamma_L = gamma_l;
  m.gamma_R = gamma_r;
  return m;
}

LatticeModel side_chain(int n, double g, double jx) {
  LatticeModel m = direct_chain(n, jx);
  m.medium = Medium::SideCoupled;
  m.resonator_freq = Eigen::VectorXd::Ones(n);
  m.qr_coupling = Eigen::VectorXd::Constant(n, g);
  return m;
}

double max_difference(const OperatorPolynomial& a, const OperatorPolynomial& b) {
  double worst = 0.0;
  for (const auto& [mono, c] : a) worst = std::max(worst, std::abs(c - b.coefficient(mono)));
  for (const auto& [mono, c] : b) worst = std::max(worst, std::abs(c - a.coefficient(mono)));
  return worst;
}

std::vector<double> grid(double a, double b, int n) {
  std::vector<double> out(n);
  for (int i = 0; i < n; ++i) out[i] = a + (b - a) * i / (n - 1);
  return out;
}

CheckResult check(const std::string& suite, const std::string& name, double measured, double threshold,
                  bool passed, std::string detail = {}) {
  return {suite, name, passed, measured, threshold, std::move(detail)};
}

std::vector<CheckResult> algebra_oracle() {
  std::vector<CheckResult> out;
  for (const Medium medium : {Medium::Direct, Medium::SideCoupled}) {
    for (int n = 1; n <= 2; ++n) {
      LatticeModel model = medium == Medium::Direct ? direct_chain(n, 0.013, 0.02, 0.03) : side_chain(n, 0.02, 0.013);
      model.qubit_freq[n - 1] = 1.03;
      if (model.side_coupled()) {
        model.resonator_freq[0] = 1.01;
        model.qr_coupling[n - 1] = 0.05;
      }
      const DriveSpec drive = drive_from_intensity(model, 0.98, 0.01);
      const HeisenbergGenerator gen(model, drive);
      for (int m = 1; m <= 2; ++m) {
        double worst = 0.0;
        for (const NormalMonomial& op : enumerate_basis(n, m)) {
          worst = std::max(worst, max_difference(gen.rhs(op), oracle::heisenberg_rhs(op, model, drive)));
        }
        std::ostringstream name;
        name << to_string(medium) << " N=" << n << " m=" << m << " max coefficient error";
        out.push_back(check("algebra-oracle", name.str(), worst, 1e-12, worst < 1e-12));
      }
    }
  }
  return out;
}

std::vector<CheckResult> weak_drive() {
  std::vector<CheckResult> out;
  const double I_weak = 1e-8;
  {
    const LatticeModel model = direct_chain(1, 0.0);
    const double T = thle_point(model, 1.0, I_weak, 2).transmission;
    out.push_back(check("weak-drive", "direct N=1 resonant T = 1", std::abs(T - 1.0), 1e-3, std::abs(T - 1.0) < 1e-3));
    double worst = 0.0;
    for (double wp : grid(0.9, 1.1, 21)) {
      const double d = 1.0 - wp;
      const double expected = 4.0 * model.gamma_L * model.gamma_R / (d * d + std::pow(model.total_gamma(), 2));
      worst = std::max(worst, std::abs(thle_point(model, wp, I_weak, 2).transmission - expected));
    }
    out.push_back(check("weak-drive", "direct N=1 Lorentzian line", worst, 1e-3, worst < 1e-3));
  }
  {
    const LatticeModel model = direct_chain(1, 0.0, 0.01, 0.03);
    const double expected = 4.0 * 0.01 * 0.03 / std::pow(0.04, 2);
    const double T = thle_point(model, 1.0, I_weak, 2).transmission;
    out.push_back(check("weak-drive", "direct N=1 asymmetric baths", std::abs(T - expected), 1e-3,
                        std::abs(T - expected) < 1e-3));
  }
  {
    const double T = thle_point(side_chain(1, 0.02, 0.0), 1.0, I_weak, 2).transmission;
    out.push_back(check("weak-drive", "side N=1 T at omega_p = omega_q", T, 1e-3, T < 1e-3));
    LatticeModel far = side_chain(1, 0.02, 0.0);
    far.qubit_freq[0] = 2.0;
    const double T0 = thle_point(far, 1.0, I_weak, 2).transmission;
    out.push_back(check("weak-drive", "side N=1 far-detuned qubit leaves the resonator line", std::abs(T0 - 1.0), 1e-3,
                        std::abs(T0 - 1.0) < 1e-3));
  }
  return out;
}

std::vector<CheckResult> convergence() {
  std::vector<CheckResult> out;
  const LatticeModel model = direct_chain(1, 0.0);
  {
    std::vector<double> T;
    for (int m = 2; m <= 6; ++m) T.push_back(thle_point(model, 1.0, 1.5e-4, m).transmission);
    bool monotone = true;
    double last = 0.0;
    std::ostringstream detail;
    for (std::size_t i = 0; i + 1 < T.size(); ++i) {
      const double d = std::abs(T[i + 1] - T[i]);
      detail << (i ? ", " : "") << "|T(" << i + 3 << ")-T(" << i + 2 << ")|=" << format_double(d);
      if (i > 0 && !(d <= last || d < 1e-13)) monotone = false;
      last = d;
    }
    out.push_back(check("convergence", "truncation differences shrink for m = 2..6", last, 0.0, monotone, detail.str()));
  }
  for (const bool side : {false, true}) {
    const LatticeModel mdl = side ? side_chain(1, 0.02, 0.0) : model;
    const DriveSpec drive = drive_from_intensity(mdl, 0.99, 0.01);
    const LinearSystem sys = assemble_linear_system(mdl, drive, 4);
    const SteadyState ss = steady_state(sys);
    const double abscissa = spectral_abscissa(sys);
    EvolveOptions opt;
    opt.t_final = 40.0 / std::abs(abscissa);
    const Trajectory tr = time_evolve(sys, Eigen::VectorXcd(), opt);
    const double diff = (tr.S.back() - ss.S).cwiseAbs().maxCoeff();
    out.push_back(check("convergence", std::string(side ? "side" : "direct") + " N=1 -Z^-1 Omega vs long-time ODE", diff,
                        1e-8, diff < 1e-8));
  }
  {
    const DriveSpec drive = drive_from_intensity(direct_chain(2, 0.02), 0.98, 0.01);
    const SteadyState ss = steady_state(assemble_linear_system(direct_chain(2, 0.02), drive, 2));
    double worst = 0.0;
    for (const NormalMonomial& op : *ss.basis) {
      worst = std::max(worst, std::abs(ss.expectation(op.adjoint()) - std::conj(ss.expectation(op))));
    }
    out.push_back(check("convergence", "conjugate moments are complex conjugates", worst, 1e-10, worst < 1e-10));
  }
  return out;
}

std::vector<CheckResult> cross_method() {
  std::vector<CheckResult> out;
  const double I_in = 1.12e-6;
  for (const bool side : {false, true}) {
    const LatticeModel model = side ? side_chain(1, 0.02, 0.0) : direct_chain(1, 0.0);
    double worst = 0.0;
    for (double wp : grid(0.9, 1.1, 41)) {
      const DriveSpec drive = drive_from_intensity(model, wp, I_in);
      std::vector<double> T;
      T.push_back(thle_point(model, wp, I_in, 3).transmission);
      T.push_back(qca_steady(model, drive, model.onsite_U).transmission);
      T.push_back(qca_steady(model, drive, ueff_for(model, drive, Placement::Homogeneous)).transmission);
      if (!side) T.push_back(mean_field_steady(model, drive).transmission);
      for (std::size_t i = 0; i < T.size(); ++i) {
        for (std::size_t j = 0; j < i; ++j) worst = std::max(worst, std::abs(T[i] - T[j]));
      }
    }
    out.push_back(check("cross-method", std::string(side ? "side" : "direct") + " N=1 low-intensity pairwise dT", worst,
                        1e-3, worst < 1e-3));
  }
  return out;
}

const std::map<std::string, std::function<std::vector<CheckResult>()>>& suites() {
  static const std::map<std::string, std::function<std::vector<CheckResult>()>> table = {
      {"algebra-oracle", algebra_oracle},
      {"weak-drive", weak_drive},
      {"convergence", convergence},
      {"cross-method", cross_method},
  };
  return table;
}

}  // namespace

std::vector<std::string> validation_suites() { return {"algebra-oracle", "weak-drive", "convergence", "cross-method"}; }

std::vector<CheckResult> run_validation(const std::string& suite) {
  if (suite == "all") {
    std::vector<CheckResult> all;
    for (const auto& name : validation_suites()) {
      auto part = suites().at(name)();
      all.insert(all.end(), part.begin(), part.end());
    }
    return all;
  }
  auto it = suites().find(suite);
  if (it == suites().end()) {
    throw ConfigError("suite", "unknown suite '" + suite + "' (expected algebra-oracle, weak-drive, convergence, "
                                                           "cross-method or all)");
  }
  return it->second();
}

std::string format_report(const std::vector<CheckResult>& results) {
  std::ostringstream os;
  for (const auto& r : results) {
    os << (r.passed ? "PASS" : "FAIL") << "  [" << r.suite << "] " << r.name << ": measured " << format_double(r.measured);
    if (r.threshold > 0.0) os << " (limit " << format_double(r.threshold) << ")";
    if (!r.detail.empty()) os << "  " << r.detail;
    os << '\n';
  }
  return os.str();
}

}  // namespace wqed
