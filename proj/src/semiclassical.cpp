#include "wqed/semiclassical.hpp"

#include "wqed/ode.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/Sparse>
#include <Eigen/SparseLU>

#include <cmath>
#include <vector>

namespace wqed {

std::string to_string(SolverStatus status) {
  switch (status) {
    case SolverStatus::Converged: return "Converged";
    case SolverStatus::Oscillatory: return "Oscillatory";
    case SolverStatus::Diverged: return "Diverged";
  }
  return "Diverged";
}

SolverStatus status_from_string(const std::string& name) {
  if (name == "Converged") return SolverStatus::Converged;
  if (name == "Oscillatory") return SolverStatus::Oscillatory;
  if (name == "Diverged") return SolverStatus::Diverged;
  throw ConfigError("status", "unknown solver status '" + name + "'");
}

std::string to_string(Placement placement) {
  return placement == Placement::Homogeneous ? "homogeneous" : "ends_only";
}

Placement placement_from_string(const std::string& name) {
  if (name == "homogeneous" || name == "Homogeneous") return Placement::Homogeneous;
  if (name == "ends_only" || name == "EndsOnly" || name == "ends") return Placement::EndsOnly;
  throw ConfigError("placement", "unknown placement '" + name + "' (expected homogeneous or ends_only)");
}

Eigen::VectorXcd site_interactions(const LatticeModel& model, const ComplexInteraction& u) {
  const int n = model.n_sites;
  Eigen::VectorXcd out = Eigen::VectorXcd::Constant(n, u.u_eff);
  if (u.placement == Placement::EndsOnly) {
    for (int j = 1; j + 1 < n; ++j) out[j] = u.u_eff.real();
  }
  return out;
}

Eigen::VectorXcd pack(const LatticeModel& model, const SemiclassicalState& state) {
  if (!model.side_coupled()) return state.beta;
  Eigen::VectorXcd y(2 * model.n_sites);
  y << state.alpha, state.beta;
  return y;
}

void unpack(const LatticeModel& model, const Eigen::VectorXcd& y, SemiclassicalState& state) {
  const int n = model.n_sites;
  if (model.side_coupled()) {
    state.alpha = y.head(n);
    state.beta = y.tail(n);
  } else {
    state.beta = y;
    state.alpha.resize(0);
  }
}

namespace {

struct LinearEntry {
  Eigen::Index row;
  Eigen::Index col;
  cplx a;
};

// Linear part of the quasi-classical equations as (row, col, coefficient).
std::vector<LinearEntry> linear_part(const LatticeModel& model, const DriveSpec& drive) {
  const int n = model.n_sites;
  const auto& d = drive.detunings;
  std::vector<LinearEntry> L;
  auto chain = [&](Eigen::Index offset, const Eigen::VectorXd& detuning) {
    for (int j = 0; j < n; ++j) {
      L.push_back({offset + j, offset + j, -(I * detuning[j] + model.boundary_gamma(j))});
      if (j + 1 < n) {
        L.push_back({offset + j, offset + j + 1, -2.0 * I * model.hop_Jx});
        L.push_back({offset + j + 1, offset + j, -2.0 * I * model.hop_Jx});
      }
    }
  };
  if (!model.side_coupled()) {
    chain(0, d.dq);
    return L;
  }
  chain(0, d.dr);
  for (int j = 0; j < n; ++j) {
    L.push_back({n + j, n + j, -I * d.dq[j]});
    L.push_back({j, n + j, -I * model.qr_coupling[j]});
    L.push_back({n + j, j, -I * model.qr_coupling[j]});
  }
  return L;
}

void check_dim(const Eigen::VectorXcd& y, const LatticeModel& model, const Eigen::VectorXcd& u) {
  const Eigen::Index expected = model.side_coupled() ? 2 * model.n_sites : model.n_sites;
  if (y.size() != expected) throw std::invalid_argument("qca: state has wrong dimension");
  if (u.size() != model.n_sites) throw std::invalid_argument("qca: interaction needs one entry per site");
}

}  // namespace

Eigen::VectorXcd qca_rhs(const Eigen::VectorXcd& y, const LatticeModel& model, const DriveSpec& drive,
                         const Eigen::VectorXcd& u) {
  check_dim(y, model, u);
  const int n = model.n_sites;
  const auto& d = drive.detunings;
  const double J2 = 2.0 * model.hop_Jx;
  Eigen::VectorXcd dy(y.size());

  auto hop = [&](const Eigen::VectorXcd& v, Eigen::Index offset, int j) {
    cplx s = 0.0;
    if (j > 0) s += v[offset + j - 1];
    if (j + 1 < n) s += v[offset + j + 1];
    return s;
  };

  if (!model.side_coupled()) {
    for (int j = 0; j < n; ++j) {
      const cplx b = y[j];
      dy[j] = -(I * d.dq[j] + model.boundary_gamma(j)) * b - 2.0 * I * u[j] * std::norm(b) * b -
              I * J2 * hop(y, 0, j);
    }
    dy[0] -= I * drive.Omega_L;
    return dy;
  }

  for (int j = 0; j < n; ++j) {
    const cplx a = y[j];
    const cplx b = y[n + j];
    const double g = model.qr_coupling[j];
    dy[j] = -(I * d.dr[j] + model.boundary_gamma(j)) * a - I * J2 * hop(y, 0, j) - I * g * b;
    dy[n + j] = -I * d.dq[j] * b - 2.0 * I * u[j] * std::norm(b) * b - I * g * a;
  }
  dy[0] -= I * drive.Omega_L;
  return dy;
}

namespace {

void add_block(std::vector<Eigen::Triplet<double>>& t, Eigen::Index p, Eigen::Index q, cplx a, cplx b) {
  // Real form of z_p' = a z_q + b conj(z_q).
  t.emplace_back(2 * p, 2 * q, a.real() + b.real());
  t.emplace_back(2 * p, 2 * q + 1, -a.imag() + b.imag());
  t.emplace_back(2 * p + 1, 2 * q, a.imag() + b.imag());
  t.emplace_back(2 * p + 1, 2 * q + 1, a.real() - b.real());
}

Eigen::SparseMatrix<double> jacobian_sparse(const Eigen::VectorXcd& y, const LatticeModel& model,
                                            const std::vector<LinearEntry>& L, const Eigen::VectorXcd& u) {
  std::vector<Eigen::Triplet<double>> t;
  t.reserve(4 * (L.size() + model.n_sites));
  for (const auto& e : L) add_block(t, e.row, e.col, e.a, 0.0);
  const Eigen::Index offset = model.side_coupled() ? model.n_sites : 0;
  for (int j = 0; j < model.n_sites; ++j) {
    const cplx z = y[offset + j];
    add_block(t, offset + j, offset + j, -4.0 * I * u[j] * std::norm(z), -2.0 * I * u[j] * z * z);
  }
  Eigen::SparseMatrix<double> J(2 * y.size(), 2 * y.size());
  J.setFromTriplets(t.begin(), t.end());
  return J;
}

Eigen::VectorXd to_real(const Eigen::VectorXcd& z) {
  Eigen::VectorXd r(2 * z.size());
  for (Eigen::Index i = 0; i < z.size(); ++i) {
    r[2 * i] = z[i].real();
    r[2 * i + 1] = z[i].imag();
  }
  return r;
}

Eigen::VectorXcd to_complex(const Eigen::VectorXd& r) {
  Eigen::VectorXcd z(r.size() / 2);
  for (Eigen::Index i = 0; i < z.size(); ++i) z[i] = cplx(r[2 * i], r[2 * i + 1]);
  return z;
}

}  // namespace

Eigen::MatrixXd qca_jacobian(const Eigen::VectorXcd& y, const LatticeModel& model, const DriveSpec& drive,
                             const Eigen::VectorXcd& u) {
  check_dim(y, model, u);
  return Eigen::MatrixXd(jacobian_sparse(y, model, linear_part(model, drive), u));
}

double qca_transmission(const LatticeModel& model, const DriveSpec& drive, const SemiclassicalState& state) {
  if (drive.I_in == 0.0) return 0.0;
  const int last = model.n_sites - 1;
  const cplx out = model.side_coupled() ? state.alpha[last] : state.beta[last];
  return 2.0 * model.gamma_R * std::norm(out) / drive.I_in;
}

namespace {

double inf_norm(const Eigen::VectorXcd& v) { return v.size() == 0 ? 0.0 : v.cwiseAbs().maxCoeff(); }

class QcaIntegrator {
 public:
  QcaIntegrator(const LatticeModel& model, const DriveSpec& drive, const Eigen::VectorXcd& u,
                const IntegrationPolicy& policy)
      : model_(model), drive_(drive), u_(u), policy_(policy), L_(linear_part(model, drive)) {
    opt_.rtol = policy.rtol;
    opt_.atol = policy.atol;
  }

  Eigen::VectorXcd rhs(const Eigen::VectorXcd& y) const { return qca_rhs(y, model_, drive_, u_); }

  double scale(const Eigen::VectorXcd& y) const { return std::max(1.0, inf_norm(y)); }

  double transmission(const Eigen::VectorXcd& y) const {
    if (drive_.I_in == 0.0) return 0.0;
    // alpha_N for the side-coupled layout, beta_N for the direct one
    return 2.0 * model_.gamma_R * std::norm(y[model_.n_sites - 1]) / drive_.I_in;
  }

  // Advances y to t1; false on divergence or integrator failure.
  bool advance(double& t, double t1, Eigen::VectorXcd& y, long& steps, double h_max = 0.0) {
    auto f = [this](double, const Eigen::VectorXcd& s) -> Eigen::VectorXcd { return rhs(s); };
    bool blown = false;
    auto observer = [&](double, const Eigen::VectorXcd& s) {
      if (inf_norm(s) > policy_.divergence_norm) {
        blown = true;
        return false;
      }
      return true;
    };
    ode::Dopri5Options opt = opt_;
    if (h_max > 0.0) {
      opt.h_max = h_max;
      opt.h_initial = std::min(opt.h_initial > 0.0 ? opt.h_initial : h_max, h_max);
    }
    const ode::Dopri5Stats stats = ode::dopri5(f, t, t1, y, opt, observer);
    steps += stats.accepted;
    if (h_max <= 0.0) opt_.h_initial = stats.h_last;
    t = t1;
    return !blown && stats.status == ode::Dopri5Status::Ok;
  }

  // Newton iteration on rhs(y) = 0 with the analytic Jacobian.
  bool newton(Eigen::VectorXcd& y) const {
    Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> lu;
    bool analysed = false;
    double prev = inf_norm(rhs(y));
    for (int it = 0; it < 60; ++it) {
      const Eigen::VectorXcd F = rhs(y);
      const double r = inf_norm(F);
      if (r < 1e-15 * scale(y)) return true;
      Eigen::SparseMatrix<double> J = jacobian_sparse(y, model_, L_, u_);
      J.makeCompressed();
      if (!analysed) {
        lu.analyzePattern(J);
        analysed = true;
      }
      lu.factorize(J);
      if (lu.info() != Eigen::Success) return false;
      const Eigen::VectorXd dx = lu.solve((-to_real(F)).eval());
      if (!dx.allFinite()) return false;
      y += to_complex(dx);
      const double r_new = inf_norm(rhs(y));
      if (!std::isfinite(r_new)) return false;
      if (r_new < 1e-15 * scale(y)) return true;
      if (it > 8 && r_new > 0.5 * prev) return r_new < policy_.steady_tol * scale(y) * 1e-2;
      prev = r_new;
    }
    return inf_norm(rhs(y)) < policy_.steady_tol * scale(y) * 1e-2;
  }

  bool stable(const Eigen::VectorXcd& y) const {
    if (y.size() > 200) return true;  // left to the window check
    const Eigen::MatrixXd J = Eigen::MatrixXd(jacobian_sparse(y, model_, L_, u_));
    Eigen::EigenSolver<Eigen::MatrixXd> es(J, false);
    if (es.info() != Eigen::Success) return false;
    return es.eigenvalues().real().maxCoeff() < 0.0;
  }

  // The fixed point must hold under integration for a while.
  bool holds(const Eigen::VectorXcd& y_star, double window, long& steps) {
    Eigen::VectorXcd y = y_star;
    double t = 0.0;
    const double tol = policy_.steady_tol * scale(y_star);
    auto f = [this](double, const Eigen::VectorXcd& s) -> Eigen::VectorXcd { return rhs(s); };
    bool ok = true;
    auto observer = [&](double, const Eigen::VectorXcd& s) {
      if (inf_norm(rhs(s)) >= tol || inf_norm(s - y_star) > 1e-8 * scale(y_star)) {
        ok = false;
        return false;
      }
      return true;
    };
    ode::Dopri5Options opt = opt_;
    opt.h_max = window / 40.0;
    opt.h_initial = opt.h_max / 10.0;
    const ode::Dopri5Stats stats = ode::dopri5(f, t, window, y, opt, observer);
    steps += stats.accepted;
    return ok && stats.status == ode::Dopri5Status::Ok;
  }

 private:
  const LatticeModel& model_;
  const DriveSpec& drive_;
  const Eigen::VectorXcd& u_;
  const IntegrationPolicy& policy_;
  std::vector<LinearEntry> L_;
  ode::Dopri5Options opt_;
};

// First autocorrelation peak above `threshold` after the signal decorrelates.
double detect_period(const std::vector<double>& x, double dt, double threshold) {
  const std::size_t n = x.size();
  if (n < 16) return std::numeric_limits<double>::quiet_NaN();
  double mean = 0.0;
  for (double v : x) mean += v;
  mean /= static_cast<double>(n);
  std::vector<double> d(n);
  double var = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    d[i] = x[i] - mean;
    var += d[i] * d[i];
  }
  if (!(var > 1e-30 * n * std::max(1.0, mean * mean))) return std::numeric_limits<double>::quiet_NaN();

  const std::size_t max_lag = n / 2;
  std::vector<double> ac(max_lag + 1);
  for (std::size_t lag = 0; lag <= max_lag; ++lag) {
    double s = 0.0, s0 = 0.0, s1 = 0.0;
    for (std::size_t i = 0; i + lag < n; ++i) {
      s += d[i] * d[i + lag];
      s0 += d[i] * d[i];
      s1 += d[i + lag] * d[i + lag];
    }
    ac[lag] = s / std::sqrt(s0 * s1);
  }
  std::size_t lag = 1;
  while (lag < max_lag && ac[lag] > 0.0) ++lag;
  for (; lag + 1 < max_lag; ++lag) {
    if (ac[lag] > threshold && ac[lag] >= ac[lag - 1] && ac[lag] >= ac[lag + 1]) {
      const double denom = ac[lag - 1] - 2.0 * ac[lag] + ac[lag + 1];
      const double shift = denom != 0.0 ? 0.5 * (ac[lag - 1] - ac[lag + 1]) / denom : 0.0;
      return (static_cast<double>(lag) + shift) * dt;
    }
  }
  return std::numeric_limits<double>::quiet_NaN();
}

}  // namespace

QcaResult qca_steady(const LatticeModel& model, const DriveSpec& drive, const Eigen::VectorXcd& u,
                     const IntegrationPolicy& policy) {
  const Eigen::Index dim = model.side_coupled() ? 2 * model.n_sites : model.n_sites;
  Eigen::VectorXcd y = policy.initial ? *policy.initial : Eigen::VectorXcd::Zero(dim);
  check_dim(y, model, u);
  if (!y.allFinite()) throw std::invalid_argument("qca_steady: initial state is not finite");

  QcaIntegrator integ(model, drive, u, policy);
  QcaResult result;
  SemiclassicalState& st = result.state;
  auto finish = [&](SolverStatus status) {
    st.status = status;
    unpack(model, y, st);
    st.residual = inf_norm(integ.rhs(y));
    result.transmission = status == SolverStatus::Oscillatory ? st.averaged_T : integ.transmission(y);
    if (status == SolverStatus::Diverged) result.transmission = std::numeric_limits<double>::quiet_NaN();
    return result;
  };

  const double gamma_min = std::max(1e-12, std::min(model.gamma_L, model.gamma_R));
  const double chunk = std::clamp(2.0 / gamma_min, 25.0, 500.0);
  const double window = std::clamp(5.0 / gamma_min, 50.0, 1000.0);

  double t = 0.0;
  int quiet_chunks = 0;
  while (t < policy.t_max) {
    if (!integ.advance(t, std::min(policy.t_max, t + chunk), y, st.steps)) {
      st.t_end = t;
      return finish(SolverStatus::Diverged);
    }
    const double r = inf_norm(integ.rhs(y));
    const double sc = integ.scale(y);
    quiet_chunks = r < policy.steady_tol * sc ? quiet_chunks + 1 : 0;
    if (quiet_chunks >= 2) {
      st.t_end = t;
      return finish(SolverStatus::Converged);
    }
    if (r < 1e-3 * sc) {
      Eigen::VectorXcd y_star = y;
      const double ref = std::max(inf_norm(y), 1e-300);
      if (integ.newton(y_star) && inf_norm(y_star - y) <= 0.05 * ref && integ.stable(y_star) &&
          integ.holds(y_star, window, st.steps)) {
        y = y_star;
        st.t_end = t;
        return finish(SolverStatus::Converged);
      }
    }
  }
  st.t_end = t;

  // No fixed point reached: sample the transmission and average over whole periods.
  const double dt_s = 0.25;
  const std::size_t samples = 8192;
  std::vector<double> series;
  series.reserve(samples);
  for (std::size_t i = 0; i < samples; ++i) {
    if (!integ.advance(t, t + dt_s, y, st.steps)) {
      st.t_end = t;
      return finish(SolverStatus::Diverged);
    }
    series.push_back(integ.transmission(y));
  }

  const double period = detect_period(series, dt_s, policy.autocorrelation_min);
  double avg = 0.0;
  if (std::isfinite(period) && period > 0.0) {
    const int per_period = std::max(64, static_cast<int>(std::ceil(period / dt_s)));
    const double dt = period / per_period;
    const int total = per_period * policy.average_periods;
    double prev = integ.transmission(y);
    for (int i = 0; i < total; ++i) {
      if (!integ.advance(t, t + dt, y, st.steps)) {
        st.t_end = t;
        return finish(SolverStatus::Diverged);
      }
      const double cur = integ.transmission(y);
      avg += 0.5 * (prev + cur);
      prev = cur;
    }
    avg /= total;
    st.period = period;
  } else {
    for (std::size_t i = 1; i < series.size(); ++i) avg += 0.5 * (series[i - 1] + series[i]);
    avg /= static_cast<double>(series.size() - 1);
  }
  st.averaged_T = avg;
  st.t_end = t;
  return finish(SolverStatus::Oscillatory);
}

}  // namespace wqed
