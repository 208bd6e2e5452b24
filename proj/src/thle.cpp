#include "wqed/thle.hpp"

#include "wqed/ode.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <Eigen/SparseLU>

#include <charconv>
#include <cmath>
#include <mutex>
#include <sstream>

namespace wqed {

namespace {

std::shared_ptr<const std::vector<NormalMonomial>> cached_basis(int n_sites, int m) {
  static std::mutex mutex;
  static std::map<std::pair<int, int>, std::shared_ptr<const std::vector<NormalMonomial>>> cache;
  std::lock_guard lock(mutex);
  auto& slot = cache[{n_sites, m}];
  if (!slot) slot = std::make_shared<const std::vector<NormalMonomial>>(enumerate_basis(n_sites, m));
  return slot;
}

void check_dimension(int n_sites, int m, const AssemblyOptions& options) {
  if (m < 1) throw ConfigError("m", "truncation m must be at least 1");
  const double dim = std::pow(m + 1.0, 2.0 * n_sites) - 1.0;
  if (dim > static_cast<double>(options.max_variables)) {
    std::ostringstream os;
    os << "THLE basis for n = " << n_sites << ", m = " << m << " has " << dim << " variables, above the cap of "
       << options.max_variables << "; use a smaller n or m";
    throw ConfigError("m", os.str());
  }
}

LinearSystem assemble(const HeisenbergGenerator& gen, int n_sites, int m) {
  LinearSystem sys;
  sys.n_sites = n_sites;
  sys.m = m;
  sys.basis = cached_basis(n_sites, m);
  const auto& basis = *sys.basis;
  const auto dim = static_cast<Eigen::Index>(basis.size());

  sys.Omega = Eigen::VectorXcd::Zero(dim);
  std::vector<Eigen::Triplet<cplx>> triplets;
  triplets.reserve(basis.size() * 8);
  const TruncationRule trunc{m};
  for (Eigen::Index row = 0; row < dim; ++row) {
    const OperatorPolynomial rhs = gen.rhs(basis[row], trunc);
    for (const auto& [mono, c] : rhs) {
      if (mono.is_identity()) {
        sys.Omega[row] += c;
      } else {
        triplets.emplace_back(row, static_cast<Eigen::Index>(basis_index(mono, m)), c);
      }
    }
  }
  sys.Z.resize(dim, dim);
  sys.Z.setFromTriplets(triplets.begin(), triplets.end());
  sys.Z.makeCompressed();
  return sys;
}

}  // namespace

Eigen::Index LinearSystem::index_of(const NormalMonomial& op) const {
  if (op.n_sites() != n_sites || op.is_identity() || op.max_exponent() > m) {
    throw ConfigError("m", "operator " + op.to_string() + " is not in the truncated basis");
  }
  return static_cast<Eigen::Index>(basis_index(op, m));
}

LinearSystem assemble_linear_system(const LatticeModel& model, const DriveSpec& drive, int m,
                                    const AssemblyOptions& options) {
  check_dimension(model.n_sites, m, options);
  if (model.side_coupled()) return assemble_linear_system(model, drive, eliminate_resonators(model, drive), m, options);
  return assemble(HeisenbergGenerator(model, drive), model.n_sites, m);
}

LinearSystem assemble_linear_system(const LatticeModel& model, const DriveSpec& drive,
                                    const ResonatorElimination& elim, int m, const AssemblyOptions& options) {
  check_dimension(model.n_sites, m, options);
  return assemble(HeisenbergGenerator(model, drive, elim), model.n_sites, m);
}

namespace {

std::string number(double x) {
  char buf[32];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, end);
}

}  // namespace

std::string format_equations(const LatticeModel& model, const DriveSpec& drive, int m) {
  const HeisenbergGenerator gen(model, drive);
  const TruncationRule trunc{m};
  std::ostringstream os;
  for (const NormalMonomial& op : *cached_basis(model.n_sites, m)) {
    os << op.label() << ": d<" << op.to_string() << ">/dt = " << gen.rhs(op, trunc).to_string() << '\n';
  }
  return os.str();
}

std::string format_matrix(const LinearSystem& sys) {
  std::ostringstream os;
  for (Eigen::Index row = 0; row < sys.Z.outerSize(); ++row) {
    for (decltype(sys.Z)::InnerIterator it(sys.Z, row); it; ++it) {
      os << it.row() << ' ' << it.col() << ' ' << number(it.value().real()) << ' ' << number(it.value().imag())
         << '\n';
    }
  }
  for (Eigen::Index row = 0; row < sys.size(); ++row) {
    if (sys.Omega[row] != cplx(0.0)) {
      os << row << " -1 " << number(sys.Omega[row].real()) << ' ' << number(sys.Omega[row].imag()) << '\n';
    }
  }
  return os.str();
}

cplx SteadyState::expectation(const NormalMonomial& op) const {
  if (op.n_sites() != n_sites) throw std::invalid_argument("expectation: operator has wrong site count");
  if (op.is_identity()) return 1.0;
  if (op.max_exponent() > m) {
    throw ConfigError("m", "moment " + op.label() + " needs truncation m >= " + std::to_string(op.max_exponent()));
  }
  return S[static_cast<Eigen::Index>(basis_index(op, m))];
}

namespace {

template <class Solver>
double solve_refined(const Solver& solver, const LinearSystem& sys, Eigen::VectorXcd& S, double tol) {
  S = solver.solve((-sys.Omega).eval());
  Eigen::VectorXcd r = sys.Z * S + sys.Omega;
  double residual = r.norm();
  for (int pass = 0; pass < 3 && residual > tol; ++pass) {
    Eigen::VectorXcd correction = solver.solve((-r).eval());
    Eigen::VectorXcd candidate = S + correction;
    Eigen::VectorXcd r2 = sys.Z * candidate + sys.Omega;
    if (!(r2.norm() < residual)) break;
    S = std::move(candidate);
    r = std::move(r2);
    residual = r.norm();
  }
  return residual;
}

void check_invariants(SteadyState& ss) {
  for (int site = 0; site < ss.n_sites; ++site) {
    const cplx n = ss.expectation(NormalMonomial::number(ss.n_sites, site));
    const cplx b = ss.expectation(NormalMonomial::annihilator(ss.n_sites, site));
    const double tol = 1e-8 * std::max(1.0, std::abs(n));
    const std::string where = "site " + std::to_string(site + 1);
    if (std::abs(n.imag()) > tol) ss.warnings.push_back(where + ": occupation has an imaginary part");
    if (n.real() < -tol) ss.warnings.push_back(where + ": negative occupation (truncation too small?)");
    if (std::norm(b) > n.real() + tol) ss.warnings.push_back(where + ": |<b>|^2 exceeds <b†b>");
    if (n.real() > ss.m + tol) ss.warnings.push_back(where + ": occupation exceeds the truncation m");
  }
}

}  // namespace

SteadyState steady_state(const LinearSystem& sys, const SolverOptions& options) {
  SteadyState ss;
  ss.n_sites = sys.n_sites;
  ss.m = sys.m;
  ss.basis = sys.basis;

  if (sys.size() <= options.dense_limit) {
    const Eigen::MatrixXcd Zd = sys.dense_Z();
    Eigen::PartialPivLU<Eigen::MatrixXcd> lu(Zd);
    const double pivot = lu.matrixLU().diagonal().cwiseAbs().minCoeff();
    ss.rcond = lu.rcond();
    if (!(pivot > 0.0) || !std::isfinite(ss.rcond) || ss.rcond == 0.0) {
      throw NumericalError("THLE matrix Z is singular");
    }
    ss.residual = solve_refined(lu, sys, ss.S, options.residual_tol);
    if (ss.rcond < 1.0 / options.condition_warning) {
      ss.warnings.push_back("Z is ill-conditioned (reciprocal condition estimate " + number(ss.rcond) + ")");
    }
  } else {
    Eigen::SparseMatrix<cplx> Zc = sys.Z;
    Eigen::SparseLU<Eigen::SparseMatrix<cplx>, Eigen::COLAMDOrdering<int>> lu;
    lu.analyzePattern(Zc);
    lu.factorize(Zc);
    if (lu.info() != Eigen::Success) throw NumericalError("sparse LU of Z failed: " + lu.lastErrorMessage());
    ss.residual = solve_refined(lu, sys, ss.S, options.residual_tol);
  }

  if (!ss.S.allFinite()) throw NumericalError("THLE steady state is not finite");
  if (ss.residual > options.residual_tol) {
    ss.warnings.push_back("residual " + number(ss.residual) + " above tolerance " + number(options.residual_tol));
  }
  check_invariants(ss);
  return ss;
}

Trajectory time_evolve(const LinearSystem& sys, const Eigen::VectorXcd& S0, const EvolveOptions& options) {
  Eigen::VectorXcd y = S0.size() == 0 ? Eigen::VectorXcd::Zero(sys.size()) : S0;
  if (y.size() != sys.size()) throw std::invalid_argument("time_evolve: initial state has wrong dimension");
  if (!y.allFinite()) throw NumericalError("time_evolve: initial state is not finite");

  auto rhs = [&sys](double, const Eigen::VectorXcd& s) -> Eigen::VectorXcd { return sys.Z * s + sys.Omega; };

  Trajectory traj;
  traj.t.push_back(0.0);
  traj.S.push_back(y);
  if (!(options.t_final > 0.0)) return traj;

  ode::Dopri5Options opt;
  opt.rtol = options.rtol;
  opt.atol = options.atol;
  const double interval = options.output_interval > 0.0 ? options.output_interval : options.t_final;

  double t = 0.0;
  while (t < options.t_final) {
    const double t_next = std::min(options.t_final, t + interval);
    const ode::Dopri5Stats stats = ode::dopri5(rhs, t, t_next, y, opt);
    if (stats.status != ode::Dopri5Status::Ok) {
      throw NumericalError("time_evolve: integration failed near t = " + number(t) +
                           (stats.status == ode::Dopri5Status::NonFinite ? " (non-finite state)" : ""));
    }
    opt.h_initial = stats.h_last;
    t = t_next;
    traj.t.push_back(t);
    traj.S.push_back(y);
  }
  return traj;
}

double spectral_abscissa(const LinearSystem& sys) {
  if (sys.size() > 4000) throw ConfigError("m", "spectral abscissa needs a dense eigen-decomposition; system too large");
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(sys.dense_Z(), false);
  if (es.info() != Eigen::Success) throw NumericalError("eigenvalue computation for Z did not converge");
  return es.eigenvalues().real().maxCoeff();
}

double transmission_direct(const SteadyState& ss, const LatticeModel& model, const DriveSpec& drive) {
  if (model.side_coupled()) throw ConfigError("medium", "transmission_direct needs the direct medium");
  if (drive.I_in == 0.0) {
    const DriveSpec ref = drive_from_intensity(model, drive.omega_p, kReferenceIntensity);
    const SteadyState weak = steady_state(assemble_linear_system(model, ref, ss.m));
    return transmission_direct(weak, model, ref);
  }
  return 2.0 * model.gamma_R * ss.occupation(model.n_sites - 1) / drive.I_in;
}

double output_occupation_side(const SteadyState& ss, const ResonatorElimination& elim) {
  const int n = ss.n_sites;
  const int last = n - 1;
  const cplx c0 = elim.c0[last];
  double out = std::norm(c0);
  for (int k = 0; k < n; ++k) {
    const cplx b = ss.expectation(NormalMonomial::annihilator(n, k));
    out += 2.0 * (std::conj(c0) * elim.C(last, k) * b).real();
  }
  cplx quad = 0.0;
  for (int j = 0; j < n; ++j) {
    for (int k = 0; k < n; ++k) {
      NormalMonomial mono(n);
      if (j == k) {
        mono.set(j, 1, 1);
      } else {
        mono.set(j, 1, 0);
        mono.set(k, 0, 1);
      }
      quad += std::conj(elim.C(last, j)) * elim.C(last, k) * ss.expectation(mono);
    }
  }
  return out + quad.real();
}

double transmission_side(const SteadyState& ss, const ResonatorElimination& elim, const LatticeModel& model,
                         const DriveSpec& drive) {
  if (!model.side_coupled()) throw ConfigError("medium", "transmission_side needs the side-coupled medium");
  if (drive.I_in == 0.0) {
    const DriveSpec ref = drive_from_intensity(model, drive.omega_p, kReferenceIntensity);
    const ResonatorElimination ref_elim = eliminate_resonators(model, ref);
    const SteadyState weak = steady_state(assemble_linear_system(model, ref, ref_elim, ss.m));
    return transmission_side(weak, ref_elim, model, ref);
  }
  return 2.0 * model.gamma_R * output_occupation_side(ss, elim) / drive.I_in;
}

ThleResult thle_point(const LatticeModel& model, double omega_p, double I_in, int m, const SolverOptions& solver,
                      const AssemblyOptions& assembly) {
  const DriveSpec drive = drive_from_intensity(model, omega_p, I_in == 0.0 ? kReferenceIntensity : I_in);
  ThleResult out;
  if (model.side_coupled()) {
    const ResonatorElimination elim = eliminate_resonators(model, drive);
    out.state = steady_state(assemble_linear_system(model, drive, elim, m, assembly), solver);
    out.transmission = transmission_side(out.state, elim, model, drive);
  } else {
    out.state = steady_state(assemble_linear_system(model, drive, m, assembly), solver);
    out.transmission = transmission_direct(out.state, model, drive);
  }
  return out;
}

}  // namespace wqed
