#include "wqed/semiclassical.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseLU>

#include <cmath>
#include <vector>

namespace wqed {

MeanFieldResult mean_field_steady(const LatticeModel& model, const DriveSpec& drive, const MeanFieldOptions& options) {
  if (model.side_coupled()) throw ConfigError("medium", "the mean-field solver covers the direct medium only");
  if (!(options.relaxation > 0.0 && options.relaxation <= 1.0)) {
    throw ConfigError("relaxation", "under-relaxation must lie in (0, 1]");
  }
  const int n = model.n_sites;
  const auto& dq = drive.detunings.dq;
  const double U = model.onsite_U;

  // (i dq_j + Gamma_j + i U_mf(n_j)) b_j + 2i Jx (b_{j-1} + b_{j+1}) = -i Omega_L delta_{j,1}
  std::vector<Eigen::Triplet<cplx>> pattern;
  for (int j = 0; j < n; ++j) {
    pattern.emplace_back(j, j, 1.0);
    if (j + 1 < n) {
      pattern.emplace_back(j, j + 1, 2.0 * I * model.hop_Jx);
      pattern.emplace_back(j + 1, j, 2.0 * I * model.hop_Jx);
    }
  }
  Eigen::SparseMatrix<cplx> M(n, n);
  M.setFromTriplets(pattern.begin(), pattern.end());
  M.makeCompressed();
  Eigen::SparseLU<Eigen::SparseMatrix<cplx>, Eigen::COLAMDOrdering<int>> lu;
  lu.analyzePattern(M);

  Eigen::VectorXcd rhs = Eigen::VectorXcd::Zero(n);
  rhs[0] = -I * drive.Omega_L;

  auto shift = [&](double occ) { return options.uncorrected ? U * (occ - 1.0) : 2.0 * U * occ; };
  auto solve = [&](const Eigen::VectorXd& occ, Eigen::VectorXcd& b) {
    for (int j = 0; j < n; ++j) M.coeffRef(j, j) = I * (dq[j] + shift(occ[j])) + model.boundary_gamma(j);
    lu.factorize(M);
    if (lu.info() != Eigen::Success) return false;
    b = lu.solve(rhs);
    return b.allFinite();
  };

  MeanFieldResult out;
  out.occupations = Eigen::VectorXd::Zero(n);
  double lambda = options.relaxation;
  double prev_residual = std::numeric_limits<double>::infinity();
  Eigen::VectorXcd b;
  out.status = SolverStatus::Diverged;
  for (int it = 1; it <= options.max_iterations; ++it) {
    out.iterations = it;
    if (!solve(out.occupations, b)) break;
    const Eigen::VectorXd target = b.cwiseAbs2();
    const double residual = (target - out.occupations).cwiseAbs().maxCoeff();
    out.residual = residual;
    out.amplitudes = b;
    const double scale = std::max(target.cwiseAbs().maxCoeff(), 1e-300);
    if (residual <= options.tol * scale || residual == 0.0) {
      out.occupations = target;
      out.status = SolverStatus::Converged;
      break;
    }
    if (residual > prev_residual) {
      lambda = std::max(0.5 * lambda, 1e-4);
    } else {
      lambda = std::min(1.05 * lambda, options.relaxation);
    }
    prev_residual = residual;
    out.occupations += lambda * (target - out.occupations);
  }

  out.transmission = drive.I_in == 0.0 ? 0.0 : 2.0 * model.gamma_R * out.occupations[n - 1] / drive.I_in;
  if (out.status != SolverStatus::Converged && !std::isfinite(out.transmission)) {
    out.transmission = std::numeric_limits<double>::quiet_NaN();
  }
  return out;
}

}  // namespace wqed
