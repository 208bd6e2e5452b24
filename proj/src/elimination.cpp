#include "wqed/elimination.hpp"

#include <cmath>

namespace wqed {

ResonatorElimination eliminate_resonators(const LatticeModel& model, const DriveSpec& drive) {
  if (!model.side_coupled()) throw ConfigError("medium", "resonator elimination needs the side-coupled medium");
  const int n = model.n_sites;

  Eigen::MatrixXcd M = Eigen::MatrixXcd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    M(i, i) = drive.detunings.A[i];
    if (i + 1 < n) {
      M(i, i + 1) = 2.0 * I * model.hop_Jx;
      M(i + 1, i) = 2.0 * I * model.hop_Jx;
    }
  }

  Eigen::FullPivLU<Eigen::MatrixXcd> lu(M);
  const double scale = M.cwiseAbs().maxCoeff();
  if (scale == 0.0 || !lu.isInvertible() || lu.rcond() < 1e-14) {
    throw NumericalError("resonator matrix is singular (no bath damping at a resonant drive?)");
  }

  // 0 = -M f - i g b - i Omega_L e_1
  Eigen::VectorXcd drive_vec = Eigen::VectorXcd::Zero(n);
  drive_vec[0] = -I * drive.Omega_L;
  const Eigen::MatrixXcd coupling = (-I * model.qr_coupling.cast<cplx>()).asDiagonal();

  ResonatorElimination elim;
  elim.c0 = lu.solve(drive_vec);
  elim.C = lu.solve(coupling);
  return elim;
}

}  // namespace wqed
