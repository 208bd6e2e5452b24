#pragma once

#include "wqed/lattice.hpp"

namespace wqed {

// Markovian steady-state relation for the resonator chain of the
// side-coupled medium: f_i = c0[i] + sum_j C(i, j) b_j.
struct ResonatorElimination {
  Eigen::VectorXcd c0;
  Eigen::MatrixXcd C;
};

// Solves the N x N resonator system with diagonal A_i = i*dr_i + Gamma_i and
// 2i*Jx between neighbours. Throws NumericalError when it is singular.
ResonatorElimination eliminate_resonators(const LatticeModel& model, const DriveSpec& drive);

}  // namespace wqed
