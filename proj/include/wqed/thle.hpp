#pragma once

#include "wqed/boson.hpp"
#include "wqed/elimination.hpp"
#include "wqed/lattice.hpp"

#include <Eigen/Sparse>

#include <cstddef>
#include <limits>
#include <memory>
#include <string>
#include <vector>

namespace wqed {

struct AssemblyOptions {
  std::size_t max_variables = 1'000'000;
};

// dS/dt = Z S + Omega over the truncated basis, S ordered as enumerate_basis.
struct LinearSystem {
  int n_sites = 0;
  int m = 0;
  std::shared_ptr<const std::vector<NormalMonomial>> basis;
  Eigen::SparseMatrix<cplx, Eigen::RowMajor> Z;
  Eigen::VectorXcd Omega;

  Eigen::Index size() const { return Omega.size(); }
  // Row of an in-basis monomial; throws ConfigError otherwise.
  Eigen::Index index_of(const NormalMonomial& op) const;
  Eigen::MatrixXcd dense_Z() const { return Eigen::MatrixXcd(Z); }
};

LinearSystem assemble_linear_system(const LatticeModel& model, const DriveSpec& drive, int m,
                                    const AssemblyOptions& options = {});
// Side-coupled assembly with a precomputed resonator elimination.
LinearSystem assemble_linear_system(const LatticeModel& model, const DriveSpec& drive,
                                    const ResonatorElimination& elim, int m, const AssemblyOptions& options = {});

// One line per basis element: "d<label>/dt = ..." followed by the polynomial.
std::string format_equations(const LatticeModel& model, const DriveSpec& drive, int m);
// (row, col, re, im) triplets of Z, then the nonzero Omega entries with col = -1.
std::string format_matrix(const LinearSystem& sys);

struct SolverOptions {
  double residual_tol = 1e-10;
  double condition_warning = 1e12;
  Eigen::Index dense_limit = 400;  // larger systems use a sparse LU
};

struct SteadyState {
  int n_sites = 0;
  int m = 0;
  std::shared_ptr<const std::vector<NormalMonomial>> basis;
  Eigen::VectorXcd S;
  double residual = 0.0;
  double rcond = std::numeric_limits<double>::quiet_NaN();  // dense path only
  std::vector<std::string> warnings;

  // <op> for any monomial of the basis; 1 for the identity.
  cplx expectation(const NormalMonomial& op) const;
  double occupation(int site) const { return expectation(NormalMonomial::number(n_sites, site)).real(); }
};

// S = -Z^{-1} Omega. Throws NumericalError if Z is singular.
SteadyState steady_state(const LinearSystem& sys, const SolverOptions& options = {});

struct EvolveOptions {
  double t_final = 0.0;
  double output_interval = 0.0;  // 0 records only the initial and final states
  double rtol = 1e-10;
  double atol = 1e-14;
};

struct Trajectory {
  std::vector<double> t;
  std::vector<Eigen::VectorXcd> S;
};

// Integrates dS/dt = Z S + Omega from S0 (the vacuum when S0 is empty).
Trajectory time_evolve(const LinearSystem& sys, const Eigen::VectorXcd& S0, const EvolveOptions& options);

// Largest real part of the spectrum of Z (dense eigen-decomposition).
double spectral_abscissa(const LinearSystem& sys);

// Intensity used in place of I_in = 0, where T is defined by its weak-drive limit.
inline constexpr double kReferenceIntensity = 1e-10;

double transmission_direct(const SteadyState& ss, const LatticeModel& model, const DriveSpec& drive);
// <f_N† f_N> from the elimination constants and the qubit moments.
double output_occupation_side(const SteadyState& ss, const ResonatorElimination& elim);
double transmission_side(const SteadyState& ss, const ResonatorElimination& elim, const LatticeModel& model,
                         const DriveSpec& drive);

struct ThleResult {
  double transmission = 0.0;
  SteadyState state;
};

// Full pipeline for one (omega_p, I_in) point.
ThleResult thle_point(const LatticeModel& model, double omega_p, double I_in, int m,
                      const SolverOptions& solver = {}, const AssemblyOptions& assembly = {});

}  // namespace wqed
