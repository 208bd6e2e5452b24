#pragma once

#include "wqed/lattice.hpp"

#include <limits>
#include <optional>
#include <string>

namespace wqed {

enum class SolverStatus { Converged, Oscillatory, Diverged };
std::string to_string(SolverStatus status);
SolverStatus status_from_string(const std::string& name);

enum class Placement { Homogeneous, EndsOnly };
std::string to_string(Placement placement);
Placement placement_from_string(const std::string& name);

struct ComplexInteraction {
  cplx u_eff = 0.0;
  Placement placement = Placement::Homogeneous;
  // Im(u_eff) > 0 would pump rather than absorb photons.
  bool gains() const { return u_eff.imag() > 0.0; }
};

// Interaction felt by each site. EndsOnly keeps the complex value on the
// first and last sites and only its real part in the bulk.
Eigen::VectorXcd site_interactions(const LatticeModel& model, const ComplexInteraction& u);
inline Eigen::VectorXcd site_interactions(const LatticeModel& model, double U) {
  return Eigen::VectorXcd::Constant(model.n_sites, U);
}

struct SemiclassicalState {
  Eigen::VectorXcd beta;   // qubit amplitudes
  Eigen::VectorXcd alpha;  // resonator amplitudes (side-coupled)
  SolverStatus status = SolverStatus::Converged;
  double averaged_T = std::numeric_limits<double>::quiet_NaN();  // set when Oscillatory
  double residual = 0.0;                                         // |rhs|_inf at termination
  double period = std::numeric_limits<double>::quiet_NaN();
  double t_end = 0.0;
  long steps = 0;
};

// Packs the state as beta (direct) or [alpha, beta] (side-coupled).
Eigen::VectorXcd pack(const LatticeModel& model, const SemiclassicalState& state);
void unpack(const LatticeModel& model, const Eigen::VectorXcd& y, SemiclassicalState& state);

// Time derivative of the packed quasi-classical state with per-site interaction u.
Eigen::VectorXcd qca_rhs(const Eigen::VectorXcd& y, const LatticeModel& model, const DriveSpec& drive,
                         const Eigen::VectorXcd& u);
inline Eigen::VectorXcd qca_rhs(const Eigen::VectorXcd& y, const LatticeModel& model, const DriveSpec& drive,
                                double U) {
  return qca_rhs(y, model, drive, site_interactions(model, U));
}
inline Eigen::VectorXcd qca_rhs(const Eigen::VectorXcd& y, const LatticeModel& model, const DriveSpec& drive,
                                const ComplexInteraction& u) {
  return qca_rhs(y, model, drive, site_interactions(model, u));
}

// 2N x 2N (direct) or 4N x 4N (side) real Jacobian of qca_rhs in the
// (Re y_0, Im y_0, Re y_1, ...) ordering.
Eigen::MatrixXd qca_jacobian(const Eigen::VectorXcd& y, const LatticeModel& model, const DriveSpec& drive,
                             const Eigen::VectorXcd& u);

struct IntegrationPolicy {
  double t_max = 2e4;
  double steady_tol = 1e-10;      // |rhs|_inf < steady_tol * max(1, |y|_inf)
  double divergence_norm = 1e6;
  int average_periods = 20;
  double autocorrelation_min = 0.8;
  double rtol = 1e-9;
  double atol = 1e-13;
  std::optional<Eigen::VectorXcd> initial;  // packed state; zero when absent
};

struct QcaResult {
  double transmission = 0.0;
  SemiclassicalState state;
};

double qca_transmission(const LatticeModel& model, const DriveSpec& drive, const SemiclassicalState& state);

QcaResult qca_steady(const LatticeModel& model, const DriveSpec& drive, const Eigen::VectorXcd& u,
                     const IntegrationPolicy& policy = {});
inline QcaResult qca_steady(const LatticeModel& model, const DriveSpec& drive, double U,
                            const IntegrationPolicy& policy = {}) {
  return qca_steady(model, drive, site_interactions(model, U), policy);
}
inline QcaResult qca_steady(const LatticeModel& model, const DriveSpec& drive, const ComplexInteraction& u,
                            const IntegrationPolicy& policy = {}) {
  return qca_steady(model, drive, site_interactions(model, u), policy);
}

// Single-qubit steady-state moments behind the direct-medium U_eff.
struct DirectMoments {
  double Sx = 0.0;  // Re <b>
  double Sy = 0.0;  // Im <b>
  cplx beta_ss = 0.0;
};
DirectMoments direct_moments(double delta, double Gamma, double Omega, double U);

ComplexInteraction ueff_direct(double delta, double Gamma, double Omega, double U);

// Single-pair moments behind the side-coupled U_eff.
struct SideMoments {
  cplx E1 = 0.0;
  cplx E2 = 0.0;
  double S11 = 0.0;
  cplx S01 = 0.0;
  cplx F01 = 0.0;
};
SideMoments side_moments(double dq, double dr, double Gamma, double g, double Omega, double U);

ComplexInteraction ueff_side(double dq, double dr, double Gamma, double g, double Omega, double U);

// U_eff from the first site's parameters with Gamma = gamma_L + gamma_R.
// Falls back to the real U when the drive vanishes.
ComplexInteraction ueff_for(const LatticeModel& model, const DriveSpec& drive, Placement placement);
// Per-site variant for inhomogeneous chains: each site uses its own detunings and coupling.
Eigen::VectorXcd ueff_per_site(const LatticeModel& model, const DriveSpec& drive);

struct MeanFieldOptions {
  double relaxation = 0.5;
  int max_iterations = 200000;
  double tol = 1e-13;
  // Literal mean-field interaction U(<n> - 1) without the factor 2.
  bool uncorrected = false;
};

struct MeanFieldResult {
  Eigen::VectorXd occupations;
  Eigen::VectorXcd amplitudes;
  double transmission = 0.0;
  SolverStatus status = SolverStatus::Converged;
  int iterations = 0;
  double residual = 0.0;
};

MeanFieldResult mean_field_steady(const LatticeModel& model, const DriveSpec& drive,
                                  const MeanFieldOptions& options = {});

}  // namespace wqed
