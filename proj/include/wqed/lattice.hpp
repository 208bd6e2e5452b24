#pragma once

#include <Eigen/Dense>

#include <complex>
#include <map>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace wqed {

using cplx = std::complex<double>;
inline constexpr cplx I{0.0, 1.0};

enum class Medium { Direct, SideCoupled };

std::string to_string(Medium medium);
Medium medium_from_string(const std::string& name);

// Raised for malformed or inconsistent input. `key()` names the offending
// configuration entry when there is one.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string key, const std::string& what)
      : std::runtime_error(key.empty() ? what : key + ": " + what), key_(std::move(key)) {}
  const std::string& key() const noexcept { return key_; }

 private:
  std::string key_;
};

// Raised when a solver meets a singular or non-finite problem.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Physical configuration of a lattice. Frequencies and rates are in units of
// the reference qubit frequency; the group velocity is fixed to 1.
struct LatticeModel {
  static constexpr double v_g = 1.0;

  Medium medium = Medium::Direct;
  int n_sites = 1;
  Eigen::VectorXd qubit_freq;      // omega_q per site
  Eigen::VectorXd resonator_freq;  // omega_r per site, SideCoupled only
  Eigen::VectorXd qr_coupling;     // g per site, SideCoupled only
  double onsite_U = 0.0;
  double hop_Jx = 0.0;             // Hamiltonian hopping is 2*Jx
  double gamma_L = 0.0;
  double gamma_R = 0.0;

  bool side_coupled() const { return medium == Medium::SideCoupled; }

  // Bath rate attached to `site` (0-based): gamma_L on the first site,
  // gamma_R on the last, both on a single-site lattice, zero in the bulk.
  double boundary_gamma(int site) const;
  double total_gamma() const { return gamma_L + gamma_R; }

  // Throws ConfigError if an invariant is broken.
  void validate() const;

  // Copy with every frequency and rate multiplied by `factor`.
  LatticeModel scaled(double factor) const;
};

// Elimination constants and detunings at a given drive frequency.
struct Detunings {
  Eigen::VectorXd dq;   // omega_q - omega_p
  Eigen::VectorXd dr;   // omega_r - omega_p (SideCoupled)
  Eigen::VectorXcd A;   // i*dr + Gamma_i (SideCoupled)
};

struct DriveSpec {
  double omega_p = 0.0;
  double I_in = 0.0;
  double Omega_L = 0.0;  // sqrt(2 * gamma_L * I_in)
  Detunings detunings;
};

DriveSpec drive_from_intensity(const LatticeModel& model, double omega_p, double I_in);

// Flat key/value configuration. Scalars broadcast over sites.
using ParamValue = std::variant<double, std::string, std::vector<double>>;
using ModelConfig = std::map<std::string, ParamValue>;

LatticeModel build_model(const ModelConfig& config);

// Inverse of build_model; per-site arrays collapse to scalars when uniform.
ModelConfig to_config(const LatticeModel& model);

}  // namespace wqed
