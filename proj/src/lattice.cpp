#include "wqed/lattice.hpp"

#include <cmath>

namespace wqed {

std::string to_string(Medium medium) {
  return medium == Medium::Direct ? "direct" : "side";
}

Medium medium_from_string(const std::string& name) {
  if (name == "direct" || name == "Direct") return Medium::Direct;
  if (name == "side" || name == "side_coupled" || name == "SideCoupled") return Medium::SideCoupled;
  throw ConfigError("medium", "unknown medium '" + name + "' (expected direct or side)");
}

double LatticeModel::boundary_gamma(int site) const {
  double gamma = 0.0;
  if (site == 0) gamma += gamma_L;
  if (site == n_sites - 1) gamma += gamma_R;
  return gamma;
}

namespace {

void check_nonnegative(const Eigen::VectorXd& v, const std::string& key) {
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (!std::isfinite(v[i]) || v[i] < 0.0) {
      throw ConfigError(key, "entry " + std::to_string(i) + " must be finite and nonnegative");
    }
  }
}

void check_nonnegative(double v, const std::string& key) {
  if (!std::isfinite(v) || v < 0.0) throw ConfigError(key, "must be finite and nonnegative");
}

}  // namespace

void LatticeModel::validate() const {
  if (n_sites < 1) throw ConfigError("n", "lattice needs at least one site");
  if (qubit_freq.size() != n_sites) throw ConfigError("omega_q", "expected one entry per site");
  check_nonnegative(qubit_freq, "omega_q");
  check_nonnegative(onsite_U, "u");
  check_nonnegative(hop_Jx, "jx");
  check_nonnegative(gamma_L, "gamma_l");
  check_nonnegative(gamma_R, "gamma_r");
  if (medium == Medium::Direct) {
    if (resonator_freq.size() != 0) throw ConfigError("omega_r", "not allowed for the direct medium");
    if (qr_coupling.size() != 0) throw ConfigError("g", "not allowed for the direct medium");
  } else {
    if (resonator_freq.size() != n_sites) throw ConfigError("omega_r", "expected one entry per site");
    if (qr_coupling.size() != n_sites) throw ConfigError("g", "expected one entry per site");
    check_nonnegative(resonator_freq, "omega_r");
    check_nonnegative(qr_coupling, "g");
  }
}

LatticeModel LatticeModel::scaled(double factor) const {
  LatticeModel out = *this;
  out.qubit_freq *= factor;
  out.resonator_freq *= factor;
  out.qr_coupling *= factor;
  out.onsite_U *= factor;
  out.hop_Jx *= factor;
  out.gamma_L *= factor;
  out.gamma_R *= factor;
  return out;
}

DriveSpec drive_from_intensity(const LatticeModel& model, double omega_p, double I_in) {
  if (!std::isfinite(I_in) || I_in < 0.0) throw ConfigError("i_in", "input intensity must be nonnegative");
  if (!std::isfinite(omega_p)) throw ConfigError("omega_p", "drive frequency must be finite");

  DriveSpec drive;
  drive.omega_p = omega_p;
  drive.I_in = I_in;
  // Omega_L = g_L E_p / v_g, Gamma_L = pi g_L^2 / v_g, I_in = E_p^2 / (2 pi v_g^2)
  drive.Omega_L = std::sqrt(2.0 * model.gamma_L * I_in * LatticeModel::v_g);

  const int n = model.n_sites;
  auto& d = drive.detunings;
  d.dq = model.qubit_freq.array() - omega_p;
  if (model.side_coupled()) {
    d.dr = model.resonator_freq.array() - omega_p;
    d.A.resize(n);
    for (int i = 0; i < n; ++i) d.A[i] = I * d.dr[i] + model.boundary_gamma(i);
  }
  return drive;
}

namespace {

const ParamValue* find(const ModelConfig& config, const std::string& key) {
  auto it = config.find(key);
  return it == config.end() ? nullptr : &it->second;
}

double require_scalar(const ModelConfig& config, const std::string& key) {
  const ParamValue* v = find(config, key);
  if (v == nullptr) throw ConfigError(key, "missing required parameter");
  if (const double* x = std::get_if<double>(v)) return *x;
  throw ConfigError(key, "expected a number");
}

Eigen::VectorXd require_sites(const ModelConfig& config, const std::string& key, int n) {
  const ParamValue* v = find(config, key);
  if (v == nullptr) throw ConfigError(key, "missing required parameter");
  if (const double* x = std::get_if<double>(v)) return Eigen::VectorXd::Constant(n, *x);
  if (const auto* xs = std::get_if<std::vector<double>>(v)) {
    if (static_cast<int>(xs->size()) != n) {
      throw ConfigError(key, "expected " + std::to_string(n) + " entries, got " + std::to_string(xs->size()));
    }
    return Eigen::Map<const Eigen::VectorXd>(xs->data(), n);
  }
  throw ConfigError(key, "expected a number or a per-site array");
}

}  // namespace

LatticeModel build_model(const ModelConfig& config) {
  LatticeModel model;

  const ParamValue* medium = find(config, "medium");
  if (medium == nullptr) throw ConfigError("medium", "missing required parameter");
  if (const auto* s = std::get_if<std::string>(medium)) {
    model.medium = medium_from_string(*s);
  } else {
    throw ConfigError("medium", "expected a string");
  }

  const double n = require_scalar(config, "n");
  if (n < 1.0 || n != std::floor(n)) throw ConfigError("n", "must be a positive integer");
  model.n_sites = static_cast<int>(n);

  model.qubit_freq = require_sites(config, "omega_q", model.n_sites);
  model.onsite_U = require_scalar(config, "u");
  model.gamma_L = require_scalar(config, "gamma_l");
  model.gamma_R = require_scalar(config, "gamma_r");
  if (model.n_sites > 1 || find(config, "jx") != nullptr) model.hop_Jx = require_scalar(config, "jx");

  if (model.side_coupled()) {
    model.resonator_freq = require_sites(config, "omega_r", model.n_sites);
    model.qr_coupling = require_sites(config, "g", model.n_sites);
  } else {
    if (find(config, "omega_r") != nullptr) throw ConfigError("omega_r", "resonator keys are not allowed for the direct medium");
    if (find(config, "g") != nullptr) throw ConfigError("g", "resonator keys are not allowed for the direct medium");
  }

  model.validate();
  return model;
}

namespace {

ParamValue collapse(const Eigen::VectorXd& v) {
  if (v.size() > 0 && (v.array() == v[0]).all()) return v[0];
  return std::vector<double>(v.data(), v.data() + v.size());
}

}  // namespace

ModelConfig to_config(const LatticeModel& model) {
  ModelConfig config;
  config["medium"] = to_string(model.medium);
  config["n"] = static_cast<double>(model.n_sites);
  config["omega_q"] = collapse(model.qubit_freq);
  config["u"] = model.onsite_U;
  config["jx"] = model.hop_Jx;
  config["gamma_l"] = model.gamma_L;
  config["gamma_r"] = model.gamma_R;
  if (model.side_coupled()) {
    config["omega_r"] = collapse(model.resonator_freq);
    config["g"] = collapse(model.qr_coupling);
  }
  return config;
}

}  // namespace wqed
