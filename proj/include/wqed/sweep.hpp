#pragma once

#include "wqed/config.hpp"
#include "wqed/lattice.hpp"
#include "wqed/semiclassical.hpp"
#include "wqed/thle.hpp"

#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace wqed {

enum class Method { THLE, QCA, MQCA, MF };
std::string to_string(Method method);
Method method_from_string(const std::string& name);

struct SweepPlan {
  LatticeModel model;
  std::vector<double> omega_p;
  std::vector<double> i_in;
  std::vector<Method> methods;
  int m = 0;  // THLE truncation
  Placement placement = Placement::Homogeneous;
  bool continuation = false;  // QCA/MQCA warm-start along ascending omega_p
  int threads = 0;            // 0 = hardware concurrency

  IntegrationPolicy policy;
  SolverOptions solver;
  AssemblyOptions assembly;
  MeanFieldOptions mean_field;

  // Throws ConfigError before any computation.
  void validate() const;
  std::size_t record_count() const { return methods.size() * omega_p.size() * i_in.size(); }
};

SweepPlan make_plan(const SweepConfig& config);

// Per-point extras that are not part of the CSV table.
struct Diagnostics {
  double u_eff_re = std::numeric_limits<double>::quiet_NaN();
  double u_eff_im = std::numeric_limits<double>::quiet_NaN();
  double period = std::numeric_limits<double>::quiet_NaN();
  long iterations = 0;
  std::string message;
};

struct SweepRecord {
  Method method = Method::THLE;
  int n = 1;
  std::optional<int> m;
  double omega_p = 0.0;
  double i_in = 0.0;
  double transmission = 0.0;
  SolverStatus status = SolverStatus::Converged;
  double residual = 0.0;
  double wall_time_ms = 0.0;
  Diagnostics diagnostics;
};

// Field-wise equality with NaN == NaN; `with_diagnostics` also compares extras.
bool same_record(const SweepRecord& a, const SweepRecord& b, bool with_diagnostics = true);

// One record per (method, I_in, omega_p), ordered by the plan's method list,
// then I_in, then omega_p. Point failures become Diverged records.
std::vector<SweepRecord> run_sweep(const SweepPlan& plan);

// Evaluates a single point; used by run_sweep and handy in tests.
SweepRecord evaluate_point(const SweepPlan& plan, Method method, double omega_p, double i_in,
                           const std::optional<Eigen::VectorXcd>& warm_start = std::nullopt,
                           Eigen::VectorXcd* final_state = nullptr);

}  // namespace wqed
