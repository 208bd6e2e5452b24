#include "wqed/sweep.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <functional>
#include <thread>

namespace wqed {

std::string to_string(Method method) {
  switch (method) {
    case Method::THLE: return "THLE";
    case Method::QCA: return "QCA";
    case Method::MQCA: return "MQCA";
    case Method::MF: return "MF";
  }
  return "THLE";
}

Method method_from_string(const std::string& name) {
  if (name == "THLE" || name == "thle") return Method::THLE;
  if (name == "QCA" || name == "qca") return Method::QCA;
  if (name == "MQCA" || name == "mqca") return Method::MQCA;
  if (name == "MF" || name == "mf") return Method::MF;
  throw ConfigError("methods", "unknown method '" + name + "' (expected THLE, QCA, MQCA or MF)");
}

namespace {

void check_grid(const std::vector<double>& grid, const std::string& key, bool nonnegative) {
  if (grid.empty()) throw ConfigError(key, "grid is empty");
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!std::isfinite(grid[i])) throw ConfigError(key, "grid values must be finite");
    if (nonnegative && grid[i] < 0.0) throw ConfigError(key, "grid values must be nonnegative");
    if (i > 0 && !(grid[i] > grid[i - 1])) throw ConfigError(key, "grid must be strictly increasing");
  }
}

}  // namespace

void SweepPlan::validate() const {
  model.validate();
  check_grid(omega_p, "omega_p_grid", false);
  check_grid(i_in, "i_in_grid", true);
  if (methods.empty()) throw ConfigError("methods", "no methods requested");
  for (std::size_t i = 0; i < methods.size(); ++i) {
    for (std::size_t j = 0; j < i; ++j) {
      if (methods[i] == methods[j]) throw ConfigError("methods", "method " + to_string(methods[i]) + " listed twice");
    }
    if (methods[i] == Method::MF && model.side_coupled()) {
      throw ConfigError("methods", "MF is available for the direct medium only");
    }
    if (methods[i] == Method::THLE) {
      if (m < 1) throw ConfigError("m", "THLE needs a truncation m >= 1");
      const double dim = std::pow(m + 1.0, 2.0 * model.n_sites) - 1.0;
      if (dim > static_cast<double>(assembly.max_variables)) {
        throw ConfigError("m", "THLE basis of " + std::to_string(static_cast<long long>(dim)) +
                                   " variables exceeds the cap; use a smaller n or m");
      }
    }
  }
  if (threads < 0) throw ConfigError("threads", "must be nonnegative");
}

SweepPlan make_plan(const SweepConfig& config) {
  SweepPlan plan;
  plan.model = build_model(config.model);
  plan.omega_p = config.omega_p_grid.expand();
  plan.i_in = config.i_in_grid.expand();
  for (const auto& name : config.methods) plan.methods.push_back(method_from_string(name));
  plan.m = config.m.value_or(0);
  plan.placement = config.placement ? placement_from_string(*config.placement)
                                    : (plan.model.side_coupled() ? Placement::Homogeneous : Placement::EndsOnly);
  plan.continuation = config.qca_initial == "continuation";
  plan.threads = config.threads.value_or(0);
  plan.validate();
  return plan;
}

namespace {

bool same_double(double a, double b) { return a == b || (std::isnan(a) && std::isnan(b)); }

}  // namespace

bool same_record(const SweepRecord& a, const SweepRecord& b, bool with_diagnostics) {
  const bool core = a.method == b.method && a.n == b.n && a.m == b.m && same_double(a.omega_p, b.omega_p) &&
                    same_double(a.i_in, b.i_in) && same_double(a.transmission, b.transmission) &&
                    a.status == b.status && same_double(a.residual, b.residual) &&
                    same_double(a.wall_time_ms, b.wall_time_ms);
  if (!core || !with_diagnostics) return core;
  const Diagnostics& x = a.diagnostics;
  const Diagnostics& y = b.diagnostics;
  return same_double(x.u_eff_re, y.u_eff_re) && same_double(x.u_eff_im, y.u_eff_im) &&
         same_double(x.period, y.period) && x.iterations == y.iterations && x.message == y.message;
}

SweepRecord evaluate_point(const SweepPlan& plan, Method method, double omega_p, double i_in,
                           const std::optional<Eigen::VectorXcd>& warm_start, Eigen::VectorXcd* final_state) {
  const auto t0 = std::chrono::steady_clock::now();
  SweepRecord rec;
  rec.method = method;
  rec.n = plan.model.n_sites;
  if (method == Method::THLE) rec.m = plan.m;
  rec.omega_p = omega_p;
  rec.i_in = i_in;

  try {
    switch (method) {
      case Method::THLE: {
        const ThleResult r = thle_point(plan.model, omega_p, i_in, plan.m, plan.solver, plan.assembly);
        rec.transmission = r.transmission;
        rec.residual = r.state.residual;
        rec.status = SolverStatus::Converged;
        for (const auto& w : r.state.warnings) {
          if (!rec.diagnostics.message.empty()) rec.diagnostics.message += "; ";
          rec.diagnostics.message += w;
        }
        break;
      }
      case Method::QCA:
      case Method::MQCA: {
        const DriveSpec drive = drive_from_intensity(plan.model, omega_p, i_in);
        IntegrationPolicy policy = plan.policy;
        if (warm_start) policy.initial = *warm_start;
        Eigen::VectorXcd u;
        if (method == Method::QCA) {
          u = site_interactions(plan.model, plan.model.onsite_U);
        } else {
          const ComplexInteraction ci = ueff_for(plan.model, drive, plan.placement);
          rec.diagnostics.u_eff_re = ci.u_eff.real();
          rec.diagnostics.u_eff_im = ci.u_eff.imag();
          if (ci.gains()) rec.diagnostics.message = "Im(U_eff) > 0";
          u = site_interactions(plan.model, ci);
        }
        const QcaResult r = qca_steady(plan.model, drive, u, policy);
        rec.transmission = r.transmission;
        rec.residual = r.state.residual;
        rec.status = r.state.status;
        rec.diagnostics.period = r.state.period;
        rec.diagnostics.iterations = r.state.steps;
        if (final_state != nullptr) {
          *final_state = r.state.status == SolverStatus::Diverged ? Eigen::VectorXcd() : pack(plan.model, r.state);
        }
        break;
      }
      case Method::MF: {
        const DriveSpec drive = drive_from_intensity(plan.model, omega_p, i_in);
        const MeanFieldResult r = mean_field_steady(plan.model, drive, plan.mean_field);
        rec.transmission = r.transmission;
        rec.residual = r.residual;
        rec.status = r.status;
        rec.diagnostics.iterations = r.iterations;
        break;
      }
    }
  } catch (const std::exception& e) {
    rec.status = SolverStatus::Diverged;
    rec.transmission = std::numeric_limits<double>::quiet_NaN();
    rec.residual = std::numeric_limits<double>::quiet_NaN();
    rec.diagnostics.message = e.what();
    if (final_state != nullptr) final_state->resize(0);
  }
  rec.wall_time_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  return rec;
}

std::vector<SweepRecord> run_sweep(const SweepPlan& plan) {
  plan.validate();
  const std::size_t n_omega = plan.omega_p.size();
  const std::size_t n_int = plan.i_in.size();
  std::vector<SweepRecord> records(plan.record_count());

  std::vector<std::function<void()>> tasks;
  for (std::size_t mi = 0; mi < plan.methods.size(); ++mi) {
    const Method method = plan.methods[mi];
    for (std::size_t ii = 0; ii < n_int; ++ii) {
      const std::size_t base = (mi * n_int + ii) * n_omega;
      const bool line = plan.continuation && (method == Method::QCA || method == Method::MQCA);
      if (line) {
        tasks.emplace_back([&, method, ii, base] {
          std::optional<Eigen::VectorXcd> warm;
          for (std::size_t wi = 0; wi < n_omega; ++wi) {
            Eigen::VectorXcd last;
            records[base + wi] = evaluate_point(plan, method, plan.omega_p[wi], plan.i_in[ii], warm, &last);
            warm = last.size() > 0 ? std::optional<Eigen::VectorXcd>(last) : std::nullopt;
          }
        });
      } else {
        for (std::size_t wi = 0; wi < n_omega; ++wi) {
          tasks.emplace_back([&, method, ii, wi, base] {
            records[base + wi] = evaluate_point(plan, method, plan.omega_p[wi], plan.i_in[ii]);
          });
        }
      }
    }
  }

  unsigned workers = plan.threads > 0 ? static_cast<unsigned>(plan.threads) : std::thread::hardware_concurrency();
  workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(tasks.size())));
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < tasks.size(); i = next++) tasks[i]();
  };
  if (workers == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }
  return records;
}

}  // namespace wqed
