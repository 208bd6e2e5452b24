#include "wqed/semiclassical.hpp"

#include <cmath>

namespace wqed {

DirectMoments direct_moments(double delta, double Gamma, double Omega, double U) {
  const double d = delta;
  const double s = delta + 2.0 * U;
  const double G2 = Gamma * Gamma;
  const double O2 = Omega * Omega;
  const double denom = s * s * (G2 + d * d) + 4.0 * s * U * O2 + 12.0 * U * O2 * d + 9.0 * G2 * G2 + 9.0 * G2 * d * d;

  DirectMoments out;
  out.Sx = -Omega * (s * s * d + 12.0 * U * O2 + 9.0 * G2 * d) / denom;
  out.Sy = -Gamma * Omega * (s * s + 9.0 * G2) / denom;

  const double mag = std::sqrt(std::max(0.0, -out.Sy * Omega / Gamma));
  const double norm = std::hypot(out.Sx, out.Sy);
  out.beta_ss = norm > 0.0 ? cplx(mag * out.Sx / norm, mag * out.Sy / norm) : cplx(0.0);
  return out;
}

ComplexInteraction ueff_direct(double delta, double Gamma, double Omega, double U) {
  if (!(Gamma > 0.0)) throw ConfigError("gamma_l", "U_eff needs a positive total bath rate");
  if (!(Omega > 0.0)) throw NumericalError("U_eff is undefined without drive; use the real U");
  const DirectMoments mom = direct_moments(delta, Gamma, Omega, U);
  if (mom.Sy == 0.0) throw NumericalError("U_eff is undefined for a vanishing <b>; use the real U");

  const double Sy2 = mom.Sy * mom.Sy;
  ComplexInteraction out;
  out.u_eff = cplx(Gamma * (mom.Sy * delta - Gamma * mom.beta_ss.real()) / (2.0 * Sy2 * Omega),
                   -Gamma * Gamma * (mom.Sy - mom.beta_ss.imag()) / (2.0 * Sy2 * Omega));
  return out;
}

SideMoments side_moments(double dq, double dr, double Gamma, double g, double Omega, double U) {
  const cplx A = I * dr + Gamma;
  const cplx Ac = std::conj(A);
  const double AA = std::norm(A);
  const double g2 = g * g;
  const cplx P = I * dq * AA + 2.0 * g2 * Ac + g2 * A + 2.0 * I * U * AA;
  const cplx Q = I * dq * A + g2 + I * U * A;
  const cplx R = I * dq * A + g2;
  const cplx denom = P * Q * R + 2.0 * I * U * g2 * Omega * Omega * A * A;

  SideMoments out;
  out.E1 = -g * Omega * P * Q / denom;
  out.E2 = 4.0 * I * U * g * Omega * Q * AA / denom;
  const cplx num = A * out.E1;
  const cplx den = A * out.E2;
  out.S11 = -Omega * 2.0 * num.real() / (g * 2.0 * Gamma + Omega * 2.0 * den.real());
  out.S01 = out.E1 + out.E2 * out.S11;
  out.F01 = -I * Omega / A - I * (g / A) * out.S01;
  return out;
}

ComplexInteraction ueff_side(double dq, double dr, double Gamma, double g, double Omega, double U) {
  if (!(Gamma > 0.0)) throw ConfigError("gamma_l", "U_eff needs a positive total bath rate");
  if (!(g > 0.0)) throw NumericalError("U_eff is undefined for a decoupled qubit; use the real U");
  if (!(Omega > 0.0)) throw NumericalError("U_eff is undefined without drive; use the real U");
  const SideMoments mom = side_moments(dq, dr, Gamma, g, Omega, U);
  const double s2 = std::norm(mom.S01);
  if (!(s2 > 1e-280) || !std::isfinite(s2)) throw NumericalError("U_eff is undefined for a vanishing <b>; use the real U");

  ComplexInteraction out;
  out.u_eff = -(dq * mom.S01 + g * mom.F01) / (2.0 * s2 * mom.S01);
  return out;
}

ComplexInteraction ueff_for(const LatticeModel& model, const DriveSpec& drive, Placement placement) {
  ComplexInteraction out;
  out.placement = placement;
  out.u_eff = model.onsite_U;
  if (drive.Omega_L == 0.0 || model.onsite_U == 0.0) return out;
  try {
    if (model.side_coupled()) {
      out.u_eff = ueff_side(drive.detunings.dq[0], drive.detunings.dr[0], model.total_gamma(), model.qr_coupling[0],
                            drive.Omega_L, model.onsite_U)
                      .u_eff;
    } else {
      out.u_eff = ueff_direct(drive.detunings.dq[0], model.total_gamma(), drive.Omega_L, model.onsite_U).u_eff;
    }
  } catch (const NumericalError&) {
    out.u_eff = model.onsite_U;
  }
  return out;
}

Eigen::VectorXcd ueff_per_site(const LatticeModel& model, const DriveSpec& drive) {
  Eigen::VectorXcd out = Eigen::VectorXcd::Constant(model.n_sites, model.onsite_U);
  if (drive.Omega_L == 0.0 || model.onsite_U == 0.0) return out;
  const auto& d = drive.detunings;
  for (int j = 0; j < model.n_sites; ++j) {
    try {
      out[j] = model.side_coupled()
                   ? ueff_side(d.dq[j], d.dr[j], model.total_gamma(), model.qr_coupling[j], drive.Omega_L,
                               model.onsite_U)
                         .u_eff
                   : ueff_direct(d.dq[j], model.total_gamma(), drive.Omega_L, model.onsite_U).u_eff;
    } catch (const NumericalError&) {
      out[j] = model.onsite_U;
    }
  }
  return out;
}

}  // namespace wqed
