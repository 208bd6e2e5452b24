#pragma once

#include "wqed/boson.hpp"
#include "wqed/elimination.hpp"
#include "wqed/lattice.hpp"

#include <Eigen/Dense>

// Reference implementation on explicit truncated Fock spaces. Products are
// formed as matrices and read back in normal order from low-lying matrix
// elements, where the cutoff has no influence.
namespace wqed::oracle {

class FockSpace {
 public:
  FockSpace(int n_sites, int levels);

  int n_sites() const { return n_; }
  int levels() const { return levels_; }
  Eigen::Index dim() const { return dim_; }

  Eigen::MatrixXcd annihilator(int site) const;
  Eigen::MatrixXcd creator(int site) const { return annihilator(site).adjoint(); }
  Eigen::MatrixXcd identity() const { return Eigen::MatrixXcd::Identity(dim_, dim_); }
  Eigen::MatrixXcd monomial(const NormalMonomial& op) const;

  // Normal-ordered coefficients of `R` for all exponents up to `max_exponent`
  // per site; needs levels > max_exponent plus the headroom used to build R.
  OperatorPolynomial normal_form(const Eigen::MatrixXcd& R, int max_exponent, double drop_below = 1e-14) const;

  Eigen::Index index(const std::vector<int>& occupations) const;

 private:
  int n_;
  int levels_;
  Eigen::Index dim_;
};

// Matrix product a*b read back in normal order.
OperatorPolynomial product(const NormalMonomial& a, const NormalMonomial& b);

// Untruncated d<op>/dt from i[H, op] plus the bath terms
// 2 Gamma_i (b_i† op b_i - {b_i† b_i, op}/2), or for the side-coupled medium
// the resonator terms with f_i built as matrices from the elimination.
OperatorPolynomial heisenberg_rhs(const NormalMonomial& op, const LatticeModel& model, const DriveSpec& drive);

// Levels per site that keep heisenberg_rhs exact for operators up to exponent m.
int safe_levels(int m);

}  // namespace wqed::oracle
