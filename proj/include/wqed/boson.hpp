#pragma once

#include "wqed/elimination.hpp"
#include "wqed/lattice.hpp"

#include <compare>
#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

namespace wqed {

// prod_i b_i^{dag j_i} b_i^{k_i}. Exponents are stored site-major as
// (j_1, k_1, j_2, k_2, ...), so the defaulted ordering is the canonical
// lexicographic order of the THLE basis.
class NormalMonomial {
 public:
  NormalMonomial() = default;
  explicit NormalMonomial(int n_sites) : exps_(2 * static_cast<std::size_t>(n_sites), 0) {}
  NormalMonomial(std::initializer_list<std::pair<int, int>> site_exponents);

  static NormalMonomial identity(int n_sites) { return NormalMonomial(n_sites); }
  static NormalMonomial annihilator(int n_sites, int site);
  static NormalMonomial creator(int n_sites, int site);
  static NormalMonomial number(int n_sites, int site);

  int n_sites() const { return static_cast<int>(exps_.size() / 2); }
  int creators(int site) const { return exps_[2 * site]; }
  int annihilators(int site) const { return exps_[2 * site + 1]; }
  void set(int site, int j, int k);

  bool is_identity() const;
  int max_exponent() const;
  // sum_i (j_i + k_i) Gamma_i weight helper
  int degree(int site) const { return creators(site) + annihilators(site); }

  NormalMonomial adjoint() const;

  // "b1†b1^2 b2" style; "I" for the identity.
  std::string to_string() const;
  // Expectation-value label in the S_{jk} notation, e.g. "S12" or "S01,10".
  std::string label() const;

  auto operator<=>(const NormalMonomial&) const = default;

 private:
  std::vector<std::uint8_t> exps_;
};

// Finite complex-weighted sum of normal monomials; never stores zeros.
class OperatorPolynomial {
 public:
  using Map = std::map<NormalMonomial, cplx>;

  OperatorPolynomial() = default;
  OperatorPolynomial(const NormalMonomial& m, cplx c = 1.0) { add(m, c); }

  void add(const NormalMonomial& m, cplx c);
  cplx coefficient(const NormalMonomial& m) const;
  bool empty() const { return terms_.empty(); }
  std::size_t size() const { return terms_.size(); }
  auto begin() const { return terms_.begin(); }
  auto end() const { return terms_.end(); }
  const Map& terms() const { return terms_; }

  OperatorPolynomial adjoint() const;
  OperatorPolynomial truncated(int m) const;

  OperatorPolynomial& operator+=(const OperatorPolynomial& other);
  OperatorPolynomial& operator-=(const OperatorPolynomial& other);
  OperatorPolynomial& operator*=(cplx s);

  std::string to_string() const;

 private:
  Map terms_;
};

OperatorPolynomial operator+(OperatorPolynomial a, const OperatorPolynomial& b);
OperatorPolynomial operator-(OperatorPolynomial a, const OperatorPolynomial& b);
OperatorPolynomial operator*(cplx s, OperatorPolynomial a);
// Normal-ordered operator product.
OperatorPolynomial operator*(const OperatorPolynomial& a, const OperatorPolynomial& b);

// Normal-ordered expansion of the product a * b, using [b_i, b_j†] = delta_ij.
OperatorPolynomial normal_order(const NormalMonomial& a, const NormalMonomial& b);
OperatorPolynomial commutator(const OperatorPolynomial& a, const OperatorPolynomial& b);

struct TruncationRule {
  int m = 1;
  bool in_basis(const NormalMonomial& op) const { return op.max_exponent() <= m; }
};

// All monomials with 0 <= j_i, k_i <= m except the identity, in canonical order.
std::vector<NormalMonomial> enumerate_basis(int n_sites, int m);
std::size_t basis_size(int n_sites, int m);
// Position of an in-basis monomial in enumerate_basis(n, m).
std::size_t basis_index(const NormalMonomial& op, int m);

// Right-hand side generator for d<op>/dt in the frame rotating at omega_p.
// For the direct medium the drive enters as Omega_L (b_1 + b_1†) and the
// bath damping as -(sum_i (j_i + k_i) Gamma_i). For the side-coupled medium
// the qubits see the eliminated resonators through
// i g_i ([b_i†, op] f_i + f_i† [b_i, op]) with f_i affine in the b's.
class HeisenbergGenerator {
 public:
  HeisenbergGenerator(const LatticeModel& model, const DriveSpec& drive);
  HeisenbergGenerator(const LatticeModel& model, const DriveSpec& drive, const ResonatorElimination& elim);

  OperatorPolynomial rhs(const NormalMonomial& op) const;
  OperatorPolynomial rhs(const NormalMonomial& op, const TruncationRule& trunc) const;

  int n_sites() const { return n_; }

 private:
  struct Coupling {
    int site;
    double g;
    OperatorPolynomial f;
    OperatorPolynomial f_dag;
  };

  int n_ = 0;
  OperatorPolynomial hamiltonian_;
  std::vector<double> damping_;
  std::vector<Coupling> couplings_;
};

// Truncated right-hand side of d<op>/dt; throws ConfigError when op is out of basis.
OperatorPolynomial heisenberg_rhs(const NormalMonomial& op, const LatticeModel& model, const DriveSpec& drive,
                                  const TruncationRule& trunc);

}  // namespace wqed
