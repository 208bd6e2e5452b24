#include "wqed/boson.hpp"

#include <algorithm>
#include <cstdio>
#include <sstream>

namespace wqed {

// ---------------------------------------------------------------- monomials

NormalMonomial::NormalMonomial(std::initializer_list<std::pair<int, int>> site_exponents)
    : NormalMonomial(static_cast<int>(site_exponents.size())) {
  int site = 0;
  for (auto [j, k] : site_exponents) set(site++, j, k);
}

NormalMonomial NormalMonomial::annihilator(int n_sites, int site) {
  NormalMonomial m(n_sites);
  m.set(site, 0, 1);
  return m;
}

NormalMonomial NormalMonomial::creator(int n_sites, int site) {
  NormalMonomial m(n_sites);
  m.set(site, 1, 0);
  return m;
}

NormalMonomial NormalMonomial::number(int n_sites, int site) {
  NormalMonomial m(n_sites);
  m.set(site, 1, 1);
  return m;
}

void NormalMonomial::set(int site, int j, int k) {
  if (j < 0 || k < 0 || j > 255 || k > 255) throw std::out_of_range("NormalMonomial: exponent out of range");
  exps_[2 * site] = static_cast<std::uint8_t>(j);
  exps_[2 * site + 1] = static_cast<std::uint8_t>(k);
}

bool NormalMonomial::is_identity() const {
  return std::all_of(exps_.begin(), exps_.end(), [](std::uint8_t e) { return e == 0; });
}

int NormalMonomial::max_exponent() const {
  return exps_.empty() ? 0 : *std::max_element(exps_.begin(), exps_.end());
}

NormalMonomial NormalMonomial::adjoint() const {
  NormalMonomial out = *this;
  for (std::size_t s = 0; s < exps_.size(); s += 2) std::swap(out.exps_[s], out.exps_[s + 1]);
  return out;
}

std::string NormalMonomial::to_string() const {
  if (is_identity()) return "I";
  std::string out;
  auto power = [](int e) { return e == 1 ? std::string() : "^" + std::to_string(e); };
  for (int s = 0; s < n_sites(); ++s) {
    const int j = creators(s);
    const int k = annihilators(s);
    if (j == 0 && k == 0) continue;
    if (!out.empty()) out += ' ';
    const std::string b = "b" + std::to_string(s + 1);
    if (j > 0) out += b + "†" + power(j);
    if (k > 0) out += b + power(k);
  }
  return out;
}

std::string NormalMonomial::label() const {
  std::string out = "S";
  for (int s = 0; s < n_sites(); ++s) {
    if (s > 0) out += ',';
    out += std::to_string(creators(s));
    out += std::to_string(annihilators(s));
  }
  return out;
}

// -------------------------------------------------------------- polynomials

void OperatorPolynomial::add(const NormalMonomial& m, cplx c) {
  if (c == cplx(0.0)) return;
  auto [it, inserted] = terms_.try_emplace(m, c);
  if (!inserted) {
    it->second += c;
    if (it->second == cplx(0.0)) terms_.erase(it);
  }
}

cplx OperatorPolynomial::coefficient(const NormalMonomial& m) const {
  auto it = terms_.find(m);
  return it == terms_.end() ? cplx(0.0) : it->second;
}

OperatorPolynomial OperatorPolynomial::adjoint() const {
  OperatorPolynomial out;
  for (const auto& [m, c] : terms_) out.terms_.emplace(m.adjoint(), std::conj(c));
  return out;
}

OperatorPolynomial OperatorPolynomial::truncated(int m) const {
  OperatorPolynomial out;
  for (const auto& [mono, c] : terms_) {
    if (mono.max_exponent() <= m) out.terms_.emplace_hint(out.terms_.end(), mono, c);
  }
  return out;
}

OperatorPolynomial& OperatorPolynomial::operator+=(const OperatorPolynomial& other) {
  for (const auto& [m, c] : other.terms_) add(m, c);
  return *this;
}

OperatorPolynomial& OperatorPolynomial::operator-=(const OperatorPolynomial& other) {
  for (const auto& [m, c] : other.terms_) add(m, -c);
  return *this;
}

OperatorPolynomial& OperatorPolynomial::operator*=(cplx s) {
  if (s == cplx(0.0)) {
    terms_.clear();
    return *this;
  }
  for (auto& [m, c] : terms_) c *= s;
  return *this;
}

std::string OperatorPolynomial::to_string() const {
  if (terms_.empty()) return "0";
  std::ostringstream os;
  os.precision(12);
  bool first = true;
  for (const auto& [m, c] : terms_) {
    if (!first) os << " + ";
    first = false;
    os << '(' << c.real() << (c.imag() < 0 ? "-" : "+") << std::abs(c.imag()) << "i)";
    if (!m.is_identity()) os << ' ' << m.to_string();
  }
  return os.str();
}

OperatorPolynomial operator+(OperatorPolynomial a, const OperatorPolynomial& b) { return a += b; }
OperatorPolynomial operator-(OperatorPolynomial a, const OperatorPolynomial& b) { return a -= b; }
OperatorPolynomial operator*(cplx s, OperatorPolynomial a) { return a *= s; }

OperatorPolynomial operator*(const OperatorPolynomial& a, const OperatorPolynomial& b) {
  OperatorPolynomial out;
  for (const auto& [ma, ca] : a) {
    for (const auto& [mb, cb] : b) {
      OperatorPolynomial prod = normal_order(ma, mb);
      prod *= ca * cb;
      out += prod;
    }
  }
  return out;
}

namespace {

struct SiteTerm {
  double coeff;
  int j;
  int k;
};

double binomial(int n, int r) {
  double out = 1.0;
  for (int i = 1; i <= r; ++i) out = out * (n - r + i) / i;
  return out;
}

// b†^j1 b^k1 b†^j2 b^k2 = sum_s C(k1,s) C(j2,s) s! b†^(j1+j2-s) b^(k1+k2-s)
void site_product(int j1, int k1, int j2, int k2, std::vector<SiteTerm>& out) {
  out.clear();
  double factorial = 1.0;
  for (int s = 0; s <= std::min(k1, j2); ++s) {
    if (s > 0) factorial *= s;
    out.push_back({binomial(k1, s) * binomial(j2, s) * factorial, j1 + j2 - s, k1 + k2 - s});
  }
}

}  // namespace

OperatorPolynomial normal_order(const NormalMonomial& a, const NormalMonomial& b) {
  if (a.n_sites() != b.n_sites()) throw std::invalid_argument("normal_order: site count mismatch");
  const int n = a.n_sites();

  // Expand site by site; only sites with k_a > 0 and j_b > 0 branch.
  std::vector<std::pair<NormalMonomial, double>> partial{{NormalMonomial(n), 1.0}};
  std::vector<SiteTerm> terms;
  for (int s = 0; s < n; ++s) {
    site_product(a.creators(s), a.annihilators(s), b.creators(s), b.annihilators(s), terms);
    if (terms.size() == 1) {
      for (auto& [m, c] : partial) {
        m.set(s, terms[0].j, terms[0].k);
        c *= terms[0].coeff;
      }
      continue;
    }
    std::vector<std::pair<NormalMonomial, double>> next;
    next.reserve(partial.size() * terms.size());
    for (const auto& [m, c] : partial) {
      for (const SiteTerm& t : terms) {
        NormalMonomial mm = m;
        mm.set(s, t.j, t.k);
        next.emplace_back(std::move(mm), c * t.coeff);
      }
    }
    partial = std::move(next);
  }

  OperatorPolynomial out;
  for (const auto& [m, c] : partial) out.add(m, c);
  return out;
}

OperatorPolynomial commutator(const OperatorPolynomial& a, const OperatorPolynomial& b) {
  return a * b - b * a;
}

// -------------------------------------------------------------------- basis

std::size_t basis_size(int n_sites, int m) {
  std::size_t total = 1;
  for (int i = 0; i < 2 * n_sites; ++i) total *= static_cast<std::size_t>(m + 1);
  return total - 1;
}

std::vector<NormalMonomial> enumerate_basis(int n_sites, int m) {
  if (n_sites < 1) throw ConfigError("n", "basis needs at least one site");
  if (m < 1) throw ConfigError("m", "truncation m must be at least 1 (m = 0 leaves no dynamical operators)");

  const std::size_t count = basis_size(n_sites, m);
  std::vector<NormalMonomial> basis;
  basis.reserve(count);
  std::vector<int> digits(2 * static_cast<std::size_t>(n_sites), 0);
  for (std::size_t idx = 0; idx < count; ++idx) {
    // Increment the mixed-radix counter; the last digit is least significant.
    for (int d = 2 * n_sites - 1; d >= 0; --d) {
      if (++digits[d] <= m) break;
      digits[d] = 0;
    }
    NormalMonomial mono(n_sites);
    for (int s = 0; s < n_sites; ++s) mono.set(s, digits[2 * s], digits[2 * s + 1]);
    basis.push_back(std::move(mono));
  }
  return basis;
}

std::size_t basis_index(const NormalMonomial& op, int m) {
  std::size_t idx = 0;
  for (int s = 0; s < op.n_sites(); ++s) {
    idx = idx * (m + 1) + op.creators(s);
    idx = idx * (m + 1) + op.annihilators(s);
  }
  return idx - 1;
}

// ---------------------------------------------------------------- generator

HeisenbergGenerator::HeisenbergGenerator(const LatticeModel& model, const DriveSpec& drive)
    : n_(model.n_sites), damping_(model.n_sites, 0.0) {
  if (model.side_coupled()) {
    *this = HeisenbergGenerator(model, drive, eliminate_resonators(model, drive));
    return;
  }

  const auto& dq = drive.detunings.dq;
  for (int s = 0; s < n_; ++s) {
    hamiltonian_.add(NormalMonomial::number(n_, s), dq[s]);
    NormalMonomial pair(n_);
    pair.set(s, 2, 2);
    hamiltonian_.add(pair, model.onsite_U);  // U n(n-1) = U b†^2 b^2
    if (s + 1 < n_) {
      NormalMonomial hop_right(n_);
      hop_right.set(s, 1, 0);
      hop_right.set(s + 1, 0, 1);
      hamiltonian_.add(hop_right, 2.0 * model.hop_Jx);
      hamiltonian_.add(hop_right.adjoint(), 2.0 * model.hop_Jx);
    }
    damping_[s] = model.boundary_gamma(s);
  }
  hamiltonian_.add(NormalMonomial::annihilator(n_, 0), drive.Omega_L);
  hamiltonian_.add(NormalMonomial::creator(n_, 0), drive.Omega_L);
}

HeisenbergGenerator::HeisenbergGenerator(const LatticeModel& model, const DriveSpec& drive,
                                         const ResonatorElimination& elim)
    : n_(model.n_sites), damping_(model.n_sites, 0.0) {
  if (!model.side_coupled()) throw ConfigError("medium", "resonator elimination given for a direct medium");

  const auto& dq = drive.detunings.dq;
  const NormalMonomial id = NormalMonomial::identity(n_);
  for (int s = 0; s < n_; ++s) {
    hamiltonian_.add(NormalMonomial::number(n_, s), dq[s]);
    NormalMonomial pair(n_);
    pair.set(s, 2, 2);
    hamiltonian_.add(pair, model.onsite_U);
  }
  for (int i = 0; i < n_; ++i) {
    Coupling c{i, model.qr_coupling[i], {}, {}};
    c.f.add(id, elim.c0[i]);
    for (int j = 0; j < n_; ++j) c.f.add(NormalMonomial::annihilator(n_, j), elim.C(i, j));
    c.f_dag = c.f.adjoint();
    if (c.g != 0.0) couplings_.push_back(std::move(c));
  }
}

OperatorPolynomial HeisenbergGenerator::rhs(const NormalMonomial& op) const {
  if (op.n_sites() != n_) throw std::invalid_argument("heisenberg_rhs: operator has wrong site count");

  OperatorPolynomial out;
  for (const auto& [h, c] : hamiltonian_) {
    OperatorPolynomial comm = normal_order(h, op) - normal_order(op, h);
    comm *= I * c;
    out += comm;
  }

  double rate = 0.0;
  for (int s = 0; s < n_; ++s) rate += op.degree(s) * damping_[s];
  out.add(op, -rate);

  const OperatorPolynomial op_poly(op);
  for (const Coupling& c : couplings_) {
    const OperatorPolynomial b_dag(NormalMonomial::creator(n_, c.site));
    const OperatorPolynomial b(NormalMonomial::annihilator(n_, c.site));
    // f_i commutes with qubit operators; it sits right of [b†, op] and f† left of [b, op].
    OperatorPolynomial term = commutator(b_dag, op_poly) * c.f + c.f_dag * commutator(b, op_poly);
    term *= I * c.g;
    out += term;
  }
  return out;
}

OperatorPolynomial HeisenbergGenerator::rhs(const NormalMonomial& op, const TruncationRule& trunc) const {
  if (!trunc.in_basis(op)) {
    throw ConfigError("m", "operator " + op.to_string() + " is outside the truncated basis");
  }
  return rhs(op).truncated(trunc.m);
}

OperatorPolynomial heisenberg_rhs(const NormalMonomial& op, const LatticeModel& model, const DriveSpec& drive,
                                  const TruncationRule& trunc) {
  return HeisenbergGenerator(model, drive).rhs(op, trunc);
}

}  // namespace wqed
