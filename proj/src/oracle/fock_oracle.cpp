#include "oracle/fock_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <numeric>

namespace wqed::oracle {

FockSpace::FockSpace(int n_sites, int levels) : n_(n_sites), levels_(levels), dim_(1) {
  for (int s = 0; s < n_; ++s) dim_ *= levels_;
}

Eigen::Index FockSpace::index(const std::vector<int>& occupations) const {
  Eigen::Index idx = 0;
  for (int s = 0; s < n_; ++s) idx = idx * levels_ + occupations[s];
  return idx;
}

namespace {

std::vector<int> decode(Eigen::Index idx, int n_sites, int levels) {
  std::vector<int> occ(n_sites);
  for (int s = n_sites - 1; s >= 0; --s) {
    occ[s] = static_cast<int>(idx % levels);
    idx /= levels;
  }
  return occ;
}

double factorial_ratio(int n, int k) {
  // n! / (n-k)!
  double out = 1.0;
  for (int i = 0; i < k; ++i) out *= n - i;
  return out;
}

}  // namespace

Eigen::MatrixXcd FockSpace::annihilator(int site) const {
  Eigen::MatrixXcd b = Eigen::MatrixXcd::Zero(dim_, dim_);
  for (Eigen::Index col = 0; col < dim_; ++col) {
    std::vector<int> occ = decode(col, n_, levels_);
    if (occ[site] == 0) continue;
    const double amp = std::sqrt(static_cast<double>(occ[site]));
    --occ[site];
    b(index(occ), col) = amp;
  }
  return b;
}

Eigen::MatrixXcd FockSpace::monomial(const NormalMonomial& op) const {
  Eigen::MatrixXcd out = identity();
  for (int s = 0; s < n_; ++s) {
    const Eigen::MatrixXcd b = annihilator(s);
    const Eigen::MatrixXcd bd = b.adjoint();
    for (int i = 0; i < op.creators(s); ++i) out = out * bd;
    for (int i = 0; i < op.annihilators(s); ++i) out = out * b;
  }
  return out;
}

OperatorPolynomial FockSpace::normal_form(const Eigen::MatrixXcd& R, int max_exponent, double drop_below) const {
  const int K = max_exponent;
  if (K + 1 > levels_) throw std::invalid_argument("normal_form: not enough Fock levels");

  // All (a_s, c_s) multi-indices with entries in [0, K], ordered by total degree.
  const int digits = 2 * n_;
  std::size_t count = 1;
  for (int i = 0; i < digits; ++i) count *= static_cast<std::size_t>(K + 1);
  std::vector<std::vector<int>> indices(count);
  for (std::size_t i = 0; i < count; ++i) {
    std::size_t x = i;
    indices[i].resize(digits);
    for (int d = digits - 1; d >= 0; --d) {
      indices[i][d] = static_cast<int>(x % (K + 1));
      x /= (K + 1);
    }
  }
  std::stable_sort(indices.begin(), indices.end(), [](const auto& x, const auto& y) {
    return std::accumulate(x.begin(), x.end(), 0) < std::accumulate(y.begin(), y.end(), 0);
  });

  std::map<std::vector<int>, cplx> coeff;
  for (const auto& ac : indices) {
    std::vector<int> p(n_), q(n_);
    for (int s = 0; s < n_; ++s) {
      p[s] = ac[2 * s];
      q[s] = ac[2 * s + 1];
    }
    // <p| b†^a' b^c' |q> is nonzero only for p - a' = q - c' = r >= 0.
    cplx value = R(index(p), index(q));
    std::vector<int> r(n_, 0);
    std::function<void(int)> recurse = [&](int s) {
      if (s == n_) {
        if (std::all_of(r.begin(), r.end(), [](int x) { return x == 0; })) return;
        std::vector<int> lower(digits);
        double me = 1.0;
        for (int t = 0; t < n_; ++t) {
          lower[2 * t] = p[t] - r[t];
          lower[2 * t + 1] = q[t] - r[t];
          me *= std::sqrt(factorial_ratio(q[t], lower[2 * t + 1]) * factorial_ratio(p[t], lower[2 * t]));
        }
        auto it = coeff.find(lower);
        if (it != coeff.end()) value -= it->second * me;
        return;
      }
      for (r[s] = 0; r[s] <= std::min(p[s], q[s]); ++r[s]) recurse(s + 1);
      r[s] = 0;
    };
    recurse(0);
    double diag = 1.0;
    for (int s = 0; s < n_; ++s) diag *= std::sqrt(factorial_ratio(p[s], p[s]) * factorial_ratio(q[s], q[s]));
    coeff[ac] = value / diag;
  }

  OperatorPolynomial out;
  for (const auto& [ac, c] : coeff) {
    if (std::abs(c) <= drop_below) continue;
    NormalMonomial m(n_);
    for (int s = 0; s < n_; ++s) m.set(s, ac[2 * s], ac[2 * s + 1]);
    out.add(m, c);
  }
  return out;
}

OperatorPolynomial product(const NormalMonomial& a, const NormalMonomial& b) {
  const int K = a.max_exponent() + b.max_exponent();
  const FockSpace space(a.n_sites(), K + std::max(a.max_exponent(), b.max_exponent()) + 2);
  return space.normal_form(space.monomial(a) * space.monomial(b), K);
}

int safe_levels(int m) { return 2 * m + 5; }

OperatorPolynomial heisenberg_rhs(const NormalMonomial& op, const LatticeModel& model, const DriveSpec& drive) {
  const int n = model.n_sites;
  const int m = op.max_exponent();
  const FockSpace space(n, safe_levels(m));
  const Eigen::MatrixXcd O = space.monomial(op);

  std::vector<Eigen::MatrixXcd> b(n), bd(n);
  for (int s = 0; s < n; ++s) {
    b[s] = space.annihilator(s);
    bd[s] = b[s].adjoint();
  }

  const auto& dq = drive.detunings.dq;
  Eigen::MatrixXcd H = Eigen::MatrixXcd::Zero(space.dim(), space.dim());
  for (int s = 0; s < n; ++s) {
    const Eigen::MatrixXcd num = bd[s] * b[s];
    H += dq[s] * num;
    H += model.onsite_U * (bd[s] * bd[s] * b[s] * b[s]);
    if (!model.side_coupled() && s + 1 < n) {
      H += 2.0 * model.hop_Jx * (bd[s] * b[s + 1] + bd[s + 1] * b[s]);
    }
  }
  if (!model.side_coupled()) H += drive.Omega_L * (b[0] + bd[0]);

  Eigen::MatrixXcd R = I * (H * O - O * H);

  if (!model.side_coupled()) {
    for (int s = 0; s < n; ++s) {
      const double gamma = model.boundary_gamma(s);
      if (gamma == 0.0) continue;
      const Eigen::MatrixXcd num = bd[s] * b[s];
      R += 2.0 * gamma * (bd[s] * O * b[s] - 0.5 * (num * O + O * num));
    }
  } else {
    const ResonatorElimination elim = eliminate_resonators(model, drive);
    for (int i = 0; i < n; ++i) {
      Eigen::MatrixXcd f = elim.c0[i] * space.identity();
      for (int j = 0; j < n; ++j) f += elim.C(i, j) * b[j];
      const Eigen::MatrixXcd fd = f.adjoint();
      const double g = model.qr_coupling[i];
      R += I * g * ((bd[i] * O - O * bd[i]) * f + fd * (b[i] * O - O * b[i]));
    }
  }
  return space.normal_form(R, m + 2);
}

}  // namespace wqed::oracle
