#include "ellqg/chain.hpp"

#include <iterator>
#include <stdexcept>
#include <string>

#include "ellqg/errors.hpp"
#include "ellqg/rmatrix.hpp"

namespace ellqg {

namespace {

constexpr double kDistinctTol = 1e-8;

Matrix restrict_to(const Matrix& m, const std::vector<std::size_t>& idx) {
  const auto k = static_cast<Eigen::Index>(idx.size());
  Matrix out(k, k);
  for (Eigen::Index i = 0; i < k; ++i) {
    for (Eigen::Index j = 0; j < k; ++j) {
      out(i, j) = m(static_cast<Eigen::Index>(idx[static_cast<std::size_t>(i)]),
                    static_cast<Eigen::Index>(idx[static_cast<std::size_t>(j)]));
    }
  }
  return out;
}

}  // namespace

FundamentalChain::FundamentalChain(std::vector<cplx> z_points, ModularParams params)
    : z_(std::move(z_points)), params_(std::move(params)) {
  if (z_.empty()) throw std::invalid_argument("FundamentalChain: need at least one site");
  if (z_.size() > 12) throw std::invalid_argument("FundamentalChain: at most 12 sites");
  for (std::size_t i = 0; i < z_.size(); ++i) {
    for (std::size_t j = i + 1; j < z_.size(); ++j) {
      if (lattice_distance(z_[i] - z_[j], params_) < kDistinctTol) {
        throw std::invalid_argument("FundamentalChain: evaluation points coincide modulo the lattice");
      }
    }
  }
  if (z_.size() % 2 == 0) zero_ = weight_indices(size(), 0);
}

DynamicalMatrix l_operator(const FundamentalChain& chain, cplx z, cplx lambda) {
  const int n = chain.size();
  const int sites = n + 1;
  const ModularParams& p = chain.params();
  const auto dim = static_cast<Eigen::Index>(basis_dim(sites));
  Matrix m = Matrix::Identity(dim, dim);
  // rightmost factor first
  for (int j = n; j >= 1; --j) {
    const cplx arg = z - chain.z_points()[static_cast<std::size_t>(j - 1)];
    PairOperator factor(
        sites, 0, j, [arg, &p](cplx l) { return rmatrix_local(arg, l, p); }, lambda,
        spectator_shift(sites_from(j + 1, sites), p));
    m = factor.apply(m);
  }
  return {basis_weights(sites), std::move(m)};
}

namespace {

// Applies L(z, l) with auxiliary factor `aux` and the chain on sites
// first, ..., first + n - 1 of a larger space; `extra` adds spectators to every factor.
Matrix apply_l(const FundamentalChain& chain, Matrix m, int total_sites, int aux, int first, cplx z, cplx lambda,
               const std::vector<int>& extra) {
  const ModularParams& p = chain.params();
  const int n = chain.size();
  for (int j = n; j >= 1; --j) {
    const cplx arg = z - chain.z_points()[static_cast<std::size_t>(j - 1)];
    std::vector<int> spectators = extra;
    for (int k = j + 1; k <= n; ++k) spectators.push_back(first + k - 1);
    PairOperator factor(
        total_sites, aux, first + j - 1, [arg, &p](cplx l) { return rmatrix_local(arg, l, p); }, lambda,
        spectator_shift(std::move(spectators), p));
    m = factor.apply(m);
  }
  return m;
}

}  // namespace

double rll_residual(const FundamentalChain& chain, cplx z, cplx w, cplx lambda) {
  const ModularParams& p = chain.params();
  const int n = chain.size();
  const int total = n + 2;
  const auto dim = static_cast<Eigen::Index>(basis_dim(total));
  auto r12 = [&](DynamicalShift shift) {
    return PairOperator(
        total, 0, 1, [&p, z, w](cplx l) { return rmatrix_local(z - w, l, p); }, lambda, std::move(shift));
  };
  const Matrix id = Matrix::Identity(dim, dim);

  Matrix lhs = apply_l(chain, id, total, 1, 2, w, lambda, {0});
  lhs = apply_l(chain, lhs, total, 0, 2, z, lambda, {});
  lhs = r12(spectator_shift(sites_from(2, total), p)).apply(lhs);

  Matrix rhs = r12(DynamicalShift::none()).apply(id);
  rhs = apply_l(chain, rhs, total, 0, 2, z, lambda, {1});
  rhs = apply_l(chain, rhs, total, 1, 2, w, lambda, {});
  return max_abs(lhs - rhs);
}

OperatorBlocks abcd_blocks(const FundamentalChain& chain, cplx z, cplx lambda) {
  const Matrix l = l_operator(chain, z, lambda).entries;
  const auto d = static_cast<Eigen::Index>(chain.dim());
  const std::vector<int> w = basis_weights(chain.size());
  return {{w, l.topLeftCorner(d, d)},
          {w, l.topRightCorner(d, d)},
          {w, l.bottomLeftCorner(d, d)},
          {w, l.bottomRightCorner(d, d)}};
}

cplx highest_weight_d(cplx z, cplx lambda, int total_weight, const std::vector<cplx>& p_points,
                      const std::vector<cplx>& q_points, const ModularParams& p) {
  if (p_points.size() != q_points.size()) throw std::invalid_argument("highest_weight_d: p/q size mismatch");
  cplx value = theta(lambda - 2.0 * p.eta() * static_cast<double>(total_weight), p) /
               checked_denominator(theta(lambda, p), p, "highest_weight_d: theta(lambda)");
  for (std::size_t k = 0; k < p_points.size(); ++k) {
    value *= theta(z - p_points[k], p) /
             checked_denominator(theta(z - q_points[k], p), p, "highest_weight_d: theta(z - q_k)");
  }
  return value;
}

// ---------------------------------------------------------------------------

DifferenceOperator::DifferenceOperator(cplx eta, std::vector<Term> terms)
    : eta_(eta), terms_(std::move(terms)) {}

DifferenceOperator DifferenceOperator::shift(cplx eta, int k, Coefficient coeff) {
  return DifferenceOperator(eta, {Term{k, std::move(coeff)}});
}

Vector DifferenceOperator::apply(const Function& f, cplx lambda) const {
  if (terms_.empty()) throw std::logic_error("DifferenceOperator: no terms");
  Vector out;
  for (const Term& t : terms_) {
    Vector contrib = t.coeff(lambda) * f(lambda + 2.0 * eta_ * static_cast<double>(t.shift));
    if (out.size() == 0) {
      out = std::move(contrib);
    } else {
      out += contrib;
    }
  }
  return out;
}

std::map<int, Matrix> DifferenceOperator::coefficients(cplx lambda) const {
  std::map<int, Matrix> out;
  for (const Term& t : terms_) {
    Matrix c = t.coeff(lambda);
    auto it = out.find(t.shift);
    if (it == out.end()) {
      out.emplace(t.shift, std::move(c));
    } else {
      it->second += c;
    }
  }
  return out;
}

DifferenceOperator DifferenceOperator::compose(const DifferenceOperator& inner) const {
  std::vector<Term> terms;
  terms.reserve(terms_.size() * inner.terms_.size());
  const cplx step = 2.0 * eta_;
  for (const Term& outer_term : terms_) {
    for (const Term& inner_term : inner.terms_) {
      const int k = outer_term.shift;
      Coefficient co = outer_term.coeff;
      Coefficient ci = inner_term.coeff;
      terms.push_back({k + inner_term.shift, [co, ci, k, step](cplx l) -> Matrix {
                         return co(l) * ci(l + step * static_cast<double>(k));
                       }});
    }
  }
  return DifferenceOperator(eta_, std::move(terms));
}

DifferenceOperator DifferenceOperator::operator+(const DifferenceOperator& other) const {
  std::vector<Term> terms = terms_;
  terms.insert(terms.end(), other.terms_.begin(), other.terms_.end());
  return DifferenceOperator(eta_, std::move(terms));
}

DifferenceOperator generator_operator(const FundamentalChain& chain, Generator g, cplx z) {
  // the chain is captured by value: operators outlive the caller's chain
  auto block = [chain, z, g](cplx l) -> Matrix {
    OperatorBlocks blocks = abcd_blocks(chain, z, l);
    switch (g) {
      case Generator::a:
        return std::move(blocks.a.entries);
      case Generator::b:
        return std::move(blocks.b.entries);
      case Generator::c:
        return std::move(blocks.c.entries);
      case Generator::d:
        return std::move(blocks.d.entries);
    }
    return {};
  };
  const int k = (g == Generator::a || g == Generator::c) ? -1 : 1;
  return DifferenceOperator::shift(chain.params().eta(), k, block);
}

DifferenceOperator transfer_operator(const FundamentalChain& chain, cplx z) {
  if (chain.zero_weight_basis().empty()) {
    throw std::invalid_argument("transfer_operator: W[0] is trivial for an odd number of sites");
  }
  const std::vector<std::size_t> zero = chain.zero_weight_basis();
  auto a00 = [chain, z, zero](cplx l) { return restrict_to(abcd_blocks(chain, z, l).a.entries, zero); };
  auto d00 = [chain, z, zero](cplx l) { return restrict_to(abcd_blocks(chain, z, l).d.entries, zero); };
  const cplx eta = chain.params().eta();
  return DifferenceOperator(eta, {{-1, a00}, {1, d00}});
}

Vector transfer_apply(const FundamentalChain& chain, cplx z, const DifferenceOperator::Function& f,
                      cplx lambda) {
  return transfer_operator(chain, z).apply(f, lambda);
}

CommutationResiduals commutation_residual(const FundamentalChain& chain, cplx w, cplx t, cplx lambda,
                                          const DifferenceOperator::Function& probe) {
  const ModularParams& p = chain.params();
  if (lattice_distance(w - t, p) < kDistinctTol) {
    throw std::invalid_argument("commutation_residual: w and t coincide modulo the lattice");
  }
  auto op = [&chain](Generator g, cplx x) { return generator_operator(chain, g, x); };

  const Vector lhs_a = op(Generator::a, w).compose(op(Generator::b, t)).apply(probe, lambda);
  const RSCoefficients rs = rs_coeffs(t - w, lambda, p);
  const Vector rhs_a = rs.r * op(Generator::b, t).compose(op(Generator::a, w)).apply(probe, lambda) +
                       rs.s * op(Generator::b, w).compose(op(Generator::a, t)).apply(probe, lambda);

  const Vector lhs_d = op(Generator::d, w).compose(op(Generator::b, t)).apply(probe, lambda);
  const Vector bd = op(Generator::b, t).compose(op(Generator::d, w)).apply(probe, lambda);
  const Vector bd_swapped = op(Generator::b, w).compose(op(Generator::d, t)).apply(probe, lambda);
  // scalar functions of (l, h) act on the output weight
  const std::vector<int> weights = basis_weights(chain.size());
  Vector rhs_d(lhs_d.size());
  for (Eigen::Index i = 0; i < rhs_d.size(); ++i) {
    const cplx shifted = lambda - 2.0 * p.eta() * static_cast<double>(weights[static_cast<std::size_t>(i)]);
    const cplx r = rs_coeffs(w - t, shifted, p).r;
    const cplx s = rs_coeffs(t - w, shifted, p).s;
    rhs_d[i] = r * bd[i] - s * bd_swapped[i];
  }
  return {(lhs_a - rhs_a).norm(), (lhs_d - rhs_d).norm()};
}

Matrix subset_vectors(const FundamentalChain& chain, const std::vector<cplx>& t, cplx lambda) {
  const int m = static_cast<int>(t.size());
  if (m != chain.size()) throw std::invalid_argument("subset_vectors: need one root per site");
  const ModularParams& p = chain.params();
  for (int i = 0; i < m; ++i) {
    for (int j = i + 1; j < m; ++j) {
      if (lattice_distance(t[static_cast<std::size_t>(i)] - t[static_cast<std::size_t>(j)], p) < kDistinctTol) {
        throw std::invalid_argument("subset_vectors: spectral parameters coincide modulo the lattice");
      }
    }
  }
  const auto dim = static_cast<Eigen::Index>(chain.dim());
  const auto count = static_cast<Eigen::Index>(std::size_t{1} << m);
  Matrix cols(dim, count);
  for (Eigen::Index mask = 0; mask < count; ++mask) {
    std::vector<int> members;
    for (int j = 0; j < m; ++j) {
      if ((mask >> j) & 1) members.push_back(j);
    }
    // b(t_{j1}) ... b(t_{jr}) v0 at l: B(t_{j1}, l) B(t_{j2}, l + 2 eta) ... v0
    Vector v = Vector::Zero(dim);
    v[0] = 1.0;
    for (auto it = members.rbegin(); it != members.rend(); ++it) {
      const auto pos = static_cast<double>(std::distance(it, members.rend()) - 1);
      v = abcd_blocks(chain, t[static_cast<std::size_t>(*it)], lambda + 2.0 * p.eta() * pos).b.entries * v;
    }
    cols.col(mask) = v;
  }
  return cols;
}

int rank_independence_check(const FundamentalChain& chain, const std::vector<cplx>& t, cplx lambda) {
  const Matrix cols = subset_vectors(chain, t, lambda);
  Eigen::JacobiSVD<Matrix> svd(cols);
  const auto& sv = svd.singularValues();
  if (sv.size() == 0 || sv[0] == 0.0) return 0;
  int rank = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i) {
    if (sv[i] > 1e-10 * sv[0]) ++rank;
  }
  return rank;
}

}  // namespace ellqg
