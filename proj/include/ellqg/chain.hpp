#pragma once

#include <functional>
#include <map>
#include <memory>
#include <vector>

#include "ellqg/tensor.hpp"
#include "ellqg/theta.hpp"

namespace ellqg {

/// W = V(z_1) (x) ... (x) V(z_n), a tensor product of fundamental representations.
class FundamentalChain {
 public:
  /// Throws std::invalid_argument when two evaluation points coincide modulo Z + tau Z.
  FundamentalChain(std::vector<cplx> z_points, ModularParams params);

  int size() const noexcept { return static_cast<int>(z_.size()); }
  std::size_t dim() const noexcept { return basis_dim(size()); }
  const std::vector<cplx>& z_points() const noexcept { return z_; }
  const ModularParams& params() const noexcept { return params_; }

  /// Basis indices of W[0], ascending. Empty for odd n.
  const std::vector<std::size_t>& zero_weight_basis() const noexcept { return zero_; }

 private:
  std::vector<cplx> z_;
  ModularParams params_;
  std::vector<std::size_t> zero_;
};

/// L(z, l) on V (x) W with the auxiliary factor as site 0:
///   R^{(01)}(z - z_1, l - 2 eta sum_{j>=2} h^{(j)}) ... R^{(0n)}(z - z_n, l).
DynamicalMatrix l_operator(const FundamentalChain& chain, cplx z, cplx lambda);

/// Max-norm of R^{(12)}(z-w, l - 2 eta h^{(3)}) L^{(13)}(z, l) L^{(23)}(w, l - 2 eta h^{(1)})
///              - L^{(23)}(w, l) L^{(13)}(z, l - 2 eta h^{(2)}) R^{(12)}(z-w, l)
/// on V (x) V (x) W.
double rll_residual(const FundamentalChain& chain, cplx z, cplx w, cplx lambda);

/// Blocks of L with respect to the auxiliary basis:
///   L (e[1] (x) u)  = e[1] (x) A u + e[-1] (x) C u,
///   L (e[-1] (x) u) = e[1] (x) B u + e[-1] (x) D u.
struct OperatorBlocks {
  DynamicalMatrix a;
  DynamicalMatrix b;
  DynamicalMatrix c;
  DynamicalMatrix d;
};

OperatorBlocks abcd_blocks(const FundamentalChain& chain, cplx z, cplx lambda);

/// Highest-weight function D(z, l) for highest weight Lambda and data p_k, q_k:
///   theta(l - 2 eta Lambda) / theta(l) prod_k theta(z - p_k) / theta(z - q_k).
cplx highest_weight_d(cplx z, cplx lambda, int total_weight, const std::vector<cplx>& p_points,
                      const std::vector<cplx>& q_points, const ModularParams& p);

/// Finite sum of terms (O f)(l) = sum_k C_k(l) f(l + 2 eta k).
///
/// Composition (O1 O2)(l) = sum_{k,j} C1_k(l) C2_j(l + 2 eta k) f(l + 2 eta (k + j))
/// is kept lazy; coefficients are only materialised at a given l.
class DifferenceOperator {
 public:
  using Coefficient = std::function<Matrix(cplx)>;
  using Function = std::function<Vector(cplx)>;

  struct Term {
    int shift;
    Coefficient coeff;
  };

  DifferenceOperator(cplx eta, std::vector<Term> terms);

  /// Single-term operator.
  static DifferenceOperator shift(cplx eta, int k, Coefficient coeff);

  cplx eta() const noexcept { return eta_; }
  const std::vector<Term>& terms() const noexcept { return terms_; }

  Vector apply(const Function& f, cplx lambda) const;

  /// Coefficient matrices at l, terms with equal shift merged.
  std::map<int, Matrix> coefficients(cplx lambda) const;

  /// this o inner.
  DifferenceOperator compose(const DifferenceOperator& inner) const;

  DifferenceOperator operator+(const DifferenceOperator& other) const;

 private:
  cplx eta_;
  std::vector<Term> terms_;
};

/// a(z), b(z), c(z), d(z) as difference operators on Fun(W); a and c shift by
/// -2 eta, b and d by +2 eta.
enum class Generator { a, b, c, d };
DifferenceOperator generator_operator(const FundamentalChain& chain, Generator g, cplx z);

/// T(z) = a(z) + d(z) restricted to W[0].
DifferenceOperator transfer_operator(const FundamentalChain& chain, cplx z);

/// T(z) f (l) = A00(z, l) f(l - 2 eta) + D00(z, l) f(l + 2 eta), f valued in W[0].
Vector transfer_apply(const FundamentalChain& chain, cplx z, const DifferenceOperator::Function& f,
                      cplx lambda);

struct CommutationResiduals {
  double ab;  // a(w) b(t) - r(t-w, l) b(t) a(w) - s(t-w, l) b(w) a(t)
  double db;  // d(w) b(t) - r(w-t, l-2 eta h) b(t) d(w) + s(t-w, l-2 eta h) b(w) d(t)
};

/// Both exchange relations applied to a probe function, evaluated at l.
CommutationResiduals commutation_residual(const FundamentalChain& chain, cplx w, cplx t, cplx lambda,
                                          const DifferenceOperator::Function& probe);

/// Matrix whose column J (bit j-1 set iff j in J) is prod_{j in J} b(t_j) applied
/// to the constant function e[1] (x) ... (x) e[1], evaluated at l.
Matrix subset_vectors(const FundamentalChain& chain, const std::vector<cplx>& t, cplx lambda);

/// Rank of subset_vectors (relative singular-value threshold 1e-10). Requires
/// chain.size() == t.size() and pairwise distinct t modulo the lattice.
int rank_independence_check(const FundamentalChain& chain, const std::vector<cplx>& t, cplx lambda);

}  // namespace ellqg
