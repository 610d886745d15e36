#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "ellqg/bethe.hpp"
#include "ellqg/chain.hpp"
#include "ellqg/rmatrix.hpp"
#include "ellqg/tensor.hpp"
#include "ellqg/theta.hpp"

namespace ellqg {

using Vector2 = Eigen::Vector2cd;

// --- eight-vertex R-matrix ----------------------------------------------------

struct EightVertexWeights {
  cplx a, b, c, d;
};

/// a = th0(z) th0(2 eta) / (th0(z - 2 eta) th0(0)),  b = th1(z) th0(2 eta) / (th1(z - 2 eta) th0(0)),
/// c = -th0(z) th1(2 eta) / (th1(z - 2 eta) th0(0)), d = -th1(z) th1(2 eta) / (th0(z - 2 eta) th0(0)).
EightVertexWeights r8v_weights(cplx z, const ModularParams& p);

/// Baxter's matrix in the basis e1e1, e1e-1, e-1e1, e-1e-1: a on the corners of
/// the diagonal, b on the middle of the diagonal, c on the middle antidiagonal
/// and d on the outer antidiagonal. R(0) is the flip.
Matrix4 r8v_eval(cplx z, const ModularParams& p);

/// theta(2 eta) / theta'(0) (1 - P): residue of r8v_eval at z = 2 eta.
Matrix4 r8v_residue_expected(const ModularParams& p);

/// Richardson extrapolation of delta R(2 eta + delta) from delta and delta / 2.
Matrix4 r8v_residue_estimate(const ModularParams& p, double delta = 1e-5);

// --- vertex-IRF intertwiner ---------------------------------------------------

/// phi(x) = (th1(x), th0(x)).
Vector2 phi_vector(cplx x, const ModularParams& p);

/// (1 / theta(l)) [[ th0(z - l + 1/2), -th0(-z - l + 1/2)], [-th1(z - l + 1/2), th1(-z - l + 1/2)]].
Matrix2 s_matrix(cplx z, cplx lambda, const ModularParams& p);

/// Columns phi(-z - l + 1/2) and phi(z - l + 1/2).
Matrix2 s_hat(cplx z, cplx lambda, const ModularParams& p);

/// Max-norm of S(w,l)^{(2)} S(z, l - 2 eta h^{(2)})^{(1)} R(z-w, l) - R8V(z-w) S(z,l)^{(1)} S(w, l - 2 eta h^{(1)})^{(2)}.
double vertex_irf_residual(cplx z, cplx w, cplx lambda, const ModularParams& p);

struct LemmaResiduals {
  double same_sign;   // R8V(z-w) phi^s(z, l - 2 s eta) (x) phi^s(w, l) - phi^s(z, l) (x) phi^s(w, l - 2 s eta)
  double mixed_sign;  // the alpha / beta identity, both signs
};

LemmaResiduals vertex_irf_lemma_residuals(cplx z, cplx w, cplx lambda, const ModularParams& p);

// --- eight-vertex transfer matrix ---------------------------------------------

class EightVertexChain {
 public:
  EightVertexChain(std::vector<cplx> z_points, ModularParams params);

  int size() const noexcept { return static_cast<int>(z_.size()); }
  std::size_t dim() const noexcept { return basis_dim(size()); }
  const std::vector<cplx>& z_points() const noexcept { return z_; }
  const ModularParams& params() const noexcept { return params_; }

 private:
  std::vector<cplx> z_;
  ModularParams params_;
};

/// tr_0 R8V(z - z_1)^{(01)} ... R8V(z - z_n)^{(0n)}.
Matrix t8v_matrix(const EightVertexChain& chain, cplx z);

/// S(z_n, l)^{(n)} ... S(z_1, l - 2 eta sum_{j>=2} h^{(j)})^{(1)}; with dynamical = false
/// every factor is evaluated at l (only used to check that the shift matters).
Matrix s_chain(const EightVertexChain& chain, cplx lambda, bool dynamical = true);

/// Max-norm over W[0] of T8V(z) S_n(l) - S_n(l + 2 eta) a(z, l + 2 eta) - S_n(l - 2 eta) d(z, l - 2 eta).
double t8v_intertwine_residual(const EightVertexChain& chain, cplx z, cplx lambda, bool dynamical = true);

struct RationalEta {
  long num;
  long den;
  double value() const { return static_cast<double>(num) / static_cast<double>(den); }
};

/// Lowest terms, positive denominator; throws std::invalid_argument otherwise.
RationalEta make_rational_eta(long num, long den);

struct EightVertexEigen {
  Vector vector;
  cplx mu;
  int attempts = 0;
  std::vector<cplx> z_samples;
  std::vector<cplx> t8v_eigenvalues;  // <v, T8V(z) v> / <v, v>
  std::vector<cplx> bethe_eigenvalues;  // eps(z) from the Bethe roots
  std::vector<double> residuals;      // |T8V(z) v - eps(z) v| / |v|
  double max_residual() const;
};

/// v = sum_{j=0}^{q-1} S_n(mu + 2 eta j) psi(mu + 2 eta j) for eta = num/den and a
/// fundamental problem with c in pi i Z. When |v| is negligible the sum is
/// retried at up to max_attempts - 1 further mu drawn from retry_seed; gives up
/// with std::runtime_error after that.
EightVertexEigen t8v_bethe_eigenvector(const BetheProblem& prob, const RationalEta& eta, const BetheSolution& sol,
                                       cplx mu, const std::vector<cplx>& z_samples, std::uint64_t retry_seed = 0,
                                       int max_attempts = 8);

// --- paths and the IRF transfer matrix ----------------------------------------

/// Closed height path a_1 .. a_n with a_j - a_{j+1} = +-1 cyclically; n even.
class PathState {
 public:
  explicit PathState(std::vector<Height> heights);

  /// a_1 = start, a_{j+1} = a_j - steps[j]; steps must sum to zero.
  static PathState from_steps(Height start, const std::vector<int>& steps);

  const std::vector<Height>& heights() const noexcept { return heights_; }
  int size() const noexcept { return static_cast<int>(heights_.size()); }
  /// a_j - a_{j+1} with a_{n+1} = a_1.
  std::vector<int> steps() const;
  friend bool operator==(const PathState&, const PathState&) = default;

 private:
  std::vector<Height> heights_;
};

/// All b adjacent to a with T(z)|a> = sum_b coeff |b>, each coefficient the
/// product of w(b_j, a_j, a_{j+1}, b_{j+1}; z - z_j).
std::vector<std::pair<PathState, cplx>> irf_transfer_coeffs(const PathState& state, cplx z,
                                                            const FundamentalChain& chain);

/// Compares each coefficient with (T(z) f)(-2 eta b_1) on the e[b_1 - b_2] (x) ... component,
/// f = delta(l + 2 eta a_1) e[a_1 - a_2] (x) ... (x) e[a_n - a_1]. Returns the max difference.
double irf_operator_residual(const PathState& state, cplx z, const FundamentalChain& chain);

}  // namespace ellqg
