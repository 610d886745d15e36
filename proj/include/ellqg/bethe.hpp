#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ellqg/chain.hpp"
#include "ellqg/tensor.hpp"
#include "ellqg/theta.hpp"

namespace ellqg {

/// Bethe equations for a product of highest-weight modules with weights
/// Lambda_k and evaluation points z_k, at fixed exponent c.
class BetheProblem {
 public:
  /// Requires m >= 1, weights.size() == z_points.size() >= 1, every weight >= 1
  /// and sum of weights == 2m.
  BetheProblem(int m, std::vector<int> weights, std::vector<cplx> z_points, cplx c, ModularParams params);

  /// n = 2m sites of weight 1.
  static BetheProblem fundamental(std::vector<cplx> z_points, cplx c, ModularParams params);

  int m() const noexcept { return m_; }
  int n() const noexcept { return static_cast<int>(z_.size()); }
  const std::vector<int>& weights() const noexcept { return weights_; }
  const std::vector<cplx>& z_points() const noexcept { return z_; }
  cplx c() const noexcept { return c_; }
  const ModularParams& params() const noexcept { return params_; }

  /// p_k = z_k + eta (1 - Lambda_k), q_k = z_k + eta (1 + Lambda_k).
  const std::vector<cplx>& p_points() const noexcept { return p_; }
  const std::vector<cplx>& q_points() const noexcept { return q_; }

  bool is_fundamental() const;
  BetheProblem with_c(cplx c) const;

 private:
  int m_;
  std::vector<int> weights_;
  std::vector<cplx> z_;
  cplx c_;
  ModularParams params_;
  std::vector<cplx> p_;
  std::vector<cplx> q_;
};

struct BetheSolution {
  std::vector<cplx> t;       // canonical: reduced into the fundamental cell, sorted by (re, im)
  cplx c;                    // exponent matching t (see canonical_solution)
  double residual = 0.0;     // max-norm of bae_residual
  int iterations = 0;
  std::vector<double> trace;  // residual max-norm before each Newton step and at the end
  std::vector<cplx> t_path;  // unreduced iterate, used to seed continuation
};

struct SolverOptions {
  double tol = 1e-12;
  int max_iter = 100;
  int max_halvings = 30;
  double collision_tol = 1e-6;  // min lattice distance between roots
};

/// Component i: prod_{j != i} theta(t_j - t_i - 2 eta) / theta(t_j - t_i + 2 eta)
///              * prod_k theta(t_i - q_k) / theta(t_i - p_k) - e^{4 eta c}.
/// Throws std::invalid_argument for roots that coincide modulo the lattice.
std::vector<cplx> bae_residual(const BetheProblem& prob, const std::vector<cplx>& t);

/// Derivative of bae_residual with respect to t, from logarithmic derivatives of theta.
Matrix bae_jacobian(const BetheProblem& prob, const std::vector<cplx>& t);

double max_norm(const std::vector<cplx>& v);

/// Smallest lattice distance between two roots; +inf for fewer than two.
double min_root_separation(const std::vector<cplx>& t, const ModularParams& p);

/// Reduces each root into the fundamental cell and sorts. Moving t_i by tau
/// multiplies every product in the equations by e^{8 pi i eta}, which is
/// absorbed by c -> c + 2 pi i; the returned c carries that correction.
BetheSolution canonical_solution(const BetheProblem& prob, std::vector<cplx> t);

/// Damped Newton iteration. Throws std::invalid_argument for a start vector
/// with coincident entries and ConvergenceError (with the residual trace) when
/// the iteration stalls, hits a singular Jacobian or runs out of iterations.
BetheSolution bae_solve(const BetheProblem& prob, const std::vector<cplx>& t0, const SolverOptions& opts = {});

/// Runs bae_solve from up to `attempts` starting vectors drawn uniformly from
/// the cell {x + y tau : x in [-1/2, 1/2), |y| < 0.3}; returns the first success
/// and rethrows the last ConvergenceError otherwise.
BetheSolution bae_solve_multistart(const BetheProblem& prob, std::uint64_t seed, int attempts = 20,
                                   const SolverOptions& opts = {});

struct ContinuationResult {
  std::vector<BetheSolution> points;  // one per successfully reached c
  bool complete = false;
  std::string failure;                // set when !complete
  std::vector<double> failure_trace;
};

/// Solves along c_path, seeding each step with the previous unreduced roots.
/// Stops at the first failing step.
ContinuationResult continue_in_c(const BetheProblem& prob, const std::vector<cplx>& t0,
                                 const std::vector<cplx>& c_path, const SolverOptions& opts = {});

/// eps(w) = e^{-2 eta c} prod_j theta(t_j - w - 2 eta) / theta(t_j - w)
///        + e^{2 eta c} prod_j theta(t_j - w + 2 eta) / theta(t_j - w) prod_k theta(w - p_k) / theta(w - q_k).
cplx transfer_eigenvalue(const BetheProblem& prob, const std::vector<cplx>& t, cplx c, cplx w);
cplx transfer_eigenvalue(const BetheProblem& prob, const BetheSolution& sol, cplx w);

/// Coefficients of b(t_1) ... b(t_m) v over e_{m_1} (x) ... (x) e_{m_n}, where
/// e_j has weight Lambda - 2j in its factor. One entry per occupation tuple with
/// sum m; occupations are in lexicographic order.
struct BetheVector {
  std::vector<std::vector<int>> occupations;
  Vector coeffs;
};

BetheVector bethe_vector_closed(const BetheProblem& prob, const std::vector<cplx>& t, cplx c, cplx lambda);
BetheVector bethe_vector_closed(const BetheProblem& prob, const BetheSolution& sol, cplx lambda);

/// Image in (C^2)^{(x)n} for weight-one factors: e_0 -> e[1], e_1 -> e[-1],
/// occupations above 1 lie in the kernel of the quotient map and are dropped.
Vector to_chain_vector(const BetheVector& v);

/// B(t_1, l) B(t_2, l + 2 eta) ... B(t_m, l + 2 eta (m-1)) g(l + 2 eta m) e[1]^{(x)n}
/// with g(l) = e^{c l} prod_{j=1}^m theta(l - 2 eta j) / theta(2 eta). Fundamental problems only.
Vector bethe_vector_oracle(const BetheProblem& prob, const std::vector<cplx>& t, cplx c, cplx lambda);

/// Zero-weight part of the closed-form vector, indexed like FundamentalChain::zero_weight_basis.
Vector bethe_vector_zero_weight(const BetheProblem& prob, const std::vector<cplx>& t, cplx c, cplx lambda);

/// |A00(w, l) psi(l - 2 eta) + D00(w, l) psi(l + 2 eta) - eps(w) psi(l)| / |psi(l)|.
/// Throws std::domain_error when |psi(l)| is negligible.
double eigen_relation_residual(const BetheProblem& prob, const std::vector<cplx>& t, cplx c, cplx w,
                               cplx lambda);
double eigen_relation_residual(const BetheProblem& prob, const BetheSolution& sol, cplx w, cplx lambda);

}  // namespace ellqg
