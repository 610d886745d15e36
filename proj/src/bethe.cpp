#include "ellqg/bethe.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <random>
#include <stdexcept>
#include <string>

#include "ellqg/errors.hpp"

namespace ellqg {

namespace {

constexpr double kPi = 3.14159265358979323846;

void require_distinct(const std::vector<cplx>& t, const ModularParams& p, double tol, const char* where) {
  if (min_root_separation(t, p) < tol) {
    throw std::invalid_argument(std::string(where) + ": roots coincide modulo the lattice");
  }
}

cplx ratio(cplx num, cplx den, const ModularParams& p, const char* where) {
  return num / checked_denominator(den, p, where);
}

}  // namespace

BetheProblem::BetheProblem(int m, std::vector<int> weights, std::vector<cplx> z_points, cplx c,
                           ModularParams params)
    : m_(m), weights_(std::move(weights)), z_(std::move(z_points)), c_(c), params_(std::move(params)) {
  if (m_ < 1) throw std::invalid_argument("m: must be at least 1");
  if (z_.empty() || weights_.size() != z_.size()) {
    throw std::invalid_argument("Lambda: need one weight per evaluation point");
  }
  if (std::any_of(weights_.begin(), weights_.end(), [](int w) { return w < 1; })) {
    throw std::invalid_argument("Lambda: weights must be positive");
  }
  if (std::accumulate(weights_.begin(), weights_.end(), 0) != 2 * m_) {
    throw std::invalid_argument("Lambda: weights must sum to 2m");
  }
  const cplx eta = params_.eta();
  for (std::size_t k = 0; k < z_.size(); ++k) {
    const double lam = weights_[k];
    p_.push_back(z_[k] + eta * (1.0 - lam));
    q_.push_back(z_[k] + eta * (1.0 + lam));
  }
}

BetheProblem BetheProblem::fundamental(std::vector<cplx> z_points, cplx c, ModularParams params) {
  if (z_points.size() % 2 != 0) throw std::invalid_argument("z: a weight-one chain needs an even number of sites");
  const int m = static_cast<int>(z_points.size() / 2);
  std::vector<int> weights(z_points.size(), 1);
  return BetheProblem(m, std::move(weights), std::move(z_points), c, std::move(params));
}

bool BetheProblem::is_fundamental() const {
  return std::all_of(weights_.begin(), weights_.end(), [](int w) { return w == 1; });
}

BetheProblem BetheProblem::with_c(cplx c) const { return BetheProblem(m_, weights_, z_, c, params_); }

double max_norm(const std::vector<cplx>& v) {
  double out = 0.0;
  for (const cplx& x : v) out = std::max(out, std::abs(x));
  return out;
}

double min_root_separation(const std::vector<cplx>& t, const ModularParams& p) {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < t.size(); ++i) {
    for (std::size_t j = i + 1; j < t.size(); ++j) best = std::min(best, lattice_distance(t[i] - t[j], p));
  }
  return best;
}

namespace {

// Products P_i (without the e^{4 eta c} term).
std::vector<cplx> bae_products(const BetheProblem& prob, const std::vector<cplx>& t) {
  const ModularParams& p = prob.params();
  const cplx two_eta = 2.0 * p.eta();
  std::vector<cplx> out(t.size());
  for (std::size_t i = 0; i < t.size(); ++i) {
    cplx v{1.0, 0.0};
    for (std::size_t j = 0; j < t.size(); ++j) {
      if (j == i) continue;
      const cplx d = t[j] - t[i];
      v *= ratio(theta(d - two_eta, p), theta(d + two_eta, p), p, "bae: theta(t_j - t_i + 2 eta)");
    }
    for (std::size_t k = 0; k < prob.p_points().size(); ++k) {
      v *= ratio(theta(t[i] - prob.q_points()[k], p), theta(t[i] - prob.p_points()[k], p), p,
                 "bae: theta(t_i - p_k)");
    }
    out[i] = v;
  }
  return out;
}

}  // namespace

std::vector<cplx> bae_residual(const BetheProblem& prob, const std::vector<cplx>& t) {
  if (static_cast<int>(t.size()) != prob.m()) throw std::invalid_argument("t: need m roots");
  require_distinct(t, prob.params(), 1e-12, "bae_residual");
  std::vector<cplx> out = bae_products(prob, t);
  const cplx rhs = std::exp(4.0 * prob.params().eta() * prob.c());
  for (cplx& x : out) x -= rhs;
  return out;
}

Matrix bae_jacobian(const BetheProblem& prob, const std::vector<cplx>& t) {
  const ModularParams& p = prob.params();
  const cplx two_eta = 2.0 * p.eta();
  const std::vector<cplx> prod = bae_products(prob, t);
  const auto m = static_cast<Eigen::Index>(t.size());
  Matrix jac = Matrix::Zero(m, m);
  for (Eigen::Index i = 0; i < m; ++i) {
    const auto ui = static_cast<std::size_t>(i);
    cplx diag{0.0, 0.0};
    for (Eigen::Index j = 0; j < m; ++j) {
      if (j == i) continue;
      const cplx d = t[static_cast<std::size_t>(j)] - t[ui];
      const cplx g = theta_log_deriv(d - two_eta, p) - theta_log_deriv(d + two_eta, p);
      jac(i, j) = prod[ui] * g;
      diag -= g;
    }
    for (std::size_t k = 0; k < prob.p_points().size(); ++k) {
      diag += theta_log_deriv(t[ui] - prob.q_points()[k], p) - theta_log_deriv(t[ui] - prob.p_points()[k], p);
    }
    jac(i, i) = prod[ui] * diag;
  }
  return jac;
}

BetheSolution canonical_solution(const BetheProblem& prob, std::vector<cplx> t) {
  const ModularParams& p = prob.params();
  BetheSolution sol;
  sol.t_path = t;
  long tau_shift = 0;
  for (cplx& x : t) {
    const LatticeCell cell = lattice_reduce(x, p);
    x = cell.z0;
    tau_shift += cell.n;
  }
  std::sort(t.begin(), t.end(), [](cplx a, cplx b) {
    return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
  });
  sol.t = std::move(t);
  sol.c = prob.c() - cplx{0.0, 2.0 * kPi * static_cast<double>(tau_shift)};
  sol.residual = max_norm(bae_residual(prob.with_c(sol.c), sol.t));
  return sol;
}

BetheSolution bae_solve(const BetheProblem& prob, const std::vector<cplx>& t0, const SolverOptions& opts) {
  if (static_cast<int>(t0.size()) != prob.m()) throw std::invalid_argument("t0: need m starting roots");
  require_distinct(t0, prob.params(), opts.collision_tol, "t0");

  std::vector<cplx> t = t0;
  std::vector<double> trace;
  double norm = max_norm(bae_residual(prob, t));
  trace.push_back(norm);
  int iter = 0;
  while (norm >= opts.tol) {
    if (iter >= opts.max_iter) {
      throw ConvergenceError("bae_solve: no convergence after " + std::to_string(opts.max_iter) + " iterations",
                             trace);
    }
    ++iter;
    const std::vector<cplx> f = bae_residual(prob, t);
    const Matrix jac = bae_jacobian(prob, t);
    Eigen::FullPivLU<Matrix> lu(jac);
    if (!lu.isInvertible()) throw ConvergenceError("bae_solve: singular Jacobian", trace);
    Vector rhs(static_cast<Eigen::Index>(f.size()));
    for (std::size_t i = 0; i < f.size(); ++i) rhs[static_cast<Eigen::Index>(i)] = f[i];
    const Vector step = lu.solve(rhs);
    if (!step.allFinite()) throw ConvergenceError("bae_solve: non-finite Newton step", trace);

    double damping = 1.0;
    bool accepted = false;
    std::vector<cplx> trial(t.size());
    for (int h = 0; h <= opts.max_halvings; ++h, damping *= 0.5) {
      for (std::size_t i = 0; i < t.size(); ++i) trial[i] = t[i] - damping * step[static_cast<Eigen::Index>(i)];
      if (min_root_separation(trial, prob.params()) < opts.collision_tol) continue;
      double trial_norm = 0.0;
      try {
        trial_norm = max_norm(bae_residual(prob, trial));
      } catch (const PoleError&) {
        continue;
      }
      if (std::isfinite(trial_norm) && trial_norm < norm) {
        t = trial;
        norm = trial_norm;
        accepted = true;
        break;
      }
    }
    if (!accepted) throw ConvergenceError("bae_solve: damped step failed to reduce the residual", trace);
    trace.push_back(norm);
  }
  BetheSolution sol = canonical_solution(prob, t);
  sol.iterations = iter;
  sol.trace = std::move(trace);
  return sol;
}

BetheSolution bae_solve_multistart(const BetheProblem& prob, std::uint64_t seed, int attempts,
                                   const SolverOptions& opts) {
  if (attempts < 1) throw std::invalid_argument("bae_solve_multistart: need at least one attempt");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> re(-0.5, 0.5);
  std::uniform_real_distribution<double> im(-0.3, 0.3);
  std::vector<double> last_trace;
  std::string last_message = "bae_solve_multistart: no start tried";
  for (int a = 0; a < attempts; ++a) {
    std::vector<cplx> t0(static_cast<std::size_t>(prob.m()));
    for (cplx& x : t0) x = re(rng) + im(rng) * prob.params().tau();
    if (min_root_separation(t0, prob.params()) < opts.collision_tol) continue;
    try {
      return bae_solve(prob, t0, opts);
    } catch (const ConvergenceError& e) {
      last_message = e.what();
      last_trace = e.trace();
    } catch (const PoleError& e) {
      last_message = e.what();
    }
  }
  throw ConvergenceError(last_message + " (after " + std::to_string(attempts) + " starts)", last_trace);
}

ContinuationResult continue_in_c(const BetheProblem& prob, const std::vector<cplx>& t0,
                                 const std::vector<cplx>& c_path, const SolverOptions& opts) {
  ContinuationResult out;
  std::vector<cplx> seed = t0;
  for (const cplx& c : c_path) {
    try {
      BetheSolution sol = bae_solve(prob.with_c(c), seed, opts);
      seed = sol.t_path;
      out.points.push_back(std::move(sol));
    } catch (const ConvergenceError& e) {
      out.failure = e.what();
      out.failure_trace = e.trace();
      return out;
    } catch (const std::exception& e) {
      out.failure = e.what();
      return out;
    }
  }
  out.complete = true;
  return out;
}

cplx transfer_eigenvalue(const BetheProblem& prob, const std::vector<cplx>& t, cplx c, cplx w) {
  const ModularParams& p = prob.params();
  const cplx two_eta = 2.0 * p.eta();
  cplx first = std::exp(-two_eta * c);
  cplx second = std::exp(two_eta * c);
  for (const cplx& tj : t) {
    const cplx den = checked_denominator(theta(tj - w, p), p, "transfer_eigenvalue: theta(t_j - w)");
    first *= theta(tj - w - two_eta, p) / den;
    second *= theta(tj - w + two_eta, p) / den;
  }
  for (std::size_t k = 0; k < prob.p_points().size(); ++k) {
    second *= ratio(theta(w - prob.p_points()[k], p), theta(w - prob.q_points()[k], p), p,
                    "transfer_eigenvalue: theta(w - q_k)");
  }
  return first + second;
}

cplx transfer_eigenvalue(const BetheProblem& prob, const BetheSolution& sol, cplx w) {
  return transfer_eigenvalue(prob, sol.t, sol.c, w);
}

BetheVector bethe_vector_closed(const BetheProblem& prob, const std::vector<cplx>& t, cplx c, cplx lambda) {
  const ModularParams& p = prob.params();
  const cplx two_eta = 2.0 * p.eta();
  const int m = static_cast<int>(t.size());
  const int n = prob.n();
  const std::vector<cplx>& pk = prob.p_points();
  const std::vector<cplx>& qk = prob.q_points();
  if (m != prob.m()) throw std::invalid_argument("t: need m roots");

  // assignment[i] = index of the block I_k containing root i; multi-radix counter
  std::vector<int> assignment(static_cast<std::size_t>(m), 0);
  std::map<std::vector<int>, cplx> acc;
  for (;;) {
    std::vector<int> occ(static_cast<std::size_t>(n), 0);
    for (int k : assignment) ++occ[static_cast<std::size_t>(k)];

    cplx coeff{1.0, 0.0};
    for (int i = 0; i < m; ++i) {
      const int l = assignment[static_cast<std::size_t>(i)];
      const cplx ti = t[static_cast<std::size_t>(i)];
      for (int k = l + 1; k < n; ++k) {
        const auto uk = static_cast<std::size_t>(k);
        coeff *= ratio(theta(ti - pk[uk], p), theta(ti - qk[uk], p), p, "bethe_vector: theta(t_i - q_k)");
      }
      for (int j = 0; j < m; ++j) {
        if (assignment[static_cast<std::size_t>(j)] <= l) continue;
        const cplx d = ti - t[static_cast<std::size_t>(j)];
        coeff *= ratio(theta(d - two_eta, p), theta(d, p), p, "bethe_vector: theta(t_i - t_j)");
      }
    }
    for (int i = 0; i < m; ++i) {
      const auto k = static_cast<std::size_t>(assignment[static_cast<std::size_t>(i)]);
      int tail = 0;
      for (std::size_t l = k + 1; l < static_cast<std::size_t>(n); ++l) tail += prob.weights()[l] - 2 * occ[l];
      const cplx ti = t[static_cast<std::size_t>(i)];
      const cplx arg = lambda + ti - qk[k] + two_eta * static_cast<double>(occ[k]) - two_eta * static_cast<double>(tail);
      coeff *= ratio(theta(arg, p), theta(ti - qk[k], p), p, "bethe_vector: theta(t_j - q_k)");
    }
    acc[occ] += coeff;

    int pos = 0;
    while (pos < m && ++assignment[static_cast<std::size_t>(pos)] == n) {
      assignment[static_cast<std::size_t>(pos)] = 0;
      ++pos;
    }
    if (pos == m) break;
  }

  const cplx prefactor = (m % 2 == 0 ? 1.0 : -1.0) * std::exp(c * (lambda + two_eta * static_cast<double>(m)));
  BetheVector out;
  out.coeffs.resize(static_cast<Eigen::Index>(acc.size()));
  Eigen::Index idx = 0;
  for (auto& [occ, value] : acc) {
    out.occupations.push_back(occ);
    out.coeffs[idx++] = prefactor * value;
  }
  return out;
}

BetheVector bethe_vector_closed(const BetheProblem& prob, const BetheSolution& sol, cplx lambda) {
  return bethe_vector_closed(prob, sol.t, sol.c, lambda);
}

Vector to_chain_vector(const BetheVector& v) {
  if (v.occupations.empty()) throw std::invalid_argument("to_chain_vector: empty vector");
  const int n = static_cast<int>(v.occupations.front().size());
  Vector out = Vector::Zero(static_cast<Eigen::Index>(basis_dim(n)));
  for (std::size_t i = 0; i < v.occupations.size(); ++i) {
    const std::vector<int>& occ = v.occupations[i];
    if (std::any_of(occ.begin(), occ.end(), [](int o) { return o > 1; })) continue;
    std::vector<int> signs(occ.size());
    std::transform(occ.begin(), occ.end(), signs.begin(), [](int o) { return o == 0 ? 1 : -1; });
    out[static_cast<Eigen::Index>(state_of_signs(signs))] = v.coeffs[static_cast<Eigen::Index>(i)];
  }
  return out;
}

Vector bethe_vector_oracle(const BetheProblem& prob, const std::vector<cplx>& t, cplx c, cplx lambda) {
  if (!prob.is_fundamental()) throw std::invalid_argument("bethe_vector_oracle: weight-one factors only");
  const ModularParams& p = prob.params();
  const cplx two_eta = 2.0 * p.eta();
  const int m = static_cast<int>(t.size());
  const FundamentalChain chain(prob.z_points(), p);

  const cplx top = lambda + two_eta * static_cast<double>(m);
  cplx g = std::exp(c * top);
  const cplx norm = checked_denominator(theta(two_eta, p), p, "bethe_vector_oracle: theta(2 eta)");
  for (int j = 1; j <= m; ++j) g *= theta(top - two_eta * static_cast<double>(j), p) / norm;

  Vector v = Vector::Zero(static_cast<Eigen::Index>(chain.dim()));
  v[0] = g;
  for (int i = m - 1; i >= 0; --i) {
    v = abcd_blocks(chain, t[static_cast<std::size_t>(i)], lambda + two_eta * static_cast<double>(i)).b.entries * v;
  }
  return v;
}

Vector bethe_vector_zero_weight(const BetheProblem& prob, const std::vector<cplx>& t, cplx c, cplx lambda) {
  if (!prob.is_fundamental()) throw std::invalid_argument("bethe_vector_zero_weight: weight-one factors only");
  const Vector full = to_chain_vector(bethe_vector_closed(prob, t, c, lambda));
  const std::vector<std::size_t> zero = weight_indices(prob.n(), 0);
  Vector out(static_cast<Eigen::Index>(zero.size()));
  for (std::size_t i = 0; i < zero.size(); ++i) out[static_cast<Eigen::Index>(i)] = full[static_cast<Eigen::Index>(zero[i])];
  return out;
}

double eigen_relation_residual(const BetheProblem& prob, const std::vector<cplx>& t, cplx c, cplx w,
                               cplx lambda) {
  const FundamentalChain chain(prob.z_points(), prob.params());
  auto psi = [&](cplx l) { return bethe_vector_zero_weight(prob, t, c, l); };
  const Vector here = psi(lambda);
  const double scale = here.norm();
  if (!(scale > 1e-12)) throw std::domain_error("eigen_relation_residual: Bethe vector vanishes at lambda");
  const Vector lhs = transfer_apply(chain, w, psi, lambda);
  return (lhs - transfer_eigenvalue(prob, t, c, w) * here).norm() / scale;
}

double eigen_relation_residual(const BetheProblem& prob, const BetheSolution& sol, cplx w, cplx lambda) {
  return eigen_relation_residual(prob, sol.t, sol.c, w, lambda);
}

}  // namespace ellqg
