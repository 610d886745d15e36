#include "ellqg/qlame.hpp"

#include <cmath>
#include <stdexcept>

#include "ellqg/errors.hpp"

namespace ellqg {

QLameProblem::QLameProblem(int m, ModularParams params) : m_(m), params_(std::move(params)) {
  if (m_ < 1) throw std::invalid_argument("m: must be at least 1");
}

BetheProblem QLameProblem::bethe(cplx c) const {
  return BetheProblem(m_, {2 * m_}, {cplx{0.0, 0.0}}, c, params_);
}

cplx qlame_apply(const QLameProblem& prob, const ScalarFunction& psi, cplx lambda) {
  const ModularParams& p = prob.params();
  const cplx shift = 2.0 * p.eta() * static_cast<double>(prob.m());
  const cplx den = checked_denominator(theta(lambda, p), p, "qlame_apply: theta(lambda)");
  return (theta(lambda + shift, p) * psi(lambda - 2.0 * p.eta()) +
          theta(lambda - shift, p) * psi(lambda + 2.0 * p.eta())) /
         den;
}

cplx qlame_psi(const SpectralPoint& point, cplx lambda, const ModularParams& p) {
  cplx v = std::exp(point.c * lambda);
  for (const cplx& tj : point.t) v *= theta(lambda + tj - p.eta(), p);
  return v;
}

cplx qlame_eigenvalue(const QLameProblem& prob, const std::vector<cplx>& t, cplx c) {
  const ModularParams& p = prob.params();
  const cplx eta = p.eta();
  const double m = prob.m();
  cplx v = std::exp(-2.0 * eta * c) * theta(4.0 * eta * m, p) /
           checked_denominator(theta(2.0 * eta * m, p), p, "qlame_eigenvalue: theta(2 eta m)");
  for (const cplx& tj : t) {
    v *= theta(tj + (2.0 * m - 3.0) * eta, p) /
         checked_denominator(theta(tj + (2.0 * m - 1.0) * eta, p), p, "qlame_eigenvalue: theta(t_j + (2m-1) eta)");
  }
  return v;
}

double qlame_eigen_residual(const QLameProblem& prob, const SpectralPoint& point, cplx lambda) {
  const ModularParams& p = prob.params();
  auto psi = [&](cplx l) { return qlame_psi(point, l, p); };
  const cplx here = psi(lambda);
  if (!(std::abs(here) > 1e-300)) throw std::domain_error("qlame_eigen_residual: psi vanishes at lambda");
  return std::abs(qlame_apply(prob, psi, lambda) - point.eps * here) / std::abs(here);
}

namespace {

SpectralPoint to_point(const QLameProblem& prob, const BetheSolution& sol) {
  return {prob.m(), sol.t, sol.c, qlame_eigenvalue(prob, sol.t, sol.c), sol.residual};
}

}  // namespace

SpectralPoint qlame_solve(const QLameProblem& prob, cplx c, const std::vector<cplx>& t0, const SolverOptions& opts) {
  return to_point(prob, bae_solve(prob.bethe(c), t0, opts));
}

cplx qlame_closed_form_c(const QLameProblem& prob, cplx t) {
  if (prob.m() != 1) throw std::invalid_argument("qlame_closed_form_c: only for m = 1");
  const ModularParams& p = prob.params();
  const cplx eta = p.eta();
  const cplx ratio = theta(t - 3.0 * eta, p) / checked_denominator(theta(t + eta, p), p, "qlame_closed_form_c");
  if (std::abs(ratio) < p.pole_tol()) throw PoleError("qlame_closed_form_c: theta(t - 3 eta)", std::abs(ratio));
  return std::log(ratio) / (4.0 * eta);
}

SpectralPoint qlame_closed_form_point(const QLameProblem& prob, cplx t) {
  const cplx c = qlame_closed_form_c(prob, t);
  return to_point(prob, canonical_solution(prob.bethe(c), {t}));
}

SpectralPoint reflect_point(const QLameProblem& prob, const SpectralPoint& point) {
  std::vector<cplx> t;
  t.reserve(point.t.size());
  for (const cplx& x : point.t) t.push_back(2.0 * prob.params().eta() - x);
  return to_point(prob, canonical_solution(prob.bethe(-point.c), std::move(t)));
}

QLameContinuation qlame_continue(const QLameProblem& prob, const std::vector<cplx>& t0,
                                 const std::vector<cplx>& c_path, const SolverOptions& opts) {
  const ContinuationResult run = continue_in_c(prob.bethe(c_path.empty() ? cplx{} : c_path.front()), t0, c_path, opts);
  QLameContinuation out;
  for (const BetheSolution& sol : run.points) {
    out.points.push_back(to_point(prob, sol));
    out.paths.push_back(sol.t_path);
  }
  out.complete = run.complete;
  out.failure = run.failure;
  out.failure_trace = run.failure_trace;
  return out;
}

cplx wronskian(const ScalarFunction& f, const ScalarFunction& g, cplx lambda, const ModularParams& p) {
  const cplx up = lambda + 2.0 * p.eta();
  return f(up) * g(lambda) - f(lambda) * g(up);
}

double wronskian_recurrence_residual(const QLameProblem& prob, const ScalarFunction& f, const ScalarFunction& g,
                                     cplx lambda) {
  const ModularParams& p = prob.params();
  const cplx two_eta = 2.0 * p.eta();
  const cplx shift = two_eta * static_cast<double>(prob.m());
  const cplx lhs = theta(lambda - shift, p) * wronskian(f, g, lambda, p);
  const cplx rhs = theta(lambda + shift, p) * wronskian(f, g, lambda - two_eta, p);
  const double scale = std::max(std::abs(lhs), std::abs(rhs));
  return scale == 0.0 ? 0.0 : std::abs(lhs - rhs) / scale;
}

cplx bilinear_form(const QLameProblem& prob, const ScalarFunction& phi, const ScalarFunction& psi, int nodes) {
  const ModularParams& p = prob.params();
  if (std::abs(p.eta().imag()) > 1e-14) throw std::invalid_argument("bilinear_form: eta must be real");
  if (nodes < 2) throw std::invalid_argument("bilinear_form: need at least two nodes");
  const cplx two_eta = 2.0 * p.eta();
  auto integrand = [&](cplx l) {
    cplx den{1.0, 0.0};
    for (int j = 1; j <= prob.m(); ++j) {
      den *= theta(l - two_eta * static_cast<double>(j), p) * theta(l + two_eta * static_cast<double>(j), p);
    }
    return phi(l) * psi(-l) / checked_denominator(den, p, "bilinear_form: integrand pole");
  };
  const cplx half_tau = 0.5 * p.tau();
  cplx total{0.0, 0.0};
  for (const cplx start : {half_tau, -1.0 - half_tau}) {
    // unit-length segments of a 1-periodic integrand
    const double h = 1.0 / nodes;
    cplx sum{0.0, 0.0};
    for (int k = 0; k < nodes; ++k) sum += integrand(start + h * k);
    total += sum * h;
  }
  return total;
}

std::vector<ClassicalLimitRow> classical_limit_residual(int m, cplx tau, const ScalarFunction& psi, cplx lambda,
                                                        const std::vector<double>& etas, double h) {
  if (m < 0) throw std::invalid_argument("classical_limit_residual: m must be non-negative");
  const ModularParams base(tau, 0.1);
  const cplx f0 = psi(lambda);
  const cplx fp1 = psi(lambda + h), fm1 = psi(lambda - h);
  const cplx fp2 = psi(lambda + 2.0 * h), fm2 = psi(lambda - 2.0 * h);
  const cplx d1 = (-fp2 + 8.0 * fp1 - 8.0 * fm1 + fm2) / (12.0 * h);
  const cplx d2 = (-fp2 + 16.0 * fp1 - 30.0 * f0 + 16.0 * fm1 - fm2) / (12.0 * h * h);
  const std::array<cplx, 3> jet = theta_jet(lambda, base);
  const cplx th = checked_denominator(jet[0], base, "classical_limit_residual: theta(lambda)");
  const double md = m;
  const cplx limit = d2 - 2.0 * md * jet[1] / th * d1 + md * md * jet[2] / th * f0;

  std::vector<ClassicalLimitRow> rows;
  for (double eta : etas) {
    if (!(eta > 0.0)) throw std::invalid_argument("classical_limit_residual: eta must be positive");
    const QLameProblem prob(std::max(m, 1), base.with_eta(eta));
    cplx applied;
    if (m == 0) {
      applied = psi(lambda - 2.0 * eta) + psi(lambda + 2.0 * eta);
    } else {
      applied = qlame_apply(prob, psi, lambda);
    }
    rows.push_back({eta, std::abs((applied - 2.0 * f0) / (4.0 * eta * eta) - limit)});
  }
  return rows;
}

double empirical_order(const std::vector<ClassicalLimitRow>& rows) {
  if (rows.size() < 2) throw std::invalid_argument("empirical_order: need at least two rows");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (const ClassicalLimitRow& r : rows) {
    const double x = std::log(r.eta);
    const double y = std::log(r.residual);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double n = static_cast<double>(rows.size());
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace ellqg
