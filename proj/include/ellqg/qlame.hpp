#pragma once

#include <functional>
#include <vector>

#include "ellqg/bethe.hpp"
#include "ellqg/theta.hpp"

namespace ellqg {

using ScalarFunction = std::function<cplx(cplx)>;

/// Zero-weight sector of the evaluation module of highest weight 2m at z = 0,
/// where the transfer matrix reduces to the scalar difference operator
///   L psi(l) = theta(l + 2 eta m) / theta(l) psi(l - 2 eta) + theta(l - 2 eta m) / theta(l) psi(l + 2 eta).
class QLameProblem {
 public:
  QLameProblem(int m, ModularParams params);

  int m() const noexcept { return m_; }
  const ModularParams& params() const noexcept { return params_; }

  /// One factor of weight 2m at z = 0: p = eta (1 - 2m), q = eta (1 + 2m).
  BetheProblem bethe(cplx c) const;

 private:
  int m_;
  ModularParams params_;
};

struct SpectralPoint {
  int m = 0;
  std::vector<cplx> t;
  cplx c;
  cplx eps;
  double residual = 0.0;  // max-norm of the Bethe residual
};

cplx qlame_apply(const QLameProblem& prob, const ScalarFunction& psi, cplx lambda);

/// psi(l) = e^{c l} prod_j theta(l + t_j - eta).
cplx qlame_psi(const SpectralPoint& point, cplx lambda, const ModularParams& p);

/// e^{-2 eta c} theta(4 eta m) / theta(2 eta m) prod_j theta(t_j + (2m-3) eta) / theta(t_j + (2m-1) eta).
cplx qlame_eigenvalue(const QLameProblem& prob, const std::vector<cplx>& t, cplx c);

/// |L psi - eps psi| / |psi| at lambda.
double qlame_eigen_residual(const QLameProblem& prob, const SpectralPoint& point, cplx lambda);

SpectralPoint qlame_solve(const QLameProblem& prob, cplx c, const std::vector<cplx>& t0,
                          const SolverOptions& opts = {});

/// For m = 1 every generic t solves the single equation with
/// c = log(theta(t - 3 eta) / theta(t + eta)) / (4 eta), principal branch.
cplx qlame_closed_form_c(const QLameProblem& prob, cplx t);
SpectralPoint qlame_closed_form_point(const QLameProblem& prob, cplx t);

/// (2 eta - t_1, ..., 2 eta - t_m, -c), canonicalized; eps is recomputed.
SpectralPoint reflect_point(const QLameProblem& prob, const SpectralPoint& point);

struct QLameContinuation {
  std::vector<SpectralPoint> points;
  std::vector<std::vector<cplx>> paths;  // unreduced roots per point, continuous along the path
  bool complete = false;
  std::string failure;
  std::vector<double> failure_trace;
};

QLameContinuation qlame_continue(const QLameProblem& prob, const std::vector<cplx>& t0,
                                 const std::vector<cplx>& c_path, const SolverOptions& opts = {});

/// W(f, g)(l) = f(l + 2 eta) g(l) - f(l) g(l + 2 eta).
cplx wronskian(const ScalarFunction& f, const ScalarFunction& g, cplx lambda, const ModularParams& p);

/// For two solutions of L psi = eps psi:
///   theta(l - 2 eta m) W(l) - theta(l + 2 eta m) W(l - 2 eta), relative to the larger term.
double wronskian_recurrence_residual(const QLameProblem& prob, const ScalarFunction& f, const ScalarFunction& g,
                                     cplx lambda);

/// (phi, psi) = int_gamma phi(l) psi(-l) / prod_j theta(l - 2 eta j) theta(l + 2 eta j) dl,
/// gamma = [tau/2, 1 + tau/2] + [-1 - tau/2, -tau/2], periodic trapezoid rule.
/// Requires real eta; phi and psi must share the multiplier under l -> l + 1.
cplx bilinear_form(const QLameProblem& prob, const ScalarFunction& phi, const ScalarFunction& psi, int nodes = 400);

struct ClassicalLimitRow {
  double eta;
  double residual;
};

/// |(L_eta psi - 2 psi) / (4 eta^2) - (psi'' - 2m theta'/theta psi' + m^2 theta''/theta psi)| at lambda
/// for each eta, with psi', psi'' from five-point central differences of step h.
std::vector<ClassicalLimitRow> classical_limit_residual(int m, cplx tau, const ScalarFunction& psi, cplx lambda,
                                                        const std::vector<double>& etas, double h = 1e-3);

/// Least-squares slope of log(residual) against log(eta).
double empirical_order(const std::vector<ClassicalLimitRow>& rows);

}  // namespace ellqg
