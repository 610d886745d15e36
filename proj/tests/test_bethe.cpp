#include <doctest.h>

#include <algorithm>

#include "ellqg/bethe.hpp"
#include "ellqg/errors.hpp"
#include "support.hpp"

using namespace ellqg;
using testing_support::Gen;
using testing_support::kPi;
using testing_support::rel;

namespace {

const ModularParams kParams(cplx(0.0, 0.9), 0.11);

BetheProblem fixture() { return BetheProblem::fundamental({0.0, 0.4}, 0.0, kParams); }
BetheProblem four_sites() { return BetheProblem::fundamental({0.0, 0.23, 0.41, cplx(0.6, 0.05)}, 0.0, kParams); }

}  // namespace

TEST_CASE("problem validation") {
  CHECK_THROWS_AS(BetheProblem(0, {1}, {0.0}, 0.0, kParams), std::invalid_argument);
  CHECK_THROWS_AS(BetheProblem(1, {1, 2}, {0.0, 0.3}, 0.0, kParams), std::invalid_argument);
  CHECK_THROWS_AS(BetheProblem(1, {1}, {0.0, 0.3}, 0.0, kParams), std::invalid_argument);
  CHECK_THROWS_AS(BetheProblem(1, {2, 0}, {0.0, 0.3}, 0.0, kParams), std::invalid_argument);
  CHECK_THROWS_AS(BetheProblem::fundamental({0.0, 0.2, 0.4}, 0.0, kParams), std::invalid_argument);
  const BetheProblem prob(2, {3, 1}, {0.0, 0.3}, 0.1, kParams);
  CHECK_FALSE(prob.is_fundamental());
  cplx sum = 0.0;
  for (int k = 0; k < prob.n(); ++k) sum += prob.p_points()[k] - prob.q_points()[k];
  CHECK(std::abs(sum + 2.0 * kParams.eta() * 4.0) < 1e-14);
  CHECK(prob.with_c(0.3).c() == cplx(0.3, 0.0));
}

TEST_CASE("fixture solve (frozen root)") {
  const BetheProblem prob = fixture();
  const BetheSolution sol = bae_solve(prob, {cplx(0.2, 0.1)});
  CHECK(sol.residual < 1e-12);
  REQUIRE(sol.t.size() == 1);
  CHECK(std::abs(sol.t[0] - cplx(0.31, 0.0)) < 1e-12);
  CHECK(sol.trace.back() == doctest::Approx(sol.residual));
  CHECK(std::abs(transfer_eigenvalue(prob, sol, cplx(0.3, 0.1)) - cplx(3.0203344294625407, -2.2785688843914405)) <
        1e-11);
}

TEST_CASE("four-site solve (frozen roots)") {
  const BetheProblem prob = four_sites();
  const BetheSolution sol = bae_solve(prob, {cplx(0.2, 0.1), cplx(0.7, -0.1)});
  CHECK(sol.residual < 1e-12);
  REQUIRE(sol.t.size() == 2);
  CHECK(std::abs(sol.t[0] - cplx(-0.34502694377925025, -0.43344254193258075)) < 1e-10);
  CHECK(std::abs(sol.t[1] - cplx(0.18502694377925022, -0.44155745806742097)) < 1e-10);
  // the reduction moved one root by tau, which the exponent absorbs
  CHECK(std::abs(sol.c - cplx(0.0, -2.0 * kPi)) < 1e-12);
  CHECK(max_norm(bae_residual(prob.with_c(sol.c), sol.t)) < 1e-12);
}

TEST_CASE("solver guards") {
  const BetheProblem prob = four_sites();
  CHECK_THROWS_AS(bae_solve(prob, {cplx(0.2, 0.1), cplx(0.2, 0.1)}), std::invalid_argument);
  CHECK_THROWS_AS(bae_solve(prob, {cplx(0.2, 0.1), cplx(1.2, 0.1)}), std::invalid_argument);
  CHECK_THROWS_AS(bae_solve(prob, {cplx(0.2, 0.1)}), std::invalid_argument);
  SolverOptions opts;
  opts.max_iter = 1;
  try {
    bae_solve(fixture(), {cplx(0.2, 0.1)}, opts);
    FAIL("expected non-convergence");
  } catch (const ConvergenceError& e) {
    CHECK(!e.trace().empty());
  }
}

TEST_CASE("idempotence and fixed points") {
  const BetheProblem prob = four_sites();
  const BetheSolution sol = bae_solve(prob, {cplx(0.2, 0.1), cplx(0.7, -0.1)});
  const BetheSolution again = bae_solve(prob.with_c(sol.c), sol.t);
  CHECK(again.iterations <= 2);
  for (std::size_t i = 0; i < sol.t.size(); ++i) CHECK(std::abs(again.t[i] - sol.t[i]) < 1e-13);
}

TEST_CASE("property: permutation and lattice shifts") {
  const BetheProblem prob = four_sites();
  Gen gen(5);
  for (int k = 0; k < 20; ++k) {
    const std::vector<cplx> t = gen.separated(kParams, 2);
    const auto r = bae_residual(prob, t);
    const auto swapped = bae_residual(prob, {t[1], t[0]});
    CHECK(std::abs(r[0] - swapped[1]) < 1e-12 * std::max(1.0, std::abs(r[0])));
    CHECK(std::abs(r[1] - swapped[0]) < 1e-12 * std::max(1.0, std::abs(r[1])));
    // shift by 1: every component unchanged
    const auto shifted = bae_residual(prob, {t[0] + 1.0, t[1]});
    for (int i = 0; i < 2; ++i) CHECK(std::abs(shifted[i] - r[i]) < 1e-10 * std::max(1.0, std::abs(r[i])));
    // shift by tau: both products pick up e^{8 pi i eta}
    const cplx target = std::exp(4.0 * kParams.eta() * prob.c());
    const cplx phase = std::exp(cplx(0.0, 8.0 * kPi) * kParams.eta());
    const auto tau_shifted = bae_residual(prob, {t[0] + kParams.tau(), t[1]});
    for (int i = 0; i < 2; ++i) {
      const cplx expected = phase * (r[i] + target);
      CHECK(std::abs(tau_shifted[i] + target - expected) < 1e-10 * std::max(1.0, std::abs(expected)));
    }
  }
}

TEST_CASE("property: canonical form ignores input order and lattice translates") {
  const BetheProblem prob = four_sites();
  const BetheSolution sol = bae_solve(prob, {cplx(0.2, 0.1), cplx(0.7, -0.1)});
  Gen gen(8);
  for (int k = 0; k < 10; ++k) {
    std::vector<cplx> moved = sol.t_path;
    int tau_turns = 0;
    for (cplx& t : moved) {
      const int n = gen.integer(-2, 2);
      t += double(gen.integer(-2, 2)) + double(n) * kParams.tau();
      tau_turns += n;
    }
    std::reverse(moved.begin(), moved.end());
    // the moved roots solve the problem whose c absorbs one 2 pi i per tau step
    const BetheProblem shifted = prob.with_c(prob.c() + cplx(0.0, 2.0 * kPi * tau_turns));
    CHECK(max_norm(bae_residual(shifted, moved)) < 1e-10);
    const BetheSolution canon = canonical_solution(shifted, moved);
    for (std::size_t i = 0; i < sol.t.size(); ++i) CHECK(std::abs(canon.t[i] - sol.t[i]) < 1e-12);
    CHECK(std::abs(canon.c - sol.c) < 1e-9);
    CHECK(canon.residual < 1e-11);
  }
}

TEST_CASE("Jacobian against finite differences") {
  const BetheProblem prob = four_sites().with_c(cplx(0.1, 0.05));
  Gen gen(9);
  for (int k = 0; k < 5; ++k) {
    const std::vector<cplx> t = gen.separated(kParams, 2);
    const Matrix jac = bae_jacobian(prob, t);
    const double h = 1e-6;
    for (int j = 0; j < 2; ++j) {
      std::vector<cplx> tp = t;
      std::vector<cplx> tm = t;
      tp[static_cast<std::size_t>(j)] += h;
      tm[static_cast<std::size_t>(j)] -= h;
      const auto fp = bae_residual(prob, tp);
      const auto fm = bae_residual(prob, tm);
      for (int i = 0; i < 2; ++i) {
        const cplx fd = (fp[static_cast<std::size_t>(i)] - fm[static_cast<std::size_t>(i)]) / (2.0 * h);
        CHECK(std::abs(jac(i, j) - fd) < 1e-6 * std::max(1.0, std::abs(fd)));
      }
    }
  }
}

TEST_CASE("closed-form vector against the operator oracle") {
  const BetheProblem prob = fixture();
  const BetheSolution sol = bae_solve(prob, {cplx(0.2, 0.1)});
  Gen gen(13);
  for (int k = 0; k < 10; ++k) {
    const cplx l = gen.point(kParams);
    const Vector closed = to_chain_vector(bethe_vector_closed(prob, sol, l));
    const Vector oracle = bethe_vector_oracle(prob, sol.t, sol.c, l);
    CHECK((closed - oracle).norm() / oracle.norm() < 1e-10);
    // only weight-zero states are populated
    CHECK(closed[0] == cplx(0.0, 0.0));
    CHECK(closed[3] == cplx(0.0, 0.0));
  }
  CHECK(bethe_vector_closed(prob, sol, 0.2).occupations.size() == 2);
  // with two roots, doubly occupied factors appear among the coefficients but not in the chain vector
  const BetheProblem four = four_sites();
  const BetheVector bv = bethe_vector_closed(four, {cplx(0.2, 0.1), cplx(0.7, -0.1)}, 0.0, 0.2);
  CHECK(bv.occupations.size() == 10);
  CHECK((to_chain_vector(bv).array() != cplx(0.0, 0.0)).count() == 6);
}

TEST_CASE("closed form and oracle agree off-shell too") {
  const BetheProblem prob = four_sites();
  Gen gen(14);
  for (int k = 0; k < 5; ++k) {
    const std::vector<cplx> t = gen.separated(kParams, 2);
    const cplx c(gen.real(-0.5, 0.5), gen.real(-0.5, 0.5));
    const cplx l = gen.point(kParams);
    const Vector closed = to_chain_vector(bethe_vector_closed(prob, t, c, l));
    const Vector oracle = bethe_vector_oracle(prob, t, c, l);
    CHECK((closed - oracle).norm() / oracle.norm() < 1e-10);
  }
}

TEST_CASE("eigenrelation for the fixture and four sites") {
  const BetheProblem prob = fixture();
  const BetheSolution sol = bae_solve(prob, {cplx(0.2, 0.1)});
  Gen gen(15);
  for (int k = 0; k < 10; ++k) CHECK(eigen_relation_residual(prob, sol, gen.point(kParams), gen.point(kParams)) < 1e-9);

  const BetheProblem four = four_sites();
  const BetheSolution sol4 = bae_solve(four, {cplx(0.2, 0.1), cplx(0.7, -0.1)});
  for (int k = 0; k < 10; ++k) CHECK(eigen_relation_residual(four, sol4, gen.point(kParams), gen.point(kParams)) < 1e-8);

  // a perturbed root breaks the relation
  std::vector<cplx> bad = sol.t;
  bad[0] += 1e-3;
  CHECK(eigen_relation_residual(prob, bad, sol.c, cplx(0.3, 0.1), cplx(0.2, 0.05)) > 1e-4);
}

TEST_CASE("quasi-periodicity of Bethe vectors") {
  const BetheProblem four = four_sites();
  const BetheSolution sol4 = bae_solve(four, {cplx(0.2, 0.1), cplx(0.7, -0.1)});
  Gen gen(16);
  for (int k = 0; k < 10; ++k) {
    const cplx l = gen.point(kParams);
    const Vector a = bethe_vector_closed(four, sol4, l).coeffs;
    const Vector b = bethe_vector_closed(four, sol4, l + 1.0).coeffs;
    CHECK((b - std::exp(sol4.c) * a).cwiseAbs().maxCoeff() < 1e-10 * std::max(1.0, a.cwiseAbs().maxCoeff()));
  }
}

TEST_CASE("vector stays finite next to the theta(l) pole") {
  const BetheProblem prob = fixture();
  const BetheSolution sol = bae_solve(prob, {cplx(0.2, 0.1)});
  const Vector v = to_chain_vector(bethe_vector_closed(prob, sol, 1e-6));
  CHECK(std::isfinite(v.norm()));
  CHECK(v.norm() < 1e3);
}

TEST_CASE("eigenvalue at an evaluation point keeps only the first term") {
  const BetheProblem prob = four_sites();
  const BetheSolution sol = bae_solve(prob, {cplx(0.2, 0.1), cplx(0.7, -0.1)});
  const cplx pk = prob.p_points()[1];
  cplx expected = std::exp(-2.0 * kParams.eta() * sol.c);
  for (const cplx& t : sol.t) expected *= theta(t - pk - 2.0 * kParams.eta(), kParams) / theta(t - pk, kParams);
  CHECK(rel(transfer_eigenvalue(prob, sol, pk), expected) < 1e-12);
}

TEST_CASE("continuation in c") {
  const BetheProblem prob = fixture();
  std::vector<cplx> path;
  for (int k = 0; k <= 10; ++k) path.push_back(cplx(0.02 * k, 0.0));
  const ContinuationResult res = continue_in_c(prob, {cplx(0.2, 0.1)}, path);
  CHECK(res.complete);
  REQUIRE(res.points.size() == path.size());
  for (const BetheSolution& s : res.points) CHECK(s.residual < 1e-12);
}

TEST_CASE("multistart finds the four-site solution family") {
  const BetheProblem prob = four_sites();
  const BetheSolution sol = bae_solve_multistart(prob, 42);
  CHECK(sol.residual < 1e-12);
  CHECK(min_root_separation(sol.t, kParams) > 1e-6);
}

TEST_CASE("general weights: q-Lame data with one root has the inverse-closed form") {
  const ModularParams p(cplx(0.0, 0.9), 0.1);
  const cplx t(0.27, 0.13);
  const cplx eta = p.eta();
  const cplx c = std::log(theta(t - 3.0 * eta, p) / theta(t + eta, p)) / (4.0 * eta);
  const BetheProblem prob(1, {2}, {0.0}, c, p);
  CHECK(max_norm(bae_residual(prob, {t})) < 1e-13);
  // c-shift degeneracy
  const BetheProblem shifted = prob.with_c(c + cplx(0.0, 2.0 * kPi) / (2.0 * eta));
  CHECK(max_norm(bae_residual(shifted, {t})) < 1e-12);
}
