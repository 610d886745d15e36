#include <doctest.h>

#include "ellqg/errors.hpp"
#include "ellqg/qlame.hpp"
#include "support.hpp"

using namespace ellqg;
using testing_support::Gen;
using testing_support::kPi;
using testing_support::rel;

namespace {

const ModularParams kParams(cplx(0.0, 0.9), 0.1);

SpectralPoint solved(int m, cplx c) {
  const QLameProblem prob(m, kParams);
  switch (m) {
    case 1:
      return qlame_solve(prob, c, {cplx(0.62, 0.03)});
    case 2:
      return qlame_solve(prob, c, {cplx(0.25, 0.1), cplx(0.55, -0.05)});
    default:
      return qlame_solve(prob, c, {cplx(0.3, 0.25), cplx(0.6, -0.15), cplx(0.85, 0.05)});
  }
}

}  // namespace

TEST_CASE("operator on the constant function") {
  for (int m : {1, 2, 3}) {
    const QLameProblem prob(m, kParams);
    const cplx l(0.27, 0.1);
    const cplx e2m = 2.0 * kParams.eta() * double(m);
    const cplx expected = (theta(l + e2m, kParams) + theta(l - e2m, kParams)) / theta(l, kParams);
    CHECK(rel(qlame_apply(prob, [](cplx) { return cplx(1.0, 0.0); }, l), expected) < 1e-14);
  }
}

TEST_CASE("Bethe data of the scalar problem") {
  const QLameProblem prob(2, kParams);
  const BetheProblem b = prob.bethe(0.1);
  CHECK(b.n() == 1);
  CHECK(b.weights() == std::vector<int>{4});
  CHECK(std::abs(b.p_points()[0] - kParams.eta() * (1.0 - 4.0)) < 1e-15);
  CHECK(std::abs(b.q_points()[0] - kParams.eta() * (1.0 + 4.0)) < 1e-15);
  CHECK_THROWS_AS(QLameProblem(0, kParams), std::invalid_argument);
}

TEST_CASE("psi definition, zeros and multiplier") {
  const SpectralPoint pt{1, {0.3}, 0.0, 0.0, 0.0};
  Gen gen(3);
  for (int k = 0; k < 10; ++k) {
    const cplx l = gen.point(kParams);
    CHECK(std::abs(qlame_psi(pt, l, kParams) - theta(l + 0.3 - kParams.eta(), kParams)) < 1e-15);
  }
  const SpectralPoint pt2 = solved(2, 0.1);
  for (const cplx& t : pt2.t) CHECK(std::abs(qlame_psi(pt2, kParams.eta() - t + 1.0 + kParams.tau(), kParams)) < 1e-10);
  for (int k = 0; k < 10; ++k) {
    const cplx l = gen.point(kParams);
    CHECK(std::abs(qlame_psi(pt2, l + 1.0, kParams) - std::exp(pt2.c) * qlame_psi(pt2, l, kParams)) <
          1e-10 * std::max(1.0, std::abs(qlame_psi(pt2, l, kParams))));
  }
}

TEST_CASE("m = 1 closed form") {
  const QLameProblem prob(1, kParams);
  const cplx eta = kParams.eta();
  // the c = 0 member of the closed-form family sits at t = eta + 1/2
  const SpectralPoint at_zero = qlame_closed_form_point(prob, eta + 0.5);
  CHECK(std::abs(at_zero.c) < 1e-14);
  CHECK(at_zero.residual < 1e-12);
  Gen gen(4);
  for (int k = 0; k < 10; ++k) {
    const cplx t = gen.point(kParams);
    const SpectralPoint pt = qlame_closed_form_point(prob, t);
    CHECK(pt.residual < 1e-12);
    const cplx expected = std::exp(-2.0 * eta * pt.c) * theta(4.0 * eta, kParams) / theta(2.0 * eta, kParams) *
                          theta(pt.t[0] - eta, kParams) / theta(pt.t[0] + eta, kParams);
    CHECK(rel(pt.eps, expected) < 1e-12);
    for (int j = 0; j < 5; ++j) CHECK(qlame_eigen_residual(prob, pt, gen.point(kParams)) < 1e-10);
  }
  CHECK_THROWS_AS(qlame_closed_form_c(QLameProblem(2, kParams), 0.3), std::invalid_argument);
}

TEST_CASE("m = 2 fixture at c = 0 (frozen)") {
  const SpectralPoint pt = solved(2, 0.0);
  CHECK(pt.residual < 1e-12);
  REQUIRE(pt.t.size() == 2);
  CHECK(std::abs(pt.t[0] - cplx(-0.4, 0.11942367542902649)) < 1e-10);
  CHECK(std::abs(pt.t[1] - cplx(-0.4, -0.11942367542903039)) < 1e-10);
  CHECK(std::abs(pt.eps - cplx(2.0657136794943129, 0.0)) < 1e-10);
  const SpectralPoint moved = solved(2, 0.1);
  CHECK(lattice_distance(moved.t[0] - moved.t[1], kParams) > 1e-3);
}

TEST_CASE("property: eigenfunctions for m = 1, 2, 3") {
  Gen gen(5);
  for (int m : {1, 2, 3}) {
    const QLameProblem prob(m, kParams);
    const SpectralPoint pt = solved(m, 0.0);
    CHECK(pt.residual < 1e-11);
    for (int k = 0; k < 20; ++k) CHECK(qlame_eigen_residual(prob, pt, gen.point(kParams)) < 1e-10);
  }
}

TEST_CASE("z-independence of the normalized transfer eigenvalue") {
  Gen gen(6);
  for (int m : {1, 2, 3}) {
    const QLameProblem prob(m, kParams);
    const SpectralPoint pt = solved(m, 0.0);
    const BetheProblem b = prob.bethe(pt.c);
    const cplx eta = kParams.eta();
    auto normalized = [&](cplx z) {
      return theta(z - double(2 * m + 1) * eta, kParams) / theta(z - eta, kParams) * transfer_eigenvalue(b, pt.t, pt.c, z);
    };
    const cplx ref = normalized(cplx(0.33, 0.02));
    CHECK(rel(ref, pt.eps) < 1e-9);
    for (int k = 0; k < 20; ++k) CHECK(std::abs(normalized(gen.point(kParams)) - ref) / std::abs(ref) < 1e-9);
  }
}

TEST_CASE("multiplier-shifted eigenfunction has the opposite eigenvalue") {
  Gen gen(7);
  for (int m : {1, 2, 3}) {
    const QLameProblem prob(m, kParams);
    const SpectralPoint pt = solved(m, 0.0);
    const cplx k = cplx(0.0, kPi) / (2.0 * kParams.eta());
    const ScalarFunction shifted = [&](cplx l) { return std::exp(k * l) * qlame_psi(pt, l, kParams); };
    for (int j = 0; j < 10; ++j) {
      const cplx l = gen.point(kParams);
      const cplx here = shifted(l);
      CHECK(std::abs(qlame_apply(prob, shifted, l) + pt.eps * here) < 1e-9 * std::max(1.0, std::abs(here)));
    }
  }
}

TEST_CASE("reflection") {
  Gen gen(8);
  for (int m : {1, 2, 3}) {
    const QLameProblem prob(m, kParams);
    const SpectralPoint pt = solved(m, m == 3 ? cplx(0.0, 0.0) : cplx(0.1, 0.02));
    const SpectralPoint r = reflect_point(prob, pt);
    CHECK(r.residual < 1e-11);
    CHECK(rel(r.eps, pt.eps) < 1e-9);
    const SpectralPoint back = reflect_point(prob, r);
    for (std::size_t i = 0; i < pt.t.size(); ++i) CHECK(std::abs(back.t[i] - pt.t[i]) < 1e-12);
    // psi_sigma(l) is proportional to psi(-l)
    const cplx l0 = gen.point(kParams);
    const cplx ratio0 = qlame_psi(r, l0, kParams) / qlame_psi(pt, -l0, kParams);
    for (int k = 0; k < 10; ++k) {
      const cplx l = gen.point(kParams);
      CHECK(rel(qlame_psi(r, l, kParams) / qlame_psi(pt, -l, kParams), ratio0) < 1e-9);
    }
  }
}

TEST_CASE("reflected start converges to the reflected solution") {
  const QLameProblem prob(2, kParams);
  const SpectralPoint pt = solved(2, 0.1);
  // start near the reflected roots; Newton is not equivariant, so a far start may pick another branch
  const cplx nudge(1e-3, -2e-3);
  const std::vector<cplx> start{2.0 * kParams.eta() - pt.t[0] + nudge, 2.0 * kParams.eta() - pt.t[1] - nudge};
  const SpectralPoint r = qlame_solve(prob, -0.1, start);
  CHECK(rel(r.eps, pt.eps) < 1e-9);
}

TEST_CASE("Wronskians") {
  const QLameProblem prob(2, kParams);
  const SpectralPoint plus = solved(2, 0.1);
  const SpectralPoint minus = reflect_point(prob, plus);
  const ScalarFunction fp = [&](cplx l) { return qlame_psi(plus, l, kParams); };
  const ScalarFunction fm = [&](cplx l) { return qlame_psi(minus, l, kParams); };
  Gen gen(9);
  for (int k = 0; k < 10; ++k) {
    const cplx l = gen.point(kParams);
    CHECK(std::abs(wronskian(fp, fp, l, kParams)) < 1e-14);
    CHECK(std::abs(wronskian(fp, fm, l, kParams) + wronskian(fm, fp, l, kParams)) < 1e-13);
    CHECK(std::abs(wronskian(fp, fm, l, kParams)) > 1e-6);
    CHECK(wronskian_recurrence_residual(prob, fp, fm, l) < 1e-9);
  }
  // with f = K psi_+ + psi_- for a 2 eta-periodic K, W(f, psi_-) / W(psi_+, psi_-) recovers K
  const cplx period_k = cplx(0.0, kPi) / kParams.eta();
  const ScalarFunction kfun = [&](cplx l) { return 0.7 + 0.3 * std::exp(period_k * l); };
  const ScalarFunction f = [&](cplx l) { return kfun(l) * fp(l) + fm(l); };
  for (int k = 0; k < 10; ++k) {
    const cplx l = gen.point(kParams);
    auto a_plus = [&](cplx x) { return wronskian(f, fm, x, kParams) / wronskian(fp, fm, x, kParams); };
    auto a_minus = [&](cplx x) { return -wronskian(f, fp, x, kParams) / wronskian(fp, fm, x, kParams); };
    const cplx shift = 2.0 * kParams.eta();
    CHECK(std::abs(a_plus(l + shift) - a_plus(l)) < 1e-8 * std::max(1.0, std::abs(a_plus(l))));
    CHECK(std::abs(a_minus(l + shift) - a_minus(l)) < 1e-8);
    CHECK(std::abs(a_minus(l) - 1.0) < 1e-8);
  }
}

TEST_CASE("bilinear form is symmetric") {
  const QLameProblem prob(2, kParams);
  const cplx c(0.1, 0.0);
  const SpectralPoint a{2, {cplx(0.13, 0.05), cplx(-0.21, 0.1)}, c, 0.0, 0.0};
  const SpectralPoint b{2, {cplx(0.31, -0.07), cplx(0.02, 0.2)}, c, 0.0, 0.0};
  const ScalarFunction phi = [&](cplx l) { return qlame_psi(a, l, kParams); };
  const ScalarFunction psi = [&](cplx l) { return qlame_psi(b, l, kParams); };
  const ScalarFunction lphi = [&](cplx l) { return qlame_apply(prob, phi, l); };
  const ScalarFunction lpsi = [&](cplx l) { return qlame_apply(prob, psi, l); };
  const cplx left = bilinear_form(prob, lphi, psi);
  const cplx right = bilinear_form(prob, phi, lpsi);
  CHECK(std::abs(left - right) / std::max(std::abs(left), 1e-300) < 1e-6);
  CHECK(std::abs(left) > 1e-8);
  const QLameProblem complex_eta(2, ModularParams(cplx(0.0, 0.9), cplx(0.1, 0.01)));
  CHECK_THROWS_AS(bilinear_form(complex_eta, phi, psi), std::invalid_argument);
}

TEST_CASE("classical limit") {
  const cplx tau(0.0, 0.9);
  const std::vector<double> etas{0.08, 0.04, 0.02, 0.01};
  const ModularParams base(tau, 0.1);
  const ScalarFunction psi = [&](cplx l) { return theta(l + 0.3, base); };
  const auto rows = classical_limit_residual(1, tau, psi, cplx(0.27, 0.1), etas);
  REQUIRE(rows.size() == 4);
  for (std::size_t k = 1; k < rows.size(); ++k) {
    const double r0 = rows[k - 1].residual / (rows[k - 1].eta * rows[k - 1].eta);
    const double r1 = rows[k].residual / (rows[k].eta * rows[k].eta);
    CHECK(r1 / r0 < 2.0);
    CHECK(r1 / r0 > 0.5);
  }
  CHECK(std::abs(empirical_order(rows) - 2.0) < 0.3);

  const auto free_rows = classical_limit_residual(0, tau, psi, cplx(0.27, 0.1), etas);
  CHECK(std::abs(empirical_order(free_rows) - 2.0) < 0.3);

  const ScalarFunction one = [](cplx) { return cplx(1.0, 0.0); };
  const auto const_rows = classical_limit_residual(2, tau, one, cplx(0.27, 0.1), etas);
  CHECK(std::abs(empirical_order(const_rows) - 2.0) < 0.3);
}

TEST_CASE("continuation along c") {
  const QLameProblem prob(2, kParams);
  std::vector<cplx> path;
  for (int k = 0; k < 30; ++k) path.push_back(cplx(0.3 * k / 29.0, 0.0));
  const QLameContinuation cont = qlame_continue(prob, {cplx(0.25, 0.1), cplx(0.55, -0.05)}, path);
  CHECK(cont.complete);
  REQUIRE(cont.points.size() == 30);
  Gen gen(10);
  for (std::size_t k = 0; k < cont.points.size(); ++k) {
    CHECK(cont.points[k].residual < 1e-10);
    CHECK(qlame_eigen_residual(prob, cont.points[k], gen.point(kParams)) < 1e-10);
    if (k > 0) {
      CHECK(cont.points[k].c.real() > cont.points[k - 1].c.real());
      for (std::size_t j = 0; j < 2; ++j) CHECK(std::abs(cont.paths[k][j] - cont.paths[k - 1][j]) < 0.05);
    }
  }
}
