#include <doctest.h>

#include "ellqg/errors.hpp"
#include "ellqg/theta.hpp"
#include "support.hpp"

using namespace ellqg;
using testing_support::Gen;
using testing_support::kPi;

TEST_CASE("parameters reject a non-positive imaginary part") {
  CHECK_THROWS_AS(ModularParams(cplx(0.0, 0.0), 0.1), std::invalid_argument);
  CHECK_THROWS_AS(ModularParams(cplx(0.3, -0.5), 0.1), std::invalid_argument);
  CHECK_NOTHROW(ModularParams(cplx(0.0, 0.3), 0.1));
}

TEST_CASE("truncation window meets the tail bound") {
  for (double im : {0.3, 0.9, 5.0}) {
    const int window = detail::truncation_window(im, 1e-14);
    // first omitted term of the derivative series, both signs
    const double k = window + 1.5;
    CHECK(2.0 * std::pow(2.0 * kPi * k, 2) * std::exp(-kPi * im * (k * k - k)) < 1e-14);
  }
  CHECK(detail::truncation_window(0.3, 1e-14) >= detail::truncation_window(0.9, 1e-14));
}

TEST_CASE("frozen value at the probe point") {
  const ModularParams p(cplx(0.0, 0.9), 0.11);
  const cplx got = theta(cplx(0.23, 0.11), p);
  CHECK(std::abs(got - cplx(0.68711257836146844, 0.2632016851637437)) < 1e-13);
  CHECK(std::abs(p.char_product_constant() - cplx(0.49491760876935786, 0.0)) < 1e-13);
}

TEST_CASE("zeros and simple values") {
  const ModularParams p(cplx(0.0, 0.9), 0.11);
  CHECK(std::abs(theta(0.0, p)) < 1e-14);
  for (int m = -1; m <= 1; ++m) {
    for (int n = -1; n <= 1; ++n) CHECK(std::abs(theta(double(m) + double(n) * p.tau(), p)) < 1e-10);
  }
  // no other zeros in the cell: grid scan away from the lattice
  double smallest = 1e300;
  for (int i = 0; i < 50; ++i) {
    for (int j = 0; j < 50; ++j) {
      const cplx z = (-0.5 + (i + 0.5) / 50.0) + (-0.5 + (j + 0.5) / 50.0) * p.tau();
      if (lattice_distance(z, p) < 0.05) continue;
      smallest = std::min(smallest, std::abs(theta(z, p)));
    }
  }
  CHECK(smallest > 1e-4);
}

TEST_CASE("quasi-periodicity at the worked points") {
  const ModularParams p(cplx(0.0, 0.9), 0.11);
  const cplx z(0.31, 0.17);
  CHECK(std::abs(theta(z + 1.0, p) + theta(z, p)) < 1e-13);
  const ModularParams q(cplx(0.0, 0.8), 0.11);
  const cplx w(-0.2, 0.4);
  CHECK(std::abs(theta(w + q.tau(), q) + std::exp(cplx(0.0, -kPi) * (q.tau() + 2.0 * w)) * theta(w, q)) < 1e-12);
}

TEST_CASE("property: oddness and quasi-periodicity over random points") {
  for (const cplx tau : testing_support::taus()) {
    const ModularParams p(tau, 0.11);
    Gen gen(101);
    for (int k = 0; k < 100; ++k) {
      const cplx z = gen.point(p);
      const cplx th = theta(z, p);
      CHECK(std::abs(theta(-z, p) + th) < 1e-13);
      CHECK(std::abs(theta(z + 1.0, p) + th) < 1e-13);
      CHECK(std::abs(theta(z + tau, p) + std::exp(cplx(0.0, -kPi) * (tau + 2.0 * z)) * th) < 1e-12);
    }
  }
}

TEST_CASE("lattice reduction") {
  const ModularParams p(cplx(0.0, 0.9), 0.11);
  const cplx z0(0.1, 0.1);
  const LatticeCell cell = lattice_reduce(z0 + 3.0 + 2.0 * p.tau(), p);
  CHECK(cell.m == 3);
  CHECK(cell.n == 2);
  CHECK(std::abs(cell.z0 - z0) < 1e-14);
  const LatticeCell plain = lattice_reduce(0.25, p);
  CHECK(plain.m == 0);
  CHECK(plain.n == 0);
  CHECK(std::abs(plain.z0 - 0.25) < 1e-15);
}

TEST_CASE("reduced evaluation agrees with a wide direct series far from the cell") {
  const ModularParams p(cplx(0.0, 0.9), 0.11);
  const cplx z = 4.7 + 3.2 * p.tau();
  const cplx direct = detail::theta_direct_series(z, p.tau(), 40);
  CHECK(std::abs(theta(z, p) - direct) / std::abs(direct) < 1e-12);
  const ModularParams q(cplx(0.4, 0.8), 0.11);
  const cplx w(0.37, -0.21);
  CHECK(std::abs(theta(w, q) - detail::theta_direct_series(w, q.tau(), 30)) < 1e-13);
}

TEST_CASE("derivatives against finite differences") {
  const ModularParams p(cplx(0.0, 0.9), 0.11);
  const cplx z(0.3, 0.2);
  const double h = 1e-5;
  const cplx d1 = (theta(z + h, p) - theta(z - h, p)) / (2.0 * h);
  CHECK(std::abs(theta_deriv(z, 1, p) - d1) / std::abs(d1) < 1e-8);
  const double h2 = 1e-4;
  const cplx d2 = (theta(z + h2, p) - 2.0 * theta(z, p) + theta(z - h2, p)) / (h2 * h2);
  CHECK(std::abs(theta_deriv(z, 2, p) - d2) / std::abs(d2) < 1e-6);
  CHECK(std::abs(theta_deriv(-z, 1, p) - theta_deriv(z, 1, p)) < 1e-13);
  const auto jet = theta_jet(z, p);
  CHECK(std::abs(jet[0] - theta(z, p)) < 1e-15);
  CHECK(std::abs(jet[1] - theta_deriv(z, 1, p)) < 1e-13);
  CHECK(std::abs(jet[2] - theta_deriv(z, 2, p)) < 1e-12);
  CHECK(std::abs(theta_log_deriv(z, p) - jet[1] / jet[0]) < 1e-13);
  CHECK_THROWS_AS(theta_deriv(z, 3, p), std::invalid_argument);
}

TEST_CASE("derivatives away from the cell follow the multiplier") {
  const ModularParams p(cplx(0.0, 0.9), 0.11);
  Gen gen(7);
  for (int k = 0; k < 20; ++k) {
    const cplx z = gen.point(p) + double(gen.integer(-3, 3)) + double(gen.integer(-2, 2)) * p.tau();
    const double h = 1e-5;
    const cplx d1 = (theta(z + h, p) - theta(z - h, p)) / (2.0 * h);
    CHECK(std::abs(theta_deriv(z, 1, p) - d1) / std::max(1.0, std::abs(d1)) < 1e-7);
  }
}

TEST_CASE("characteristic thetas") {
  const ModularParams p(cplx(0.0, 0.9), 0.11);
  CHECK(std::abs(theta_char(1, 0.0, p)) < 1e-14);
  Gen gen(17);
  const cplx constant = p.char_product_constant();
  for (int k = 0; k < 20; ++k) {
    const cplx z = gen.point(p);
    CHECK(std::abs(theta_char(0, z + 1.0, p) - theta_char(0, z, p)) < 1e-13);
    CHECK(std::abs(theta_char(1, z + 1.0, p) + theta_char(1, z, p)) < 1e-13);
    CHECK(std::abs(theta_char(0, -z, p) - theta_char(0, z, p)) < 1e-13);
    CHECK(std::abs(theta_char(1, -z, p) + theta_char(1, z, p)) < 1e-13);
    const cplx ratio = theta_char(0, z, p) * theta_char(1, z, p) / theta(z, p);
    CHECK(std::abs(ratio - constant) / std::abs(constant) < 1e-10);
    // translation law in both directions
    const cplx mult = cplx(0.0, 1.0) * std::exp(cplx(0.0, -kPi) * (z + p.tau() / 2.0));
    CHECK(std::abs(theta_char(0, z + p.tau(), p) - mult * theta_char(1, z, p)) < 1e-12);
    CHECK(std::abs(theta_char(1, z + p.tau(), p) - mult * theta_char(0, z, p)) < 1e-12);
  }
  // zeros: theta_0 at r + (2s+1) tau, theta_1 at r + 2s tau
  for (int r = -1; r <= 1; ++r) {
    for (int s = -1; s <= 0; ++s) {
      CHECK(std::abs(theta_char(0, double(r) + double(2 * s + 1) * p.tau(), p)) < 1e-10);
      CHECK(std::abs(theta_char(1, double(r) + double(2 * s) * p.tau(), p)) < 1e-10);
    }
  }
  CHECK_THROWS_AS(theta_char(2, 0.1, p), std::invalid_argument);
}

TEST_CASE("pole guard") {
  const ModularParams p(cplx(0.0, 0.9), 0.11);
  CHECK_THROWS_AS(checked_denominator(theta(1.0, p), p, "probe"), PoleError);
  CHECK_NOTHROW(checked_denominator(theta(0.3, p), p, "probe"));
  try {
    checked_denominator(cplx(1e-12, 0.0), p, "probe");
  } catch (const PoleError& e) {
    CHECK(e.magnitude() == doctest::Approx(1e-12));
  }
}

TEST_CASE("with_eta keeps tau and tolerances") {
  const ModularParams p(cplx(0.2, 1.1), 0.11, 1e-13, 1e-8);
  const ModularParams q = p.with_eta(0.2);
  CHECK(q.tau() == p.tau());
  CHECK(q.eta() == cplx(0.2, 0.0));
  CHECK(q.series_tol() == p.series_tol());
  CHECK(q.pole_tol() == p.pole_tol());
}
