#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <random>
#include <vector>

#include "ellqg/theta.hpp"

namespace testing_support {

using ellqg::cplx;

inline constexpr double kPi = 3.14159265358979323846;

// Generators for property tests. Points are x + y tau with x in [-1/2, 1/2),
// |y| < im_frac, kept away from the lattice.
class Gen {
 public:
  explicit Gen(std::uint64_t seed) : rng_(seed) {}

  double real(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }

  cplx point(const ellqg::ModularParams& p, double im_frac = 0.4, double min_dist = 0.05) {
    for (;;) {
      const cplx z = real(-0.5, 0.5) + real(-im_frac, im_frac) * p.tau();
      if (ellqg::lattice_distance(z, p) >= min_dist) return z;
    }
  }

  // Pairwise separated modulo the lattice.
  std::vector<cplx> separated(const ellqg::ModularParams& p, std::size_t count, double gap = 0.08) {
    std::vector<cplx> out;
    while (out.size() < count) {
      const cplx z = point(p);
      bool ok = true;
      for (const cplx& w : out) ok = ok && ellqg::lattice_distance(z - w, p) >= gap;
      if (ok) out.push_back(z);
    }
    return out;
  }

  std::mt19937_64& engine() { return rng_; }

 private:
  std::mt19937_64 rng_;
};

inline std::vector<cplx> taus() { return {cplx(0.0, 0.6), cplx(0.0, 0.9), cplx(0.4, 0.8)}; }

inline double rel(cplx got, cplx want) { return std::abs(got - want) / std::max(1.0, std::abs(want)); }

}  // namespace testing_support
