#include "ellqg/sweep.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <random>

namespace ellqg {

std::vector<std::vector<cplx>> draw_tuples(std::uint64_t seed, std::size_t count, std::size_t arity,
                                           const ModularParams& p, const DrawBox& box) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> re(-0.5, 0.5);
  std::uniform_real_distribution<double> im(-box.im_fraction, box.im_fraction);
  std::vector<std::vector<cplx>> out(count, std::vector<cplx>(arity));
  for (auto& tuple : out) {
    for (cplx& x : tuple) {
      do {
        const double a = re(rng);
        const double b = im(rng);
        x = a + b * p.tau();
      } while (lattice_distance(x, p) < box.min_lattice_distance);
    }
  }
  return out;
}

namespace {

void evaluate(const std::vector<std::vector<cplx>>& draws, const TupleResidual& residual, std::size_t i,
              std::vector<double>& values, std::vector<std::string>& messages) {
  try {
    values[i] = residual(draws[i]);
  } catch (const std::exception& e) {
    values[i] = std::numeric_limits<double>::quiet_NaN();
    messages[i] = e.what();
  }
}

}  // namespace

SweepStats run_sweep(const std::vector<std::vector<cplx>>& draws, const TupleResidual& residual, Execution exec) {
  const std::size_t n = draws.size();
  std::vector<double> values(n, 0.0);
  std::vector<std::string> messages(n);

  if (exec == Execution::parallel) {
#if defined(ELLQG_HAVE_OPENMP)
    const auto count = static_cast<long long>(n);
#pragma omp parallel for schedule(dynamic)
    for (long long i = 0; i < count; ++i) evaluate(draws, residual, static_cast<std::size_t>(i), values, messages);
#else
    for (std::size_t i = 0; i < n; ++i) evaluate(draws, residual, i, values, messages);
#endif
  } else {
    for (std::size_t i = 0; i < n; ++i) evaluate(draws, residual, i, values, messages);
  }

  SweepStats stats;
  stats.count = n;
  for (std::size_t i = 0; i < n; ++i) {
    if (!messages[i].empty()) {
      if (stats.errors == 0) stats.first_error = messages[i];
      ++stats.errors;
      continue;
    }
    // a NaN residual must not pass silently
    if (std::isnan(values[i])) {
      if (stats.errors == 0) stats.first_error = "residual is NaN";
      ++stats.errors;
      continue;
    }
    stats.max_residual = std::max(stats.max_residual, values[i]);
  }
  stats.residuals = std::move(values);
  return stats;
}

}  // namespace ellqg
