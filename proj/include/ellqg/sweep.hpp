#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "ellqg/theta.hpp"

namespace ellqg {

/// Random points x + y tau with x in [-1/2, 1/2) and y in [-im_fraction, im_fraction),
/// re-drawn while closer than min_lattice_distance to Z + tau Z.
struct DrawBox {
  double im_fraction = 0.4;
  double min_lattice_distance = 0.05;
};

/// count tuples of `arity` points, reproducible from the seed and independent
/// of how they are later evaluated.
std::vector<std::vector<cplx>> draw_tuples(std::uint64_t seed, std::size_t count, std::size_t arity,
                                           const ModularParams& p, const DrawBox& box = {});

enum class Execution { serial, parallel };

struct SweepStats {
  std::size_t count = 0;
  std::size_t errors = 0;      // evaluations that threw
  double max_residual = 0.0;   // over evaluations that returned
  std::vector<double> residuals;  // NaN where an evaluation threw
  std::string first_error;        // message of the lowest-index failure

  bool passes(double tol) const { return errors == 0 && max_residual < tol; }
};

using TupleResidual = std::function<double(const std::vector<cplx>&)>;

/// Evaluates the residual on every draw. The parallel path distributes draws
/// over OpenMP threads (when built with OpenMP) and gives the same result as
/// the serial reference, entry by entry.
SweepStats run_sweep(const std::vector<std::vector<cplx>>& draws, const TupleResidual& residual,
                     Execution exec = Execution::parallel);

}  // namespace ellqg
