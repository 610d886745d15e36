#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace ellqg {

/// A theta-function denominator came within pole_tol of zero.
class PoleError : public std::domain_error {
 public:
  PoleError(const std::string& where, double magnitude);

  double magnitude() const noexcept { return magnitude_; }

 private:
  double magnitude_;
};

/// Height labels that are not neighbours in the sense required by a face weight.
class AdjacencyError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Newton iteration gave up. Carries the residual max-norm per iteration.
class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(const std::string& what, std::vector<double> trace);

  const std::vector<double>& trace() const noexcept { return trace_; }

 private:
  std::vector<double> trace_;
};

}  // namespace ellqg
