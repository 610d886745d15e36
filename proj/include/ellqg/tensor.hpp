#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <functional>
#include <vector>

#include "ellqg/theta.hpp"

namespace ellqg {

using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using Matrix2 = Eigen::Matrix2cd;
using Matrix4 = Eigen::Matrix4cd;

// Basis of (C^2)^{(x)n}: a state index is a bit string with site 0 the most
// significant bit; bit 0 stands for e[1] and bit 1 for e[-1]. This is the
// lexicographic order on sign strings with e[1] < e[-1].

inline int site_bit(std::size_t state, int site, int n_sites) {
  return static_cast<int>((state >> (n_sites - 1 - site)) & 1U);
}
inline int site_sign(std::size_t state, int site, int n_sites) {
  return site_bit(state, site, n_sites) == 0 ? 1 : -1;
}
inline std::size_t basis_dim(int n_sites) { return std::size_t{1} << n_sites; }

int total_weight(std::size_t state, int n_sites);
std::vector<int> basis_weights(int n_sites);
/// Basis indices of the weight subspace, ascending.
std::vector<std::size_t> weight_indices(int n_sites, int weight);
/// Index of a sign string (+1 / -1 entries).
std::size_t state_of_signs(const std::vector<int>& signs);

/// Complex matrix on a weight-graded space. Entry (i, j) may be nonzero only
/// when weights[i] == weights[j].
struct DynamicalMatrix {
  std::vector<int> weights;
  Matrix entries;

  /// Largest |entry| connecting different weights.
  double weight_violation() const;
  bool conserves_weight(double tol = 0.0) const { return weight_violation() <= tol; }
};

enum class ShiftSign { minus = -1, plus = 1 };

/// Dynamical argument lambda -> lambda + step * (sum of spectator weights).
/// Every relation of the algebra uses step = -2 eta; the plus sign only exists
/// so tests can check that the relations discriminate.
struct DynamicalShift {
  std::vector<int> spectators;
  cplx step{0.0, 0.0};

  int spectator_weight(std::size_t state, int n_sites) const;
  static DynamicalShift none() { return {}; }
};

DynamicalShift spectator_shift(std::vector<int> spectators, const ModularParams& p,
                               ShiftSign sign = ShiftSign::minus);

/// Sites j, j+1, ..., n-1.
std::vector<int> sites_from(int first, int n_sites);

/// Operator on (C^2)^{(x)n} acting through a 4x4 local matrix on sites (i, j)
/// (first local factor on site i). The local matrix is evaluated at the
/// dynamical argument determined by the spectator weights of the state it is
/// applied to; spectators are never touched by the operator itself.
class PairOperator {
 public:
  using Local = std::function<Matrix4(cplx)>;

  PairOperator(int n_sites, int i, int j, const Local& local, cplx lambda,
               DynamicalShift shift = DynamicalShift::none());

  Vector apply(const Vector& v) const;
  /// Columnwise; parallel over columns when OpenMP is enabled.
  Matrix apply(const Matrix& m) const;
  Matrix apply_serial(const Matrix& m) const;
  Matrix dense() const;

 private:
  const Matrix4& local_for(std::size_t state) const;
  void apply_into(const Eigen::Ref<const Vector>& v, Eigen::Ref<Vector> out) const;

  int n_;
  int i_;
  int j_;
  DynamicalShift shift_;
  int weight_offset_;
  std::vector<Matrix4> by_weight_;
};

/// Operator acting through a 2x2 local matrix on one site.
class SiteOperator {
 public:
  using Local = std::function<Matrix2(cplx)>;

  SiteOperator(int n_sites, int site, const Local& local, cplx lambda,
               DynamicalShift shift = DynamicalShift::none());

  Vector apply(const Vector& v) const;
  Matrix apply(const Matrix& m) const;
  Matrix apply_serial(const Matrix& m) const;
  Matrix dense() const;

 private:
  void apply_into(const Eigen::Ref<const Vector>& v, Eigen::Ref<Vector> out) const;

  int n_;
  int site_;
  DynamicalShift shift_;
  int weight_offset_;
  std::vector<Matrix2> by_weight_;
};

double max_abs(const Matrix& m);

}  // namespace ellqg
