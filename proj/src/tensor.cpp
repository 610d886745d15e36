#include "ellqg/tensor.hpp"

#include <stdexcept>

namespace ellqg {

namespace {

constexpr Eigen::Index kParallelColumns = 64;

void check_site(int site, int n_sites) {
  if (site < 0 || site >= n_sites) throw std::out_of_range("site index out of range");
}

}  // namespace

int total_weight(std::size_t state, int n_sites) {
  int w = 0;
  for (int s = 0; s < n_sites; ++s) w += site_sign(state, s, n_sites);
  return w;
}

std::vector<int> basis_weights(int n_sites) {
  std::vector<int> w(basis_dim(n_sites));
  for (std::size_t s = 0; s < w.size(); ++s) w[s] = total_weight(s, n_sites);
  return w;
}

std::vector<std::size_t> weight_indices(int n_sites, int weight) {
  std::vector<std::size_t> out;
  for (std::size_t s = 0; s < basis_dim(n_sites); ++s) {
    if (total_weight(s, n_sites) == weight) out.push_back(s);
  }
  return out;
}

std::size_t state_of_signs(const std::vector<int>& signs) {
  std::size_t state = 0;
  for (int s : signs) {
    if (s != 1 && s != -1) throw std::invalid_argument("sign string entries must be +1 or -1");
    state = (state << 1) | (s == 1 ? 0U : 1U);
  }
  return state;
}

double DynamicalMatrix::weight_violation() const {
  double worst = 0.0;
  for (Eigen::Index i = 0; i < entries.rows(); ++i) {
    for (Eigen::Index j = 0; j < entries.cols(); ++j) {
      if (weights[static_cast<std::size_t>(i)] != weights[static_cast<std::size_t>(j)]) {
        worst = std::max(worst, std::abs(entries(i, j)));
      }
    }
  }
  return worst;
}

int DynamicalShift::spectator_weight(std::size_t state, int n_sites) const {
  int w = 0;
  for (int s : spectators) w += site_sign(state, s, n_sites);
  return w;
}

DynamicalShift spectator_shift(std::vector<int> spectators, const ModularParams& p, ShiftSign sign) {
  return {std::move(spectators), static_cast<double>(static_cast<int>(sign)) * 2.0 * p.eta()};
}

std::vector<int> sites_from(int first, int n_sites) {
  std::vector<int> out;
  for (int s = first; s < n_sites; ++s) out.push_back(s);
  return out;
}

double max_abs(const Matrix& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

// ---------------------------------------------------------------------------

PairOperator::PairOperator(int n_sites, int i, int j, const Local& local, cplx lambda,
                           DynamicalShift shift)
    : n_(n_sites), i_(i), j_(j), shift_(std::move(shift)) {
  check_site(i, n_sites);
  check_site(j, n_sites);
  if (i == j) throw std::invalid_argument("PairOperator: sites must differ");
  for (int s : shift_.spectators) {
    check_site(s, n_sites);
    if (s == i || s == j) throw std::invalid_argument("PairOperator: spectator overlaps acting site");
  }
  const int k = static_cast<int>(shift_.spectators.size());
  weight_offset_ = k;
  by_weight_.resize(static_cast<std::size_t>(k + 1));
  for (int w = -k; w <= k; w += 2) {
    by_weight_[static_cast<std::size_t>((w + k) / 2)] = local(lambda + shift_.step * static_cast<double>(w));
  }
}

const Matrix4& PairOperator::local_for(std::size_t state) const {
  const int w = shift_.spectator_weight(state, n_);
  return by_weight_[static_cast<std::size_t>((w + weight_offset_) / 2)];
}

void PairOperator::apply_into(const Eigen::Ref<const Vector>& v, Eigen::Ref<Vector> out) const {
  out.setZero();
  const std::size_t bi = std::size_t{1} << (n_ - 1 - i_);
  const std::size_t bj = std::size_t{1} << (n_ - 1 - j_);
  for (std::size_t s = 0; s < basis_dim(n_); ++s) {
    const cplx x = v[static_cast<Eigen::Index>(s)];
    if (x == cplx{}) continue;
    const Matrix4& loc = local_for(s);
    const int col = 2 * site_bit(s, i_, n_) + site_bit(s, j_, n_);
    const std::size_t rest = s & ~(bi | bj);
    for (int row = 0; row < 4; ++row) {
      const cplx c = loc(row, col);
      if (c == cplx{}) continue;
      const std::size_t t = rest | ((row >> 1) ? bi : 0U) | ((row & 1) ? bj : 0U);
      out[static_cast<Eigen::Index>(t)] += c * x;
    }
  }
}

Vector PairOperator::apply(const Vector& v) const {
  Vector out(v.size());
  apply_into(v, out);
  return out;
}

Matrix PairOperator::apply_serial(const Matrix& m) const {
  Matrix out(m.rows(), m.cols());
  for (Eigen::Index c = 0; c < m.cols(); ++c) apply_into(m.col(c), out.col(c));
  return out;
}

Matrix PairOperator::apply(const Matrix& m) const {
  if (m.cols() < kParallelColumns) return apply_serial(m);
  Matrix out(m.rows(), m.cols());
#pragma omp parallel for schedule(static)
  for (Eigen::Index c = 0; c < m.cols(); ++c) apply_into(m.col(c), out.col(c));
  return out;
}

Matrix PairOperator::dense() const {
  const auto d = static_cast<Eigen::Index>(basis_dim(n_));
  return apply(Matrix::Identity(d, d).eval());
}

// ---------------------------------------------------------------------------

SiteOperator::SiteOperator(int n_sites, int site, const Local& local, cplx lambda, DynamicalShift shift)
    : n_(n_sites), site_(site), shift_(std::move(shift)) {
  check_site(site, n_sites);
  for (int s : shift_.spectators) {
    check_site(s, n_sites);
    if (s == site) throw std::invalid_argument("SiteOperator: spectator overlaps acting site");
  }
  const int k = static_cast<int>(shift_.spectators.size());
  weight_offset_ = k;
  by_weight_.resize(static_cast<std::size_t>(k + 1));
  for (int w = -k; w <= k; w += 2) {
    by_weight_[static_cast<std::size_t>((w + k) / 2)] = local(lambda + shift_.step * static_cast<double>(w));
  }
}

void SiteOperator::apply_into(const Eigen::Ref<const Vector>& v, Eigen::Ref<Vector> out) const {
  out.setZero();
  const std::size_t bit = std::size_t{1} << (n_ - 1 - site_);
  for (std::size_t s = 0; s < basis_dim(n_); ++s) {
    const cplx x = v[static_cast<Eigen::Index>(s)];
    if (x == cplx{}) continue;
    const int w = shift_.spectator_weight(s, n_);
    const Matrix2& loc = by_weight_[static_cast<std::size_t>((w + weight_offset_) / 2)];
    const int col = site_bit(s, site_, n_);
    const std::size_t rest = s & ~bit;
    out[static_cast<Eigen::Index>(rest)] += loc(0, col) * x;
    out[static_cast<Eigen::Index>(rest | bit)] += loc(1, col) * x;
  }
}

Vector SiteOperator::apply(const Vector& v) const {
  Vector out(v.size());
  apply_into(v, out);
  return out;
}

Matrix SiteOperator::apply_serial(const Matrix& m) const {
  Matrix out(m.rows(), m.cols());
  for (Eigen::Index c = 0; c < m.cols(); ++c) apply_into(m.col(c), out.col(c));
  return out;
}

Matrix SiteOperator::apply(const Matrix& m) const {
  if (m.cols() < kParallelColumns) return apply_serial(m);
  Matrix out(m.rows(), m.cols());
#pragma omp parallel for schedule(static)
  for (Eigen::Index c = 0; c < m.cols(); ++c) apply_into(m.col(c), out.col(c));
  return out;
}

Matrix SiteOperator::dense() const {
  const auto d = static_cast<Eigen::Index>(basis_dim(n_));
  return apply(Matrix::Identity(d, d).eval());
}

}  // namespace ellqg
