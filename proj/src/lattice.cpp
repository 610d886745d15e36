#include "ellqg/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>

#include "ellqg/errors.hpp"

namespace ellqg {

namespace {

constexpr double kPi = 3.14159265358979323846;

Vector kron(const Vector2& u, const Vector2& v) {
  Vector out(4);
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) out[2 * i + j] = u[i] * v[j];
  }
  return out;
}

// phi^s(z, l) = phi(-s z - l + 1/2)
Vector2 phi_signed(int s, cplx z, cplx lambda, const ModularParams& p) {
  return phi_vector(-static_cast<double>(s) * z - lambda + 0.5, p);
}

Matrix4 flip() {
  Matrix4 m = Matrix4::Zero();
  m(0, 0) = m(3, 3) = 1.0;
  m(1, 2) = m(2, 1) = 1.0;
  return m;
}

}  // namespace

EightVertexWeights r8v_weights(cplx z, const ModularParams& p) {
  const cplx two_eta = 2.0 * p.eta();
  const cplx t0_0 = checked_denominator(theta_char(0, 0.0, p), p, "r8v: theta_0(0)");
  const cplx t0_2e = theta_char(0, two_eta, p);
  const cplx t1_2e = theta_char(1, two_eta, p);
  const cplx t0_z = theta_char(0, z, p);
  const cplx t1_z = theta_char(1, z, p);
  const cplx t0_den = checked_denominator(theta_char(0, z - two_eta, p), p, "r8v: theta_0(z - 2 eta)");
  const cplx t1_den = checked_denominator(theta_char(1, z - two_eta, p), p, "r8v: theta_1(z - 2 eta)");
  return {t0_z * t0_2e / (t0_den * t0_0), t1_z * t0_2e / (t1_den * t0_0), -t0_z * t1_2e / (t1_den * t0_0),
          -t1_z * t1_2e / (t0_den * t0_0)};
}

Matrix4 r8v_eval(cplx z, const ModularParams& p) {
  const EightVertexWeights w = r8v_weights(z, p);
  Matrix4 m = Matrix4::Zero();
  m(0, 0) = m(3, 3) = w.a;
  m(1, 1) = m(2, 2) = w.b;
  m(1, 2) = m(2, 1) = w.c;
  m(0, 3) = m(3, 0) = w.d;
  return m;
}

Matrix4 r8v_residue_expected(const ModularParams& p) {
  const cplx scale = theta(2.0 * p.eta(), p) /
                     checked_denominator(theta_deriv(0.0, 1, p), p, "r8v_residue: theta'(0)");
  return scale * (Matrix4::Identity() - flip());
}

Matrix4 r8v_residue_estimate(const ModularParams& p, double delta) {
  const cplx pole = 2.0 * p.eta();
  const Matrix4 coarse = delta * r8v_eval(pole + delta, p);
  const Matrix4 fine = (0.5 * delta) * r8v_eval(pole + 0.5 * delta, p);
  return 2.0 * fine - coarse;
}

Vector2 phi_vector(cplx x, const ModularParams& p) { return {theta_char(1, x, p), theta_char(0, x, p)}; }

Matrix2 s_matrix(cplx z, cplx lambda, const ModularParams& p) {
  const cplx den = checked_denominator(theta(lambda, p), p, "s_matrix: theta(lambda)");
  const cplx plus = z - lambda + 0.5;
  const cplx minus = -z - lambda + 0.5;
  Matrix2 s;
  s << theta_char(0, plus, p), -theta_char(0, minus, p), -theta_char(1, plus, p), theta_char(1, minus, p);
  return s / den;
}

Matrix2 s_hat(cplx z, cplx lambda, const ModularParams& p) {
  Matrix2 s;
  s.col(0) = phi_signed(1, z, lambda, p);
  s.col(1) = phi_signed(-1, z, lambda, p);
  return s;
}

double vertex_irf_residual(cplx z, cplx w, cplx lambda, const ModularParams& p) {
  auto s_at = [&p](cplx x) { return [x, &p](cplx l) -> Matrix2 { return s_matrix(x, l, p); }; };
  const Matrix4 r = rmatrix_local(z - w, lambda, p);
  Matrix lhs = r;
  lhs = SiteOperator(2, 0, s_at(z), lambda, spectator_shift({1}, p)).apply(lhs);
  lhs = SiteOperator(2, 1, s_at(w), lambda).apply(lhs);

  Matrix rhs = Matrix::Identity(4, 4);
  rhs = SiteOperator(2, 1, s_at(w), lambda, spectator_shift({0}, p)).apply(rhs);
  rhs = SiteOperator(2, 0, s_at(z), lambda).apply(rhs);
  rhs = r8v_eval(z - w, p) * rhs;
  return max_abs(lhs - rhs);
}

LemmaResiduals vertex_irf_lemma_residuals(cplx z, cplx w, cplx lambda, const ModularParams& p) {
  const Matrix4 r8 = r8v_eval(z - w, p);
  const cplx two_eta = 2.0 * p.eta();
  LemmaResiduals out{0.0, 0.0};
  for (int s : {1, -1}) {
    const double sd = s;
    const Vector same_lhs = r8 * kron(phi_signed(s, z, lambda - sd * two_eta, p), phi_signed(s, w, lambda, p));
    const Vector same_rhs = kron(phi_signed(s, z, lambda, p), phi_signed(s, w, lambda - sd * two_eta, p));
    out.same_sign = std::max(out.same_sign, (same_lhs - same_rhs).cwiseAbs().maxCoeff());

    const RCoefficients rc = rmatrix_coeffs(z - w, sd * lambda, p);
    const Vector mixed_lhs = r8 * kron(phi_signed(s, z, lambda + sd * two_eta, p), phi_signed(-s, w, lambda, p));
    const Vector mixed_rhs =
        rc.alpha * kron(phi_signed(s, z, lambda, p), phi_signed(-s, w, lambda - sd * two_eta, p)) +
        rc.beta * kron(phi_signed(-s, z, lambda, p), phi_signed(s, w, lambda + sd * two_eta, p));
    out.mixed_sign = std::max(out.mixed_sign, (mixed_lhs - mixed_rhs).cwiseAbs().maxCoeff());
  }
  return out;
}

// ---------------------------------------------------------------------------

EightVertexChain::EightVertexChain(std::vector<cplx> z_points, ModularParams params)
    : z_(std::move(z_points)), params_(std::move(params)) {
  if (z_.empty()) throw std::invalid_argument("EightVertexChain: need at least one site");
  if (z_.size() > 8) throw std::invalid_argument("EightVertexChain: at most 8 sites");
  for (std::size_t i = 0; i < z_.size(); ++i) {
    for (std::size_t j = i + 1; j < z_.size(); ++j) {
      if (lattice_distance(z_[i] - z_[j], params_) < 1e-8) {
        throw std::invalid_argument("EightVertexChain: evaluation points coincide modulo the lattice");
      }
    }
  }
}

Matrix t8v_matrix(const EightVertexChain& chain, cplx z) {
  const int n = chain.size();
  const int sites = n + 1;
  const ModularParams& p = chain.params();
  const auto dim = static_cast<Eigen::Index>(basis_dim(sites));
  Matrix m = Matrix::Identity(dim, dim);
  for (int j = n; j >= 1; --j) {
    const Matrix4 local = r8v_eval(z - chain.z_points()[static_cast<std::size_t>(j - 1)], p);
    PairOperator factor(sites, 0, j, [local](cplx) { return local; }, 0.0);
    m = factor.apply(m);
  }
  const auto d = static_cast<Eigen::Index>(chain.dim());
  return m.topLeftCorner(d, d) + m.bottomRightCorner(d, d);
}

Matrix s_chain(const EightVertexChain& chain, cplx lambda, bool dynamical) {
  const int n = chain.size();
  const ModularParams& p = chain.params();
  const auto dim = static_cast<Eigen::Index>(chain.dim());
  Matrix m = Matrix::Identity(dim, dim);
  for (int j = 0; j < n; ++j) {
    const cplx zj = chain.z_points()[static_cast<std::size_t>(j)];
    const DynamicalShift shift = dynamical ? spectator_shift(sites_from(j + 1, n), p) : DynamicalShift::none();
    SiteOperator factor(n, j, [zj, &p](cplx l) { return s_matrix(zj, l, p); }, lambda, shift);
    m = factor.apply(m);
  }
  return m;
}

double t8v_intertwine_residual(const EightVertexChain& chain, cplx z, cplx lambda, bool dynamical) {
  const ModularParams& p = chain.params();
  const FundamentalChain fund(chain.z_points(), p);
  const std::vector<std::size_t>& zero = fund.zero_weight_basis();
  if (zero.empty()) throw std::invalid_argument("t8v_intertwine_residual: need an even number of sites");
  const cplx two_eta = 2.0 * p.eta();
  const Matrix a = abcd_blocks(fund, z, lambda + two_eta).a.entries;
  const Matrix d = abcd_blocks(fund, z, lambda - two_eta).d.entries;
  const Matrix lhs = t8v_matrix(chain, z) * s_chain(chain, lambda, dynamical);
  const Matrix rhs = s_chain(chain, lambda + two_eta, dynamical) * a + s_chain(chain, lambda - two_eta, dynamical) * d;
  double worst = 0.0;
  for (std::size_t col : zero) {
    const auto c = static_cast<Eigen::Index>(col);
    worst = std::max(worst, (lhs.col(c) - rhs.col(c)).cwiseAbs().maxCoeff());
  }
  return worst;
}

RationalEta make_rational_eta(long num, long den) {
  if (den <= 0) throw std::invalid_argument("eta: denominator must be positive");
  if (num == 0) throw std::invalid_argument("eta: must be nonzero");
  if (std::gcd(num, den) != 1) throw std::invalid_argument("eta: fraction must be in lowest terms");
  return {num, den};
}

double EightVertexEigen::max_residual() const {
  return residuals.empty() ? 0.0 : *std::max_element(residuals.begin(), residuals.end());
}

EightVertexEigen t8v_bethe_eigenvector(const BetheProblem& prob, const RationalEta& eta, const BetheSolution& sol,
                                       cplx mu, const std::vector<cplx>& z_samples, std::uint64_t retry_seed,
                                       int max_attempts) {
  const ModularParams& p = prob.params();
  if (!prob.is_fundamental()) throw std::invalid_argument("t8v_bethe_eigenvector: weight-one factors only");
  if (eta.den < 1 || eta.den > 12) throw std::invalid_argument("eta: denominator must be in 1..12");
  if (std::abs(p.eta() - cplx{eta.value(), 0.0}) > 1e-14) {
    throw std::invalid_argument("eta: problem parameters do not match the rational value");
  }
  const double k = sol.c.imag() / kPi;
  if (std::abs(sol.c.real()) > 1e-12 || std::abs(k - std::round(k)) > 1e-12) {
    throw std::invalid_argument("c: must lie in pi i Z for the summation functional");
  }
  const EightVertexChain chain(prob.z_points(), p);
  const std::vector<std::size_t> zero = weight_indices(prob.n(), 0);
  const cplx two_eta = 2.0 * p.eta();

  std::mt19937_64 rng(retry_seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  EightVertexEigen out;
  cplx trial = mu;
  for (int attempt = 1; attempt <= max_attempts; ++attempt) {
    Vector v = Vector::Zero(static_cast<Eigen::Index>(chain.dim()));
    double scale = 0.0;
    for (long j = 0; j < eta.den; ++j) {
      const cplx l = trial + two_eta * static_cast<double>(j);
      const Vector psi0 = bethe_vector_zero_weight(prob, sol.t, sol.c, l);
      Vector psi = Vector::Zero(v.size());
      for (std::size_t i = 0; i < zero.size(); ++i) psi[static_cast<Eigen::Index>(zero[i])] = psi0[static_cast<Eigen::Index>(i)];
      const Vector term = s_chain(chain, l) * psi;
      scale += term.norm();
      v += term;
    }
    if (v.norm() > 1e-8 * scale) {
      out.vector = std::move(v);
      out.mu = trial;
      out.attempts = attempt;
      break;
    }
    trial = cplx{unit(rng), unit(rng) * 0.5 * p.tau().imag()};
  }
  if (out.attempts == 0) throw std::runtime_error("t8v_bethe_eigenvector: summation functional vanished for every mu tried");

  const double vnorm2 = out.vector.squaredNorm();
  for (const cplx& z : z_samples) {
    const Vector tv = t8v_matrix(chain, z) * out.vector;
    const cplx eps = transfer_eigenvalue(prob, sol, z);
    out.z_samples.push_back(z);
    out.t8v_eigenvalues.push_back(out.vector.dot(tv) / vnorm2);
    out.bethe_eigenvalues.push_back(eps);
    out.residuals.push_back((tv - eps * out.vector).norm() / std::sqrt(vnorm2));
  }
  return out;
}

// ---------------------------------------------------------------------------

PathState::PathState(std::vector<Height> heights) : heights_(std::move(heights)) {
  if (heights_.empty() || heights_.size() % 2 != 0) throw std::invalid_argument("PathState: need an even number of heights");
  for (std::size_t j = 0; j < heights_.size(); ++j) {
    if (!adjacent(heights_[j], heights_[(j + 1) % heights_.size()])) {
      throw AdjacencyError("PathState: consecutive heights must differ by one");
    }
  }
}

PathState PathState::from_steps(Height start, const std::vector<int>& steps) {
  long total = 0;
  for (int s : steps) {
    if (s != 1 && s != -1) throw AdjacencyError("PathState: every step must be +1 or -1");
    total += s;
  }
  if (total != 0) throw std::invalid_argument("PathState: steps must sum to zero");
  std::vector<Height> h{start};
  for (std::size_t j = 0; j + 1 < steps.size(); ++j) h.push_back(h.back().shifted(-steps[j]));
  return PathState(std::move(h));
}

std::vector<int> PathState::steps() const {
  std::vector<int> out;
  for (std::size_t j = 0; j < heights_.size(); ++j) {
    out.push_back(static_cast<int>(height_step(heights_[j], heights_[(j + 1) % heights_.size()])));
  }
  return out;
}

std::vector<std::pair<PathState, cplx>> irf_transfer_coeffs(const PathState& state, cplx z,
                                                            const FundamentalChain& chain) {
  const int n = state.size();
  if (n != chain.size()) throw std::invalid_argument("irf_transfer_coeffs: path and chain lengths differ");
  const std::vector<Height>& a = state.heights();
  std::vector<std::pair<PathState, cplx>> out;
  for (std::size_t mask = 0; mask < basis_dim(n); ++mask) {
    std::vector<Height> b(a.size());
    for (int j = 0; j < n; ++j) b[static_cast<std::size_t>(j)] = a[static_cast<std::size_t>(j)].shifted(site_sign(mask, j, n));
    bool closed = true;
    for (std::size_t j = 0; j < b.size(); ++j) closed = closed && adjacent(b[j], b[(j + 1) % b.size()]);
    if (!closed) continue;
    cplx coeff{1.0, 0.0};
    for (std::size_t j = 0; j < b.size(); ++j) {
      const std::size_t next = (j + 1) % b.size();
      coeff *= boltzmann_weight(b[j], a[j], a[next], b[next], z - chain.z_points()[j], chain.params());
    }
    out.emplace_back(PathState(std::move(b)), coeff);
  }
  return out;
}

double irf_operator_residual(const PathState& state, cplx z, const FundamentalChain& chain) {
  const cplx two_eta = 2.0 * chain.params().eta();
  Vector input = Vector::Zero(static_cast<Eigen::Index>(chain.dim()));
  input[static_cast<Eigen::Index>(state_of_signs(state.steps()))] = 1.0;
  double worst = 0.0;
  for (const auto& [out_state, coeff] : irf_transfer_coeffs(state, z, chain)) {
    const Height& b1 = out_state.heights().front();
    const cplx lambda = -two_eta * b1.value();
    const OperatorBlocks blocks = abcd_blocks(chain, z, lambda);
    // b_1 = a_1 - 1 picks up the support of f(l - 2 eta), b_1 = a_1 + 1 that of f(l + 2 eta)
    const bool lowered = height_step(b1, state.heights().front()) == -1;
    const Vector image = (lowered ? blocks.a.entries : blocks.d.entries) * input;
    const cplx op = image[static_cast<Eigen::Index>(state_of_signs(out_state.steps()))];
    worst = std::max(worst, std::abs(op - coeff));
  }
  return worst;
}

}  // namespace ellqg
