#include "ellqg/rmatrix.hpp"

#include <array>

#include "ellqg/errors.hpp"

namespace ellqg {

RCoefficients rmatrix_coeffs(cplx z, cplx lambda, const ModularParams& p) {
  const cplx two_eta = 2.0 * p.eta();
  const cplx den = checked_denominator(theta(lambda, p), p, "rmatrix_coeffs: theta(lambda)") *
                   checked_denominator(theta(z - two_eta, p), p, "rmatrix_coeffs: theta(z - 2 eta)");
  return {theta(lambda + two_eta, p) * theta(z, p) / den,
          -theta(lambda + z, p) * theta(two_eta, p) / den};
}

Matrix4 rmatrix_local(cplx z, cplx lambda, const ModularParams& p) {
  const RCoefficients plus = rmatrix_coeffs(z, lambda, p);
  const RCoefficients minus = rmatrix_coeffs(z, -lambda, p);
  Matrix4 r = Matrix4::Zero();
  r(0, 0) = 1.0;
  r(3, 3) = 1.0;
  r(1, 1) = plus.alpha;
  r(2, 2) = minus.alpha;
  r(1, 2) = plus.beta;   // E_{1,-1} (x) E_{-1,1}
  r(2, 1) = minus.beta;  // E_{-1,1} (x) E_{1,-1}
  return r;
}

DynamicalMatrix rmatrix_eval(cplx z, cplx lambda, const ModularParams& p) {
  return {basis_weights(2), rmatrix_local(z, lambda, p)};
}

double dybe_residual(cplx z, cplx w, cplx lambda, const ModularParams& p, ShiftSign sign) {
  auto r_at = [&p](cplx arg) { return [arg, &p](cplx l) { return rmatrix_local(arg, l, p); }; };
  const Matrix id = Matrix::Identity(8, 8);

  // R12(z-w, l - 2 eta h3) R13(z, l) R23(w, l - 2 eta h1)
  Matrix lhs = PairOperator(3, 1, 2, r_at(w), lambda, spectator_shift({0}, p, sign)).apply(id);
  lhs = PairOperator(3, 0, 2, r_at(z), lambda).apply(lhs);
  lhs = PairOperator(3, 0, 1, r_at(z - w), lambda, spectator_shift({2}, p, sign)).apply(lhs);

  // R23(w, l) R13(z, l - 2 eta h2) R12(z-w, l)
  Matrix rhs = PairOperator(3, 0, 1, r_at(z - w), lambda).apply(id);
  rhs = PairOperator(3, 0, 2, r_at(z), lambda, spectator_shift({1}, p, sign)).apply(rhs);
  rhs = PairOperator(3, 1, 2, r_at(w), lambda).apply(rhs);

  return max_abs(lhs - rhs);
}

RSCoefficients rs_coeffs(cplx t, cplx lambda, const ModularParams& p) {
  const cplx two_eta = 2.0 * p.eta();
  const cplx den = checked_denominator(theta(t, p), p, "rs_coeffs: theta(t)") *
                   checked_denominator(theta(lambda - two_eta, p), p, "rs_coeffs: theta(lambda - 2 eta)");
  return {theta(t - two_eta, p) * theta(lambda, p) / den, theta(t + lambda, p) * theta(two_eta, p) / den};
}

// ---------------------------------------------------------------------------

long height_step(const Height& a, const Height& b) {
  if (a.offset != b.offset) throw AdjacencyError("heights carry different offsets");
  return a.level - b.level;
}

bool adjacent(const Height& a, const Height& b) {
  if (a.offset != b.offset) return false;
  const long d = a.level - b.level;
  return d == 1 || d == -1;
}

namespace {

int local_index(long first_step, long second_step) {
  return 2 * (first_step == 1 ? 0 : 1) + (second_step == 1 ? 0 : 1);
}

void require_adjacent(const Height& x, const Height& y, const char* what) {
  if (!adjacent(x, y)) throw AdjacencyError(std::string("heights not adjacent: ") + what);
}

}  // namespace

cplx boltzmann_weight(const Height& a, const Height& b, const Height& c, const Height& d, cplx z,
                      const ModularParams& p) {
  require_adjacent(b, c, "b-c");
  require_adjacent(c, d, "c-d");
  if (!adjacent(a, b) || !adjacent(a, d)) return {};
  const Matrix4 r = rmatrix_local(z, -2.0 * p.eta() * d.value(), p);
  const int col = local_index(height_step(c, d), height_step(b, c));
  const int row = local_index(height_step(b, a), height_step(a, d));
  return r(row, col);
}

double star_triangle_residual(const Height& a, const Height& b, const Height& c, const Height& d,
                              const Height& e, const Height& f, cplx z, cplx w, const ModularParams& p) {
  require_adjacent(a, b, "a-b");
  require_adjacent(b, c, "b-c");
  require_adjacent(c, d, "c-d");
  require_adjacent(d, e, "d-e");
  require_adjacent(e, f, "e-f");
  require_adjacent(f, a, "f-a");

  cplx lhs{};
  for (long step : {1L, -1L}) {
    const Height g = b.shifted(step);
    if (!adjacent(g, f) || !adjacent(g, d)) continue;
    lhs += boltzmann_weight(a, b, g, f, z - w, p) * boltzmann_weight(f, g, d, e, z, p) *
           boltzmann_weight(g, b, c, d, w, p);
  }
  cplx rhs{};
  for (long step : {1L, -1L}) {
    const Height g = a.shifted(step);
    if (!adjacent(g, c) || !adjacent(g, e)) continue;
    rhs += boltzmann_weight(f, a, g, e, w, p) * boltzmann_weight(a, b, c, g, z, p) *
           boltzmann_weight(g, c, d, e, z - w, p);
  }
  return std::abs(lhs - rhs);
}

std::vector<Hexagon> enumerate_hexagons(cplx mu, long radius) {
  std::vector<Hexagon> out;
  for (long start = -radius; start <= radius; ++start) {
    for (unsigned mask = 0; mask < 64U; ++mask) {
      Hexagon h;
      h[0] = {start, mu};
      long level = start;
      bool inside = true;
      for (int k = 1; k < 6; ++k) {
        level += ((mask >> (k - 1)) & 1U) ? 1 : -1;
        if (level < -radius || level > radius) inside = false;
        h[static_cast<std::size_t>(k)] = {level, mu};
      }
      const long closing = ((mask >> 5) & 1U) ? 1 : -1;
      if (!inside || level + closing != start) continue;
      out.push_back(h);
    }
  }
  return out;
}

}  // namespace ellqg
