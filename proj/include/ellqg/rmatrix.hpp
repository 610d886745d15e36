#pragma once

#include <vector>

#include "ellqg/tensor.hpp"
#include "ellqg/theta.hpp"

namespace ellqg {

struct RCoefficients {
  cplx alpha;
  cplx beta;
};

/// alpha(z, l) = theta(l + 2 eta) theta(z) / (theta(l) theta(z - 2 eta)),
/// beta(z, l)  = -theta(l + z) theta(2 eta) / (theta(l) theta(z - 2 eta)).
RCoefficients rmatrix_coeffs(cplx z, cplx lambda, const ModularParams& p);

/// The dynamical R-matrix as a plain 4x4 block in the basis
/// e1(x)e1, e1(x)e-1, e-1(x)e1, e-1(x)e-1.
Matrix4 rmatrix_local(cplx z, cplx lambda, const ModularParams& p);

DynamicalMatrix rmatrix_eval(cplx z, cplx lambda, const ModularParams& p);

/// Max-norm of the difference between the two sides of the dynamical
/// Yang-Baxter equation on V(x)V(x)V.
double dybe_residual(cplx z, cplx w, cplx lambda, const ModularParams& p,
                     ShiftSign sign = ShiftSign::minus);

struct RSCoefficients {
  cplx r;
  cplx s;
};

/// r(t, l) = theta(t - 2 eta) theta(l) / (theta(t) theta(l - 2 eta)),
/// s(t, l) = theta(t + l) theta(2 eta) / (theta(t) theta(l - 2 eta)).
RSCoefficients rs_coeffs(cplx t, cplx lambda, const ModularParams& p);

// --- face (IRF) language -----------------------------------------------------

/// Height label offset + level with integer level; two heights are comparable
/// only when they share the same offset, so adjacency tests are exact.
struct Height {
  long level = 0;
  cplx offset{0.0, 0.0};

  cplx value() const { return offset + static_cast<double>(level); }
  Height shifted(long by) const { return {level + by, offset}; }
  friend bool operator==(const Height&, const Height&) = default;
};

/// level(a) - level(b); throws AdjacencyError for different offsets.
long height_step(const Height& a, const Height& b);
bool adjacent(const Height& a, const Height& b);

/// w(a, b, c, d; z), defined by
///   R(z, -2 eta d) e[c-d] (x) e[b-c] = sum_a w(a, b, c, d; z) e[b-a] (x) e[a-d].
/// b-c and c-d must be +-1 (AdjacencyError otherwise); an a that is not a
/// neighbour of both b and d has weight zero.
cplx boltzmann_weight(const Height& a, const Height& b, const Height& c, const Height& d, cplx z,
                      const ModularParams& p);

/// |sum_g w(a,b,g,f;z-w) w(f,g,d,e;z) w(g,b,c,d;w) - sum_g w(f,a,g,e;w) w(a,b,c,g;z) w(g,c,d,e;z-w)|
/// for a hexagon a-b-c-d-e-f-a of neighbouring heights.
double star_triangle_residual(const Height& a, const Height& b, const Height& c, const Height& d,
                              const Height& e, const Height& f, cplx z, cplx w, const ModularParams& p);

using Hexagon = std::array<Height, 6>;

/// All closed hexagons of neighbouring heights a..f with every level in
/// [-radius, radius] around the common offset mu.
std::vector<Hexagon> enumerate_hexagons(cplx mu, long radius);

}  // namespace ellqg
