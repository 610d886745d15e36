#pragma once

#include <vector>

#include "ellqg/theta.hpp"

namespace ellqg {

// Normal ordering of a(w) b(t_1) ... b(t_m) and d(w) b(t_1) ... b(t_m) using
// only the two exchange relations
//   a(w) b(t) = r(t-w, l) b(t) a(w) + s(t-w, l) b(w) a(t),
//   d(w) b(t) = r(w-t, l-2 eta h) b(t) d(w) - s(t-w, l-2 eta h) b(w) d(t).
// Scalar coefficients are pulled to the far left with b(t) phi(l) = phi(l + 2 eta) b(t),
// so every coefficient is a number once l and the weight of the vector the
// word is applied to are fixed.

/// Spectral parameter label: kW for w, otherwise the index j of t_j.
inline constexpr int kW = -1;

struct ExchangeTerm {
  cplx coeff;
  std::vector<int> b_labels;  // left to right
  int tail_label;             // argument of the trailing a(.) or d(.)
};

enum class Diagonal { a, d };

/// All 2^m words produced by pushing the diagonal generator through the b's.
/// `vector_weight` is the weight of the vector the product acts on; only the
/// d-relation depends on it.
std::vector<ExchangeTerm> exchange_expand(Diagonal which, cplx w, const std::vector<cplx>& t, cplx lambda,
                                          int vector_weight, const ModularParams& p);

struct ExchangeCoefficients {
  cplx wanted;                  // A_0 or D_0
  std::vector<cplx> unwanted;   // A_j or D_j, j = 1..m (index j-1)
};

/// Collects words by their tail label; words with identical multisets of b-labels
/// are merged since the b's commute.
ExchangeCoefficients collect_exchange(const std::vector<ExchangeTerm>& terms, std::size_t m);

/// Closed forms
///   A_0 = prod_j r(t_j - w, l + 2 eta (j-1)),
///   A_1 = s(t_1 - w, l) prod_{j>=2} r(t_j - t_1, l + 2 eta (j-1)),
///   D_0 = prod_j r(w - t_j, l - 2 eta (j-1)),
///   D_1 = -s(t_1 - w, l) prod_{j>=2} r(t_1 - t_j, l - 2 eta (j-1)).
/// The d-forms hold for a vector of weight 2m.
cplx wanted_a(cplx w, const std::vector<cplx>& t, cplx lambda, const ModularParams& p);
cplx first_unwanted_a(cplx w, const std::vector<cplx>& t, cplx lambda, const ModularParams& p);
cplx wanted_d(cplx w, const std::vector<cplx>& t, cplx lambda, const ModularParams& p);
cplx first_unwanted_d(cplx w, const std::vector<cplx>& t, cplx lambda, const ModularParams& p);

}  // namespace ellqg
