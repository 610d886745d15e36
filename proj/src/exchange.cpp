#include "ellqg/exchange.hpp"

#include <algorithm>
#include <stdexcept>

#include "ellqg/rmatrix.hpp"

namespace ellqg {

namespace {

struct Partial {
  cplx coeff;
  std::vector<int> prefix;
  int carried;  // label of the diagonal generator being pushed right
};

cplx label_value(int label, cplx w, const std::vector<cplx>& t) {
  return label == kW ? w : t[static_cast<std::size_t>(label)];
}

}  // namespace

std::vector<ExchangeTerm> exchange_expand(Diagonal which, cplx w, const std::vector<cplx>& t, cplx lambda,
                                          int vector_weight, const ModularParams& p) {
  const std::size_t m = t.size();
  const cplx step = 2.0 * p.eta();
  std::vector<Partial> current{{cplx{1.0, 0.0}, {}, kW}};
  for (std::size_t k = 0; k < m; ++k) {
    // the scalar produced here sits behind k b's
    const cplx lk = lambda + step * static_cast<double>(k);
    const int incoming = static_cast<int>(k);
    std::vector<Partial> next;
    next.reserve(2 * current.size());
    for (const Partial& part : current) {
      const cplx x = label_value(part.carried, w, t);
      const cplx tk = t[k];
      cplx keep;
      cplx swap;
      if (which == Diagonal::a) {
        const RSCoefficients rs = rs_coeffs(tk - x, lk, p);
        keep = rs.r;
        swap = rs.s;
      } else {
        // weight of b(t_k) d(.) b(t_{k+1}) ... v
        const int mu = vector_weight - 2 * static_cast<int>(m - k);
        const cplx lh = lk - step * static_cast<double>(mu);
        keep = rs_coeffs(x - tk, lh, p).r;
        swap = -rs_coeffs(tk - x, lh, p).s;
      }
      Partial stay = part;
      stay.coeff *= keep;
      stay.prefix.push_back(incoming);
      next.push_back(std::move(stay));

      Partial exchanged = part;
      exchanged.coeff *= swap;
      exchanged.prefix.push_back(part.carried);
      exchanged.carried = incoming;
      next.push_back(std::move(exchanged));
    }
    current = std::move(next);
  }
  std::vector<ExchangeTerm> out;
  out.reserve(current.size());
  for (Partial& part : current) out.push_back({part.coeff, std::move(part.prefix), part.carried});
  return out;
}

ExchangeCoefficients collect_exchange(const std::vector<ExchangeTerm>& terms, std::size_t m) {
  ExchangeCoefficients out{cplx{}, std::vector<cplx>(m)};
  for (const ExchangeTerm& term : terms) {
    // b-labels must be {t_1..t_m} minus the tail label, plus w when the tail is some t_j
    std::vector<int> labels = term.b_labels;
    std::sort(labels.begin(), labels.end());
    std::vector<int> expected;
    if (term.tail_label != kW) expected.push_back(kW);
    for (int j = 0; j < static_cast<int>(m); ++j) {
      if (j != term.tail_label) expected.push_back(j);
    }
    if (labels != expected) throw std::logic_error("collect_exchange: inconsistent word");
    if (term.tail_label == kW) {
      out.wanted += term.coeff;
    } else {
      out.unwanted[static_cast<std::size_t>(term.tail_label)] += term.coeff;
    }
  }
  return out;
}

cplx wanted_a(cplx w, const std::vector<cplx>& t, cplx lambda, const ModularParams& p) {
  cplx v{1.0, 0.0};
  for (std::size_t j = 0; j < t.size(); ++j) {
    v *= rs_coeffs(t[j] - w, lambda + 2.0 * p.eta() * static_cast<double>(j), p).r;
  }
  return v;
}

cplx first_unwanted_a(cplx w, const std::vector<cplx>& t, cplx lambda, const ModularParams& p) {
  if (t.empty()) throw std::invalid_argument("first_unwanted_a: need at least one root");
  cplx v = rs_coeffs(t[0] - w, lambda, p).s;
  for (std::size_t j = 1; j < t.size(); ++j) {
    v *= rs_coeffs(t[j] - t[0], lambda + 2.0 * p.eta() * static_cast<double>(j), p).r;
  }
  return v;
}

cplx wanted_d(cplx w, const std::vector<cplx>& t, cplx lambda, const ModularParams& p) {
  cplx v{1.0, 0.0};
  for (std::size_t j = 0; j < t.size(); ++j) {
    v *= rs_coeffs(w - t[j], lambda - 2.0 * p.eta() * static_cast<double>(j), p).r;
  }
  return v;
}

cplx first_unwanted_d(cplx w, const std::vector<cplx>& t, cplx lambda, const ModularParams& p) {
  if (t.empty()) throw std::invalid_argument("first_unwanted_d: need at least one root");
  cplx v = -rs_coeffs(t[0] - w, lambda, p).s;
  for (std::size_t j = 1; j < t.size(); ++j) {
    v *= rs_coeffs(t[0] - t[j], lambda - 2.0 * p.eta() * static_cast<double>(j), p).r;
  }
  return v;
}

}  // namespace ellqg
