#include "ellqg/theta.hpp"

#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "ellqg/errors.hpp"

namespace ellqg {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr cplx kI{0.0, 1.0};
const cplx kProbePoint{0.23, 0.11};

LatticeCell reduce_against(cplx z, cplx tau) {
  const double y = z.imag() / tau.imag();
  const long n = static_cast<long>(std::floor(y + 0.5));
  const cplx shifted = z - static_cast<double>(n) * tau;
  // real cell coordinate of the shifted point
  const double x = shifted.real() - (shifted.imag() / tau.imag()) * tau.real();
  const long m = static_cast<long>(std::floor(x + 0.5));
  return {shifted - static_cast<double>(m), m, n};
}

// theta and its first two derivatives on a reduced point.
std::array<cplx, 3> reduced_series(cplx z0, cplx tau, int window) {
  std::array<cplx, 3> acc{};
  for (int j = -window - 1; j <= window; ++j) {
    const double k = j + 0.5;
    const cplx term = std::exp(kI * kPi * k * k * tau + 2.0 * kI * kPi * k * (z0 + 0.5));
    const cplx dk = 2.0 * kI * kPi * k;
    acc[0] -= term;
    acc[1] -= dk * term;
    acc[2] -= dk * dk * term;
  }
  return acc;
}

// theta(z | tau) together with derivatives, rebuilt from the reduced point through
// theta(z0 + m + n tau) = (-1)^{m+n} exp(-pi i (n^2 tau + 2 n z0)) theta(z0).
std::array<cplx, 3> jet_at(cplx z, cplx tau, int window) {
  const LatticeCell cell = reduce_against(z, tau);
  const std::array<cplx, 3> base = reduced_series(cell.z0, tau, window);
  if (cell.m == 0 && cell.n == 0) return base;
  const double n = static_cast<double>(cell.n);
  const double sign = ((cell.m + cell.n) % 2 == 0) ? 1.0 : -1.0;
  const cplx mult = sign * std::exp(-kI * kPi * (n * n * tau + 2.0 * n * cell.z0));
  const cplx kappa = -2.0 * kI * kPi * n;
  return {mult * base[0], mult * (base[1] + kappa * base[0]),
          mult * (base[2] + 2.0 * kappa * base[1] + kappa * kappa * base[0])};
}

void require_finite(cplx z, const char* where) {
  if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) {
    throw std::invalid_argument(std::string(where) + ": non-finite argument");
  }
}

}  // namespace

namespace detail {

int truncation_window(double im_tau, double tol) {
  // Tail of sum over |k| >= J + 3/2 of (2 pi k)^2 exp(-pi b (k^2 - |k|)), both signs.
  for (int window = 1; window < 400; ++window) {
    double tail = 0.0;
    for (int s = window + 1; s < window + 400; ++s) {
      const double k = s + 0.5;
      const double term = 2.0 * (2 * kPi * k) * (2 * kPi * k) * std::exp(-kPi * im_tau * (k * k - k));
      tail += term;
      if (term < tol * 1e-3) break;
    }
    if (tail < tol) return window;
  }
  throw std::invalid_argument("ModularParams: Im(tau) too small for the theta series window");
}

cplx theta_direct_series(cplx z, cplx tau, int window) {
  return reduced_series(z, tau, window)[0];
}

}  // namespace detail

ModularParams::ModularParams(cplx tau, cplx eta, double series_tol, double pole_tol)
    : tau_(tau), eta_(eta), series_tol_(series_tol), pole_tol_(pole_tol) {
  if (!std::isfinite(tau.real()) || !std::isfinite(tau.imag()) || !(tau.imag() > 0.0)) {
    std::ostringstream os;
    os << "tau: Im(tau) must be positive, got " << tau;
    throw std::invalid_argument(os.str());
  }
  if (!std::isfinite(eta.real()) || !std::isfinite(eta.imag())) {
    throw std::invalid_argument("eta: must be finite");
  }
  if (!(series_tol > 0.0) || !(pole_tol > 0.0)) {
    throw std::invalid_argument("series_tol and pole_tol must be positive");
  }
  window_ = detail::truncation_window(tau.imag(), series_tol);
  window_doubled_ = detail::truncation_window(2.0 * tau.imag(), series_tol);
  char_constant_ = theta_char(0, kProbePoint, *this) * theta_char(1, kProbePoint, *this) /
                   theta(kProbePoint, *this);
}

ModularParams ModularParams::with_eta(cplx eta) const {
  return ModularParams(tau_, eta, series_tol_, pole_tol_);
}

LatticeCell lattice_reduce(cplx z, const ModularParams& p) {
  require_finite(z, "lattice_reduce");
  return reduce_against(z, p.tau());
}

double lattice_distance(cplx z, const ModularParams& p) {
  const cplx z0 = lattice_reduce(z, p).z0;
  double best = std::abs(z0);
  for (int a = -1; a <= 1; ++a) {
    for (int b = -1; b <= 1; ++b) {
      best = std::min(best, std::abs(z0 - static_cast<double>(a) - static_cast<double>(b) * p.tau()));
    }
  }
  return best;
}

cplx theta(cplx z, const ModularParams& p) {
  require_finite(z, "theta");
  return jet_at(z, p.tau(), p.truncation())[0];
}

std::array<cplx, 3> theta_jet(cplx z, const ModularParams& p) {
  require_finite(z, "theta_jet");
  return jet_at(z, p.tau(), p.truncation());
}

cplx theta_deriv(cplx z, int order, const ModularParams& p) {
  if (order != 1 && order != 2) {
    throw std::invalid_argument("theta_deriv: order must be 1 or 2");
  }
  return theta_jet(z, p)[static_cast<std::size_t>(order)];
}

cplx theta_log_deriv(cplx z, const ModularParams& p) {
  const auto jet = theta_jet(z, p);
  return jet[1] / checked_denominator(jet[0], p, "theta_log_deriv");
}

cplx theta_char(int alpha, cplx z, const ModularParams& p) {
  require_finite(z, "theta_char");
  const cplx tau2 = 2.0 * p.tau();
  switch (alpha) {
    case 1:
      return jet_at(z, tau2, p.truncation_doubled())[0];
    case 0:
      return -kI * std::exp(kI * kPi * (z + 0.5 * p.tau())) *
             jet_at(z + p.tau(), tau2, p.truncation_doubled())[0];
    default:
      throw std::invalid_argument("theta_char: alpha must be 0 or 1");
  }
}

cplx checked_denominator(cplx value, const ModularParams& p, const char* where) {
  const double mag = std::abs(value);
  if (!(mag >= p.pole_tol())) throw PoleError(where, mag);
  return value;
}

namespace {
std::string pole_message(const std::string& where, double magnitude) {
  std::ostringstream os;
  os << where << ": theta denominator within pole tolerance (|.| = " << std::scientific << magnitude << ")";
  return os.str();
}
}  // namespace

PoleError::PoleError(const std::string& where, double magnitude)
    : std::domain_error(pole_message(where, magnitude)), magnitude_(magnitude) {}

ConvergenceError::ConvergenceError(const std::string& what, std::vector<double> trace)
    : std::runtime_error(what), trace_(std::move(trace)) {}

}  // namespace ellqg
