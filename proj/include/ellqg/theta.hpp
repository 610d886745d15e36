#pragma once

#include <array>
#include <complex>

namespace ellqg {

using cplx = std::complex<double>;

/// Modular parameter tau, deformation step eta and the numerical policy shared by
/// every theta evaluation.
///
/// The series truncation is fixed once per parameter set: the odd theta series
/// is always summed over a symmetric window |j + 1/2| <= J after the argument
/// has been reduced into the fundamental cell, where the term growth is bounded
/// by exp(-pi Im(tau) (k^2 - |k|)). J is the smallest window whose tail
/// (including the (2 pi k)^2 factor needed by the second derivative) stays
/// below series_tol.
class ModularParams {
 public:
  ModularParams(cplx tau, cplx eta, double series_tol = 1e-14, double pole_tol = 1e-9);

  cplx tau() const noexcept { return tau_; }
  cplx eta() const noexcept { return eta_; }
  double series_tol() const noexcept { return series_tol_; }
  double pole_tol() const noexcept { return pole_tol_; }

  /// Window for theta(z | tau).
  int truncation() const noexcept { return window_; }
  /// Window for the characteristic thetas, which run at doubled tau.
  int truncation_doubled() const noexcept { return window_doubled_; }

  /// C(tau) in theta_0(z) theta_1(z) = C(tau) theta(z), probed at z* = 0.23 + 0.11i.
  cplx char_product_constant() const noexcept { return char_constant_; }

  /// Same tau and tolerances, different eta.
  ModularParams with_eta(cplx eta) const;

 private:
  cplx tau_;
  cplx eta_;
  double series_tol_;
  double pole_tol_;
  int window_;
  int window_doubled_;
  cplx char_constant_;
};

struct LatticeCell {
  cplx z0;  // representative with both cell coordinates in [-1/2, 1/2)
  long m;   // multiple of 1
  long n;   // multiple of tau
};

/// z = z0 + m + n tau with z0 = x + y tau, x, y in [-1/2, 1/2).
LatticeCell lattice_reduce(cplx z, const ModularParams& p);

/// Distance from z to the nearest point of Z + tau Z.
double lattice_distance(cplx z, const ModularParams& p);

/// Jacobi's odd theta function
///   theta(z) = -sum_j exp(pi i (j+1/2)^2 tau + 2 pi i (j+1/2)(z+1/2)).
cplx theta(cplx z, const ModularParams& p);

/// First or second derivative of theta, order in {1, 2}.
cplx theta_deriv(cplx z, int order, const ModularParams& p);

/// theta, theta', theta'' in one pass.
std::array<cplx, 3> theta_jet(cplx z, const ModularParams& p);

/// Logarithmic derivative theta'(z) / theta(z).
cplx theta_log_deriv(cplx z, const ModularParams& p);

/// Theta functions with characteristics, alpha in {0, 1}:
///   theta_1(z) = -sum_j exp(2 pi i (j+1/2)^2 tau + 2 pi i (j+1/2)(z+1/2)),
///   theta_0(z) = -i exp(pi i (z + tau/2)) theta_1(z + tau).
/// The second line is the translation law theta_a(z+tau) = i e^{-pi i (z+tau/2)} theta_{1-a}(z)
/// solved for theta_0.
cplx theta_char(int alpha, cplx z, const ModularParams& p);

/// Throws PoleError when |value| < p.pole_tol(); returns value otherwise.
cplx checked_denominator(cplx value, const ModularParams& p, const char* where);

namespace detail {

/// Direct (unreduced) series at modular parameter tau with window |j + 1/2| <= window + 1/2.
/// Test oracle for the reduced evaluation; do not use for large |Im z|.
cplx theta_direct_series(cplx z, cplx tau, int window);

int truncation_window(double im_tau, double tol);

}  // namespace detail

}  // namespace ellqg
