#pragma once

#include <complex>

namespace tdho {

/// Gamma function, Lanczos approximation (g = 7, 9 coefficients), with
/// reflection for Re(z) < 1/2.
double gamma_fn(double x);
std::complex<double> gamma_fn(std::complex<double> z);

/// 1/Gamma(z); exactly zero at the poles z = 0, -1, -2, ...
double rgamma(double x);
std::complex<double> rgamma(std::complex<double> z);

/// Bessel function of the first kind J_nu(x) for nu >= 0, x >= 0.
///
/// Regimes:
///   x <= 12          power series, accumulated in long double
///   12 < x <= 60     Miller backward recurrence normalized by
///                    (x/2)^nu = sum_k (nu+2k) Gamma(nu+k)/k! J_{nu+2k}(x)
///   x > 60           Hankel asymptotic expansion (when x > nu^2 as well)
/// Throws DomainError for x < 0 or nu < 0.
double bessel_j(double nu, double x);

/// d/dx J_nu(x) = (nu/x) J_nu(x) - J_{nu+1}(x).
double bessel_j_derivative(double nu, double x);

/// Degree of a Legendre function: either conical (-1/2 + i mu) or real.
class ConicalDegree {
 public:
  static ConicalDegree conical(double mu) { return ConicalDegree(true, mu); }
  static ConicalDegree real(double nu) { return ConicalDegree(false, nu); }

  bool is_conical() const { return conical_; }
  /// mu for the conical case, nu for the real case.
  double parameter() const { return value_; }
  std::complex<double> lambda() const {
    return conical_ ? std::complex<double>(-0.5, value_) : std::complex<double>(value_, 0.0);
  }
  /// lambda (lambda + 1), real in both cases.
  double eigenvalue() const { return conical_ ? -(value_ * value_ + 0.25) : value_ * (value_ + 1.0); }

 private:
  ConicalDegree(bool conical, double v) : conical_(conical), value_(v) {}
  bool conical_;
  double value_;
};

struct LegendreValue {
  double value = 0.0;
  /// |Im| left over from the complex evaluation path; zero in exact arithmetic.
  double imag_residue = 0.0;
  /// Set for x < -0.99 where the logarithmic singularity at -1 erodes accuracy.
  bool degraded = false;
};

/// Legendre function of the first kind P_lambda(x) for -1 < x <= 1.
/// x > 0 sums 2F1(-lambda, lambda+1; 1; (1-x)/2); x <= 0 uses the expansion
/// about x = 0 in powers of x^2 (even and odd quadratic-transformation
/// solutions scaled by P(0) and P'(0)).
LegendreValue legendre_p_eval(const ConicalDegree& degree, double x);
double legendre_p(const ConicalDegree& degree, double x);
double legendre_p_derivative(const ConicalDegree& degree, double x);

/// Same functions for arbitrary complex degree.
std::complex<double> legendre_p_complex(std::complex<double> lambda, double x);
std::complex<double> legendre_p_complex_derivative(std::complex<double> lambda, double x);

/// Gauss hypergeometric series 2F1(a, b; c; z) for real 0 <= z < 1.
std::complex<double> hyp2f1_series(std::complex<double> a, std::complex<double> b,
                                   std::complex<double> c, double z);

}  // namespace tdho
