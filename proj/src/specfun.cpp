#include "tdho/specfun.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

#include "tdho/errors.hpp"

namespace tdho {

namespace {

using cplx = std::complex<double>;

constexpr double kLanczosG = 7.0;
constexpr std::array<double, 9> kLanczos{
    0.99999999999980993,  676.5203681218851,     -1259.1392167224028,
    771.32342877765313,   -176.61502916214059,   12.507343278686905,
    -0.13857109526572012, 9.9843695780195716e-6, 1.5056327351493116e-7};

const double kSqrt2Pi = std::sqrt(2.0 * std::numbers::pi);

// Gamma(z) for Re(z) >= 1/2.
template <class T>
T lanczos(T z) {
  z -= 1.0;
  T x = kLanczos[0];
  for (std::size_t i = 1; i < kLanczos.size(); ++i) x += kLanczos[i] / (z + static_cast<double>(i));
  const T t = z + kLanczosG + 0.5;
  return kSqrt2Pi * std::pow(t, z + 0.5) * std::exp(-t) * x;
}

// sin(pi x) with exact zeros at the integers.
double sin_pi(double x) {
  const double r = x - 2.0 * std::round(0.5 * x);  // r in [-1, 1]
  if (r == 0.0 || std::fabs(r) == 1.0) return 0.0;
  return std::sin(std::numbers::pi * r);
}

double cos_pi(double x) {
  const double r = x - 2.0 * std::round(0.5 * x);
  if (std::fabs(r) == 0.5) return 0.0;
  return std::cos(std::numbers::pi * r);
}

cplx sin_pi(cplx z) {
  const double py = std::numbers::pi * z.imag();
  return {sin_pi(z.real()) * std::cosh(py), cos_pi(z.real()) * std::sinh(py)};
}

long double bessel_series(double nu, double x) {
  const long double half = 0.5L * x;
  const long double q = half * half;
  long double term = std::pow(half, static_cast<long double>(nu)) * rgamma(nu + 1.0);
  long double sum = term;
  for (int k = 1; k < 300; ++k) {
    term *= -q / (static_cast<long double>(k) * (k + nu));
    sum += term;
    if (std::fabs(term) <= 1e-21L * std::fabs(sum) && k > q) break;
  }
  return sum;
}

double bessel_miller(double nu, double x) {
  const int half_m = static_cast<int>(std::ceil(0.6 * x + 20.0 + std::sqrt(10.0 * x)));
  const int m = 2 * half_m;
  double j_next = 0.0;  // J_{nu+k+1}
  double j_cur = 1e-30;  // J_{nu+k}
  double norm = 0.0;
  // r_k = Gamma(nu+k) / (k! Gamma(nu+1)) for k >= 1.
  std::vector<double> r(static_cast<std::size_t>(half_m) + 1, 0.0);
  r[1] = 1.0;
  for (int k = 1; k < half_m; ++k) r[k + 1] = r[k] * (nu + k) / (k + 1.0);

  for (int k = m; k >= 1; --k) {
    if (k % 2 == 0) norm += (nu + k) * r[k / 2] * j_cur;
    const double j_prev = 2.0 * (nu + k) / x * j_cur - j_next;
    j_next = j_cur;
    j_cur = j_prev;
    if (std::fabs(j_cur) > 1e250) {
      j_cur *= 1e-250;
      j_next *= 1e-250;
      norm *= 1e-250;
    }
  }
  norm += j_cur;  // k = 0 term, Gamma(nu+1) factored out below
  // (x/2)^nu = Gamma(nu+1) * norm_true
  return j_cur * std::pow(0.5 * x, nu) * rgamma(nu + 1.0) / norm;
}

double bessel_hankel(double nu, double x) {
  const double mu = 4.0 * nu * nu;
  double p = 1.0;
  double q = 0.0;
  double term = 1.0;
  double last = 1.0;
  const double eightx = 8.0 * x;
  for (int k = 1; k < 60; ++k) {
    const double odd = 2.0 * k - 1.0;
    term *= (mu - odd * odd) / (k * eightx);
    if (std::fabs(term) > last && k > 2) break;
    last = std::fabs(term);
    if (k % 2 == 1) {
      q += ((k / 2) % 2 == 0 ? 1.0 : -1.0) * term;
    } else {
      p += ((k / 2) % 2 == 0 ? 1.0 : -1.0) * term;
    }
    if (last < 1e-17) break;
  }
  const double chi = x - (0.5 * nu + 0.25) * std::numbers::pi;
  return std::sqrt(2.0 / (std::numbers::pi * x)) * (p * std::cos(chi) - q * std::sin(chi));
}

}  // namespace

double gamma_fn(double x) {
  if (x < 0.5) {
    const double s = sin_pi(x);
    if (s == 0.0) throw DomainError("gamma pole at x=" + std::to_string(x));
    return std::numbers::pi / (s * lanczos(1.0 - x));
  }
  return lanczos(x);
}

cplx gamma_fn(cplx z) {
  if (z.real() < 0.5) {
    const cplx s = sin_pi(z);
    if (s == 0.0) throw DomainError("gamma pole");
    return std::numbers::pi / (s * lanczos(1.0 - z));
  }
  return lanczos(z);
}

double rgamma(double x) {
  if (x < 0.5) return sin_pi(x) * lanczos(1.0 - x) / std::numbers::pi;
  return 1.0 / lanczos(x);
}

cplx rgamma(cplx z) {
  if (z.real() < 0.5) return sin_pi(z) * lanczos(1.0 - z) / std::numbers::pi;
  return 1.0 / lanczos(z);
}

double bessel_j(double nu, double x) {
  if (!(x >= 0.0) || !(nu >= 0.0) || !std::isfinite(x) || !std::isfinite(nu))
    throw DomainError("bessel_j requires nu >= 0 and x >= 0");
  if (x == 0.0) return nu == 0.0 ? 1.0 : 0.0;
  if (x <= 12.0) return static_cast<double>(bessel_series(nu, x));
  if (x <= 60.0 || x <= nu * nu) return bessel_miller(nu, x);
  return bessel_hankel(nu, x);
}

double bessel_j_derivative(double nu, double x) {
  if (x == 0.0) {
    if (nu == 0.0 || nu > 1.0) return 0.0;
    if (nu == 1.0) return 0.5;
    throw DomainError("J_nu'(0) diverges for 0 < nu < 1");
  }
  return nu / x * bessel_j(nu, x) - bessel_j(nu + 1.0, x);
}

cplx hyp2f1_series(cplx a, cplx b, cplx c, double z) {
  if (!(z >= 0.0 && z < 1.0)) throw DomainError("hyp2f1_series requires 0 <= z < 1");
  cplx sum = 1.0;
  cplx term = 1.0;
  double largest = 1.0;
  for (int k = 0; k < 2'000'000; ++k) {
    const cplx ratio = (a + double(k)) * (b + double(k)) / ((c + double(k)) * (k + 1.0)) * z;
    term *= ratio;
    sum += term;
    const double mag = std::abs(term);
    largest = std::max(largest, mag);
    const double r = std::abs(ratio);
    if (r < 1.0 && k > 2) {
      const double rate = std::max(r, z);
      const double tail = mag * rate / (1.0 - rate);
      if (tail <= 1e-17 * std::max(std::abs(sum), 1e-3 * largest)) break;
    }
    if (mag == 0.0) break;
  }
  return sum;
}

cplx legendre_p_complex(cplx lambda, double x) {
  if (!(x > -1.0 && x <= 1.0)) throw DomainError("legendre_p requires -1 < x <= 1");
  if (x == 1.0) return 1.0;
  if (x > 0.0) return hyp2f1_series(-lambda, lambda + 1.0, 1.0, 0.5 * (1.0 - x));
  const double sqrt_pi = std::sqrt(std::numbers::pi);
  const cplx p0 = sqrt_pi * rgamma(0.5 * lambda + 1.0) * rgamma(0.5 * (1.0 - lambda));
  const cplx dp0 = -2.0 * sqrt_pi * rgamma(0.5 * (lambda + 1.0)) * rgamma(-0.5 * lambda);
  const double x2 = x * x;
  const cplx even = hyp2f1_series(-0.5 * lambda, 0.5 * (lambda + 1.0), 0.5, x2);
  const cplx odd = x * hyp2f1_series(0.5 * (1.0 - lambda), 0.5 * (lambda + 2.0), 1.5, x2);
  return p0 * even + dp0 * odd;
}

cplx legendre_p_complex_derivative(cplx lambda, double x) {
  if (!(x > -1.0 && x <= 1.0)) throw DomainError("legendre_p requires -1 < x <= 1");
  const cplx ev = lambda * (lambda + 1.0);
  if (x > 0.0) return 0.5 * ev * hyp2f1_series(1.0 - lambda, lambda + 2.0, 2.0, 0.5 * (1.0 - x));
  const double sqrt_pi = std::sqrt(std::numbers::pi);
  const cplx p0 = sqrt_pi * rgamma(0.5 * lambda + 1.0) * rgamma(0.5 * (1.0 - lambda));
  const cplx dp0 = -2.0 * sqrt_pi * rgamma(0.5 * (lambda + 1.0)) * rgamma(-0.5 * lambda);
  const double x2 = x * x;
  const cplx a = -0.5 * lambda, b = 0.5 * (lambda + 1.0);
  const cplx a1 = 0.5 * (1.0 - lambda), b1 = 0.5 * (lambda + 2.0);
  const cplx even_d = 4.0 * a * b * x * hyp2f1_series(a + 1.0, b + 1.0, 1.5, x2);
  const cplx odd_d = hyp2f1_series(a1, b1, 1.5, x2) +
                     x2 * 2.0 * a1 * b1 / 1.5 * hyp2f1_series(a1 + 1.0, b1 + 1.0, 2.5, x2);
  return p0 * even_d + dp0 * odd_d;
}

LegendreValue legendre_p_eval(const ConicalDegree& degree, double x) {
  const cplx v = legendre_p_complex(degree.lambda(), x);
  return {v.real(), std::fabs(v.imag()), x < -0.99};
}

double legendre_p(const ConicalDegree& degree, double x) { return legendre_p_eval(degree, x).value; }

double legendre_p_derivative(const ConicalDegree& degree, double x) {
  return legendre_p_complex_derivative(degree.lambda(), x).real();
}

}  // namespace tdho
