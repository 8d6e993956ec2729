#pragma once

#include <complex>
#include <functional>
#include <optional>

#include "tdho/classical.hpp"

namespace tdho {

/// Endpoints and mass for one propagator evaluation (hbar = 1).
struct KernelRequest {
  double mu = 1.0;
  FrequencyProfile profile = FrequencyProfile::free();
  double q_a = 0.0;
  double t_a = 0.0;
  double q_b = 0.0;
  double t_b = 1.0;

  /// Throws DomainError unless mu > 0 and t_b > t_a.
  void validate() const;
};

enum class KernelPath { Literal, Robust };

enum class CausticFlag {
  None,
  /// v changed sign inside (t_a, t_b); no Maslov phase has been added.
  PostCausticBranchUnverified,
};

struct KernelValue {
  std::complex<double> amplitude;
  double modulus = 0.0;
  /// Unwrapped: amplitude == modulus * exp(i phase) with phase not reduced mod 2 pi.
  double phase = 0.0;
  CausticFlag caustic = CausticFlag::None;
  KernelPath path = KernelPath::Robust;

  // Literal path diagnostics.
  double f_a = 0.0, f_b = 0.0, fdot_a = 0.0, fdot_b = 0.0, W = 0.0;
  // Robust path diagnostics.
  double u_b = 0.0, udot_b = 0.0, v_b = 0.0, vdot_b = 0.0;
};

/// Earliest zero of f on [t_lo, t_hi], located by sign changes and by the
/// interior extrema of the cubic Hermite interpolant of (f, fdot) on a
/// uniform sample grid, then refined by bisection.
std::optional<double> first_zero(const Trajectory& f, double t_lo, double t_hi, int samples = 512);

/// W = integral of dt / f^2 over [t_a, t_b] by adaptive Gauss-Kronrod.
/// Throws CausticInWindow when f vanishes on the closed window.
double compute_W(const Trajectory& f, double t_a, double t_b, double rel_tol = 1e-10);

struct LiteralOptions {
  bool check_solution = true;  // throw SolutionMismatch if f does not solve the classical equation
  double mismatch_tolerance = 1e-4;
};

/// Literal transcription of the propagator in terms of one solution f without
/// zeros on [t_a, t_b].
KernelValue kernel_literal(const KernelRequest& request, const Trajectory& f, const LiteralOptions& opts = {});

/// K = sqrt(mu / (2 pi i v_b)) exp{ i mu (vdot_b q_b^2 + u_b q_a^2 - 2 q_a q_b) / (2 v_b) }.
/// Throws CausticAtEndpoint when |v_b| < 1e-12 (t_b - t_a).
KernelValue kernel_robust(const KernelRequest& request, const FundamentalPair& pair);

/// Robust kernel from pair values at t_b; shared by kernel_robust and the
/// finite-difference residual.
KernelValue kernel_from_state(double mu, double q_a, double q_b, double duration, const PairState& s);

/// Solves the pair numerically and evaluates the robust kernel.
KernelValue evaluate_kernel(const KernelRequest& request, const SolveOptions& opts = {});

using KernelFunction = std::function<std::complex<double>(double q_b, double t_b)>;

/// |i dK/dt_b + (1/2mu) d2K/dq_b^2 - (mu/2) omega^2(t_b) q_b^2 K| / |K| by
/// central differences.
double schrodinger_residual(const KernelFunction& kernel, const FrequencyProfile& profile, double mu, double q_b,
                            double t_b, double h_q, double h_t);

/// Same residual for the robust kernel of `request`, using one numerical pair
/// solved on [t_a, t_b + h_t].
double schrodinger_residual(const KernelRequest& request, double h_q, double h_t, const SolveOptions& opts = {});

}  // namespace tdho
