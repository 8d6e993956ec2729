#pragma once

#include <complex>
#include <string>
#include <vector>

#include "tdho/classical.hpp"

namespace tdho {

using cplx = std::complex<double>;

/// Uniform grid q_i = q_min + i dq, i = 0..n-1, with n >= 16.
struct Grid {
  double q_min = -20.0;
  double q_max = 20.0;
  std::size_t n = 2048;

  Grid() = default;
  Grid(double lo, double hi, std::size_t points);

  double dq() const { return (q_max - q_min) / static_cast<double>(n - 1); }
  double q(std::size_t i) const { return q_min + dq() * static_cast<double>(i); }

  friend bool operator==(const Grid&, const Grid&) = default;
};

/// psi(q) = (2 pi sigma^2)^(-1/4) exp(-(q - center)^2 / (4 sigma^2) + i momentum q).
struct GaussianState {
  double center = 0.0;
  double momentum = 0.0;
  double sigma = 1.0;

  cplx operator()(double q) const;
};

class WavePacket {
 public:
  WavePacket(Grid grid, std::vector<cplx> values, double t);

  static WavePacket sample(const GaussianState& state, const Grid& grid, double t);

  const Grid& grid() const { return grid_; }
  const std::vector<cplx>& values() const { return values_; }
  double time() const { return t_; }
  /// Trapezoidal sum |psi|^2 dq (the squared L2 norm).
  double norm() const { return norm_; }
  bool normalized() const { return std::fabs(norm_ - 1.0) <= 1e-9; }

 private:
  Grid grid_;
  std::vector<cplx> values_;
  double t_;
  double norm_;
};

struct PropagateOptions {
  SolveOptions solve{1e-12, 1e-12};
  /// Split the window where v would cross zero so every piece is caustic free.
  bool split_at_caustics = true;
  double edge_tolerance = 1e-8;
  double norm_tolerance = 1e-6;
};

/// Exact route: the kernel maps a complex Gaussian onto a complex Gaussian,
/// so the q_a integral is done in closed form and sampled on `grid` at t_b.
WavePacket propagate_kernel(const GaussianState& state, const Grid& grid, double t_a,
                            const FrequencyProfile& profile, double mu, double t_b,
                            const PropagateOptions& opts = {});

/// General route: trapezoidal quadrature of K(q_a, q_b) psi(q_a) with the exact
/// quadratic kernel phase. Throws GridTooNarrow if psi is not negligible at
/// the edges, if the integrand's phase is under-resolved, or if the output
/// norm drifts by more than opts.norm_tolerance.
WavePacket propagate_kernel(const WavePacket& psi, const FrequencyProfile& profile, double mu, double t_b,
                            const PropagateOptions& opts = {});

/// Crank-Nicolson with the fourth-order compact (Numerov) Laplacian on the
/// interior points and Dirichlet zero ends. omega^2 is sampled at half steps,
/// impulses apply exp(-i mu s q^2 / 2) exactly at their time. Appends a
/// message to `warnings` when dt max|omega^2| max q^2 > 1.
WavePacket crank_nicolson(const WavePacket& psi, const FrequencyProfile& profile, double mu, double t_b, double dt,
                          std::vector<std::string>* warnings = nullptr);

/// Discretized path integral: n_slices + 1 short-time kernels of length
/// eps = (t_b - t_a) / (n_slices + 1), each a free step done with the discrete
/// momentum integral followed by exp(-i eps (mu/2) omega^2(t_j) q^2).
WavePacket time_sliced_oracle(const WavePacket& psi, const FrequencyProfile& profile, double mu, double t_b,
                              int n_slices);

struct Comparison {
  double l2_error = 0.0;
  double max_error = 0.0;
  double norm_ratio = 0.0;
  double overlap = 0.0;  // |<psi_1|psi_2>|
};

Comparison compare(const WavePacket& a, const WavePacket& b);

}  // namespace tdho
