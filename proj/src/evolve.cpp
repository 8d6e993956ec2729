#include "tdho/evolve.hpp"

#include <cmath>
#include <numbers>

#include <fftw3.h>

#include "tdho/kernel.hpp"

namespace tdho {

namespace {

constexpr cplx kI{0.0, 1.0};

double trapezoid_norm(const std::vector<cplx>& psi, double dq) {
  double sum = 0.0;
  for (std::size_t i = 0; i < psi.size(); ++i) {
    const double w = (i == 0 || i + 1 == psi.size()) ? 0.5 : 1.0;
    sum += w * std::norm(psi[i]);
  }
  return sum * dq;
}

void check_edges(const WavePacket& psi, double tolerance) {
  const auto& v = psi.values();
  if (std::abs(v.front()) >= tolerance || std::abs(v.back()) >= tolerance)
    throw GridTooNarrow("wavefunction is not negligible at the grid edges");
}

// One caustic-free piece of a propagation window with the pair normalized at t0.
struct Window {
  double t0 = 0.0;
  double t1 = 0.0;
  PairState state;
};

std::vector<Window> plan_windows(const FrequencyProfile& profile, double t_a, double t_b, const PropagateOptions& opts) {
  std::vector<Window> windows;
  double t = t_a;
  for (int guard = 0; guard < 100000; ++guard) {
    const FundamentalPair pair = solve_fundamental(profile, t, t_b, opts.solve);
    const Trajectory v = pair.combination(0.0, 1.0);
    const auto zero = opts.split_at_caustics ? first_zero(v, t + (t_b - t) / 1024.0, t_b) : std::nullopt;
    if (!zero) {
      windows.push_back({t, t_b, pair(t_b, Side::Left)});
      return windows;
    }
    const double next = t + 0.5 * (*zero - t);
    windows.push_back({t, next, pair(next, Side::Left)});
    t = next;
  }
  throw Error("propagation window could not be split into caustic-free pieces");
}

// exp(-A q^2 + B q + C)
struct ComplexGaussian {
  cplx A, B, C;

  cplx operator()(double q) const { return std::exp(-A * q * q + B * q + C); }

  ComplexGaussian propagate(const Window& w, double mu) const {
    const PairState& s = w.state;
    if (!(std::fabs(s.v) >= 1e-12 * (w.t1 - w.t0))) throw CausticAtEndpoint(s.v);
    const double alpha = mu * s.vdot / (2.0 * s.v);
    const double beta = mu * s.u / (2.0 * s.v);
    const double gamma = mu / (2.0 * s.v);
    const cplx log_pref(0.5 * std::log(mu / (2.0 * std::numbers::pi * std::fabs(s.v))),
                        s.v > 0.0 ? -0.25 * std::numbers::pi : 0.25 * std::numbers::pi);
    const cplx a = A - kI * beta;
    ComplexGaussian out;
    out.A = -kI * alpha + gamma * gamma / a;
    out.B = -kI * gamma * B / a;
    out.C = C + B * B / (4.0 * a) + log_pref + 0.5 * std::log(std::numbers::pi / a);
    return out;
  }
};

// Range of local wavenumbers of psi(q) exp(i beta q^2) over the support of psi.
std::pair<double, double> chirped_band(const std::vector<cplx>& psi, const Grid& grid, double beta,
                                       std::size_t lo, std::size_t hi) {
  double k_lo = std::numeric_limits<double>::infinity();
  double k_hi = -k_lo;
  const double dq = grid.dq();
  for (std::size_t j = lo; j < hi; ++j) {
    const double local = std::arg(psi[j + 1] * std::conj(psi[j])) / dq;
    const double chirp = beta * (grid.q(j) + grid.q(j + 1));
    k_lo = std::min(k_lo, local + chirp);
    k_hi = std::max(k_hi, local + chirp);
  }
  if (hi <= lo) k_lo = k_hi = 0.0;
  return {k_lo, k_hi};
}

std::vector<cplx> apply_window_grid(const std::vector<cplx>& psi, const Grid& grid, const Window& w, double mu) {
  const PairState& s = w.state;
  if (!(std::fabs(s.v) >= 1e-12 * (w.t1 - w.t0))) throw CausticAtEndpoint(s.v);
  const double alpha = mu * s.vdot / (2.0 * s.v);
  const double beta = mu * s.u / (2.0 * s.v);
  const double gamma = mu / (2.0 * s.v);
  const cplx pref = std::polar(std::sqrt(mu / (2.0 * std::numbers::pi * std::fabs(s.v))),
                               s.v > 0.0 ? -0.25 * std::numbers::pi : 0.25 * std::numbers::pi);
  const double dq = grid.dq();
  const std::size_t n = grid.n;

  double peak = 0.0;
  for (const auto& x : psi) peak = std::max(peak, std::abs(x));
  std::size_t lo = 0, hi = n - 1;
  while (lo < hi && std::abs(psi[lo]) <= 1e-13 * peak) ++lo;
  while (hi > lo && std::abs(psi[hi]) <= 1e-13 * peak) --hi;

  const auto [k_lo, k_hi] = chirped_band(psi, grid, beta, lo, hi);
  const double nyquist = std::numbers::pi / dq;
  const double margin = 0.25 * nyquist;
  if (k_hi - k_lo + 2.0 * margin >= 2.0 * nyquist)
    throw GridTooNarrow("grid too coarse for the chirped wavefunction");
  const double period = 2.0 * nyquist;

  std::vector<cplx> g(n, 0.0);
  for (std::size_t j = lo; j <= hi; ++j) {
    const double q = grid.q(j);
    const double weight = (j == 0 || j + 1 == n) ? 0.5 : 1.0;
    g[j] = weight * dq * std::polar(1.0, beta * q * q) * psi[j];
  }

  std::vector<cplx> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double qb = grid.q(i);
    const double k = 2.0 * gamma * qb;
    // Aliases k + m * period must stay outside the integrand's band.
    for (int m = -4; m <= 4; ++m) {
      if (m == 0) continue;
      const double alias = k + m * period;
      if (alias > k_lo - margin && alias < k_hi + margin)
        throw GridTooNarrow("grid too coarse for the kernel phase at q_b=" + std::to_string(qb));
    }
    cplx acc = 0.0;
    for (std::size_t j = lo; j <= hi; ++j) acc += g[j] * std::polar(1.0, -k * grid.q(j));
    out[i] = pref * std::polar(1.0, alpha * qb * qb) * acc;
  }
  return out;
}

// Solves a tridiagonal system in place (Thomas); sub[0] and sup[n-1] unused.
void solve_tridiagonal(std::vector<cplx>& sub, std::vector<cplx>& diag, std::vector<cplx>& sup,
                       std::vector<cplx>& rhs) {
  const std::size_t n = diag.size();
  for (std::size_t i = 1; i < n; ++i) {
    const cplx w = sub[i] / diag[i - 1];
    diag[i] -= w * sup[i - 1];
    rhs[i] -= w * rhs[i - 1];
  }
  rhs[n - 1] /= diag[n - 1];
  for (std::size_t i = n - 1; i-- > 0;) rhs[i] = (rhs[i] - sup[i] * rhs[i + 1]) / diag[i];
}

void apply_impulse(std::vector<cplx>& psi, const Grid& grid, double mu, double strength) {
  for (std::size_t j = 0; j < psi.size(); ++j) {
    const double q = grid.q(j);
    psi[j] *= std::polar(1.0, -0.5 * mu * strength * q * q);
  }
}

class FftPlan {
 public:
  explicit FftPlan(std::size_t n) : n_(n) {
    buf_ = fftw_alloc_complex(n);
    fwd_ = fftw_plan_dft_1d(static_cast<int>(n), buf_, buf_, FFTW_FORWARD, FFTW_ESTIMATE);
    inv_ = fftw_plan_dft_1d(static_cast<int>(n), buf_, buf_, FFTW_BACKWARD, FFTW_ESTIMATE);
  }
  ~FftPlan() {
    fftw_destroy_plan(fwd_);
    fftw_destroy_plan(inv_);
    fftw_free(buf_);
  }
  FftPlan(const FftPlan&) = delete;
  FftPlan& operator=(const FftPlan&) = delete;

  /// psi <- IDFT[ phase * DFT[psi] ]
  void multiply_spectrum(std::vector<cplx>& psi, const std::vector<cplx>& phase) {
    auto* data = reinterpret_cast<cplx*>(buf_);
    std::copy(psi.begin(), psi.end(), data);
    fftw_execute(fwd_);
    for (std::size_t k = 0; k < n_; ++k) data[k] *= phase[k];
    fftw_execute(inv_);
    const double scale = 1.0 / static_cast<double>(n_);
    for (std::size_t j = 0; j < n_; ++j) psi[j] = data[j] * scale;
  }

 private:
  std::size_t n_;
  fftw_complex* buf_ = nullptr;
  fftw_plan fwd_ = nullptr;
  fftw_plan inv_ = nullptr;
};

}  // namespace

Grid::Grid(double lo, double hi, std::size_t points) : q_min(lo), q_max(hi), n(points) {
  if (points < 16) throw DomainError("grid needs at least 16 points");
  if (!(hi > lo)) throw DomainError("grid needs q_max > q_min");
}

cplx GaussianState::operator()(double q) const {
  const double s2 = sigma * sigma;
  const double x = q - center;
  return std::pow(2.0 * std::numbers::pi * s2, -0.25) * std::exp(cplx(-x * x / (4.0 * s2), momentum * q));
}

WavePacket::WavePacket(Grid grid, std::vector<cplx> values, double t)
    : grid_(grid), values_(std::move(values)), t_(t) {
  if (grid_.n < 16 || !(grid_.q_max > grid_.q_min)) throw DomainError("invalid grid");
  if (values_.size() != grid_.n) throw GridMismatch("sample count does not match the grid");
  norm_ = trapezoid_norm(values_, grid_.dq());
}

WavePacket WavePacket::sample(const GaussianState& state, const Grid& grid, double t) {
  if (!(state.sigma > 0.0)) throw DomainError("Gaussian width must be positive");
  std::vector<cplx> v(grid.n);
  for (std::size_t i = 0; i < grid.n; ++i) v[i] = state(grid.q(i));
  return WavePacket(grid, std::move(v), t);
}

WavePacket propagate_kernel(const GaussianState& state, const Grid& grid, double t_a, const FrequencyProfile& profile,
                            double mu, double t_b, const PropagateOptions& opts) {
  if (!(mu > 0.0)) throw DomainError("mass must be positive");
  if (!(t_b > t_a)) throw DomainError("propagation needs t_b > t_a");
  check_edges(WavePacket::sample(state, grid, t_a), opts.edge_tolerance);

  const double s2 = state.sigma * state.sigma;
  ComplexGaussian g{cplx(1.0 / (4.0 * s2), 0.0), cplx(state.center / (2.0 * s2), state.momentum),
                    cplx(-state.center * state.center / (4.0 * s2) - 0.25 * std::log(2.0 * std::numbers::pi * s2), 0.0)};
  for (const Window& w : plan_windows(profile, t_a, t_b, opts)) g = g.propagate(w, mu);

  std::vector<cplx> out(grid.n);
  for (std::size_t i = 0; i < grid.n; ++i) out[i] = g(grid.q(i));
  WavePacket result(grid, std::move(out), t_b);
  if (std::fabs(result.norm() - 1.0) > opts.norm_tolerance)
    throw GridTooNarrow("propagated wavefunction leaves the grid");
  return result;
}

WavePacket propagate_kernel(const WavePacket& psi, const FrequencyProfile& profile, double mu, double t_b,
                            const PropagateOptions& opts) {
  if (!(mu > 0.0)) throw DomainError("mass must be positive");
  if (!(t_b > psi.time())) throw DomainError("propagation needs t_b > t_a");
  check_edges(psi, opts.edge_tolerance);
  std::vector<cplx> values = psi.values();
  for (const Window& w : plan_windows(profile, psi.time(), t_b, opts))
    values = apply_window_grid(values, psi.grid(), w, mu);
  WavePacket result(psi.grid(), std::move(values), t_b);
  if (std::fabs(result.norm() - psi.norm()) > opts.norm_tolerance)
    throw GridTooNarrow("propagated wavefunction leaves the grid");
  return result;
}

WavePacket crank_nicolson(const WavePacket& psi, const FrequencyProfile& profile, double mu, double t_b, double dt,
                          std::vector<std::string>* warnings) {
  if (!(dt > 0.0)) throw DomainError("time step must be positive");
  if (!(mu > 0.0)) throw DomainError("mass must be positive");
  const double t_a = psi.time();
  if (!(t_b > t_a)) throw DomainError("propagation needs t_b > t_a");

  const Grid& grid = psi.grid();
  const double dq = grid.dq();
  const std::size_t m = grid.n - 2;  // interior unknowns
  const double q_edge = std::max(std::fabs(grid.q_min), std::fabs(grid.q_max));
  if (warnings) {
    const double indicator = dt * max_abs_omega_squared(profile, t_a, t_b) * q_edge * q_edge;
    if (indicator > 1.0)
      warnings->push_back("StabilityWarning: dt*max|omega^2|*q_max^2 = " + std::to_string(indicator) +
                          " exceeds 1; expect reduced accuracy");
  }

  std::vector<cplx> state = psi.values();
  state.front() = 0.0;
  state.back() = 0.0;
  std::vector<double> q2(grid.n);
  for (std::size_t j = 0; j < grid.n; ++j) q2[j] = grid.q(j) * grid.q(j);

  const double kin = 1.0 / (2.0 * mu * dq * dq);
  std::vector<cplx> sub(m), diag(m), sup(m), rhs(m);

  auto step = [&](double t_mid, double h) {
    const double w2 = omega_squared_limit(profile, t_mid, Side::Right);
    const cplx c = kI * (0.5 * h);
    auto pot = [&](std::size_t j) { return 0.5 * mu * w2 * q2[j]; };
    for (std::size_t r = 0; r < m; ++r) {
      const std::size_t j = r + 1;  // grid index
      // Rows of M +/- c (-D2/(2 mu) + M V), M = tridiag(1, 10, 1)/12.
      const cplx off_l = -kin + pot(j - 1) / 12.0;
      const cplx center = 2.0 * kin + 10.0 * pot(j) / 12.0;
      const cplx off_r = -kin + pot(j + 1) / 12.0;
      sub[r] = 1.0 / 12.0 + c * off_l;
      diag[r] = 10.0 / 12.0 + c * center;
      sup[r] = 1.0 / 12.0 + c * off_r;
      cplx acc = (10.0 / 12.0 - c * center) * state[j];
      acc += (1.0 / 12.0 - c * off_l) * state[j - 1];
      acc += (1.0 / 12.0 - c * off_r) * state[j + 1];
      rhs[r] = acc;
    }
    solve_tridiagonal(sub, diag, sup, rhs);
    for (std::size_t r = 0; r < m; ++r) state[r + 1] = rhs[r];
  };

  const auto events = jump_events(profile, t_a, t_b);
  std::vector<double> cuts;
  for (const auto& ev : events) cuts.push_back(ev.time);
  cuts.push_back(t_b);
  double lo = t_a;
  for (double hi : cuts) {
    const auto steps = static_cast<std::size_t>(std::ceil((hi - lo) / dt - 1e-9));
    const double h = (hi - lo) / static_cast<double>(std::max<std::size_t>(steps, 1));
    for (std::size_t k = 0; k < std::max<std::size_t>(steps, 1); ++k) step(lo + (k + 0.5) * h, h);
    for (const auto& ev : events)
      if (ev.time == hi) apply_impulse(state, grid, mu, ev.strength);
    lo = hi;
  }
  return WavePacket(grid, std::move(state), t_b);
}

WavePacket time_sliced_oracle(const WavePacket& psi, const FrequencyProfile& profile, double mu, double t_b,
                              int n_slices) {
  if (n_slices < 1) throw DomainError("time slicing needs n_slices >= 1");
  if (!(mu > 0.0)) throw DomainError("mass must be positive");
  const double t_a = psi.time();
  if (!(t_b > t_a)) throw DomainError("propagation needs t_b > t_a");
  check_edges(psi, 1e-8);

  const Grid& grid = psi.grid();
  const std::size_t n = grid.n;
  const double eps = (t_b - t_a) / (n_slices + 1);
  const double period = grid.dq() * static_cast<double>(n);

  std::vector<cplx> kinetic(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double index = k < (n + 1) / 2 ? static_cast<double>(k) : static_cast<double>(k) - static_cast<double>(n);
    const double p = 2.0 * std::numbers::pi * index / period;
    kinetic[k] = std::polar(1.0, -eps * p * p / (2.0 * mu));
  }

  // Grid phases are referenced to q_min; the DFT shift theorem leaves the
  // kinetic multiplier unchanged, so no extra phase is needed.
  FftPlan fft(n);
  std::vector<cplx> state = psi.values();
  const auto events = jump_events(profile, t_a, t_b + eps);
  for (int j = 1; j <= n_slices + 1; ++j) {
    const double t_prev = t_a + (j - 1) * eps;
    const double t_j = j == n_slices + 1 ? t_b : t_a + j * eps;
    fft.multiply_spectrum(state, kinetic);
    const double w2 = omega_squared_limit(profile, t_j, Side::Right);
    for (std::size_t i = 0; i < n; ++i) {
      const double q = grid.q(i);
      state[i] *= std::polar(1.0, -eps * 0.5 * mu * w2 * q * q);
    }
    for (const auto& ev : events)
      if (ev.time > t_prev && ev.time <= t_j) apply_impulse(state, grid, mu, ev.strength);
  }
  return WavePacket(grid, std::move(state), t_b);
}

Comparison compare(const WavePacket& a, const WavePacket& b) {
  if (!(a.grid() == b.grid())) throw GridMismatch("wavepackets live on different grids");
  const auto& x = a.values();
  const auto& y = b.values();
  const double dq = a.grid().dq();
  double diff = 0.0;
  double sup = 0.0;
  cplx inner = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double w = (i == 0 || i + 1 == x.size()) ? 0.5 : 1.0;
    const cplx d = x[i] - y[i];
    diff += w * std::norm(d);
    sup = std::max(sup, std::abs(d));
    inner += w * std::conj(x[i]) * y[i];
  }
  Comparison c;
  c.l2_error = std::sqrt(diff * dq);
  c.max_error = sup;
  c.norm_ratio = a.norm() / b.norm();
  c.overlap = std::abs(inner * dq);
  return c;
}

}  // namespace tdho
