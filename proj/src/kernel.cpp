#include "tdho/kernel.hpp"

#include <cmath>
#include <numbers>

#include "tdho/quadrature.hpp"

namespace tdho {

namespace {

using cplx = std::complex<double>;

double sign_of(double x) { return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0); }

template <class F>
double bisect(F&& f, double lo, double hi, double f_lo) {
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    const double fm = f(mid);
    if (fm == 0.0) return mid;
    if (sign_of(fm) == sign_of(f_lo)) {
      lo = mid;
      f_lo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

// Interior extrema of the cubic Hermite interpolant on [0, 1].
std::vector<double> hermite_extrema(double f0, double f1, double d0, double d1) {
  const double a = 2.0 * (f0 - f1) + d0 + d1;
  const double b = 3.0 * (f1 - f0) - 2.0 * d0 - d1;
  const double c = d0;
  std::vector<double> roots;
  const double qa = 3.0 * a, qb = 2.0 * b;
  if (std::fabs(qa) < 1e-300) {
    if (std::fabs(qb) > 1e-300) roots.push_back(-c / qb);
  } else {
    // Cancellation-free form: stays accurate when the cubic term is tiny.
    const double disc = qb * qb - 4.0 * qa * c;
    if (disc >= 0.0) {
      const double q = -0.5 * (qb + std::copysign(std::sqrt(disc), qb));
      roots.push_back(q / qa);
      if (q != 0.0) roots.push_back(c / q);
    }
  }
  std::vector<double> inside;
  for (double s : roots)
    if (s > 0.0 && s < 1.0) inside.push_back(s);
  std::sort(inside.begin(), inside.end());
  return inside;
}

double hermite_value(double f0, double f1, double d0, double d1, double s) {
  const double a = 2.0 * (f0 - f1) + d0 + d1;
  const double b = 3.0 * (f1 - f0) - 2.0 * d0 - d1;
  return ((a * s + b) * s + d0) * s + f0;
}

void check_solution(const KernelRequest& req, const Trajectory& f, const LiteralOptions& opts) {
  const double span = req.t_b - req.t_a;
  const double h = 1e-4 * span;
  for (int i = 1; i <= 16; ++i) {
    const double t = req.t_a + span * i / 17.0;
    bool near_cut = false;
    for (double c : f.breakpoints()) near_cut = near_cut || std::fabs(t - c) <= 2.0 * h;
    for (double c : breakpoints(req.profile, req.t_a, req.t_b)) near_cut = near_cut || std::fabs(t - c) <= 2.0 * h;
    if (near_cut) continue;
    const PhasePoint mid = f(t);
    const PhasePoint lo = f(t - h);
    const PhasePoint hi = f(t + h);
    const double w2 = omega_squared_at(req.profile, t);
    const double scale =
        std::max({std::fabs(w2 * mid.f), std::fabs(mid.f) / (span * span), std::fabs(mid.fdot) / span, 1e-300});
    const double accel = (hi.fdot - lo.fdot) / (2.0 * h);
    const double vel = (hi.f - lo.f) / (2.0 * h);
    const double r1 = std::fabs(accel + w2 * mid.f) / scale;
    const double r2 = std::fabs(vel - mid.fdot) * span / std::max({std::fabs(mid.fdot) * span, std::fabs(mid.f), 1e-300});
    if (r1 > opts.mismatch_tolerance || r2 > opts.mismatch_tolerance) {
      throw SolutionMismatch("f does not solve the classical equation near t=" + std::to_string(t) +
                             " (relative residual " + std::to_string(std::max(r1, r2)) + ")");
    }
  }
}

KernelValue assemble(double modulus, double prefactor_phase, double exponent) {
  KernelValue kv;
  kv.modulus = modulus;
  kv.phase = prefactor_phase + exponent;
  kv.amplitude = std::polar(modulus, kv.phase);
  return kv;
}

}  // namespace

void KernelRequest::validate() const {
  if (!(mu > 0.0) || !std::isfinite(mu)) throw DomainError("kernel request needs mu > 0");
  if (!(t_b > t_a)) throw DomainError("kernel request needs t_b > t_a");
  if (!std::isfinite(q_a) || !std::isfinite(q_b)) throw DomainError("kernel endpoints must be finite");
}

std::optional<double> first_zero(const Trajectory& f, double t_lo, double t_hi, int samples) {
  std::vector<double> grid;
  for (int i = 0; i <= samples; ++i) grid.push_back(t_lo + (t_hi - t_lo) * i / samples);
  for (double c : f.breakpoints())
    if (c > t_lo && c < t_hi) grid.push_back(c);
  std::sort(grid.begin(), grid.end());

  auto value = [&f](double t) { return f(t).f; };
  PhasePoint prev = f(grid.front());
  if (prev.f == 0.0) return grid.front();
  for (std::size_t i = 1; i < grid.size(); ++i) {
    const double t0 = grid[i - 1], t1 = grid[i];
    const PhasePoint left_end = f(t1, Side::Left);
    if (left_end.f == 0.0) return t1;
    if (sign_of(left_end.f) != sign_of(prev.f)) return bisect(value, t0, t1, prev.f);
    const double dt = t1 - t0;
    for (double s : hermite_extrema(prev.f, left_end.f, prev.fdot * dt, left_end.fdot * dt)) {
      if (sign_of(hermite_value(prev.f, left_end.f, prev.fdot * dt, left_end.fdot * dt, s)) == sign_of(prev.f))
        continue;
      const double ts = t0 + s * dt;
      const double fs = value(ts);
      if (sign_of(fs) != sign_of(prev.f)) return bisect(value, t0, ts, prev.f);
    }
    prev = f(t1, Side::Right);
  }
  return std::nullopt;
}

double compute_W(const Trajectory& f, double t_a, double t_b, double rel_tol) {
  if (auto zero = first_zero(f, t_a, t_b)) throw CausticInWindow(*zero);
  std::vector<double> cuts;
  for (double c : f.breakpoints())
    if (c > t_a && c < t_b) cuts.push_back(c);
  auto integrand = [&f](double t) {
    const double v = f(t).f;
    return 1.0 / (v * v);
  };
  return integrate_gk_pieces(integrand, t_a, t_b, cuts, rel_tol).value;
}

KernelValue kernel_literal(const KernelRequest& req, const Trajectory& f, const LiteralOptions& opts) {
  req.validate();
  const double slack = 1e-12 * std::max(1.0, req.t_b - req.t_a);
  if (req.t_a < f.t_min() - slack || req.t_b > f.t_max() + slack)
    throw DomainError("solution f does not cover the kernel window");
  if (opts.check_solution) check_solution(req, f, opts);

  const double W = compute_W(f, req.t_a, req.t_b);
  const PhasePoint a = f(req.t_a, Side::Right);
  const PhasePoint b = f(req.t_b, Side::Left);
  const double mu = req.mu;

  // f_a f_b W equals v(t_b) for any admissible f; its sign picks the branch
  // of sqrt(1/i) that matches the robust form.
  const double d = a.f * b.f * W;
  const double modulus = std::sqrt(mu / (2.0 * std::numbers::pi * std::fabs(d)));
  const double pref_phase = d > 0.0 ? -0.25 * std::numbers::pi : 0.25 * std::numbers::pi;
  const double drift = 0.5 * mu * (b.fdot / b.f * req.q_b * req.q_b - a.fdot / a.f * req.q_a * req.q_a);
  const double x = req.q_b / b.f - req.q_a / a.f;
  const double free_part = mu / (2.0 * W) * x * x;

  KernelValue kv = assemble(modulus, pref_phase, drift + free_part);
  kv.path = KernelPath::Literal;
  kv.f_a = a.f;
  kv.f_b = b.f;
  kv.fdot_a = a.fdot;
  kv.fdot_b = b.fdot;
  kv.W = W;
  return kv;
}

KernelValue kernel_from_state(double mu, double q_a, double q_b, double duration, const PairState& s) {
  if (!(std::fabs(s.v) >= 1e-12 * duration)) throw CausticAtEndpoint(s.v);
  const double modulus = std::sqrt(mu / (2.0 * std::numbers::pi * std::fabs(s.v)));
  const double pref_phase = s.v > 0.0 ? -0.25 * std::numbers::pi : 0.25 * std::numbers::pi;
  const double exponent = mu / (2.0 * s.v) * (s.vdot * q_b * q_b + s.u * q_a * q_a - 2.0 * q_a * q_b);
  KernelValue kv = assemble(modulus, pref_phase, exponent);
  kv.path = KernelPath::Robust;
  kv.u_b = s.u;
  kv.udot_b = s.udot;
  kv.v_b = s.v;
  kv.vdot_b = s.vdot;
  return kv;
}

KernelValue kernel_robust(const KernelRequest& req, const FundamentalPair& pair) {
  req.validate();
  const double slack = 1e-12 * std::max(1.0, req.t_b - req.t_a);
  if (std::fabs(pair.t_a() - req.t_a) > slack) throw DomainError("fundamental pair is normalized at another t_a");
  if (req.t_b > pair.t_b() + slack) throw DomainError("fundamental pair does not reach t_b");
  const double duration = req.t_b - req.t_a;
  KernelValue kv = kernel_from_state(req.mu, req.q_a, req.q_b, duration, pair(req.t_b, Side::Left));
  const Trajectory v = pair.combination(0.0, 1.0);
  const double start = req.t_a + duration / 1024.0;
  if (first_zero(v, start, req.t_b)) kv.caustic = CausticFlag::PostCausticBranchUnverified;
  return kv;
}

KernelValue evaluate_kernel(const KernelRequest& request, const SolveOptions& opts) {
  request.validate();
  return kernel_robust(request, solve_fundamental(request.profile, request.t_a, request.t_b, opts));
}

double schrodinger_residual(const KernelFunction& kernel, const FrequencyProfile& profile, double mu, double q_b,
                            double t_b, double h_q, double h_t) {
  const cplx k0 = kernel(q_b, t_b);
  const cplx dk_dt = (kernel(q_b, t_b + h_t) - kernel(q_b, t_b - h_t)) / (2.0 * h_t);
  const cplx d2k_dq2 = (kernel(q_b + h_q, t_b) - 2.0 * k0 + kernel(q_b - h_q, t_b)) / (h_q * h_q);
  const double w2 = omega_squared_at(profile, t_b);
  const cplx residual = cplx(0.0, 1.0) * dk_dt + d2k_dq2 / (2.0 * mu) - 0.5 * mu * w2 * q_b * q_b * k0;
  return std::abs(residual) / std::abs(k0);
}

double schrodinger_residual(const KernelRequest& req, double h_q, double h_t, const SolveOptions& opts) {
  req.validate();
  if (!(req.t_b - h_t > req.t_a)) throw DomainError("time stencil reaches t_a");
  for (const auto& ev : jump_events(req.profile, req.t_a, req.t_b + 2.0 * h_t))
    if (std::fabs(ev.time - req.t_b) <= h_t) throw DomainError("time stencil straddles an impulse");
  const FundamentalPair pair = solve_fundamental(req.profile, req.t_a, req.t_b + 2.0 * h_t, opts);
  auto kernel = [&](double q, double t) {
    return kernel_from_state(req.mu, req.q_a, q, t - req.t_a, pair(t)).amplitude;
  };
  return schrodinger_residual(kernel, req.profile, req.mu, req.q_b, req.t_b, h_q, h_t);
}

}  // namespace tdho
