#include "tdho/classical.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "tdho/specfun.hpp"

namespace tdho {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

void check_window(const FrequencyProfile& profile, double t_a, double t_b) {
  if (!(t_b > t_a)) throw DomainError("window requires t_a < t_b");
  const TimeDomain dom = domain(profile);
  if (!dom.contains(t_a) || !dom.contains(t_b))
    throw DomainError("window [" + std::to_string(t_a) + ", " + std::to_string(t_b) +
                      "] leaves the profile domain");
}

// Piecewise dense solution of the N-dimensional linear system, split at the
// profile's breakpoints; `kick` applies the derivative jump of each impulse.
template <std::size_t N>
struct Segmented {
  std::vector<double> starts;
  std::vector<DenseSolution<N>> pieces;
  double t_a = 0.0;
  double t_b = 0.0;

  std::array<double, N> operator()(double t, Side side) const {
    const double slack = 1e-12 * std::max(1.0, std::fabs(t_b - t_a));
    if (t < t_a - slack || t > t_b + slack)
      throw DomainError("t=" + std::to_string(t) + " outside the solved window");
    t = std::clamp(t, t_a, t_b);
    auto it = std::upper_bound(starts.begin(), starts.end(), t);
    std::size_t idx = static_cast<std::size_t>(it - starts.begin()) - 1;
    if (side == Side::Left && idx > 0 && starts[idx] == t) --idx;
    return pieces[idx](t);
  }
};

template <std::size_t N, class Kick>
std::shared_ptr<const Segmented<N>> integrate(const FrequencyProfile& profile, double t_a, double t_b,
                                              std::array<double, N> y, const SolveOptions& opts, Kick kick) {
  check_window(profile, t_a, t_b);
  const auto events = jump_events(profile, t_a, t_b);
  std::vector<double> cuts = breakpoints(profile, t_a, t_b);
  cuts.push_back(t_b);

  auto seg = std::make_shared<Segmented<N>>();
  seg->t_a = t_a;
  seg->t_b = t_b;
  Dopri5Options dopts;
  dopts.rtol = opts.rtol;
  dopts.atol = opts.atol;

  double lo = t_a;
  for (double hi : cuts) {
    const double mid = 0.5 * (lo + hi);
    auto rhs = [&profile, mid](double t, const std::array<double, N>& s) {
      const double w2 = omega_squared_limit(profile, t, t <= mid ? Side::Right : Side::Left);
      std::array<double, N> d{};
      for (std::size_t i = 0; i < N; i += 2) {
        d[i] = s[i + 1];
        d[i + 1] = -w2 * s[i];
      }
      return d;
    };
    seg->starts.push_back(lo);
    seg->pieces.push_back(dopri5_solve<N>(rhs, lo, hi, y, dopts));
    y = seg->pieces.back().final_state();
    for (const auto& ev : events)
      if (ev.time == hi) kick(y, ev.strength);
    lo = hi;
  }
  return seg;
}

template <std::size_t N>
void apply_kick(std::array<double, N>& y, double strength) {
  for (std::size_t i = 0; i < N; i += 2) y[i + 1] -= strength * y[i];
}

double audit_wronskian(const FundamentalPair& pair) {
  double drift = 0.0;
  for (int i = 0; i < 100; ++i) {
    const double t = pair.t_a() + (pair.t_b() - pair.t_a()) * i / 99.0;
    drift = std::max(drift, std::fabs(pair(t).wronskian() - 1.0));
  }
  return drift;
}

double sign_of(double x) { return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0); }

std::string format_report(const ResidualReport& r) {
  std::ostringstream os;
  os.precision(3);
  os << (r.pass ? "PASS" : "FAIL") << ": max residual " << std::scientific << r.max_residual << " at t="
     << std::defaultfloat << r.t_worst << " (h=" << r.h << ", slope " << r.slope << ")";
  if (r.jump_mismatch > 0.0) os << ", jump mismatch " << std::scientific << r.jump_mismatch;
  return os.str();
}

}  // namespace

Trajectory::Trajectory(Evaluator eval, double t_min, double t_max, std::vector<double> breakpoints)
    : eval_(std::move(eval)), t_min_(t_min), t_max_(t_max), breakpoints_(std::move(breakpoints)) {}

PhasePoint Trajectory::operator()(double t, Side side) const { return eval_(t, side); }

FundamentalPair::FundamentalPair(Evaluator eval, double t_a, double t_b, std::vector<JumpEvent> events,
                                 std::string backing)
    : eval_(std::move(eval)), t_a_(t_a), t_b_(t_b), events_(std::move(events)), backing_(std::move(backing)) {
  wronskian_drift_ = audit_wronskian(*this);
}

PairState FundamentalPair::operator()(double t, Side side) const { return eval_(t, side); }

Trajectory FundamentalPair::combination(double a, double b) const {
  std::vector<double> cuts;
  for (const auto& ev : events_) cuts.push_back(ev.time);
  return Trajectory(
      [eval = eval_, a, b](double t, Side side) {
        const PairState s = eval(t, side);
        return PhasePoint{a * s.u + b * s.v, a * s.udot + b * s.vdot};
      },
      t_a_, t_b_, std::move(cuts));
}

FundamentalPair solve_fundamental(const FrequencyProfile& profile, double t_a, double t_b, const SolveOptions& opts) {
  auto seg = integrate<4>(profile, t_a, t_b, {1.0, 0.0, 0.0, 1.0}, opts, apply_kick<4>);
  return FundamentalPair(
      [seg](double t, Side side) {
        const auto y = (*seg)(t, side);
        return PairState{y[0], y[1], y[2], y[3]};
      },
      t_a, t_b, jump_events(profile, t_a, t_b), "numerical");
}

Trajectory solve_trajectory(const FrequencyProfile& profile, double t_a, double t_b, double f0, double fdot0,
                            const SolveOptions& opts) {
  auto seg = integrate<2>(profile, t_a, t_b, {f0, fdot0}, opts, apply_kick<2>);
  std::vector<double> cuts;
  for (const auto& ev : jump_events(profile, t_a, t_b)) cuts.push_back(ev.time);
  return Trajectory(
      [seg](double t, Side side) {
        const auto y = (*seg)(t, side);
        return PhasePoint{y[0], y[1]};
      },
      t_a, t_b, std::move(cuts));
}

Trajectory ClosedFormSolution::on(double t_a, double t_b) const {
  if (!valid_domain.contains(t_a) || !valid_domain.contains(t_b))
    throw DomainError("closed form not defined on the requested window");
  std::vector<double> cuts;
  for (double c : breakpoints)
    if (c > t_a && c < t_b) cuts.push_back(c);
  return Trajectory(eval, t_a, t_b, std::move(cuts));
}

std::optional<ClosedFormSolution> closed_form(const FrequencyProfile& profile) {
  constexpr double kInf = std::numeric_limits<double>::infinity();
  ClosedFormSolution sol;
  sol.valid_domain = {-kInf, kInf, false};

  if (const auto* p = profile.get<ConstantProfile>()) {
    const double w = p->omega0;
    sol.family = ClosedFormFamily::Constant;
    sol.formula = "cos(omega0 t)";
    sol.eval = [w](double t, Side) { return PhasePoint{std::cos(w * t), -w * std::sin(w * t)}; };
    sol.status_window = {0.0, 1.0};
  } else if (const auto* p = profile.get<ExpDecayProfile>()) {
    if (p->alpha == 0.0) return std::nullopt;
    const double w = std::fabs(p->omega0), a = p->alpha;
    sol.family = ClosedFormFamily::ExpDecay;
    sol.formula = "J0((2 omega0/alpha) exp(-alpha t/2))";
    sol.eval = [w, a](double t, Side) {
      const double z = 2.0 * w / a * std::exp(-0.5 * a * t);
      return PhasePoint{bessel_j(0.0, z), 0.5 * a * z * bessel_j(1.0, z)};
    };
    sol.status_window = {0.0, 2.0};
  } else if (const auto* p = profile.get<PowerLawProfile>()) {
    const double c = p->omega0 * std::pow(p->alpha, p->beta);
    if (!(c > 0.0)) return std::nullopt;
    const double order = 1.0 / (p->beta + 2.0);
    const double scale = 2.0 * c * order;
    const double beta = p->beta;
    sol.family = ClosedFormFamily::PowerLaw;
    sol.formula = "sqrt(t/(omega0 alpha^beta)) J_{1/(beta+2)}((2 omega0 alpha^beta/(beta+2)) t^((beta+2)/2))";
    sol.eval = [c, order, scale, beta](double t, Side) {
      if (!(t > 0.0)) throw DomainError("power-law closed form needs t > 0");
      const double z = scale * std::pow(t, 0.5 * (beta + 2.0));
      const double amp = 1.0 / std::sqrt(c);
      const double j = bessel_j(order, z);
      const double dj = order / z * j - bessel_j(order + 1.0, z);
      const double f = amp * std::sqrt(t) * j;
      const double fdot = amp * (0.5 * j / std::sqrt(t) + std::sqrt(t) * dj * c * std::pow(t, 0.5 * beta));
      return PhasePoint{f, fdot};
    };
    sol.valid_domain = {0.0, kInf, true};
    sol.status_window = {0.5, 2.5};
  } else if (const auto* p = profile.get<DeltaPulseProfile>()) {
    const double w = p->omega0, t0 = p->t0;
    sol.family = ClosedFormFamily::DeltaPulse;
    sol.formula = "exp(omega0 |t - t0|)";
    sol.eval = [w, t0](double t, Side side) {
      const double f = std::exp(w * std::fabs(t - t0));
      double s = sign_of(t - t0);
      if (t == t0) s = side == Side::Right ? 1.0 : -1.0;
      return PhasePoint{f, w * s * f};
    };
    sol.breakpoints = {t0};
    sol.status_window = {t0 - 1.0, t0 + 1.0};
  } else if (const auto* p = profile.get<SechSquaredProfile>()) {
    const double alpha = p->alpha, beta = p->beta, t0 = p->t0;
    const double disc = alpha * alpha - 0.25;
    const ConicalDegree degree =
        disc >= 0.0 ? ConicalDegree::conical(std::sqrt(disc)) : ConicalDegree::real(-0.5 - std::sqrt(-disc));
    sol.family = ClosedFormFamily::SechSquared;
    sol.formula = "P_{i sqrt(alpha^2 - 1/4) - 1/2}(tanh(beta (t - t0)))";
    sol.eval = [degree, beta, t0](double t, Side) {
      const double x = std::tanh(beta * (t - t0));
      const double f = legendre_p(degree, x);
      const double fdot = beta * (1.0 - x * x) * legendre_p_derivative(degree, x);
      return PhasePoint{f, fdot};
    };
    sol.status_window = {t0 - 1.0, t0 + 1.0};
  } else {
    return std::nullopt;
  }
  sol.status = verify_solution(profile, sol, sol.status_window.first, sol.status_window.second, 1e-3);
  return sol;
}

ResidualReport verify_solution(const FrequencyProfile& profile, const ClosedFormSolution& f, double t_a, double t_b,
                               double h, const VerifyOptions& opts) {
  ResidualReport report;
  report.h = h;
  const auto events = jump_events(profile, t_a, t_b);
  const auto cuts = breakpoints(profile, t_a, t_b);

  auto residual_at = [&](double t, double step, double& scale_out) {
    const double fm = f(t - step).f;
    const double f0 = f(t).f;
    const double fp = f(t + step).f;
    const double second = (fp - 2.0 * f0 + fm) / (step * step);
    scale_out = std::max({1.0, std::fabs(fm), std::fabs(f0), std::fabs(fp)});
    return std::fabs(second + omega_squared_at(profile, t) * f0) / std::max(1.0, std::fabs(f0));
  };

  double worst_fine = 0.0, worst_coarse = 0.0, floor = 0.0;
  const int n = std::max(opts.grid_points, 3);
  const double lo = t_a + 2.0 * h;
  const double hi = t_b - 2.0 * h;
  for (int i = 0; i < n; ++i) {
    const double t = lo + (hi - lo) * i / (n - 1);
    bool near_cut = false;
    for (double c : cuts) near_cut = near_cut || std::fabs(t - c) <= 2.0 * h;
    if (near_cut) continue;
    double scale = 1.0;
    const double fine = residual_at(t, h, scale);
    const double coarse = residual_at(t, 2.0 * h, scale);
    floor = std::max(floor, 64.0 * std::numeric_limits<double>::epsilon() * scale / (h * h));
    if (fine > worst_fine) {
      worst_fine = fine;
      report.t_worst = t;
    }
    worst_coarse = std::max(worst_coarse, coarse);
  }
  report.max_residual = worst_fine;
  report.max_residual_coarse = worst_coarse;
  report.constant = worst_fine / (h * h);

  for (const auto& ev : events) {
    const PhasePoint left = f(ev.time, Side::Left);
    const PhasePoint right = f(ev.time, Side::Right);
    const double mismatch = std::fabs(right.fdot - left.fdot + ev.strength * right.f) /
                            std::max(1.0, std::fabs(right.f));
    if (mismatch > report.jump_mismatch) {
      report.jump_mismatch = mismatch;
      report.t_jump_worst = ev.time;
    }
  }

  bool smooth_ok = false;
  if (worst_fine <= floor) {
    report.slope = kNaN;
    smooth_ok = true;
  } else {
    report.slope = std::log2(worst_coarse / worst_fine);
    smooth_ok = std::fabs(report.slope - 2.0) <= opts.slope_tolerance;
  }
  report.pass = smooth_ok && report.jump_mismatch <= opts.jump_tolerance;
  report.summary = format_report(report);
  return report;
}

FundamentalPair pair_from_solution(const FrequencyProfile& profile, const ClosedFormSolution& f, double t_a,
                                   double t_b, const SolveOptions& opts) {
  const PhasePoint fa = f(t_a);
  double g0 = 0.0, gdot0 = 1.0;
  if (std::fabs(fa.f) < std::fabs(fa.fdot)) {
    g0 = 1.0;
    gdot0 = 0.0;
  }
  const double w0 = fa.f * gdot0 - fa.fdot * g0;
  if (std::fabs(w0) < 1e-6) throw DegenerateSolution("companion solution is numerically parallel to f");
  const Trajectory g = solve_trajectory(profile, t_a, t_b, g0, gdot0, opts);
  // [u v] = [f g] M^{-1} with M = [[f_a, g_a], [fdot_a, gdot_a]], det M = w0.
  const double uf = gdot0 / w0, ug = -fa.fdot / w0;
  const double vf = -g0 / w0, vg = fa.f / w0;
  auto eval = [f, g, uf, ug, vf, vg](double t, Side side) {
    const PhasePoint a = f(t, side);
    const PhasePoint b = g(t, side);
    return PairState{uf * a.f + ug * b.f, uf * a.fdot + ug * b.fdot, vf * a.f + vg * b.f,
                     vf * a.fdot + vg * b.fdot};
  };
  return FundamentalPair(eval, t_a, t_b, jump_events(profile, t_a, t_b), "closed_form+numerical");
}

}  // namespace tdho
