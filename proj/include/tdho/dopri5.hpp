#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <string>
#include <vector>

#include "tdho/errors.hpp"

namespace tdho {

struct Dopri5Options {
  double rtol = 1e-10;
  double atol = 1e-10;
  double initial_step = 0.0;  // 0 selects automatically
  std::size_t max_steps = 2'000'000;
};

/// Dormand-Prince 5(4) solution with Hairer's fourth-order dense output.
/// Holds the interpolation polynomial of every accepted step on [t0, t1].
template <std::size_t N>
class DenseSolution {
 public:
  using State = std::array<double, N>;

  struct Step {
    double t = 0.0;
    double h = 0.0;
    std::array<State, 5> rcont{};
  };

  DenseSolution() = default;

  double t_begin() const { return t_begin_; }
  double t_end() const { return t_end_; }
  const State& initial_state() const { return y_begin_; }
  const State& final_state() const { return y_end_; }
  std::size_t steps() const { return steps_.size(); }
  std::size_t rejected_steps() const { return rejected_; }
  const std::vector<Step>& step_data() const { return steps_; }

  State operator()(double t) const {
    if (steps_.empty()) return y_begin_;
    if (t == t_end_) return y_end_;
    auto it = std::upper_bound(steps_.begin(), steps_.end(), t,
                               [](double value, const Step& s) { return value < s.t; });
    const Step& s = it == steps_.begin() ? steps_.front() : *(it - 1);
    const double theta = (t - s.t) / s.h;
    const double theta1 = 1.0 - theta;
    State y{};
    for (std::size_t i = 0; i < N; ++i) {
      y[i] = s.rcont[0][i] +
             theta * (s.rcont[1][i] +
                      theta1 * (s.rcont[2][i] + theta * (s.rcont[3][i] + theta1 * s.rcont[4][i])));
    }
    return y;
  }

  template <std::size_t M, class Rhs>
  friend DenseSolution<M> dopri5_solve(Rhs&& rhs, double t0, double t1, const std::array<double, M>& y0,
                                       const Dopri5Options& opts);

 private:
  double t_begin_ = 0.0;
  double t_end_ = 0.0;
  State y_begin_{};
  State y_end_{};
  std::vector<Step> steps_;
  std::size_t rejected_ = 0;
};

/// Integrates y' = rhs(t, y) from t0 to t1 > t0. rhs may throw; the
/// exception is rethrown as StepFailure with its message.
template <std::size_t N, class Rhs>
DenseSolution<N> dopri5_solve(Rhs&& rhs, double t0, double t1, const std::array<double, N>& y0,
                              const Dopri5Options& opts) {
  using State = std::array<double, N>;
  constexpr double c2 = 1.0 / 5.0, c3 = 3.0 / 10.0, c4 = 4.0 / 5.0, c5 = 8.0 / 9.0;
  constexpr double a21 = 1.0 / 5.0;
  constexpr double a31 = 3.0 / 40.0, a32 = 9.0 / 40.0;
  constexpr double a41 = 44.0 / 45.0, a42 = -56.0 / 15.0, a43 = 32.0 / 9.0;
  constexpr double a51 = 19372.0 / 6561.0, a52 = -25360.0 / 2187.0, a53 = 64448.0 / 6561.0,
                   a54 = -212.0 / 729.0;
  constexpr double a61 = 9017.0 / 3168.0, a62 = -355.0 / 33.0, a63 = 46732.0 / 5247.0,
                   a64 = 49.0 / 176.0, a65 = -5103.0 / 18656.0;
  constexpr double a71 = 35.0 / 384.0, a73 = 500.0 / 1113.0, a74 = 125.0 / 192.0,
                   a75 = -2187.0 / 6784.0, a76 = 11.0 / 84.0;
  constexpr double e1 = 71.0 / 57600.0, e3 = -71.0 / 16695.0, e4 = 71.0 / 1920.0,
                   e5 = -17253.0 / 339200.0, e6 = 22.0 / 525.0, e7 = -1.0 / 40.0;
  constexpr double d1 = -12715105075.0 / 11282082432.0, d3 = 87487479700.0 / 32700410799.0,
                   d4 = -10690763975.0 / 1880347072.0, d5 = 701980252875.0 / 199316789632.0,
                   d6 = -1453857185.0 / 822651844.0, d7 = 69997945.0 / 29380423.0;

  if (!(t1 > t0)) throw DomainError("dopri5_solve requires t1 > t0");

  DenseSolution<N> sol;
  sol.t_begin_ = t0;
  sol.t_end_ = t1;
  sol.y_begin_ = y0;

  auto eval = [&](double t, const State& y) {
    try {
      return rhs(t, y);
    } catch (const DomainError&) {
      throw;
    } catch (const Error& e) {
      throw StepFailure(std::string("right-hand side failed: ") + e.what());
    }
  };

  auto combine = [](const State& y, double h, std::initializer_list<std::pair<double, const State*>> terms) {
    State out = y;
    for (const auto& [coef, k] : terms)
      for (std::size_t i = 0; i < N; ++i) out[i] += h * coef * (*k)[i];
    return out;
  };

  const double span = t1 - t0;
  double t = t0;
  State y = y0;
  State k1 = eval(t, y);
  double h = opts.initial_step > 0.0 ? opts.initial_step : span * 1e-3;
  h = std::min(h, span);
  double err_old = 1e-4;
  bool last_rejected = false;

  for (std::size_t n = 0;; ++n) {
    if (n >= opts.max_steps) throw StepFailure("dopri5: step budget exhausted");
    if (!(h > 1e-14 * std::max(1.0, std::fabs(t)))) throw StepFailure("dopri5: step size underflow");
    bool last = false;
    if (t + h >= t1 || t1 - (t + h) < 1e-12 * span) {
      h = t1 - t;
      last = true;
    }

    const State y2 = combine(y, h, {{a21, &k1}});
    const State k2 = eval(t + c2 * h, y2);
    const State y3 = combine(y, h, {{a31, &k1}, {a32, &k2}});
    const State k3 = eval(t + c3 * h, y3);
    const State y4 = combine(y, h, {{a41, &k1}, {a42, &k2}, {a43, &k3}});
    const State k4 = eval(t + c4 * h, y4);
    const State y5 = combine(y, h, {{a51, &k1}, {a52, &k2}, {a53, &k3}, {a54, &k4}});
    const State k5 = eval(t + c5 * h, y5);
    const State y6 = combine(y, h, {{a61, &k1}, {a62, &k2}, {a63, &k3}, {a64, &k4}, {a65, &k5}});
    const double t_new = last ? t1 : t + h;
    const State k6 = eval(t_new, y6);
    const State y_new = combine(y, h, {{a71, &k1}, {a73, &k3}, {a74, &k4}, {a75, &k5}, {a76, &k6}});
    const State k7 = eval(t_new, y_new);

    double err = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
      const double e = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
      const double scale = opts.atol + opts.rtol * std::max(std::fabs(y[i]), std::fabs(y_new[i]));
      err += (e / scale) * (e / scale);
    }
    err = std::sqrt(err / N);
    if (!std::isfinite(err)) throw StepFailure("dopri5: non-finite error estimate");

    if (err <= 1.0) {
      typename DenseSolution<N>::Step step;
      step.t = t;
      step.h = h;
      for (std::size_t i = 0; i < N; ++i) {
        const double dy = y_new[i] - y[i];
        const double bspl = h * k1[i] - dy;
        step.rcont[0][i] = y[i];
        step.rcont[1][i] = dy;
        step.rcont[2][i] = bspl;
        step.rcont[3][i] = dy - h * k7[i] - bspl;
        step.rcont[4][i] =
            h * (d1 * k1[i] + d3 * k3[i] + d4 * k4[i] + d5 * k5[i] + d6 * k6[i] + d7 * k7[i]);
      }
      sol.steps_.push_back(step);
      t = t_new;
      y = y_new;
      k1 = k7;
      if (last) break;
      // PI step-size controller (Hairer's beta = 0.04).
      double fac = std::pow(err, 0.2 - 0.04 * 0.75) * std::pow(err_old, -0.04);
      fac = std::clamp(fac / 0.9, 0.1, 5.0);
      double h_new = h / fac;
      if (last_rejected) h_new = std::min(h_new, h);
      err_old = std::max(err, 1e-4);
      h = h_new;
      last_rejected = false;
    } else {
      ++sol.rejected_;
      h /= std::min(5.0, std::pow(err, 0.2) / 0.9);
      last_rejected = true;
    }
  }
  sol.y_end_ = y;
  return sol;
}

}  // namespace tdho
