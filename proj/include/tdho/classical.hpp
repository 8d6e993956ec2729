#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "tdho/dopri5.hpp"
#include "tdho/freq_profile.hpp"

namespace tdho {

/// A solution f of fddot + omega^2(t) f = 0 together with its derivative.
struct PhasePoint {
  double f = 0.0;
  double fdot = 0.0;
};

/// Values of the fundamental pair: u(t_a) = 1, udot(t_a) = 0, v(t_a) = 0, vdot(t_a) = 1.
struct PairState {
  double u = 0.0;
  double udot = 0.0;
  double v = 0.0;
  double vdot = 0.0;

  double wronskian() const { return u * vdot - udot * v; }
};

struct SolveOptions {
  double rtol = 1e-10;
  double atol = 1e-10;
};

/// One classical solution on [t_min, t_max]. At jump events f is continuous
/// and fdot is reported as the right limit unless Side::Left is requested.
class Trajectory {
 public:
  using Evaluator = std::function<PhasePoint(double, Side)>;

  Trajectory(Evaluator eval, double t_min, double t_max, std::vector<double> breakpoints = {});

  PhasePoint operator()(double t, Side side = Side::Right) const;
  double t_min() const { return t_min_; }
  double t_max() const { return t_max_; }
  /// Interior times where fdot may jump.
  const std::vector<double>& breakpoints() const { return breakpoints_; }

 private:
  Evaluator eval_;
  double t_min_;
  double t_max_;
  std::vector<double> breakpoints_;
};

/// The normalized pair (u, v) on [t_a, t_b]; the kernel's working currency.
class FundamentalPair {
 public:
  using Evaluator = std::function<PairState(double, Side)>;

  FundamentalPair(Evaluator eval, double t_a, double t_b, std::vector<JumpEvent> events, std::string backing);

  PairState operator()(double t, Side side = Side::Right) const;
  double t_a() const { return t_a_; }
  double t_b() const { return t_b_; }
  const std::vector<JumpEvent>& events() const { return events_; }
  /// "numerical" or "closed_form+numerical".
  const std::string& backing() const { return backing_; }

  /// max |u vdot - udot v - 1| over 100 uniform sample times.
  double wronskian_drift() const { return wronskian_drift_; }

  /// The solution with initial data f(t_a) = a, fdot(t_a) = b.
  Trajectory combination(double a, double b) const;

 private:
  Evaluator eval_;
  double t_a_;
  double t_b_;
  std::vector<JumpEvent> events_;
  std::string backing_;
  double wronskian_drift_ = 0.0;
};

/// Numerical pair from an adaptive Dormand-Prince 5(4) solve. Integration is
/// split at every jump event, where udot and vdot jump by -s u and -s v.
FundamentalPair solve_fundamental(const FrequencyProfile& profile, double t_a, double t_b,
                                  const SolveOptions& opts = {});

/// Single solution with f(t_a) = f0, fdot(t_a) = fdot0.
Trajectory solve_trajectory(const FrequencyProfile& profile, double t_a, double t_b, double f0, double fdot0,
                            const SolveOptions& opts = {});

/// Outcome of substituting a candidate f into the classical equation.
struct ResidualReport {
  bool pass = false;
  double h = 0.0;
  double max_residual = 0.0;         // at step h
  double max_residual_coarse = 0.0;  // at step 2h
  double slope = 0.0;                // log2(coarse / fine); NaN when at the roundoff floor
  double constant = 0.0;             // max_residual / h^2
  double t_worst = 0.0;
  double jump_mismatch = 0.0;  // max |delta fdot + s f(t0)| over events
  double t_jump_worst = 0.0;
  std::string summary;
};

enum class ClosedFormFamily { Constant, ExpDecay, PowerLaw, DeltaPulse, SechSquared };

/// A formula for f taken from the catalogue of solvable profiles. `status`
/// holds the residual check on `status_window`; a failing formula is still
/// returned so that callers can inspect it.
struct ClosedFormSolution {
  ClosedFormFamily family = ClosedFormFamily::Constant;
  std::string formula;
  Trajectory::Evaluator eval;
  TimeDomain valid_domain;
  std::vector<double> breakpoints;
  std::pair<double, double> status_window{0.0, 1.0};
  ResidualReport status;

  PhasePoint operator()(double t, Side side = Side::Right) const { return eval(t, side); }
  bool residual_failing() const { return !status.pass; }
  Trajectory on(double t_a, double t_b) const;
};

/// Closed form for the five catalogued families; nullopt for tabulated and
/// expression profiles.
std::optional<ClosedFormSolution> closed_form(const FrequencyProfile& profile);

struct VerifyOptions {
  double slope_tolerance = 0.25;
  int grid_points = 201;
  double jump_tolerance = 1e-8;
};

/// Residual |f_h'' + omega^2 f| / max(1, |f|) on a uniform grid, with
/// Richardson slope from steps h and 2h, plus derivative-jump mismatch at
/// impulses. Grid points whose stencils touch an impulse are skipped.
ResidualReport verify_solution(const FrequencyProfile& profile, const ClosedFormSolution& f, double t_a, double t_b,
                               double h, const VerifyOptions& opts = {});

/// Normalized pair built from f and one numerical companion solution.
/// Throws DegenerateSolution if the companion's Wronskian with f is < 1e-6.
FundamentalPair pair_from_solution(const FrequencyProfile& profile, const ClosedFormSolution& f, double t_a,
                                   double t_b, const SolveOptions& opts = {});

}  // namespace tdho
