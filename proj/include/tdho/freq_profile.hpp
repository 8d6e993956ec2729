#pragma once

#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "tdho/omega_expr.hpp"

namespace tdho {

/// omega^2(t) = omega0^2
struct ConstantProfile {
  double omega0 = 0.0;
};

/// omega^2(t) = omega0^2 exp(-alpha t)
struct ExpDecayProfile {
  double omega0 = 0.0;
  double alpha = 0.0;
};

/// omega^2(t) = (omega0 alpha^beta)^2 t^beta, beta > -2.
struct PowerLawProfile {
  double omega0 = 0.0;
  double alpha = 0.0;
  double beta = 0.0;
};

/// omega^2(t) = omega0^2 delta(t - t0) + omega0^4 theta(t - t0), theta(0) = 1.
struct DeltaPulseProfile {
  double omega0 = 0.0;
  double t0 = 0.0;
};

/// omega^2(t) = alpha^2 / cosh^2(beta (t - t0))
struct SechSquaredProfile {
  double alpha = 0.0;
  double beta = 0.0;
  double t0 = 0.0;
};

enum class Interpolation { Linear, Cubic };

/// Samples of omega^2 on a strictly increasing grid. Cubic uses a natural spline.
struct TabulatedProfile {
  std::vector<double> t;
  std::vector<double> omega2;
  Interpolation interp = Interpolation::Cubic;
  std::vector<double> second_derivative;  // spline moments, filled on construction
};

struct ExpressionProfile {
  std::string source;
  ConstantTable constants;
  ExprNode ast;
};

/// A delta impulse -s delta(t - time) f in the classical equation. Crossing it
/// leaves f continuous and shifts fdot by -s f(time).
struct JumpEvent {
  double time = 0.0;
  double strength = 0.0;

  friend bool operator==(const JumpEvent&, const JumpEvent&) = default;
};

enum class Side { Left, Right };

/// Closed evaluation domain [lo, hi]; `lo_open` excludes lo itself.
struct TimeDomain {
  double lo = 0.0;
  double hi = 0.0;
  bool lo_open = false;

  bool contains(double t) const { return (lo_open ? t > lo : t >= lo) && t <= hi; }
};

/// Immutable description of omega^2(t). Build through the named factories,
/// which validate parameters and throw DomainError on bad input.
class FrequencyProfile {
 public:
  using Variant = std::variant<ConstantProfile, ExpDecayProfile, PowerLawProfile, DeltaPulseProfile,
                               SechSquaredProfile, TabulatedProfile, ExpressionProfile>;

  static FrequencyProfile constant(double omega0);
  static FrequencyProfile free() { return constant(0.0); }
  static FrequencyProfile exp_decay(double omega0, double alpha);
  static FrequencyProfile power_law(double omega0, double alpha, double beta);
  static FrequencyProfile delta_pulse(double omega0, double t0);
  static FrequencyProfile sech_squared(double alpha, double beta, double t0);
  static FrequencyProfile tabulated(std::vector<double> t, std::vector<double> omega2,
                                    Interpolation interp = Interpolation::Cubic);
  static FrequencyProfile expression(std::string source, ConstantTable constants = {});

  const Variant& spec() const { return spec_; }

  template <class T>
  const T* get() const {
    return std::get_if<T>(&spec_);
  }

  /// JSON "type" tag, e.g. "exp_decay".
  std::string type_name() const;

 private:
  explicit FrequencyProfile(Variant v) : spec_(std::move(v)) {}
  Variant spec_;
};

TimeDomain domain(const FrequencyProfile& profile);

/// Smooth plus step part of omega^2 at t. Throws DomainError outside the
/// domain and EvalAtImpulse when t sits on a delta event.
double omega_squared_at(const FrequencyProfile& profile, double t);

/// One-sided limit of the smooth plus step part; never throws EvalAtImpulse.
/// Integrators use this at segment ends that coincide with impulses.
double omega_squared_limit(const FrequencyProfile& profile, double t, Side side);

/// Delta events strictly inside (t_a, t_b), sorted by time.
std::vector<JumpEvent> jump_events(const FrequencyProfile& profile, double t_a, double t_b);

/// Times in (t_a, t_b) where omega^2 itself is discontinuous (impulses, steps
/// and tabulated nodes for linear interpolation).
std::vector<double> breakpoints(const FrequencyProfile& profile, double t_a, double t_b);

/// Largest |omega^2| over n uniform samples of [t_a, t_b].
double max_abs_omega_squared(const FrequencyProfile& profile, double t_a, double t_b, int n = 257);

/// Throws ConfigError carrying a JSON path on schema violations.
FrequencyProfile profile_from_json(const nlohmann::json& j, const std::string& path = "$");
nlohmann::json to_json(const FrequencyProfile& profile);

}  // namespace tdho
