#include <doctest.h>

#include <cmath>
#include <random>

#include "tdho/errors.hpp"
#include "tdho/freq_profile.hpp"

using namespace tdho;
using nlohmann::json;

TEST_CASE("catalogue values") {
  CHECK(omega_squared_at(FrequencyProfile::constant(2.0), 5.0) == 4.0);
  CHECK(omega_squared_at(FrequencyProfile::exp_decay(1.0, 1.0), 0.0) == 1.0);
  CHECK(omega_squared_at(FrequencyProfile::delta_pulse(1.0, 0.0), 1.0) == 1.0);
  CHECK(omega_squared_at(FrequencyProfile::sech_squared(2.0, 1.0, 0.0), 0.0) == 4.0);
  CHECK(omega_squared_at(FrequencyProfile::free(), -3.0) == 0.0);
  CHECK(omega_squared_at(FrequencyProfile::power_law(2.0, 3.0, 1.0), 2.0) == doctest::Approx(72.0));
}

TEST_CASE("delta pulse: step is right-continuous and the impulse is never evaluated") {
  const auto p = FrequencyProfile::delta_pulse(2.0, 0.5);
  CHECK_THROWS_AS(omega_squared_at(p, 0.5), EvalAtImpulse);
  CHECK(omega_squared_at(p, 0.25) == 0.0);
  CHECK(omega_squared_at(p, 0.75) == 16.0);
  CHECK(omega_squared_limit(p, 0.5, Side::Left) == 0.0);
  CHECK(omega_squared_limit(p, 0.5, Side::Right) == 16.0);
}

TEST_CASE("jump events") {
  CHECK(jump_events(FrequencyProfile::constant(1.0), 0.0, 1.0).empty());
  const auto events = jump_events(FrequencyProfile::delta_pulse(2.0, 0.5), 0.0, 1.0);
  REQUIRE(events.size() == 1);
  CHECK(events[0].time == 0.5);
  CHECK(events[0].strength == 4.0);
  CHECK(jump_events(FrequencyProfile::delta_pulse(2.0, 2.0), 0.0, 1.0).empty());
  // Endpoints are excluded: the window sees only one-sided limits there.
  CHECK(jump_events(FrequencyProfile::delta_pulse(2.0, 0.0), 0.0, 1.0).empty());
  CHECK(jump_events(FrequencyProfile::delta_pulse(2.0, 1.0), 0.0, 1.0).empty());
}

TEST_CASE("exponential decay is exactly multiplicative") {
  const double alpha = 0.7;
  const auto p = FrequencyProfile::exp_decay(1.3, alpha);
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> d(-5.0, 5.0);
  for (int i = 0; i < 200; ++i) {
    const double t = d(rng), delta = d(rng);
    const double lhs = omega_squared_at(p, t + delta);
    const double rhs = omega_squared_at(p, t) * std::exp(-alpha * delta);
    CHECK(std::fabs(lhs - rhs) <= 1e-13 * std::fabs(rhs));
  }
}

TEST_CASE("power law with beta = 0 is constant") {
  const auto p = FrequencyProfile::power_law(1.5, 3.0, 0.0);
  for (double t : {-2.0, 0.0, 0.5, 9.0}) CHECK(omega_squared_at(p, t) == 2.25);
}

TEST_CASE("power law domain") {
  const auto frac = FrequencyProfile::power_law(1.0, 1.0, 0.5);
  CHECK(omega_squared_at(frac, 0.0) == 0.0);
  CHECK_THROWS_AS(omega_squared_at(frac, -0.1), DomainError);
  const auto neg = FrequencyProfile::power_law(1.0, 1.0, -1.0);
  CHECK_THROWS_AS(omega_squared_at(neg, 0.0), DomainError);
  CHECK(omega_squared_at(neg, 2.0) == 0.5);
  const auto integer = FrequencyProfile::power_law(1.0, 1.0, 2.0);
  CHECK(omega_squared_at(integer, -2.0) == 4.0);
  CHECK_THROWS_AS(FrequencyProfile::power_law(1.0, 1.0, -2.0), DomainError);
  CHECK_THROWS_AS(FrequencyProfile::power_law(1.0, -1.0, 0.5), DomainError);
}

TEST_CASE("tabulated profiles") {
  const std::vector<double> t{0.0, 0.5, 1.0, 2.0, 3.5};
  const std::vector<double> w{1.0, 0.3, 2.0, -1.0, 4.0};
  const auto cubic = FrequencyProfile::tabulated(t, w);
  const auto linear = FrequencyProfile::tabulated(t, w, Interpolation::Linear);
  for (std::size_t i = 0; i < t.size(); ++i) {
    CHECK(omega_squared_at(cubic, t[i]) == w[i]);
    CHECK(omega_squared_at(linear, t[i]) == w[i]);
  }
  CHECK(omega_squared_at(linear, 0.25) == doctest::Approx(0.65));
  CHECK_THROWS_AS(omega_squared_at(cubic, -0.01), DomainError);
  CHECK_THROWS_AS(omega_squared_at(cubic, 3.51), DomainError);
  CHECK_THROWS_AS(FrequencyProfile::tabulated({0.0}, {1.0}), DomainError);
  CHECK_THROWS_AS(FrequencyProfile::tabulated({0.0, 0.0, 1.0}, {1.0, 1.0, 1.0}), DomainError);
  CHECK_THROWS_AS(FrequencyProfile::tabulated({0.0, 1.0}, {1.0}), DomainError);

  // A natural spline reproduces linear data exactly.
  const auto line = FrequencyProfile::tabulated({0.0, 1.0, 3.0, 4.0}, {1.0, 3.0, 7.0, 9.0});
  for (double x : {0.1, 0.9, 2.2, 3.7}) CHECK(omega_squared_at(line, x) == doctest::Approx(1.0 + 2.0 * x));

  // Continuity of the cubic interpolant around interior nodes.
  for (double node : {0.5, 1.0, 2.0})
    CHECK(omega_squared_at(cubic, node - 1e-9) == doctest::Approx(omega_squared_at(cubic, node + 1e-9)).epsilon(1e-6));
}

TEST_CASE("expression profiles") {
  const auto p = FrequencyProfile::expression("w0^2*exp(-a*t)", {{"w0", 2.0}, {"a", 0.5}});
  CHECK(omega_squared_at(p, 2.0) == doctest::Approx(4.0 * std::exp(-1.0)));
  CHECK_THROWS_AS(FrequencyProfile::expression("2*+"), SyntaxError);
  const auto pole = FrequencyProfile::expression("1/(t-1)");
  CHECK_THROWS_AS(omega_squared_at(pole, 1.0), NonFinite);
}

TEST_CASE("breakpoints and bounds") {
  CHECK(breakpoints(FrequencyProfile::delta_pulse(1.0, 0.5), 0.0, 1.0) == std::vector<double>{0.5});
  const auto tab = FrequencyProfile::tabulated({0.0, 0.5, 1.0, 2.0}, {1.0, 2.0, 3.0, 4.0});
  CHECK(breakpoints(tab, 0.0, 2.0) == std::vector<double>{0.5, 1.0});
  CHECK(max_abs_omega_squared(FrequencyProfile::sech_squared(2.0, 1.0, 0.5), 0.0, 1.0) == 4.0);
}

TEST_CASE("JSON round trip") {
  const std::vector<FrequencyProfile> profiles{
      FrequencyProfile::constant(2.0),
      FrequencyProfile::exp_decay(1.0, 0.5),
      FrequencyProfile::power_law(1.0, 2.0, 0.5),
      FrequencyProfile::delta_pulse(1.0, 0.25),
      FrequencyProfile::sech_squared(2.0, 1.0, 0.5),
      FrequencyProfile::tabulated({0.0, 1.0, 2.0}, {1.0, 2.0, 0.5}, Interpolation::Linear),
      FrequencyProfile::expression("sin(t)^2 + c", {{"c", 0.1}}),
  };
  for (const auto& p : profiles) {
    const json j = to_json(p);
    const FrequencyProfile back = profile_from_json(j);
    CHECK(to_json(back) == j);
    CHECK(back.type_name() == p.type_name());
    for (double t : {0.1, 0.7, 1.3}) CHECK(omega_squared_at(back, t) == omega_squared_at(p, t));
  }
}

TEST_CASE("JSON errors name the offending field") {
  auto path_of = [](const json& j) -> std::string {
    try {
      profile_from_json(j, "$.profile");
    } catch (const ConfigError& e) {
      return e.path;
    }
    return "";
  };
  CHECK(path_of(json::array()) == "$.profile");
  CHECK(path_of({{"omega0", 1.0}}) == "$.profile.type");
  CHECK(path_of({{"type", "warp"}}) == "$.profile.type");
  CHECK(path_of({{"type", "exp_decay"}, {"omega0", 1.0}}) == "$.profile.alpha");
  CHECK(path_of({{"type", "constant"}, {"omega0", "fast"}}) == "$.profile.omega0");
  CHECK(path_of({{"type", "expression"}, {"expr", "2*+"}}) == "$.profile.expr");
  CHECK(path_of({{"type", "tabulated"}, {"t", {0.0, 1.0}}, {"omega2", {1.0, "x"}}}) == "$.profile.omega2[1]");
  CHECK(path_of({{"type", "tabulated"}, {"t", {1.0, 0.0}}, {"omega2", {1.0, 2.0}}}) == "$.profile");
}
