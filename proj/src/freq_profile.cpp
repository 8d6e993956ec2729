#include "tdho/freq_profile.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace tdho {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};

void require(bool ok, const std::string& message) {
  if (!ok) throw DomainError(message);
}

bool is_integer(double x) { return std::isfinite(x) && x == std::round(x); }

// Natural cubic spline moments (second derivatives at the nodes).
std::vector<double> spline_moments(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t n = x.size();
  std::vector<double> m(n, 0.0);
  if (n < 3) return m;
  std::vector<double> diag(n, 0.0), rhs(n, 0.0), upper(n, 0.0);
  for (std::size_t i = 1; i + 1 < n; ++i) {
    const double h0 = x[i] - x[i - 1];
    const double h1 = x[i + 1] - x[i];
    diag[i] = 2.0 * (h0 + h1);
    upper[i] = h1;
    rhs[i] = 6.0 * ((y[i + 1] - y[i]) / h1 - (y[i] - y[i - 1]) / h0);
  }
  // Thomas algorithm on rows 1..n-2 with m[0] = m[n-1] = 0.
  for (std::size_t i = 2; i + 1 < n; ++i) {
    const double lower = x[i] - x[i - 1];
    const double w = lower / diag[i - 1];
    diag[i] -= w * upper[i - 1];
    rhs[i] -= w * rhs[i - 1];
  }
  for (std::size_t i = n - 2; i >= 1; --i) {
    m[i] = (rhs[i] - upper[i] * m[i + 1]) / diag[i];
    if (i == 1) break;
  }
  return m;
}

double tabulated_at(const TabulatedProfile& tab, double t) {
  const auto& x = tab.t;
  if (t < x.front() || t > x.back())
    throw DomainError("tabulated profile does not extrapolate (t=" + std::to_string(t) + ")");
  auto it = std::lower_bound(x.begin(), x.end(), t);
  std::size_t i = static_cast<std::size_t>(it - x.begin());
  if (it != x.end() && *it == t) return tab.omega2[i];
  const std::size_t lo = i - 1;
  const double h = x[i] - x[lo];
  const double a = (x[i] - t) / h;
  const double b = (t - x[lo]) / h;
  double value = a * tab.omega2[lo] + b * tab.omega2[i];
  if (tab.interp == Interpolation::Cubic) {
    value += ((a * a * a - a) * tab.second_derivative[lo] + (b * b * b - b) * tab.second_derivative[i]) *
             h * h / 6.0;
  }
  return value;
}

double smooth_value(const FrequencyProfile& profile, double t, Side side) {
  const TimeDomain dom = domain(profile);
  if (!dom.contains(t)) throw DomainError("t=" + std::to_string(t) + " outside profile domain");
  return std::visit(
      Overloaded{
          [](const ConstantProfile& p) { return p.omega0 * p.omega0; },
          [t](const ExpDecayProfile& p) { return p.omega0 * p.omega0 * std::exp(-p.alpha * t); },
          [t](const PowerLawProfile& p) {
            const double c = p.omega0 * std::pow(p.alpha, p.beta);
            return c * c * std::pow(t, p.beta);
          },
          [t, side](const DeltaPulseProfile& p) {
            const double w2 = p.omega0 * p.omega0;
            const bool on = t > p.t0 || (t == p.t0 && side == Side::Right);
            return on ? w2 * w2 : 0.0;
          },
          [t](const SechSquaredProfile& p) {
            const double c = std::cosh(p.beta * (t - p.t0));
            return p.alpha * p.alpha / (c * c);
          },
          [t](const TabulatedProfile& p) { return tabulated_at(p, t); },
          [t](const ExpressionProfile& p) { return evaluate(p.ast, t); },
      },
      profile.spec());
}

// JSON helpers -----------------------------------------------------------------

double number_field(const nlohmann::json& j, const std::string& key, const std::string& path) {
  const std::string where = path + "." + key;
  if (!j.contains(key)) throw ConfigError(where, "missing required number");
  if (!j.at(key).is_number()) throw ConfigError(where, "expected a number");
  return j.at(key).get<double>();
}

double number_field_or(const nlohmann::json& j, const std::string& key, const std::string& path,
                       double fallback) {
  return j.contains(key) ? number_field(j, key, path) : fallback;
}

std::vector<double> array_field(const nlohmann::json& j, const std::string& key,
                                const std::string& path) {
  const std::string where = path + "." + key;
  if (!j.contains(key)) throw ConfigError(where, "missing required array");
  if (!j.at(key).is_array()) throw ConfigError(where, "expected an array of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < j.at(key).size(); ++i) {
    const auto& item = j.at(key)[i];
    if (!item.is_number()) throw ConfigError(where + "[" + std::to_string(i) + "]", "expected a number");
    out.push_back(item.get<double>());
  }
  return out;
}

template <class F>
FrequencyProfile wrap_domain_errors(const std::string& path, F&& make) {
  try {
    return make();
  } catch (const DomainError& e) {
    throw ConfigError(path, e.what());
  } catch (const SyntaxError& e) {
    throw ConfigError(path + ".expr", e.what());
  } catch (const UnknownIdentifier& e) {
    throw ConfigError(path + ".expr", e.what());
  }
}

}  // namespace

FrequencyProfile FrequencyProfile::constant(double omega0) {
  require(std::isfinite(omega0), "constant: omega0 must be finite");
  return FrequencyProfile(ConstantProfile{omega0});
}

FrequencyProfile FrequencyProfile::exp_decay(double omega0, double alpha) {
  require(std::isfinite(omega0) && std::isfinite(alpha), "exp_decay: parameters must be finite");
  return FrequencyProfile(ExpDecayProfile{omega0, alpha});
}

FrequencyProfile FrequencyProfile::power_law(double omega0, double alpha, double beta) {
  require(std::isfinite(omega0) && std::isfinite(alpha) && std::isfinite(beta),
          "power_law: parameters must be finite");
  require(beta > -2.0, "power_law: beta must exceed -2");
  require(alpha > 0.0 || is_integer(beta), "power_law: alpha^beta must be real");
  return FrequencyProfile(PowerLawProfile{omega0, alpha, beta});
}

FrequencyProfile FrequencyProfile::delta_pulse(double omega0, double t0) {
  require(std::isfinite(omega0) && std::isfinite(t0), "delta_pulse: parameters must be finite");
  return FrequencyProfile(DeltaPulseProfile{omega0, t0});
}

FrequencyProfile FrequencyProfile::sech_squared(double alpha, double beta, double t0) {
  require(std::isfinite(alpha) && std::isfinite(beta) && std::isfinite(t0),
          "sech_squared: parameters must be finite");
  return FrequencyProfile(SechSquaredProfile{alpha, beta, t0});
}

FrequencyProfile FrequencyProfile::tabulated(std::vector<double> t, std::vector<double> omega2,
                                             Interpolation interp) {
  require(t.size() >= 2, "tabulated: need at least two samples");
  require(t.size() == omega2.size(), "tabulated: t and omega2 differ in length");
  for (std::size_t i = 0; i < t.size(); ++i) {
    require(std::isfinite(t[i]) && std::isfinite(omega2[i]), "tabulated: samples must be finite");
    if (i > 0) require(t[i] > t[i - 1], "tabulated: time grid must be strictly increasing");
  }
  TabulatedProfile tab{std::move(t), std::move(omega2), interp, {}};
  tab.second_derivative = interp == Interpolation::Cubic ? spline_moments(tab.t, tab.omega2)
                                                         : std::vector<double>(tab.t.size(), 0.0);
  return FrequencyProfile(std::move(tab));
}

FrequencyProfile FrequencyProfile::expression(std::string source, ConstantTable constants) {
  ExprNode ast = parse_expression(source, constants);
  return FrequencyProfile(ExpressionProfile{std::move(source), std::move(constants), std::move(ast)});
}

std::string FrequencyProfile::type_name() const {
  return std::visit(Overloaded{
                        [](const ConstantProfile&) { return "constant"; },
                        [](const ExpDecayProfile&) { return "exp_decay"; },
                        [](const PowerLawProfile&) { return "power_law"; },
                        [](const DeltaPulseProfile&) { return "delta_pulse"; },
                        [](const SechSquaredProfile&) { return "sech_squared"; },
                        [](const TabulatedProfile&) { return "tabulated"; },
                        [](const ExpressionProfile&) { return "expression"; },
                    },
                    spec_);
}

TimeDomain domain(const FrequencyProfile& profile) {
  if (const auto* p = profile.get<PowerLawProfile>()) {
    if (p->beta < 0.0) return {0.0, kInf, true};
    if (!is_integer(p->beta)) return {0.0, kInf, false};
  }
  if (const auto* p = profile.get<TabulatedProfile>()) return {p->t.front(), p->t.back(), false};
  return {-kInf, kInf, false};
}

double omega_squared_at(const FrequencyProfile& profile, double t) {
  if (const auto* p = profile.get<DeltaPulseProfile>(); p && t == p->t0 && p->omega0 != 0.0)
    throw EvalAtImpulse(t);
  return smooth_value(profile, t, Side::Right);
}

double omega_squared_limit(const FrequencyProfile& profile, double t, Side side) {
  return smooth_value(profile, t, side);
}

std::vector<JumpEvent> jump_events(const FrequencyProfile& profile, double t_a, double t_b) {
  std::vector<JumpEvent> events;
  if (const auto* p = profile.get<DeltaPulseProfile>()) {
    if (p->omega0 != 0.0 && p->t0 > t_a && p->t0 < t_b) events.push_back({p->t0, p->omega0 * p->omega0});
  }
  return events;
}

std::vector<double> breakpoints(const FrequencyProfile& profile, double t_a, double t_b) {
  std::vector<double> out;
  if (const auto* p = profile.get<DeltaPulseProfile>()) {
    if (p->t0 > t_a && p->t0 < t_b) out.push_back(p->t0);
  } else if (const auto* tab = profile.get<TabulatedProfile>()) {
    for (double node : tab->t)
      if (node > t_a && node < t_b) out.push_back(node);
  }
  return out;
}

double max_abs_omega_squared(const FrequencyProfile& profile, double t_a, double t_b, int n) {
  double best = 0.0;
  for (int i = 0; i < n; ++i) {
    const double t = t_a + (t_b - t_a) * i / std::max(1, n - 1);
    best = std::max(best, std::fabs(omega_squared_limit(profile, t, Side::Right)));
  }
  return best;
}

FrequencyProfile profile_from_json(const nlohmann::json& j, const std::string& path) {
  if (!j.is_object()) throw ConfigError(path, "profile must be a JSON object");
  if (!j.contains("type") || !j.at("type").is_string())
    throw ConfigError(path + ".type", "missing profile type string");
  const std::string type = j.at("type").get<std::string>();
  return wrap_domain_errors(path, [&]() -> FrequencyProfile {
    if (type == "constant") return FrequencyProfile::constant(number_field(j, "omega0", path));
    if (type == "free") return FrequencyProfile::free();
    if (type == "exp_decay")
      return FrequencyProfile::exp_decay(number_field(j, "omega0", path), number_field(j, "alpha", path));
    if (type == "power_law")
      return FrequencyProfile::power_law(number_field(j, "omega0", path), number_field(j, "alpha", path),
                                         number_field(j, "beta", path));
    if (type == "delta_pulse")
      return FrequencyProfile::delta_pulse(number_field(j, "omega0", path),
                                           number_field_or(j, "t0", path, 0.0));
    if (type == "sech_squared")
      return FrequencyProfile::sech_squared(number_field(j, "alpha", path), number_field(j, "beta", path),
                                            number_field_or(j, "t0", path, 0.0));
    if (type == "tabulated") {
      Interpolation interp = Interpolation::Cubic;
      if (j.contains("interp")) {
        const auto& v = j.at("interp");
        if (v == "linear") {
          interp = Interpolation::Linear;
        } else if (v != "cubic") {
          throw ConfigError(path + ".interp", "expected \"cubic\" or \"linear\"");
        }
      }
      return FrequencyProfile::tabulated(array_field(j, "t", path), array_field(j, "omega2", path), interp);
    }
    if (type == "expression") {
      if (!j.contains("expr") || !j.at("expr").is_string())
        throw ConfigError(path + ".expr", "missing expression string");
      ConstantTable constants;
      if (j.contains("constants")) {
        const auto& c = j.at("constants");
        if (!c.is_object()) throw ConfigError(path + ".constants", "expected an object of numbers");
        for (const auto& [name, value] : c.items()) {
          if (!value.is_number()) throw ConfigError(path + ".constants." + name, "expected a number");
          constants.emplace(name, value.get<double>());
        }
      }
      return FrequencyProfile::expression(j.at("expr").get<std::string>(), std::move(constants));
    }
    throw ConfigError(path + ".type", "unknown profile type '" + type + "'");
  });
}

nlohmann::json to_json(const FrequencyProfile& profile) {
  nlohmann::json j;
  j["type"] = profile.type_name();
  std::visit(Overloaded{
                 [&](const ConstantProfile& p) { j["omega0"] = p.omega0; },
                 [&](const ExpDecayProfile& p) {
                   j["omega0"] = p.omega0;
                   j["alpha"] = p.alpha;
                 },
                 [&](const PowerLawProfile& p) {
                   j["omega0"] = p.omega0;
                   j["alpha"] = p.alpha;
                   j["beta"] = p.beta;
                 },
                 [&](const DeltaPulseProfile& p) {
                   j["omega0"] = p.omega0;
                   j["t0"] = p.t0;
                 },
                 [&](const SechSquaredProfile& p) {
                   j["alpha"] = p.alpha;
                   j["beta"] = p.beta;
                   j["t0"] = p.t0;
                 },
                 [&](const TabulatedProfile& p) {
                   j["t"] = p.t;
                   j["omega2"] = p.omega2;
                   j["interp"] = p.interp == Interpolation::Cubic ? "cubic" : "linear";
                 },
                 [&](const ExpressionProfile& p) {
                   j["expr"] = p.source;
                   if (!p.constants.empty()) {
                     nlohmann::json c = nlohmann::json::object();
                     for (const auto& [name, value] : p.constants) c[name] = value;
                     j["constants"] = c;
                   }
                 },
             },
             profile.spec());
  return j;
}

}  // namespace tdho
