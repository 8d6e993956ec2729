#include <doctest.h>

#include <cmath>
#include <numbers>

#include "tdho/errors.hpp"
#include "tdho/evolve.hpp"

using namespace tdho;

namespace {

constexpr double kPi = std::numbers::pi;
const double kGroundSigma = std::sqrt(0.5);

Grid standard_grid() { return Grid(-20.0, 20.0, 2048); }

double second_moment(const WavePacket& psi) {
  const Grid& g = psi.grid();
  double sum = 0.0;
  for (std::size_t i = 0; i < g.n; ++i) {
    const double w = (i == 0 || i + 1 == g.n) ? 0.5 : 1.0;
    sum += w * g.q(i) * g.q(i) * std::norm(psi.values()[i]);
  }
  return sum * g.dq();
}

WavePacket scaled(const WavePacket& psi, cplx factor) {
  std::vector<cplx> v = psi.values();
  for (auto& x : v) x *= factor;
  return WavePacket(psi.grid(), std::move(v), psi.time());
}

// Hermite-Gauss eigenfunctions of the unit oscillator, built by the
// three-term recurrence.
WavePacket hermite_state(int n, const Grid& g) {
  std::vector<cplx> v(g.n);
  for (std::size_t i = 0; i < g.n; ++i) {
    const double q = g.q(i);
    double prev = 0.0, cur = std::pow(kPi, -0.25) * std::exp(-0.5 * q * q);
    for (int k = 0; k < n; ++k) {
      const double next = std::sqrt(2.0 / (k + 1)) * q * cur - std::sqrt(static_cast<double>(k) / (k + 1)) * prev;
      prev = cur;
      cur = next;
    }
    v[i] = cur;
  }
  return WavePacket(g, std::move(v), 0.0);
}

}  // namespace

TEST_CASE("free spreading of the minimum-uncertainty packet") {
  const GaussianState s{0.0, 0.0, kGroundSigma};
  const WavePacket out = propagate_kernel(s, standard_grid(), 0.0, FrequencyProfile::free(), 1.0, 1.0);
  CHECK(second_moment(out) == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(std::fabs(out.norm() - 1.0) < 1e-10);

  const WavePacket general = propagate_kernel(WavePacket::sample(s, standard_grid(), 0.0), FrequencyProfile::free(),
                                              1.0, 1.0);
  CHECK(second_moment(general) == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(compare(out, general).l2_error < 1e-10);
}

TEST_CASE("short propagation approaches the identity") {
  const GaussianState s{0.5, 1.0, kGroundSigma};
  const WavePacket psi0 = WavePacket::sample(s, standard_grid(), 0.0);
  // ||psi(T) - psi0|| = T ||H psi0|| + O(T^2): halving T halves the distance.
  double previous = 0.0;
  for (double T : {4e-3, 2e-3, 1e-3}) {
    const WavePacket out = propagate_kernel(s, standard_grid(), 0.0, FrequencyProfile::constant(1.0), 1.0, T);
    const double err = compare(out, psi0).l2_error;
    if (previous > 0.0) CHECK(previous / err == doctest::Approx(2.0).epsilon(0.01));
    previous = err;
  }
  CHECK(previous < 2e-3);
}

TEST_CASE("one full period returns minus the initial state") {
  const auto p = FrequencyProfile::constant(1.0);
  const GaussianState s{1.0, -0.5, 0.9};
  const WavePacket psi0 = WavePacket::sample(s, standard_grid(), 0.0);
  const WavePacket exact = propagate_kernel(s, standard_grid(), 0.0, p, 1.0, 2.0 * kPi);
  // Two caustics each contribute exp(-i pi / 2).
  const Comparison c = compare(exact, scaled(psi0, -1.0));
  CHECK(c.l2_error < 1e-8);
  CHECK(compare(exact, psi0).overlap == doctest::Approx(1.0).epsilon(1e-8));

  const WavePacket general = propagate_kernel(psi0, p, 1.0, 2.0 * kPi);
  CHECK(compare(general, scaled(psi0, -1.0)).l2_error < 1e-7);
}

TEST_CASE("Crank-Nicolson against the exact free evolution") {
  const GaussianState s{-1.0, 2.0, kGroundSigma};
  const WavePacket psi0 = WavePacket::sample(s, standard_grid(), 0.0);
  const WavePacket cn = crank_nicolson(psi0, FrequencyProfile::free(), 1.0, 1.0, 1e-3);
  const WavePacket exact = propagate_kernel(s, standard_grid(), 0.0, FrequencyProfile::free(), 1.0, 1.0);
  CHECK(compare(cn, exact).l2_error <= 1e-5);
  CHECK(std::fabs(cn.norm() - psi0.norm()) <= 1e-8);
  CHECK(cn.time() == 1.0);
}

TEST_CASE("the oscillator ground state only picks up a phase") {
  const auto p = FrequencyProfile::constant(1.0);
  const WavePacket psi0 = WavePacket::sample({0.0, 0.0, kGroundSigma}, standard_grid(), 0.0);
  const WavePacket cn = crank_nicolson(psi0, p, 1.0, 1.0, 1e-3);
  CHECK(compare(cn, scaled(psi0, std::polar(1.0, -0.5))).l2_error < 1e-6);
  const WavePacket kernel = propagate_kernel(psi0, p, 1.0, 1.0);
  CHECK(compare(kernel, scaled(psi0, std::polar(1.0, -0.5))).l2_error < 1e-10);
}

TEST_CASE("Crank-Nicolson applies impulses exactly") {
  const auto p = FrequencyProfile::delta_pulse(1.0, 0.5);
  const GaussianState s{0.0, 0.0, kGroundSigma};
  const WavePacket psi0 = WavePacket::sample(s, standard_grid(), 0.0);
  const WavePacket cn = crank_nicolson(psi0, p, 1.0, 1.0, 1e-3);
  const WavePacket exact = propagate_kernel(s, standard_grid(), 0.0, p, 1.0, 1.0);
  CHECK(compare(cn, exact).l2_error <= 1e-5);
}

TEST_CASE("Crank-Nicolson stability warning") {
  const WavePacket psi0 = WavePacket::sample({0.0, 0.0, kGroundSigma}, standard_grid(), 0.0);
  std::vector<std::string> warnings;
  crank_nicolson(psi0, FrequencyProfile::constant(1.0), 1.0, 0.2, 0.1, &warnings);
  CHECK(warnings.size() == 1);
  warnings.clear();
  crank_nicolson(psi0, FrequencyProfile::constant(1.0), 1.0, 0.01, 1e-3, &warnings);
  CHECK(warnings.empty());
}

TEST_CASE("time slicing is exact for the free particle") {
  const GaussianState s{0.0, 1.0, kGroundSigma};
  const WavePacket psi0 = WavePacket::sample(s, standard_grid(), 0.0);
  const WavePacket sliced = time_sliced_oracle(psi0, FrequencyProfile::free(), 1.0, 1.0, 1);
  const WavePacket exact = propagate_kernel(s, standard_grid(), 0.0, FrequencyProfile::free(), 1.0, 1.0);
  CHECK(compare(sliced, exact).l2_error < 1e-10);
}

TEST_CASE("time slicing converges at first order") {
  const auto p = FrequencyProfile::constant(1.0);
  const GaussianState s{0.5, 0.0, kGroundSigma};
  const WavePacket psi0 = WavePacket::sample(s, standard_grid(), 0.0);
  const WavePacket exact = propagate_kernel(s, standard_grid(), 0.0, p, 1.0, 1.0);
  const double coarse = compare(time_sliced_oracle(psi0, p, 1.0, 1.0, 63), exact).l2_error;
  const double fine = compare(time_sliced_oracle(psi0, p, 1.0, 1.0, 127), exact).l2_error;
  CHECK(coarse / fine == doctest::Approx(2.0).epsilon(0.05));
}

TEST_CASE("comparison metrics") {
  const Grid g = standard_grid();
  const WavePacket h0 = hermite_state(0, g), h1 = hermite_state(1, g), h2 = hermite_state(2, g);
  CHECK(std::fabs(h0.norm() - 1.0) < 1e-12);
  CHECK(compare(h0, h1).overlap < 1e-12);
  CHECK(compare(h0, h2).overlap < 1e-12);
  const Comparison self = compare(h1, h1);
  CHECK(self.l2_error == 0.0);
  CHECK(self.max_error == 0.0);
  CHECK(self.norm_ratio == 1.0);
  CHECK(self.overlap == doctest::Approx(h1.norm()).epsilon(1e-15));
  const Comparison flipped = compare(h0, scaled(h0, -1.0));
  CHECK(flipped.l2_error == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(flipped.overlap == doctest::Approx(1.0).epsilon(1e-12));
  CHECK_THROWS_AS(compare(h0, hermite_state(0, Grid(-20.0, 20.0, 1024))), GridMismatch);
}

TEST_CASE("kernel propagation composes over adjacent windows") {
  const auto p = FrequencyProfile::exp_decay(1.0, 1.0);
  const WavePacket psi0 = WavePacket::sample({0.3, -0.7, kGroundSigma}, standard_grid(), 0.0);
  const WavePacket direct = propagate_kernel(psi0, p, 1.0, 1.0);
  const WavePacket half = propagate_kernel(psi0, p, 1.0, 0.5);
  const WavePacket composed = propagate_kernel(half, p, 1.0, 1.0);
  CHECK(composed.time() == 1.0);
  CHECK(compare(direct, composed).l2_error <= 1e-6);
}

TEST_CASE("grid guards") {
  const Grid narrow(-3.0, 3.0, 256);
  const WavePacket wide = WavePacket::sample({0.0, 0.0, 2.0}, narrow, 0.0);
  CHECK_THROWS_AS(propagate_kernel(wide, FrequencyProfile::free(), 1.0, 1.0), GridTooNarrow);
  // A fast packet on a coarse grid leaves the kernel phase under-resolved.
  const WavePacket fast = WavePacket::sample({0.0, 40.0, 0.7}, Grid(-10.0, 10.0, 256), 0.0);
  CHECK_THROWS_AS(propagate_kernel(fast, FrequencyProfile::free(), 1.0, 1.0), GridTooNarrow);
  CHECK_THROWS_AS(Grid(0.0, 1.0, 8), DomainError);
  CHECK_THROWS_AS(Grid(1.0, 0.0, 64), DomainError);
}
