#include <catch2/catch.hpp>

#include <cmath>
#include <complex>

#include "fdwave/damping.hpp"
#include "fdwave/timedomain.hpp"

using namespace fdwave;

namespace {

SampleField constant_field(const FourierGrid& g, double v) {
  SampleField f;
  f.values.assign(g.n, v);
  return f;
}

WaveState zero_state(const FourierGrid& g) {
  WaveState s;
  s.u.coeffs.assign(g.n, 0.0);
  s.v.coeffs.assign(g.n, 0.0);
  return s;
}

// single damped oscillator u'' + c u' + m u = 0, u(0)=1, u'(0)=0 (4m > c^2)
std::pair<cplx, cplx> oscillator_exact(double t, double c, double m) {
  const double w = std::sqrt(m - c * c / 4.0);
  const double decay = std::exp(-c * t / 2.0);
  const cplx u = decay * (std::cos(w * t) + (c / (2 * w)) * std::sin(w * t));
  const cplx v = decay * (-(m / w) * std::sin(w * t));
  return {u, v};
}

double state_distance(const WaveState& a, const WaveState& b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.u.coeffs.size(); ++i) {
    d += std::norm(a.u.coeffs[i] - b.u.coeffs[i]);
    d += std::norm(a.v.coeffs[i] - b.v.coeffs[i]);
  }
  return std::sqrt(d);
}

}  // namespace

TEST_CASE("energy of elementary states") {
  const FourierGrid g = make_grid(16);
  WaveState s = zero_state(g);
  s.v.coeffs[g.index_of(0)] = 1.0;
  REQUIRE(energy(s, 1.0) == Approx(two_pi).epsilon(1e-14));

  WaveState m = zero_state(g);
  m.u.coeffs[g.index_of(1)] = 1.0;
  REQUIRE(energy(m, 1.0) == Approx(two_pi).epsilon(1e-14));

  WaveState c = zero_state(g);
  c.u.coeffs[g.index_of(0)] = 7.0;
  REQUIRE(energy(c, 1.0) == 0.0);
}

TEST_CASE("undamped steps conserve energy to machine precision per step") {
  const FourierGrid g = make_grid(32);
  const SampleField chi = constant_field(g, 0.0);
  WaveState s = broadband_initial(g, 1.0, 7);
  double e = energy(s, 1.0);
  for (int step = 0; step < 200; ++step) {
    s = step_strang(s, 0.1, 1.0, chi, g);
    const double e2 = energy(s, 1.0);
    REQUIRE(std::abs(e2 - e) <= 1e-12 * e);
    e = e2;
  }
}

TEST_CASE("constant damping single mode approaches the closed form at third order") {
  const double c = 0.5, alpha = 1.0;
  const FourierGrid g = make_grid(16);
  const SampleField chi = constant_field(g, c);
  const int k = 3;
  auto one_step_error = [&](double dt) {
    WaveState s = zero_state(g);
    s.u.coeffs[g.index_of(k)] = 1.0;
    const WaveState out = step_strang(s, dt, alpha, chi, g);
    const auto [ue, ve] = oscillator_exact(dt, c, 3.0);
    return std::abs(out.u.coeffs[g.index_of(k)] - ue) + std::abs(out.v.coeffs[g.index_of(k)] - ve);
  };
  const double e1 = one_step_error(0.02);
  const double e2 = one_step_error(0.01);
  REQUIRE(e1 / e2 == Approx(8.0).margin(2.0));  // local error O(dt^3)
}

TEST_CASE("global order two against the eigenbasis propagator") {
  const FourierGrid g = make_grid(32);
  const SampleField chi = sample(indicator_profile(), g);
  const GeneratorEigensystem sys = make_eigensystem(assemble_generator(1.0, chi, g));
  const WaveState s0 = broadband_initial(g, 1.0, 3);
  const WaveState exact = exact_evolve(s0, 1.0, sys);

  auto global_error = [&](double dt) {
    WaveState s = s0;
    const long steps = std::lround(1.0 / dt);
    detail::StrangStepper stepper(g, 1.0, chi, dt);
    for (long i = 0; i < steps; ++i) stepper.step(s);
    return state_distance(s, exact);
  };
  const double e1 = global_error(0.01);
  const double e2 = global_error(0.005);
  REQUIRE(e1 / e2 == Approx(4.0).margin(0.5));  // ratio test within [3.5, 4.5]
}

TEST_CASE("exact evolve: identity at t = 0 and exact undamped rotations") {
  const FourierGrid g = make_grid(32);
  const SampleField zero = constant_field(g, 0.0);
  const GeneratorEigensystem sys = make_eigensystem(assemble_generator(1.0, zero, g));
  const WaveState s0 = broadband_initial(g, 1.0, 11);
  const WaveState same = exact_evolve(s0, 0.0, sys);
  REQUIRE(state_distance(same, s0) < 1e-14);

  const double t = 0.7;
  const WaveState out = exact_evolve(s0, t, sys);
  for (int i = 0; i < g.n; ++i) {
    const int k = g.freqs[i];
    if (k == 0) continue;
    const double w = std::sqrt(std::abs(static_cast<double>(k)));
    const cplx expected =
        s0.u.coeffs[i] * std::cos(w * t) + s0.v.coeffs[i] * (std::sin(w * t) / w);
    REQUIRE(std::abs(out.u.coeffs[i] - expected) < 1e-12);
  }
}

TEST_CASE("strang and eigenbasis propagation agree at dt = 1e-4 (N=32, indicator)") {
  const FourierGrid g = make_grid(32);
  const SampleField chi = sample(indicator_profile(), g);
  const GeneratorEigensystem sys = make_eigensystem(assemble_generator(1.0, chi, g));
  WaveState s = broadband_initial(g, 1.0, 5);
  const WaveState exact = exact_evolve(s, 1.0, sys);
  detail::StrangStepper stepper(g, 1.0, chi, 1e-4);
  for (int i = 0; i < 10000; ++i) stepper.step(s);
  REQUIRE(std::abs(energy(s, 1.0) - energy(exact, 1.0)) < 1e-6);
}

TEST_CASE("undamped evolve keeps the energy trace flat over T = 100") {
  const FourierGrid g = make_grid(32);
  const SampleField chi = constant_field(g, 0.0);
  const WaveState s0 = broadband_initial(g, 1.0, 9);
  const EnergyTrace trace = evolve(s0, 100.0, 0.1, 1.0, chi, g, 10, "zero");
  const double e0 = trace.rows.front().energy;
  for (const TraceRow& r : trace.rows) {
    REQUIRE(std::abs(r.energy - e0) <= 1e-10 * e0);
    REQUIRE(r.dissipation == 0.0);
  }
}

TEST_CASE("damped single mode loses energy strictly") {
  const FourierGrid g = make_grid(64);
  const SampleField chi = sample(indicator_profile(), g);
  WaveState s = zero_state(g);
  s.u.coeffs[g.index_of(8)] = 1.0;
  const EnergyTrace trace = evolve(s, 10.0, 0.05, 1.0, chi, g, 10, "indicator");
  REQUIRE(trace.rows.back().energy < trace.rows.front().energy);
  for (std::size_t i = 1; i < trace.rows.size(); ++i)
    REQUIRE(trace.rows[i].energy <= trace.rows[i - 1].energy + 1e-10 * trace.rows[0].energy);
}

TEST_CASE("dissipation identity: zero for undamped, order two in the step size") {
  const FourierGrid g = make_grid(32);
  const SampleField zero = constant_field(g, 0.0);
  const WaveState s0 = broadband_initial(g, 1.0, 13);
  const EnergyTrace free_trace = evolve(s0, 2.0, 0.01, 1.0, zero, g, 5, "zero");
  REQUIRE(dissipation_check(free_trace) <= 1e-10);

  const SampleField chi = sample(indicator_profile(), g);
  const EnergyTrace t1 = evolve(s0, 2.0, 0.005, 1.0, chi, g, 5, "indicator");
  const EnergyTrace t2 = evolve(s0, 2.0, 0.0025, 1.0, chi, g, 5, "indicator");
  const double r1 = dissipation_check(t1);
  const double r2 = dissipation_check(t2);
  REQUIRE(r1 / r2 == Approx(4.0).margin(0.5));
}

TEST_CASE("dissipation column matches the analytic derivative for a constant-chi mode") {
  const double c = 0.4;
  const FourierGrid g = make_grid(16);
  const SampleField chi = constant_field(g, c);
  WaveState s = zero_state(g);
  s.u.coeffs[g.index_of(3)] = 1.0;
  const EnergyTrace trace = evolve(s, 1.0, 0.001, 1.0, chi, g, 100, "const");
  for (const TraceRow& r : trace.rows) {
    const auto [ue, ve] = oscillator_exact(r.t, c, 3.0);
    const double expected = -2.0 * two_pi * c * std::norm(ve);
    REQUIRE(r.dissipation == Approx(expected).margin(1e-6));
  }
}

TEST_CASE("decay fit recovers synthetic power laws") {
  EnergyTrace trace;
  for (int i = 0; i <= 200; ++i) {
    const double t = 0.5 * i;
    const double bracket = std::sqrt(1.0 + t * t);
    trace.rows.push_back({t, std::pow(bracket, -2.0), 0.0});
  }
  REQUIRE(fit_decay(trace, 1.0, 100.0) == Approx(2.0).epsilon(1e-10));
  for (auto& r : trace.rows) r.energy = std::pow(std::sqrt(1.0 + r.t * r.t), -1.0);
  REQUIRE(fit_decay(trace, 1.0, 100.0) == Approx(1.0).epsilon(1e-10));
  REQUIRE_THROWS_AS(fit_decay(trace, 99.0, 100.0), std::invalid_argument);
}

TEST_CASE("broadband initial data is deterministic, real, and H^alpha normalized") {
  const FourierGrid g = make_grid(64);
  const WaveState a = broadband_initial(g, 1.0, 42);
  const WaveState b = broadband_initial(g, 1.0, 42);
  const WaveState c = broadband_initial(g, 1.0, 43);
  REQUIRE(state_distance(a, b) == 0.0);
  REQUIRE(state_distance(a, c) > 1e-3);

  const SampleField samples = to_samples(a.u, g);
  for (const auto& v : samples.values) REQUIRE(std::abs(v.imag()) < 1e-14);

  double h_alpha = 0.0;
  for (int i = 0; i < g.n; ++i) {
    const double k = g.freqs[i];
    h_alpha += std::pow(1.0 + k * k, 1.0) * std::norm(a.u.coeffs[i]);
  }
  REQUIRE(two_pi * h_alpha == Approx(1.0).epsilon(1e-12));
}

TEST_CASE("evolve rejects out-of-contract arguments") {
  const FourierGrid g = make_grid(32);
  const SampleField chi = constant_field(g, 0.0);
  const WaveState s0 = broadband_initial(g, 1.0, 1);
  REQUIRE_THROWS_AS(evolve(s0, -1.0, 0.1, 1.0, chi, g, 1, ""), std::invalid_argument);
  REQUIRE_THROWS_AS(evolve(s0, 1.0, 0.2, 1.0, chi, g, 1, ""), std::invalid_argument);
  REQUIRE_THROWS_AS(evolve(s0, 1.0, 0.1, 1.0, chi, g, 0, ""), std::invalid_argument);
}
