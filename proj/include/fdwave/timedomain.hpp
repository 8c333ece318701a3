#pragma once

// Time evolution of (d_t^2 + chi d_t + |D|^alpha) u = 0 on the circle.
//
// step_strang composes exact substeps D(dt/2) H(dt) D(dt/2): H is the exact
// undamped rotation per Fourier mode (the zero mode drifts u += dt*v), D is
// the exact pointwise damping flow v <- e^{-chi tau} v in sample space.  Both
// substeps are energy-nonincreasing, so traces decay monotonically at any dt.
// exact_evolve provides the cross-validation path through the eigenbasis of
// the companion generator.

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "fdwave/fourier.hpp"
#include "fdwave/operators.hpp"
#include "fdwave/powerfit.hpp"
#include "fdwave/qevp.hpp"

namespace fdwave {

struct WaveState {
  SpectralField u;
  SpectralField v;  // du/dt
  double t = 0.0;
};

// E = 2*pi * sum_k ( |k|^alpha |u_k|^2 + |v_k|^2 ); blind to constant u.
inline double energy(const WaveState& s, double alpha) {
  check_alpha(alpha);
  const int n = static_cast<int>(s.u.coeffs.size());
  if (s.v.coeffs.size() != s.u.coeffs.size())
    throw std::invalid_argument("energy: u and v length mismatch");
  double e = 0.0;
  for (int i = 0; i < n; ++i) {
    const int k = i - n / 2;
    const double m = k == 0 ? 0.0 : std::pow(std::abs(static_cast<double>(k)), alpha);
    e += m * std::norm(s.u.coeffs[i]) + std::norm(s.v.coeffs[i]);
  }
  return two_pi * e;
}

namespace detail {

struct StrangStepper {
  const FourierGrid& grid;
  std::vector<double> omega;       // |k|^{alpha/2}
  std::vector<double> cos_wdt, sin_wdt;
  std::vector<double> damp_half;   // e^{-chi dt/2} at grid points
  double dt;
  bool damped;

  StrangStepper(const FourierGrid& g, double alpha, const SampleField& chi, double dt_)
      : grid(g), dt(dt_) {
    check_alpha(alpha);
    if (!(dt > 0.0)) throw std::invalid_argument("step size must be positive");
    if (static_cast<int>(chi.values.size()) != g.n)
      throw std::invalid_argument("chi sample length mismatch");
    const int n = g.n;
    omega.resize(n);
    cos_wdt.resize(n);
    sin_wdt.resize(n);
    for (int i = 0; i < n; ++i) {
      const int k = g.freqs[i];
      omega[i] = k == 0 ? 0.0 : std::pow(std::abs(static_cast<double>(k)), alpha / 2.0);
      cos_wdt[i] = std::cos(omega[i] * dt);
      sin_wdt[i] = std::sin(omega[i] * dt);
    }
    damped = false;
    damp_half.resize(n);
    for (int j = 0; j < n; ++j) {
      const double c = chi.values[j].real();
      damp_half[j] = std::exp(-c * dt / 2.0);
      if (c != 0.0) damped = true;
    }
  }

  void damp_substep(SpectralField& v) const {
    SampleField vs = to_samples(v, grid);
    for (int j = 0; j < grid.n; ++j) vs.values[j] *= damp_half[j];
    v = to_spectral(vs, grid);
  }

  void wave_substep(SpectralField& u, SpectralField& v) const {
    const int n = grid.n;
    for (int i = 0; i < n; ++i) {
      if (grid.freqs[i] == 0) {
        u.coeffs[i] += dt * v.coeffs[i];
        continue;
      }
      const cplx a = u.coeffs[i], b = v.coeffs[i];
      u.coeffs[i] = a * cos_wdt[i] + b * (sin_wdt[i] / omega[i]);
      v.coeffs[i] = -a * (omega[i] * sin_wdt[i]) + b * cos_wdt[i];
    }
  }

  void step(WaveState& s) const {
    if (damped) damp_substep(s.v);
    wave_substep(s.u, s.v);
    if (damped) damp_substep(s.v);
    s.t += dt;
  }
};

}  // namespace detail

inline WaveState step_strang(const WaveState& s, double dt, double alpha, const SampleField& chi,
                             const FourierGrid& g) {
  detail::StrangStepper stepper(g, alpha, chi, dt);
  WaveState out = s;
  stepper.step(out);
  return out;
}

// Eigenbasis of the companion generator, for exact propagation.  The fully
// undamped case is defective at the zero mode and is handled analytically.
struct GeneratorEigensystem {
  bool undamped = false;
  double alpha = 1.0;
  FourierGrid grid;
  Eigen::VectorXcd mu;
  Matrix V;
  Eigen::PartialPivLU<Matrix> V_lu;
  double rcond = 1.0;
};

inline GeneratorEigensystem make_eigensystem(const GeneratorMatrix& gen) {
  GeneratorEigensystem s;
  s.alpha = gen.alpha;
  s.grid = gen.grid;
  double max_chi = 0.0;
  for (const cplx& c : gen.chi.values) max_chi = std::max(max_chi, std::abs(c));
  if (max_chi == 0.0) {
    s.undamped = true;
    return s;
  }
  Eigen::ComplexEigenSolver<Matrix> ces(gen.mat);
  if (ces.info() != Eigen::Success)
    throw std::runtime_error("make_eigensystem: eigensolver failed");
  s.mu = ces.eigenvalues();
  s.V = ces.eigenvectors();
  s.V_lu.compute(s.V);
  s.rcond = s.V_lu.rcond();
  if (!(s.rcond > 1e-8))
    throw std::runtime_error("make_eigensystem: eigenbasis condition number above 1e8");
  return s;
}

inline WaveState exact_evolve(const WaveState& s, double t, const GeneratorEigensystem& sys) {
  const int n = sys.grid.n;
  if (static_cast<int>(s.u.coeffs.size()) != n)
    throw std::invalid_argument("exact_evolve: state length mismatch");
  WaveState out = s;
  if (sys.undamped) {
    for (int i = 0; i < n; ++i) {
      const int k = sys.grid.freqs[i];
      if (k == 0) {
        out.u.coeffs[i] = s.u.coeffs[i] + t * s.v.coeffs[i];  // 2x2 Jordan block
        continue;
      }
      const double w = std::pow(std::abs(static_cast<double>(k)), sys.alpha / 2.0);
      const cplx a = s.u.coeffs[i], b = s.v.coeffs[i];
      out.u.coeffs[i] = a * std::cos(w * t) + b * (std::sin(w * t) / w);
      out.v.coeffs[i] = -a * (w * std::sin(w * t)) + b * std::cos(w * t);
    }
    out.t = s.t + t;
    return out;
  }
  Vector state(2 * n);
  for (int i = 0; i < n; ++i) state(i) = s.u.coeffs[i], state(n + i) = s.v.coeffs[i];
  Vector c = sys.V_lu.solve(state);
  for (int i = 0; i < 2 * n; ++i) c(i) *= std::exp(sys.mu(i) * t);
  Vector evolved = sys.V * c;
  for (int i = 0; i < n; ++i) out.u.coeffs[i] = evolved(i), out.v.coeffs[i] = evolved(n + i);
  out.t = s.t + t;
  return out;
}

struct TraceRow {
  double t = 0.0;
  double energy = 0.0;
  double dissipation = 0.0;  // -(2*pi/N) sum_j chi_j |v_j|^2
};

struct EnergyTrace {
  std::vector<TraceRow> rows;
  double alpha = 1.0;
  std::string profile;
  double dt = 0.0;
  int n_modes = 0;
};

inline EnergyTrace evolve(const WaveState& initial, double t_final, double dt, double alpha,
                          const SampleField& chi, const FourierGrid& g, int sample_every,
                          const std::string& profile_name = "") {
  if (!(t_final > 0.0)) throw std::invalid_argument("evolve: t_final must be positive");
  if (sample_every < 1) throw std::invalid_argument("evolve: sample_every must be >= 1");
  const double omega_max = std::pow(g.n / 2.0, alpha / 2.0);
  if (!(dt <= 0.5 / omega_max))
    throw std::invalid_argument("evolve: dt must resolve the fastest mode (dt <= " +
                                std::to_string(0.5 / omega_max) + ")");
  detail::StrangStepper stepper(g, alpha, chi, dt);

  EnergyTrace trace;
  trace.alpha = alpha;
  trace.profile = profile_name;
  trace.dt = dt;
  trace.n_modes = g.n;

  auto record = [&](const WaveState& s) {
    SampleField vs = to_samples(s.v, g);
    double d = 0.0;
    for (int j = 0; j < g.n; ++j) d += chi.values[j].real() * std::norm(vs.values[j]);
    // dE/dt of the quadratic energy: both terms differentiate, hence the 2
    trace.rows.push_back({s.t, energy(s, alpha), -2.0 * two_pi * d / g.n});
  };

  WaveState state = initial;
  record(state);
  const double e0 = trace.rows.front().energy;
  const long n_steps = static_cast<long>(std::ceil(t_final / dt - 1e-9));
  for (long step = 1; step <= n_steps; ++step) {
    stepper.step(state);
    if (step % sample_every == 0 || step == n_steps) {
      record(state);
      const TraceRow& row = trace.rows.back();
      if (!std::isfinite(row.energy))
        throw std::runtime_error("evolve: non-finite energy at step " + std::to_string(step));
      const double prev = trace.rows[trace.rows.size() - 2].energy;
      if (row.energy > prev + 1e-10 * e0 * sample_every)
        throw std::runtime_error("evolve: energy increased at step " + std::to_string(step));
    }
  }
  return trace;
}

// Max over interior rows of |centered-difference dE/dt - recorded dissipation|,
// normalized by E(0).
inline double dissipation_check(const EnergyTrace& trace) {
  if (trace.rows.size() < 3) throw std::invalid_argument("dissipation_check: need >= 3 rows");
  const double e0 = std::max(trace.rows.front().energy, 1e-300);
  double worst = 0.0;
  for (std::size_t i = 1; i + 1 < trace.rows.size(); ++i) {
    const TraceRow& a = trace.rows[i - 1];
    const TraceRow& b = trace.rows[i];
    const TraceRow& c = trace.rows[i + 1];
    const double cd = (c.energy - a.energy) / (c.t - a.t);
    worst = std::max(worst, std::abs(cd - b.dissipation));
  }
  return worst / e0;
}

// Least-squares slope of log E against log<t> over [t_lo, t_hi], sign-flipped.
inline double fit_decay(const EnergyTrace& trace, double t_lo, double t_hi) {
  std::vector<double> x, y;
  for (const TraceRow& r : trace.rows) {
    if (r.t < t_lo || r.t > t_hi || !(r.energy > 0.0)) continue;
    x.push_back(std::log(std::sqrt(1.0 + r.t * r.t)));
    y.push_back(std::log(r.energy));
  }
  if (x.size() < 10) throw std::invalid_argument("fit_decay: window holds fewer than 10 samples");
  return -fit_line(x, y).slope;
}

// Spectrum-filling real initial data: u_k proportional to (1+|k|)^{-(alpha+1)/2}
// with seeded phases, v = 0, normalized so ||u||_{H^alpha} = 1.
inline WaveState broadband_initial(const FourierGrid& g, double alpha, unsigned long long seed) {
  check_alpha(alpha);
  const int n = g.n;
  WaveState s;
  s.u.coeffs.assign(n, 0.0);
  s.v.coeffs.assign(n, 0.0);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> phase(0.0, two_pi);
  for (int k = 1; k < n / 2; ++k) {
    const double amp = std::pow(1.0 + k, -(alpha + 1.0) / 2.0);
    const double th = phase(rng);
    const cplx c = amp * cplx(std::cos(th), std::sin(th));
    s.u.coeffs[g.index_of(k)] = c;
    s.u.coeffs[g.index_of(-k)] = std::conj(c);  // real field
  }
  double h_alpha_sq = 0.0;
  for (int i = 0; i < n; ++i) {
    const double k = g.freqs[i];
    h_alpha_sq += std::pow(1.0 + k * k, alpha) * std::norm(s.u.coeffs[i]);
  }
  h_alpha_sq *= two_pi;
  const double scale = 1.0 / std::sqrt(h_alpha_sq);
  for (cplx& c : s.u.coeffs) c *= scale;
  return s;
}

}  // namespace fdwave
