#pragma once

// Damping profiles on the circle, Holder-norm measurement on sample vectors,
// and the geometric control check (specialized to T^1, where every unit-speed
// geodesic covers the whole circle in time 2*pi).

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "fdwave/fourier.hpp"

namespace fdwave {

struct DampingProfile {
  std::string name;
  double declared_beta = 0.0;                 // Holder class of sqrt(chi)
  std::function<double(double)> eval;         // x (radians) -> chi(x) >= 0
};

inline DampingProfile indicator_profile() {
  DampingProfile p;
  p.name = "indicator";
  p.declared_beta = 0.0;
  p.eval = [](double x) {
    const double y = std::abs(wrap_angle(x));
    if (std::abs(y - pi / 2.0) <= 1e-12) return 0.5;  // midpoint at the jump
    return y < pi / 2.0 ? 1.0 : 0.0;
  };
  return p;
}

inline DampingProfile tanh_profile() {
  DampingProfile p;
  p.name = "tanh";
  p.declared_beta = 1.0;
  p.eval = [](double x) {
    const double y = wrap_angle(x);
    return 1.0 + 0.5 * (std::tanh(20.0 * (y - pi / 2.0)) - std::tanh(20.0 * (y + pi / 2.0)));
  };
  return p;
}

// chi_beta(x) = (cos x)^{2*beta} * 1_{(-pi/2,pi/2)}(x); sqrt(chi_beta) lies in
// the Holder class beta.
inline DampingProfile holder_profile(double beta) {
  if (!(beta >= 0.0 && beta <= 1.0))
    throw std::invalid_argument("holder_profile: beta must lie in [0,1]");
  DampingProfile p;
  p.name = "holder:" + std::to_string(beta);
  p.declared_beta = beta;
  p.eval = [beta](double x) {
    const double y = std::abs(wrap_angle(x));
    if (y >= pi / 2.0) return 0.0;
    return beta == 0.0 ? 1.0 : std::pow(std::cos(y), 2.0 * beta);
  };
  return p;
}

// Two-column table (x, chi(x)); values between samples are interpolated
// linearly and periodically.
inline DampingProfile custom_profile(const std::string& path, double declared_beta = 0.0) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("custom_profile: cannot open " + path);
  std::vector<std::pair<double, double>> pts;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream ss(line);
    double x, v;
    if (!(ss >> x >> v))
      throw std::runtime_error(path + ":" + std::to_string(lineno) + ": expected two columns");
    if (v < 0.0)
      throw std::runtime_error(path + ":" + std::to_string(lineno) + ": chi must be nonnegative");
    pts.emplace_back(wrap_angle(x), v);
  }
  if (pts.size() < 2) throw std::runtime_error("custom_profile: need at least two samples");
  std::sort(pts.begin(), pts.end());
  DampingProfile p;
  p.name = "custom:" + path;
  p.declared_beta = declared_beta;
  p.eval = [pts](double x) {
    const double y = wrap_angle(x);
    auto hi = std::lower_bound(pts.begin(), pts.end(), std::make_pair(y, -1.0));
    double x0, v0, x1, v1;
    if (hi == pts.begin() || hi == pts.end()) {
      // between the last and the first sample, across the wrap
      x0 = pts.back().first;
      v0 = pts.back().second;
      x1 = pts.front().first + two_pi;
      v1 = pts.front().second;
      if (y < x0) x0 -= two_pi, x1 -= two_pi;
    } else {
      x0 = (hi - 1)->first;
      v0 = (hi - 1)->second;
      x1 = hi->first;
      v1 = hi->second;
    }
    const double t = x1 == x0 ? 0.0 : (y - x0) / (x1 - x0);
    return v0 + t * (v1 - v0);
  };
  return p;
}

// "indicator" | "tanh" | "holder:<beta>" | "custom:<path>"
inline DampingProfile parse_profile(const std::string& spec) {
  if (spec == "indicator") return indicator_profile();
  if (spec == "tanh") return tanh_profile();
  if (spec.rfind("holder:", 0) == 0) return holder_profile(std::stod(spec.substr(7)));
  if (spec.rfind("custom:", 0) == 0) return custom_profile(spec.substr(7));
  throw std::invalid_argument("unknown damping profile '" + spec + "'");
}

inline SampleField sample(const DampingProfile& p, const FourierGrid& g) {
  SampleField f;
  f.values.resize(g.n);
  for (int j = 0; j < g.n; ++j) {
    const double v = p.eval(g.points[j]);
    if (!(v >= 0.0) || !std::isfinite(v))
      throw std::runtime_error("damping profile '" + p.name + "' is negative or non-finite at x=" +
                               std::to_string(g.points[j]));
    f.values[j] = v;
  }
  return f;
}

// Discrete C^{0,beta} norm: sup|f| + max over grid pairs of
// |f(x_i)-f(x_j)| / d(x_i,x_j)^beta with d the arc distance.  All pairs are
// used up to n = 2048; above that, base points are strided while every pair
// offset (every separation scale) is kept.
inline double holder_norm(const SampleField& f, double beta, const FourierGrid& g) {
  if (!(beta >= 0.0 && beta <= 1.0))
    throw std::invalid_argument("holder_norm: beta must lie in [0,1]");
  if (static_cast<int>(f.values.size()) != g.n)
    throw std::invalid_argument("holder_norm: sample length mismatch");
  {
    double scale = 0.0;
    for (const cplx& v : f.values) scale = std::max(scale, std::abs(v));
    for (const cplx& v : f.values)
      if (std::abs(v.imag()) > 1e-12 * (1.0 + scale))
        throw std::invalid_argument("holder_norm: samples must be real-valued");
  }
  const int n = g.n;
  double sup = 0.0;
  for (const cplx& v : f.values) sup = std::max(sup, std::abs(v.real()));
  const int stride = n <= 2048 ? 1 : (n + 2047) / 2048;
  double semi = 0.0;
  for (int m = 1; m <= n / 2; ++m) {
    const double d = std::min(two_pi * m / n, two_pi - two_pi * m / n);
    const double w = beta == 0.0 ? 1.0 : std::pow(d, -beta);
    for (int i = 0; i < n; i += stride) {
      const int j = i + m < n ? i + m : i + m - n;
      const double diff = std::abs(f.values[i].real() - f.values[j].real());
      semi = std::max(semi, diff * w);
    }
  }
  return sup + semi;
}

struct GccResult {
  bool satisfied = false;
  double interval_lo = 0.0;  // largest sampled interval with inf chi >= max chi / 100
  double interval_hi = 0.0;
  double time_bound = two_pi;
};

inline GccResult gcc_check(const DampingProfile& p, int resolution) {
  if (resolution < 64) throw std::invalid_argument("gcc_check: resolution must be >= 64");
  std::vector<double> chi(resolution);
  double max_chi = 0.0;
  for (int i = 0; i < resolution; ++i) {
    chi[i] = p.eval(two_pi * i / resolution);
    if (chi[i] < 0.0) throw std::runtime_error("gcc_check: negative damping sample");
    max_chi = std::max(max_chi, chi[i]);
  }
  GccResult r;
  if (max_chi <= 0.0) return r;
  const double threshold = max_chi / 100.0;
  // longest circular run of samples with chi >= threshold
  std::vector<bool> ok(resolution);
  bool all = true;
  for (int i = 0; i < resolution; ++i) {
    ok[i] = chi[i] >= threshold;
    all = all && ok[i];
  }
  if (all) {
    r.satisfied = true;
    r.interval_lo = 0.0;
    r.interval_hi = two_pi;
    return r;
  }
  int best_len = 0, best_start = 0;
  int i = 0;
  while (i < resolution) {
    if (!ok[i]) {
      ++i;
      continue;
    }
    int len = 0, start = i;
    while (len < resolution && ok[(start + len) % resolution]) ++len;
    if (len > best_len) {
      best_len = len;
      best_start = start;
    }
    i = start + len;  // skip past this run (wrapped tail revisits are shorter)
  }
  if (best_len >= 2) {
    r.satisfied = true;
    r.interval_lo = two_pi * best_start / resolution;
    r.interval_hi = two_pi * (best_start + best_len - 1) / resolution;
  }
  return r;
}

}  // namespace fdwave
