#pragma once

// Fourier-spectral discretization of the circle T = R/(2*pi*Z): grids,
// forward/backward transforms and the discrete L2 pairing.
//
// Conventions (used consistently everywhere):
//   x_j = 2*pi*j/N,  j = 0..N-1
//   k ranges over -N/2 .. N/2-1, stored in ascending order
//   u_hat(k) = (1/N) * sum_j u(x_j) e^{-i k x_j}
//   u(x_j)   = sum_k u_hat(k) e^{i k x_j}
//   <u,v>    = (2*pi/N) * sum_j u_j conj(v_j)  =  2*pi * sum_k u_hat conj(v_hat)

#include <cmath>
#include <complex>
#include <cstddef>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include <fftw3.h>

namespace fdwave {

using cplx = std::complex<double>;

inline constexpr double pi = 3.14159265358979323846264338327950288;
inline constexpr double two_pi = 2.0 * pi;

struct FourierGrid {
  int n = 0;                   // even, >= 8
  std::vector<double> points;  // x_j = 2*pi*j/n
  std::vector<int> freqs;      // -n/2 .. n/2-1

  int index_of(int k) const { return k + n / 2; }
  int freq_at(int i) const { return i - n / 2; }
};

inline FourierGrid make_grid(int n_modes) {
  if (n_modes < 8 || n_modes % 2 != 0)
    throw std::invalid_argument("make_grid: n_modes must be even and >= 8, got " +
                                std::to_string(n_modes));
  FourierGrid g;
  g.n = n_modes;
  g.points.resize(n_modes);
  g.freqs.resize(n_modes);
  for (int j = 0; j < n_modes; ++j) g.points[j] = two_pi * j / n_modes;
  for (int i = 0; i < n_modes; ++i) g.freqs[i] = i - n_modes / 2;
  return g;
}

struct SampleField {
  std::vector<cplx> values;  // one sample per grid point
};

struct SpectralField {
  std::vector<cplx> coeffs;  // indexed like FourierGrid::freqs
};

namespace detail {

// Cached FFTW plans per transform size.  Plans are created once (under a
// lock) and executed through the new-array interface, which is re-entrant.
class FftCache {
 public:
  static FftCache& instance() {
    static FftCache c;
    return c;
  }

  void forward(const cplx* in, cplx* out, int n) { execute(plans(n).fwd, in, out); }
  void backward(const cplx* in, cplx* out, int n) { execute(plans(n).bwd, in, out); }

 private:
  struct PlanPair {
    fftw_plan fwd = nullptr;
    fftw_plan bwd = nullptr;
    std::vector<cplx> scratch_in, scratch_out;
  };

  PlanPair& plans(int n) {
    std::lock_guard<std::mutex> lock(mutex_);
    auto it = cache_.find(n);
    if (it != cache_.end()) return *it->second;
    auto p = std::make_unique<PlanPair>();
    p->scratch_in.resize(n);
    p->scratch_out.resize(n);
    auto* in = reinterpret_cast<fftw_complex*>(p->scratch_in.data());
    auto* out = reinterpret_cast<fftw_complex*>(p->scratch_out.data());
    const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
    p->fwd = fftw_plan_dft_1d(n, in, out, FFTW_FORWARD, flags);
    p->bwd = fftw_plan_dft_1d(n, in, out, FFTW_BACKWARD, flags);
    if (!p->fwd || !p->bwd) throw std::runtime_error("fftw planning failed");
    auto [pos, ok] = cache_.emplace(n, std::move(p));
    return *pos->second;
  }

  static void execute(fftw_plan plan, const cplx* in, cplx* out) {
    fftw_execute_dft(plan,
                     reinterpret_cast<fftw_complex*>(const_cast<cplx*>(in)),
                     reinterpret_cast<fftw_complex*>(out));
  }

  std::mutex mutex_;
  std::unordered_map<int, std::unique_ptr<PlanPair>> cache_;
};

inline int pmod(long m, int n) {
  long r = m % n;
  return static_cast<int>(r < 0 ? r + n : r);
}

}  // namespace detail

inline SpectralField to_spectral(const SampleField& f, const FourierGrid& g) {
  const int n = g.n;
  if (static_cast<int>(f.values.size()) != n)
    throw std::invalid_argument("to_spectral: field length " +
                                std::to_string(f.values.size()) +
                                " does not match grid n_modes " + std::to_string(n));
  std::vector<cplx> raw(n);
  detail::FftCache::instance().forward(f.values.data(), raw.data(), n);
  SpectralField out;
  out.coeffs.resize(n);
  // raw[m] holds the unnormalized coefficient of frequency m mod n.
  for (int i = 0; i < n; ++i)
    out.coeffs[i] = raw[detail::pmod(i + n / 2, n)] / static_cast<double>(n);
  return out;
}

inline SampleField to_samples(const SpectralField& f, const FourierGrid& g) {
  const int n = g.n;
  if (static_cast<int>(f.coeffs.size()) != n)
    throw std::invalid_argument("to_samples: field length " +
                                std::to_string(f.coeffs.size()) +
                                " does not match grid n_modes " + std::to_string(n));
  std::vector<cplx> raw(n);
  for (int i = 0; i < n; ++i) raw[detail::pmod(i + n / 2, n)] = f.coeffs[i];
  SampleField out;
  out.values.resize(n);
  detail::FftCache::instance().backward(raw.data(), out.values.data(), n);
  return out;
}

// L2(dx) norms under the 2*pi-normalized pairing.
inline double l2_norm(const SpectralField& f) {
  double s = 0.0;
  for (const cplx& c : f.coeffs) s += std::norm(c);
  return std::sqrt(two_pi * s);
}

inline double l2_norm(const SampleField& f) {
  double s = 0.0;
  for (const cplx& v : f.values) s += std::norm(v);
  return std::sqrt(two_pi * s / static_cast<double>(f.values.size()));
}

inline cplx l2_inner(const SpectralField& a, const SpectralField& b) {
  if (a.coeffs.size() != b.coeffs.size())
    throw std::invalid_argument("l2_inner: length mismatch");
  cplx s = 0.0;
  for (std::size_t i = 0; i < a.coeffs.size(); ++i) s += a.coeffs[i] * std::conj(b.coeffs[i]);
  return two_pi * s;
}

// Wrap an angle to (-pi, pi].
inline double wrap_angle(double x) {
  double y = std::remainder(x, two_pi);  // (-pi, pi], except -pi maps to -pi
  if (y <= -pi) y += two_pi;
  return y;
}

// Distance on the circle.
inline double arc_distance(double x, double y) {
  double d = std::abs(wrap_angle(x - y));
  return d;
}

}  // namespace fdwave
