#pragma once

// Unweighted least-squares line fits used for power-law exponents
// (log-log rows) and exponential slopes.

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace fdwave {

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double residual_rms = 0.0;
  std::size_t count = 0;
};

inline LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size()) throw std::invalid_argument("fit_line: length mismatch");
  const std::size_t n = x.size();
  if (n < 2) throw std::invalid_argument("fit_line: need at least two points");
  double sx = 0, sy = 0;
  for (std::size_t i = 0; i < n; ++i) sx += x[i], sy += y[i];
  const double mx = sx / n, my = sy / n;
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (sxx == 0.0) throw std::invalid_argument("fit_line: degenerate abscissae");
  LineFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  double rss = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = y[i] - (f.intercept + f.slope * x[i]);
    rss += r * r;
  }
  f.residual_rms = std::sqrt(rss / n);
  f.count = n;
  return f;
}

// Fit y = C * x^p from positive rows; returns p as slope.
inline LineFit fit_loglog(const std::vector<double>& x, const std::vector<double>& y) {
  std::vector<double> lx(x.size()), ly(y.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0))
      throw std::invalid_argument("fit_loglog: rows must be positive");
    lx[i] = std::log(x[i]);
    ly[i] = std::log(y[i]);
  }
  return fit_line(lx, ly);
}

// [i_begin, i_end) after trimming a fraction from each side (at least one
// point survives in the middle).
inline std::pair<std::size_t, std::size_t> trim_window(std::size_t n, double trim) {
  if (!(trim >= 0.0 && trim < 0.5)) throw std::invalid_argument("trim must lie in [0, 0.5)");
  std::size_t cut = static_cast<std::size_t>(trim * n);
  std::size_t lo = cut, hi = n - cut;
  if (hi <= lo + 1) {
    lo = 0;
    hi = n;
  }
  return {lo, hi};
}

}  // namespace fdwave
