#pragma once

// Resolvent norms ||P^{-1}|| = 1/sigma_min, power-law scans in the
// semiclassical parameter h and in the spectral parameter lambda, and
// quasimode extraction from the smallest singular pair.
//
// sigma_min comes from a dense SVD for small matrices and from blocked
// inverse subspace iteration on (P^H P)^{-1} behind an LU factorization for
// large ones; the returned value is always ||P u|| for the computed right
// vector u, an upper bound for sigma_min that converges from above.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <random>
#include <stdexcept>
#include <vector>

#include "fdwave/damping.hpp"
#include "fdwave/fourier.hpp"
#include "fdwave/operators.hpp"
#include "fdwave/parallel.hpp"
#include "fdwave/powerfit.hpp"
#include "fdwave/rates.hpp"

namespace fdwave {

struct SigmaMin {
  double sigma = 0.0;
  Vector right_vector;
  bool singular = false;
  bool converged = true;
};

namespace detail {

inline constexpr int sigma_dense_cutoff = 256;

inline SigmaMin smallest_singular_dense(const Matrix& P) {
  Eigen::JacobiSVD<Matrix> svd(P, Eigen::ComputeThinV);
  const int n = static_cast<int>(P.rows());
  SigmaMin r;
  r.sigma = svd.singularValues()(n - 1);
  r.right_vector = svd.matrixV().col(n - 1);
  r.singular = r.sigma == 0.0;
  return r;
}

inline SigmaMin smallest_singular_iterative(const Matrix& P, double tol = 1e-13,
                                            int max_sweeps = 1000, int block = 6) {
  const int n = static_cast<int>(P.rows());
  SigmaMin r;
  Eigen::PartialPivLU<Matrix> lu(P);
  if (lu.matrixLU().diagonal().cwiseAbs().minCoeff() == 0.0) {
    r.singular = true;
    r.sigma = 0.0;
    return r;
  }
  const int b = std::min(block, n);
  std::mt19937_64 rng(0xFD57A7Eull ^ static_cast<unsigned long long>(n));
  std::normal_distribution<double> gauss(0.0, 1.0);
  Matrix X(n, b);
  for (int j = 0; j < b; ++j)
    for (int i = 0; i < n; ++i) X(i, j) = cplx(gauss(rng), gauss(rng));
  {
    Eigen::HouseholderQR<Matrix> qr(X);
    X = qr.householderQ() * Matrix::Identity(n, b);
  }
  double prev = std::numeric_limits<double>::infinity();
  int steady = 0;
  r.converged = false;
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    Matrix W = lu.adjoint().solve(X);   // P^H W = X
    Matrix Y = lu.solve(W);             // Y = (P^H P)^{-1} X
    if (!Y.allFinite()) {
      r.singular = true;
      r.sigma = 0.0;
      return r;
    }
    Matrix T = X.adjoint() * Y;
    Eigen::SelfAdjointEigenSolver<Matrix> eig((T + T.adjoint()) / 2.0);
    const int top = b - 1;  // eigenvalues ascending
    Vector u = X * eig.eigenvectors().col(top);
    u /= u.norm();
    const double sigma = (P * u).norm();
    r.right_vector = u;
    r.sigma = sigma;
    if (std::abs(sigma - prev) <= tol * sigma) {
      if (++steady >= 2) {
        r.converged = true;
        break;
      }
    } else {
      steady = 0;
    }
    prev = sigma;
    Eigen::HouseholderQR<Matrix> qr(Y);
    X = qr.householderQ() * Matrix::Identity(n, b);
  }
  return r;
}

}  // namespace detail

inline SigmaMin smallest_singular(const Matrix& P) {
  if (P.rows() != P.cols()) throw std::invalid_argument("smallest_singular: matrix not square");
  if (P.rows() <= detail::sigma_dense_cutoff) return detail::smallest_singular_dense(P);
  return detail::smallest_singular_iterative(P);
}

struct ResolventNorm {
  double norm = 0.0;  // 1/sigma_min; +inf when singular
  bool singular = false;
};

inline ResolventNorm resolvent_norm(const Matrix& P) {
  const SigmaMin s = smallest_singular(P);
  ResolventNorm r;
  r.singular = s.singular;
  r.norm = s.singular ? std::numeric_limits<double>::infinity() : 1.0 / s.sigma;
  return r;
}

inline ResolventNorm resolvent_norm(const DenseOperator& P) { return resolvent_norm(P.entries); }

// Right singular vector of sigma_min, L2-normalized; the residual ||P u||
// equals 1/resolvent_norm.
inline std::pair<SpectralField, double> quasimode_extract(const Matrix& P) {
  const SigmaMin s = smallest_singular(P);
  if (s.singular && s.right_vector.size() == 0)
    throw std::runtime_error("quasimode_extract: matrix is exactly singular");
  SpectralField u;
  const double scale = 1.0 / std::sqrt(two_pi);
  u.coeffs.resize(s.right_vector.size());
  for (int i = 0; i < s.right_vector.size(); ++i) u.coeffs[i] = s.right_vector(i) * scale;
  return {u, s.sigma};
}

inline std::pair<SpectralField, double> quasimode_extract(const DenseOperator& P) {
  return quasimode_extract(P.entries);
}

struct ScanRow {
  double parameter = 0.0;  // h or lambda
  double z_worst = 0.0;
  bool has_z = false;
  double norm = 0.0;
  int n_used = 0;
  bool singular = false;
  bool stable = true;  // N-doubling diagnostic (when checked)
};

struct ScanResult {
  std::vector<ScanRow> rows;  // sorted by parameter, ascending
  double fitted_exponent = 0.0;
  std::size_t fit_begin = 0, fit_end = 0;
  double fit_residual = 0.0;
};

using GridRule = std::function<int(double)>;

inline int default_grid_rule(double h) {
  int n = std::max(256, static_cast<int>(std::ceil(32.0 / h)));
  if (n % 2 != 0) ++n;
  return n;
}

struct ScanOptions {
  double trim = 0.2;              // fraction trimmed from each end of the fit window
  bool check_doubling = true;     // N vs 2N stability on fitted rows
  double doubling_tol = 0.05;
  int max_n = 4096;               // dense-representation cap
};

namespace detail {

inline void fit_scan(ScanResult& scan, double trim) {
  std::sort(scan.rows.begin(), scan.rows.end(),
            [](const ScanRow& a, const ScanRow& b) { return a.parameter < b.parameter; });
  auto [lo, hi] = trim_window(scan.rows.size(), trim);
  scan.fit_begin = lo;
  scan.fit_end = hi;
  std::vector<double> xs, ys;
  for (std::size_t i = lo; i < hi; ++i) {
    const ScanRow& r = scan.rows[i];
    if (r.singular || !r.stable || !std::isfinite(r.norm)) continue;
    xs.push_back(r.parameter);
    ys.push_back(r.norm);
  }
  if (xs.size() < 2)
    throw std::runtime_error("scan: fewer than two usable rows in the fit window");
  const LineFit f = fit_loglog(xs, ys);
  scan.fitted_exponent = f.slope;
  scan.fit_residual = f.residual_rms;
}

}  // namespace detail

// For each h, the worst resolvent norm of P(h,z) over the z grid; then a
// log-log fit of norm against h over the trimmed window.
inline ScanResult scan_h(double alpha, const DampingProfile& profile,
                         const std::vector<double>& h_grid, const std::vector<double>& z_grid,
                         const GridRule& rule, const WorkerPool& pool,
                         const ScanOptions& opts = {}) {
  check_alpha(alpha);
  if (h_grid.empty() || z_grid.empty()) throw std::invalid_argument("scan_h: empty grid");
  for (double h : h_grid)
    if (!(h > 0.0 && h < 1.0)) throw std::invalid_argument("scan_h: h must lie in (0,1)");
  for (double z : z_grid)
    if (!(z >= 0.9 - 1e-12 && z <= 1.1 + 1e-12))
      throw std::invalid_argument("scan_h: z grid must lie within [0.9, 1.1]");

  auto norm_at = [&](double h, double z, int n) {
    const FourierGrid g = make_grid(n);
    const SampleField chi = sample(profile, g);
    return resolvent_norm(assemble_P_semiclassical(h, z, alpha, chi, g));
  };

  struct RowState {
    ScanRow row;
    int z_index = 0;
  };
  std::vector<RowState> states = pool.map<RowState>(h_grid.size(), [&](std::size_t i) {
    const double h = h_grid[i];
    const int n = rule(h);
    if (n > opts.max_n)
      throw std::runtime_error("scan_h: grid rule exceeds the dense cap at h=" +
                               std::to_string(h));
    const FourierGrid g = make_grid(n);
    const SampleField chi = sample(profile, g);
    RowState st;
    st.row.parameter = h;
    st.row.has_z = true;
    st.row.n_used = n;
    st.row.norm = 0.0;
    for (std::size_t zi = 0; zi < z_grid.size(); ++zi) {
      const ResolventNorm r = resolvent_norm(assemble_P_semiclassical(h, z_grid[zi], alpha, chi, g));
      if (r.singular) {
        st.row.singular = true;
        st.row.norm = std::numeric_limits<double>::infinity();
        st.row.z_worst = z_grid[zi];
        continue;
      }
      if (r.norm > st.row.norm) {
        st.row.norm = r.norm;
        st.row.z_worst = z_grid[zi];
        st.z_index = static_cast<int>(zi);
      }
    }
    return st;
  });

  ScanResult scan;
  for (const RowState& st : states) scan.rows.push_back(st.row);
  std::sort(states.begin(), states.end(), [](const RowState& a, const RowState& b) {
    return a.row.parameter < b.row.parameter;
  });
  std::sort(scan.rows.begin(), scan.rows.end(),
            [](const ScanRow& a, const ScanRow& b) { return a.parameter < b.parameter; });

  if (opts.check_doubling) {
    auto [lo, hi] = trim_window(scan.rows.size(), opts.trim);
    std::vector<std::size_t> windowed;
    for (std::size_t i = lo; i < hi; ++i)
      if (!scan.rows[i].singular) windowed.push_back(i);
    const std::vector<bool> stable = pool.map<bool>(windowed.size(), [&](std::size_t wi) {
      const std::size_t i = windowed[wi];
      const ScanRow& row = scan.rows[i];
      const int zi = states[i].z_index;
      double norm2 = 0.0;
      for (int dz = -1; dz <= 1; ++dz) {
        const int z = std::clamp(zi + dz, 0, static_cast<int>(z_grid.size()) - 1);
        const ResolventNorm r = norm_at(row.parameter, z_grid[z], 2 * row.n_used);
        if (!r.singular) norm2 = std::max(norm2, r.norm);
      }
      return std::abs(norm2 - row.norm) <= opts.doubling_tol * row.norm;
    });
    for (std::size_t wi = 0; wi < windowed.size(); ++wi)
      scan.rows[windowed[wi]].stable = stable[wi];
  }

  detail::fit_scan(scan, opts.trim);
  return scan;
}

inline int lambda_grid_rule(double lambda, double alpha, int max_n = 4096) {
  const double h = std::pow(lambda, -2.0 / alpha);
  return std::min(max_n, default_grid_rule(h));
}

// Rows (lambda, ||P(lambda)^{-1}||) on the real axis; equivalent to scan_h
// under lambda = h^{-alpha/2} z and used as a cross-check of it.
inline ScanResult scan_lambda(double alpha, const DampingProfile& profile,
                              const std::vector<double>& lambda_grid, const WorkerPool& pool,
                              const GridRule& rule = {}, const ScanOptions& opts = {}) {
  check_alpha(alpha);
  if (lambda_grid.empty()) throw std::invalid_argument("scan_lambda: empty grid");
  for (double l : lambda_grid)
    if (!(l >= 5.0))
      throw std::invalid_argument("scan_lambda: lambda grid must sit at or above 5");
  GridRule nrule = rule ? rule : GridRule([alpha, &opts](double l) {
    return lambda_grid_rule(l, alpha, opts.max_n);
  });

  std::vector<ScanRow> rows = pool.map<ScanRow>(lambda_grid.size(), [&](std::size_t i) {
    const double lambda = lambda_grid[i];
    const int n = nrule(lambda);
    const FourierGrid g = make_grid(n);
    const SampleField chi = sample(profile, g);
    const ResolventNorm r = resolvent_norm(assemble_P(lambda, alpha, chi, g));
    ScanRow row;
    row.parameter = lambda;
    row.n_used = n;
    row.norm = r.norm;
    row.singular = r.singular;
    return row;
  });

  ScanResult scan;
  scan.rows = std::move(rows);
  detail::fit_scan(scan, opts.trim);
  return scan;
}

}  // namespace fdwave
