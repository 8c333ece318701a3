#pragma once

// Toroidal left quantization of separable symbols a(x,xi) = phi(x) psi(xi),
//   Op_h(a) u = phi(x) * sum_k psi(h k) u_hat(k) e^{i k x},
// and operator norms of commutators [f, Op_h(a)] for Holder-continuous f.
//
// Norms use a full SVD up to n = 2048 and blocked power iteration on the
// normal equations above that, with FFT-based matvecs so the large grids of
// the dyadic h sweeps never materialize a dense matrix.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <functional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "fdwave/damping.hpp"
#include "fdwave/fourier.hpp"
#include "fdwave/operators.hpp"
#include "fdwave/parallel.hpp"
#include "fdwave/powerfit.hpp"

namespace fdwave {

struct SeparableSymbol {
  std::string name;
  double c1 = 0.125, c2 = 8.0;            // frequency support annulus
  std::function<double(double)> xi_part;  // psi(xi)
  std::function<double(double)> x_part;   // phi(x); empty means phi == 1
};

// C-infinity transition, 0 for t <= 0 and 1 for t >= 1.
inline double smooth_step(double t) {
  if (t <= 0.0) return 0.0;
  if (t >= 1.0) return 1.0;
  const double a = std::exp(-1.0 / t);
  const double b = std::exp(-1.0 / (1.0 - t));
  return a / (a + b);
}

// Even bump in xi: 0 outside [c1, c2] (in |xi|), 1 on [p1, p2].
inline SeparableSymbol bump_symbol(double c1, double p1, double p2, double c2) {
  if (!(0.0 < c1 && c1 < p1 && p1 < p2 && p2 < c2))
    throw std::invalid_argument("bump_symbol: need 0 < c1 < p1 < p2 < c2");
  SeparableSymbol s;
  s.c1 = c1;
  s.c2 = c2;
  s.name = "bump[" + std::to_string(c1) + "," + std::to_string(p1) + "," + std::to_string(p2) +
           "," + std::to_string(c2) + "]";
  s.xi_part = [c1, p1, p2, c2](double xi) {
    const double y = std::abs(xi);
    if (y <= c1 || y >= c2) return 0.0;
    if (y < p1) return smooth_step((y - c1) / (p1 - c1));
    if (y <= p2) return 1.0;
    return smooth_step((c2 - y) / (c2 - p2));
  };
  return s;
}

inline SeparableSymbol default_symbol() { return bump_symbol(0.125, 0.25, 4.0, 8.0); }
inline SeparableSymbol narrow_symbol() { return bump_symbol(0.25, 0.5, 2.0, 4.0); }

// Per-h grid rule for commutator sweeps: resolve well past the symbol band.
inline int commutator_grid_rule(double h, double c2) {
  int n = static_cast<int>(std::ceil(32.0 * c2 / h));
  if (n % 2 != 0) ++n;
  return std::max(n, 8);
}

inline void check_resolved(const SeparableSymbol& s, double h, const FourierGrid& g) {
  if (!(h > 0.0)) throw std::invalid_argument("quantize: h must be positive");
  if (h * (g.n / 2) < s.c2)
    throw std::invalid_argument("quantize: grid under-resolves the symbol (need h*N/2 >= c2)");
}

inline std::vector<double> symbol_diagonal(const SeparableSymbol& s, double h,
                                           const FourierGrid& g) {
  std::vector<double> d(g.n);
  for (int i = 0; i < g.n; ++i) d[i] = s.xi_part(h * g.freqs[i]);
  return d;
}

inline DenseOperator quantize(const SeparableSymbol& s, double h, const FourierGrid& g) {
  check_resolved(s, h, g);
  const std::vector<double> d = symbol_diagonal(s, h, g);
  DenseOperator op;
  op.basis = Basis::spectral;
  if (!s.x_part) {
    op.entries = Matrix::Zero(g.n, g.n);
    for (int i = 0; i < g.n; ++i) op.entries(i, i) = d[i];
    return op;
  }
  SampleField phi;
  phi.values.resize(g.n);
  for (int j = 0; j < g.n; ++j) phi.values[j] = s.x_part(g.points[j]);
  op = multiplication_operator(phi, g);
  for (int b = 0; b < g.n; ++b) op.entries.col(b) *= d[b];
  return op;
}

namespace detail {

inline constexpr int commutator_dense_cutoff = 2048;

// Callbacks for C = [M_f, Op] and its adjoint without dense assembly;
// requires real f, psi and phi, which makes M_f and Op building blocks
// self-adjoint or diagonal-real.
struct CommutatorApply {
  const FourierGrid& g;
  const SampleField& f;
  const std::vector<double>& diag;
  const SampleField* phi;  // null for phi == 1

  Vector mult_samples(const SampleField& w, const Vector& x) const {
    SpectralField xs;
    xs.coeffs.assign(x.data(), x.data() + x.size());
    SampleField s = to_samples(xs, g);
    for (int j = 0; j < g.n; ++j) s.values[j] *= w.values[j].real();
    SpectralField back = to_spectral(s, g);
    return Eigen::Map<const Vector>(back.coeffs.data(), g.n);
  }

  Vector apply_op(const Vector& x) const {
    Vector y = x;
    for (int i = 0; i < g.n; ++i) y(i) *= diag[i];
    if (phi) y = mult_samples(*phi, y);
    return y;
  }

  Vector apply_op_adjoint(const Vector& x) const {
    Vector y = phi ? mult_samples(*phi, x) : x;
    for (int i = 0; i < g.n; ++i) y(i) *= diag[i];
    return y;
  }

  Vector apply(const Vector& x) const {
    return mult_samples(f, apply_op(x)) - apply_op(mult_samples(f, x));
  }

  Vector apply_adjoint(const Vector& x) const {
    return apply_op_adjoint(mult_samples(f, x)) - mult_samples(f, apply_op_adjoint(x));
  }
};

// Lanczos on the normal equations C^H C: the three-term recurrence keeps
// memory flat and the top Ritz value reaches clustered spectra (rough f makes
// the top of the singular spectrum nearly flat) far faster than power sweeps.
inline double largest_singular_lanczos(const CommutatorApply& C, int n, double tol = 1e-10,
                                       int max_iters = 600) {
  std::mt19937_64 rng(0xC0337u ^ static_cast<unsigned long long>(n));
  std::normal_distribution<double> gauss(0.0, 1.0);
  Vector v(n), v_prev = Vector::Zero(n);
  for (int i = 0; i < n; ++i) v(i) = cplx(gauss(rng), gauss(rng));
  v /= v.norm();
  std::vector<double> alpha, beta;  // tridiagonal entries
  double prev_ritz = -1.0, ritz = 0.0;
  int steady = 0;
  for (int j = 0; j < max_iters; ++j) {
    Vector w = C.apply_adjoint(C.apply(v));
    if (j > 0) w -= beta.back() * v_prev;
    const double a = w.dot(v).real();
    alpha.push_back(a);
    w -= a * v;
    const double b = w.norm();
    if ((j + 1) % 10 == 0 || b < 1e-14 || j + 1 == max_iters) {
      Eigen::VectorXd diag = Eigen::Map<const Eigen::VectorXd>(alpha.data(), alpha.size());
      Eigen::VectorXd off(std::max<std::size_t>(beta.size(), 1));
      for (std::size_t i = 0; i < beta.size(); ++i) off(i) = beta[i];
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig;
      eig.computeFromTridiagonal(diag, off.head(std::max<int>(int(alpha.size()) - 1, 0)),
                                 Eigen::EigenvaluesOnly);
      ritz = std::max(eig.eigenvalues().maxCoeff(), 0.0);
      if (std::abs(ritz - prev_ritz) <= tol * std::max(ritz, 1e-300)) {
        if (++steady >= 2) break;
      } else {
        steady = 0;
      }
      prev_ritz = ritz;
    }
    if (b < 1e-14) break;  // invariant subspace exhausted
    beta.push_back(b);
    v_prev = v;
    v = w / b;
  }
  return std::sqrt(ritz);
}

}  // namespace detail

inline double commutator_norm_dense(const SampleField& f, const SeparableSymbol& s, double h,
                                    const FourierGrid& g) {
  check_real_samples(f, "commutator_norm");
  const Matrix Op = quantize(s, h, g).entries;
  const Matrix Mf = multiplication_operator(f, g).entries;
  const Matrix C = Mf * Op - Op * Mf;
  if (g.n <= 512) {
    Eigen::JacobiSVD<Matrix> svd(C);
    return svd.singularValues()(0);
  }
  Eigen::BDCSVD<Matrix> svd(C);
  return svd.singularValues()(0);
}

inline double commutator_norm_implicit(const SampleField& f, const SeparableSymbol& s, double h,
                                       const FourierGrid& g) {
  check_real_samples(f, "commutator_norm");
  const std::vector<double> d = symbol_diagonal(s, h, g);
  SampleField phi;
  const SampleField* phi_ptr = nullptr;
  if (s.x_part) {
    phi.values.resize(g.n);
    for (int j = 0; j < g.n; ++j) phi.values[j] = s.x_part(g.points[j]);
    phi_ptr = &phi;
  }
  detail::CommutatorApply C{g, f, d, phi_ptr};
  return detail::largest_singular_lanczos(C, g.n);
}

// Largest singular value of M_f Op_h(a) - Op_h(a) M_f.
inline double commutator_norm(const SampleField& f, const SeparableSymbol& s, double h,
                              const FourierGrid& g) {
  check_resolved(s, h, g);
  if (g.n <= detail::commutator_dense_cutoff) return commutator_norm_dense(f, s, h, g);
  return commutator_norm_implicit(f, s, h, g);
}

struct CommutatorScanRow {
  double h = 0.0;
  int n_used = 0;
  double norm = 0.0;
  double holder_norm_f = 0.0;
};

struct CommutatorScan {
  std::vector<CommutatorScanRow> rows;
  double fitted_slope = 0.0;
  double beta_declared = 0.0;
  double fit_residual = 0.0;
};

// h-scaling of ||[sqrt(chi), Op_h(a)]|| for the profile family; the fitted
// log-log slope tracks the Holder class of sqrt(chi).
inline CommutatorScan scaling_fit(const DampingProfile& profile, const SeparableSymbol& s,
                                  const std::vector<double>& h_grid, const WorkerPool& pool) {
  if (h_grid.empty()) throw std::invalid_argument("scaling_fit: empty h grid");
  CommutatorScan scan;
  scan.beta_declared = profile.declared_beta;
  scan.rows = pool.map<CommutatorScanRow>(h_grid.size(), [&](std::size_t i) {
    const double h = h_grid[i];
    const FourierGrid g = make_grid(commutator_grid_rule(h, s.c2));
    const SampleField chi = sample(profile, g);
    SampleField f;
    f.values.resize(g.n);
    for (int j = 0; j < g.n; ++j) f.values[j] = std::sqrt(chi.values[j].real());
    CommutatorScanRow row;
    row.h = h;
    row.n_used = g.n;
    row.norm = commutator_norm(f, s, h, g);
    row.holder_norm_f = holder_norm(f, profile.declared_beta, g);
    return row;
  });
  std::sort(scan.rows.begin(), scan.rows.end(),
            [](const CommutatorScanRow& a, const CommutatorScanRow& b) { return a.h < b.h; });
  std::vector<double> xs, ys;
  for (const CommutatorScanRow& r : scan.rows) {
    if (r.norm > 0.0) {
      xs.push_back(r.h);
      ys.push_back(r.norm);
    }
  }
  if (xs.size() < 2)
    throw std::runtime_error("scaling_fit: commutator norms are degenerate (all zero)");
  const LineFit f = fit_loglog(xs, ys);
  scan.fitted_slope = f.slope;
  scan.fit_residual = f.residual_rms;
  return scan;
}

}  // namespace fdwave
