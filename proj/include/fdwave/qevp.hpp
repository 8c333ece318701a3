#pragma once

// Quadratic eigenvalue problem P(lambda) v = 0 via first-order companion
// linearization.  The generator acts on states (u, du/dt) and its eigenvalues
// mu relate to the quadratic ones by lambda = i*mu, matching the time
// convention u(t) = e^{-i*lambda*t} v (decay <=> Im lambda < 0).
//
// Two solve paths:
//   spectrum()          dense solve of the full 2N x 2N companion matrix
//   modes_near_target() shift-invert Arnoldi around a target, backed by a
//                       single N x N factorization of P(lambda_0); used where
//                       a full dense solve is out of reach.

#include <Eigen/Dense>
#include <algorithm>
#include <complex>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "fdwave/fourier.hpp"
#include "fdwave/operators.hpp"

namespace fdwave {

struct EigenPair {
  cplx lambda;
  SpectralField mode;   // L2-normalized, largest-modulus entry real positive
  double residual = 0;  // ||P(lambda) v|| / ||v|| with P assembled independently
};

struct GeneratorMatrix {
  Matrix mat;  // [[0, I], [-diag(|k|^alpha), -M_chi]] in the Fourier basis
  double alpha = 1.0;
  FourierGrid grid;
  SampleField chi;
};

namespace detail {

// Shared pencil data: diagonal multiplier and the damping matrix, used for
// residuals, Rayleigh updates and factorizations of P(lambda).
struct Pencil {
  std::vector<double> L;  // |k|^alpha
  Matrix M;               // multiplication by chi
  int n = 0;

  Pencil(double alpha, const SampleField& chi, const FourierGrid& g)
      : L(fractional_multiplier(alpha, g)), M(multiplication_operator(chi, g).entries), n(g.n) {}

  Vector apply(cplx lambda, const Vector& u) const {
    Vector w = cplx(0, -1) * lambda * (M * u);
    const cplx l2 = lambda * lambda;
    for (int i = 0; i < n; ++i) w(i) += (L[i] - l2) * u(i);
    return w;
  }

  Matrix materialize(cplx lambda) const {
    Matrix P = cplx(0, -1) * lambda * M;
    const cplx l2 = lambda * lambda;
    for (int i = 0; i < n; ++i) P(i, i) += L[i] - l2;
    return P;
  }

  double residual(cplx lambda, const Vector& u) const {
    return apply(lambda, u).norm() / u.norm();
  }

  // Root of u^H P(lambda) u = 0 nearest to `near`.
  cplx rayleigh_root(const Vector& u, cplx near) const {
    const double uu = u.squaredNorm();
    const cplx mbar = u.dot(M * u) / uu;  // Eigen: dot conjugates the left arg
    cplx lbar = 0;
    for (int i = 0; i < n; ++i) lbar += L[i] * std::norm(u(i));
    lbar /= uu;
    const cplx disc = std::sqrt(4.0 * lbar - mbar * mbar);
    const cplx r1 = (cplx(0, -1) * mbar + disc) / 2.0;
    const cplx r2 = (cplx(0, -1) * mbar - disc) / 2.0;
    return std::abs(r1 - near) <= std::abs(r2 - near) ? r1 : r2;
  }
};

inline void normalize_mode(Vector& u) {
  u /= u.norm() * std::sqrt(two_pi);  // L2 norm 1
  int imax = 0;
  double vmax = 0.0;
  for (int i = 0; i < u.size(); ++i)
    if (std::abs(u(i)) > vmax) vmax = std::abs(u(i)), imax = i;
  if (vmax > 0.0) u *= std::abs(u(imax)) / u(imax);
}

// One-or-more steps of inverse iteration with a Rayleigh-functional update.
inline void refine_pair(const Pencil& pencil, cplx& lambda, Vector& u, double& residual,
                        double tol, int max_iters) {
  for (int it = 0; it < max_iters && residual > tol; ++it) {
    Eigen::PartialPivLU<Matrix> lu(pencil.materialize(lambda));
    Vector w = lu.solve(u);
    if (!w.allFinite() || w.norm() == 0.0) break;
    u = w / w.norm();
    lambda = pencil.rayleigh_root(u, lambda);
    residual = pencil.residual(lambda, u);
  }
}

inline EigenPair make_pair(const Pencil& pencil, cplx lambda, Vector u, double tol_refine) {
  double res = pencil.residual(lambda, u);
  if (res > tol_refine) refine_pair(pencil, lambda, u, res, tol_refine, 2);
  normalize_mode(u);
  EigenPair p;
  p.lambda = lambda;
  p.mode.coeffs.assign(u.data(), u.data() + u.size());
  p.residual = pencil.residual(lambda, u);
  return p;
}

}  // namespace detail

inline GeneratorMatrix assemble_generator(double alpha, const SampleField& chi,
                                          const FourierGrid& g) {
  check_alpha(alpha);
  const int n = g.n;
  GeneratorMatrix gen;
  gen.alpha = alpha;
  gen.grid = g;
  gen.chi = chi;
  gen.mat = Matrix::Zero(2 * n, 2 * n);
  const std::vector<double> m = fractional_multiplier(alpha, g);
  const Matrix M = multiplication_operator(chi, g).entries;
  for (int i = 0; i < n; ++i) gen.mat(i, n + i) = 1.0;
  for (int i = 0; i < n; ++i) gen.mat(n + i, i) = -m[i];
  gen.mat.block(n, n, n, n) = -M;
  return gen;
}

// All 2N eigenpairs of the companion matrix, each refined until the residual
// against an independently assembled P(lambda) is at most `tol`.
inline std::vector<EigenPair> spectrum(const GeneratorMatrix& gen, double tol = 1e-8) {
  const int n = gen.grid.n;
  Eigen::ComplexEigenSolver<Matrix> ces(gen.mat);
  if (ces.info() != Eigen::Success)
    throw std::runtime_error("spectrum: dense eigensolver failed to converge");
  detail::Pencil pencil(gen.alpha, gen.chi, gen.grid);
  std::vector<EigenPair> out;
  out.reserve(2 * n);
  for (int i = 0; i < 2 * n; ++i) {
    const cplx mu = ces.eigenvalues()(i);
    const cplx lambda = cplx(0, 1) * mu;
    Vector u = ces.eigenvectors().col(i).head(n);
    out.push_back(detail::make_pair(pencil, lambda, u, tol));
    if (out.back().residual > tol)
      throw std::runtime_error("spectrum: eigenpair " + std::to_string(i) +
                               " did not reach residual " + std::to_string(tol));
  }
  std::sort(out.begin(), out.end(), [](const EigenPair& a, const EigenPair& b) {
    if (a.lambda.real() != b.lambda.real()) return a.lambda.real() < b.lambda.real();
    return a.lambda.imag() < b.lambda.imag();
  });
  return out;
}

inline constexpr double zero_mode_tol = 1e-7;

// Eigenpair minimizing |lambda - target|.  The constant zero mode is skipped
// by default: the energy functional is blind to it.
inline EigenPair mode_near(cplx target, const std::vector<EigenPair>& pairs,
                           bool exclude_zero_mode = true) {
  const EigenPair* best = nullptr;
  for (const EigenPair& p : pairs) {
    if (exclude_zero_mode && std::abs(p.lambda) <= zero_mode_tol) continue;
    if (!best || std::abs(p.lambda - target) < std::abs(best->lambda - target)) best = &p;
  }
  if (!best) throw std::invalid_argument("mode_near: no eligible eigenpairs");
  return *best;
}

inline double spectral_abscissa(const std::vector<EigenPair>& pairs) {
  bool found = false;
  double a = 0.0;
  for (const EigenPair& p : pairs) {
    if (std::abs(p.lambda) <= zero_mode_tol) continue;
    if (!found || p.lambda.imag() > a) a = p.lambda.imag(), found = true;
  }
  if (!found) throw std::invalid_argument("spectral_abscissa: no nonconstant modes");
  return a;
}

// Eigenpairs nearest `target` via shift-invert Arnoldi on the companion form.
// Applying (A - mu0)^{-1} reduces to one N x N solve with P(lambda_0), so a
// single factorization serves the whole Krylov loop.
inline std::vector<EigenPair> modes_near_target(double alpha, const SampleField& chi,
                                                const FourierGrid& g, cplx target, int count,
                                                double tol = 1e-8) {
  if (count < 1) throw std::invalid_argument("modes_near_target: count must be >= 1");
  const int n = g.n;
  detail::Pencil pencil(alpha, chi, g);
  const cplx lambda0 = target;
  const cplx mu0 = cplx(0, -1) * lambda0;
  Eigen::PartialPivLU<Matrix> lu(pencil.materialize(lambda0));

  auto apply_shift_invert = [&](const Vector& y) {
    const Vector f = y.head(n), gpart = y.tail(n);
    Vector rhs = gpart + pencil.M * f + mu0 * f;
    Vector u = -lu.solve(rhs);
    Vector v = f + mu0 * u;
    Vector out(2 * n);
    out << u, v;
    return out;
  };

  const int m = std::min(2 * n - 2, std::max(60, 4 * count + 24));
  Matrix V(2 * n, m + 1);
  Matrix H = Matrix::Zero(m + 1, m);
  std::mt19937_64 rng(0x9E3779B97F4A7C15ull ^ static_cast<unsigned long long>(2 * n));
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (int i = 0; i < 2 * n; ++i) V(i, 0) = cplx(gauss(rng), gauss(rng));
  V.col(0) /= V.col(0).norm();

  int steps = m;
  for (int j = 0; j < m; ++j) {
    Vector w = apply_shift_invert(V.col(j));
    if (!w.allFinite())
      throw std::runtime_error("modes_near_target: shift hit the spectrum, move the target");
    for (int pass = 0; pass < 2; ++pass)
      for (int i = 0; i <= j; ++i) {
        const cplx hij = V.col(i).dot(w);
        w -= hij * V.col(i);
        H(i, j) += hij;
      }
    const double hnext = w.norm();
    H(j + 1, j) = hnext;
    if (hnext < 1e-13) {
      steps = j + 1;
      break;
    }
    V.col(j + 1) = w / hnext;
  }

  Eigen::ComplexEigenSolver<Matrix> hes(H.topLeftCorner(steps, steps));
  if (hes.info() != Eigen::Success)
    throw std::runtime_error("modes_near_target: Hessenberg eigensolve failed");

  std::vector<EigenPair> candidates;
  for (int i = 0; i < steps; ++i) {
    const cplx theta = hes.eigenvalues()(i);
    if (std::abs(theta) < 1e-12) continue;
    const cplx lambda = lambda0 + cplx(0, 1) / theta;
    Vector w = V.leftCols(steps) * hes.eigenvectors().col(i);
    Vector u = w.head(n);
    if (u.norm() == 0.0) continue;
    u /= u.norm();
    if (pencil.residual(lambda, u) > 1e-3) continue;
    EigenPair p;
    p.lambda = lambda;
    p.mode.coeffs.assign(u.data(), u.data() + u.size());
    p.residual = pencil.residual(lambda, u);
    candidates.push_back(std::move(p));
  }
  std::sort(candidates.begin(), candidates.end(), [&](const EigenPair& a, const EigenPair& b) {
    return std::abs(a.lambda - target) < std::abs(b.lambda - target);
  });

  std::vector<EigenPair> out;
  for (EigenPair& c : candidates) {
    if (static_cast<int>(out.size()) >= count) break;
    cplx lambda = c.lambda;
    Vector u = Eigen::Map<const Vector>(c.mode.coeffs.data(), n);
    double res = c.residual;
    detail::refine_pair(pencil, lambda, u, res, tol / 10.0, 4);
    if (res > tol) continue;
    bool dup = false;
    for (const EigenPair& k : out)
      if (std::abs(k.lambda - lambda) <= 1e-8 * (1.0 + std::abs(lambda))) dup = true;
    if (dup) continue;
    detail::normalize_mode(u);
    EigenPair p;
    p.lambda = lambda;
    p.mode.coeffs.assign(u.data(), u.data() + u.size());
    p.residual = pencil.residual(lambda, u);
    out.push_back(std::move(p));
  }
  if (out.empty()) throw std::runtime_error("modes_near_target: no eigenpairs converged");
  std::sort(out.begin(), out.end(), [&](const EigenPair& a, const EigenPair& b) {
    return std::abs(a.lambda - target) < std::abs(b.lambda - target);
  });
  return out;
}

}  // namespace fdwave
