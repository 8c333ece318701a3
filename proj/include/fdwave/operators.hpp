#pragma once

// Dense operators on spectral fields: the fractional Laplacian multiplier,
// multiplication operators in the Fourier basis, and the stationary pencils
//   P(lambda) = |D|^alpha - i*lambda*chi - lambda^2
//   P(h,z)    = |hD|^alpha - i*z*h^{alpha/2}*chi - z^2
// with P(lambda) = h^{-alpha} P(h,z) under lambda = h^{-alpha/2} z.

#include <Eigen/Dense>
#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

#include "fdwave/fourier.hpp"

namespace fdwave {

using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

enum class Basis { spectral, spectral_pair };

struct DenseOperator {
  Matrix entries;  // Fourier-basis matrix, rows/cols indexed like FourierGrid::freqs
  Basis basis = Basis::spectral;

  int dim() const { return static_cast<int>(entries.rows()); }
};

inline void check_alpha(double alpha) {
  if (!(alpha > 0.0 && alpha < 2.0))
    throw std::invalid_argument("alpha must lie in (0,2), got " + std::to_string(alpha));
}

// m_k = |k|^alpha for every grid frequency (m_0 = 0).
inline std::vector<double> fractional_multiplier(double alpha, const FourierGrid& g) {
  check_alpha(alpha);
  std::vector<double> m(g.n);
  for (int i = 0; i < g.n; ++i) {
    const int k = g.freqs[i];
    m[i] = k == 0 ? 0.0 : std::pow(std::abs(static_cast<double>(k)), alpha);
  }
  return m;
}

inline void check_real_samples(const SampleField& chi, const char* who) {
  double scale = 0.0;
  for (const cplx& v : chi.values) scale = std::max(scale, std::abs(v));
  for (const cplx& v : chi.values)
    if (std::abs(v.imag()) > 1e-12 * (1.0 + scale))
      throw std::invalid_argument(std::string(who) + ": samples must be real-valued");
}

// Matrix of u -> chi*u in the Fourier basis.  Entry (j,k) is the (j-k)-th
// aliased discrete Fourier coefficient of the sampled chi, so the matrix is
// exactly the conjugation of diag(chi(x_j)) by the discrete transform.
inline DenseOperator multiplication_operator(const SampleField& chi, const FourierGrid& g) {
  if (static_cast<int>(chi.values.size()) != g.n)
    throw std::invalid_argument("multiplication_operator: sample length mismatch");
  check_real_samples(chi, "multiplication_operator");
  const SpectralField c = to_spectral(chi, g);
  const int n = g.n;
  DenseOperator op;
  op.basis = Basis::spectral;
  op.entries.resize(n, n);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      op.entries(a, b) = c.coeffs[detail::pmod(a - b + n / 2, n)];
  return op;
}

inline DenseOperator assemble_P(cplx lambda, double alpha, const SampleField& chi,
                                const FourierGrid& g) {
  check_alpha(alpha);
  DenseOperator op = multiplication_operator(chi, g);
  op.entries *= cplx(0.0, -1.0) * lambda;
  const std::vector<double> m = fractional_multiplier(alpha, g);
  const cplx shift = lambda * lambda;
  for (int i = 0; i < g.n; ++i) op.entries(i, i) += m[i] - shift;
  return op;
}

inline DenseOperator assemble_P_semiclassical(double h, double z, double alpha,
                                              const SampleField& chi, const FourierGrid& g) {
  if (!(h > 0.0)) throw std::invalid_argument("assemble_P_semiclassical: h must be positive");
  check_alpha(alpha);
  DenseOperator op = multiplication_operator(chi, g);
  op.entries *= cplx(0.0, -1.0) * z * std::pow(h, alpha / 2.0);
  const double z2 = z * z;
  for (int i = 0; i < g.n; ++i) {
    const int k = g.freqs[i];
    const double hk = k == 0 ? 0.0 : std::pow(std::abs(h * k), alpha);
    op.entries(i, i) += hk - z2;
  }
  return op;
}

}  // namespace fdwave
