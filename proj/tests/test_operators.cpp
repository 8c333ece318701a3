#include <catch2/catch.hpp>

#include <Eigen/Dense>
#include <random>

#include "fdwave/damping.hpp"
#include "fdwave/operators.hpp"

using namespace fdwave;

namespace {

// Column-by-column oracle: column k of the multiplication operator is the
// transform of chi(x) e^{ikx}.
Matrix mult_oracle(const SampleField& chi, const FourierGrid& g) {
  Matrix M(g.n, g.n);
  for (int b = 0; b < g.n; ++b) {
    SampleField col;
    col.values.resize(g.n);
    for (int j = 0; j < g.n; ++j)
      col.values[j] = chi.values[j] * std::exp(cplx(0.0, g.freqs[b] * g.points[j]));
    const SpectralField c = to_spectral(col, g);
    for (int a = 0; a < g.n; ++a) M(a, b) = c.coeffs[a];
  }
  return M;
}

SampleField constant_field(const FourierGrid& g, double v) {
  SampleField f;
  f.values.assign(g.n, v);
  return f;
}

}  // namespace

TEST_CASE("fractional multiplier values and domain") {
  const FourierGrid g = make_grid(16);
  const auto m1 = fractional_multiplier(1.0, g);
  REQUIRE(m1[g.index_of(3)] == Approx(3.0));
  REQUIRE(m1[g.index_of(0)] == 0.0);
  const auto mh = fractional_multiplier(0.5, g);
  REQUIRE(mh[g.index_of(4)] == Approx(2.0));
  REQUIRE(mh[g.index_of(-4)] == Approx(2.0));
  REQUIRE_THROWS_AS(fractional_multiplier(0.0, g), std::invalid_argument);
  REQUIRE_THROWS_AS(fractional_multiplier(2.0, g), std::invalid_argument);
  REQUIRE_THROWS_AS(fractional_multiplier(-0.3, g), std::invalid_argument);
}

TEST_CASE("multiplication by one is the identity") {
  const FourierGrid g = make_grid(16);
  const Matrix M = multiplication_operator(constant_field(g, 1.0), g).entries;
  REQUIRE((M - Matrix::Identity(16, 16)).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("multiplication by cos places halves on the off-diagonals") {
  const FourierGrid g = make_grid(16);
  SampleField chi;
  chi.values.resize(16);
  for (int j = 0; j < 16; ++j) chi.values[j] = std::cos(g.points[j]);
  const Matrix M = multiplication_operator(chi, g).entries;
  for (int a = 0; a < 16; ++a)
    for (int b = 0; b < 16; ++b) {
      const int diff = ((a - b) % 16 + 16) % 16;  // Toeplitz up to aliasing
      const double expected = (diff == 1 || diff == 15) ? 0.5 : 0.0;
      REQUIRE(std::abs(M(a, b) - expected) < 1e-14);
    }
}

TEST_CASE("multiplication operator matches the per-column transform oracle") {
  const FourierGrid g = make_grid(16);
  const SampleField chi = sample(indicator_profile(), g);
  const Matrix M = multiplication_operator(chi, g).entries;
  const Matrix O = mult_oracle(chi, g);
  REQUIRE((M - O).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("multiplication operator is Hermitian and PSD for nonnegative chi") {
  const FourierGrid g = make_grid(64);
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 3; ++trial) {
    SampleField chi;
    chi.values.resize(g.n);
    double sup = 0.0;
    for (int j = 0; j < g.n; ++j) {
      const double x = g.points[j];
      const double v = u(rng) * 0.2 + std::pow(std::sin(x / 2), 2.0) * u(rng);
      chi.values[j] = v;
      sup = std::max(sup, v);
    }
    const Matrix M = multiplication_operator(chi, g).entries;
    REQUIRE((M - M.adjoint()).cwiseAbs().maxCoeff() < 1e-13);
    Eigen::SelfAdjointEigenSolver<Matrix> eig(M);
    REQUIRE(eig.eigenvalues().minCoeff() >= -1e-10 * sup);
  }
}

TEST_CASE("complex-valued samples are rejected") {
  const FourierGrid g = make_grid(8);
  SampleField chi = constant_field(g, 1.0);
  chi.values[3] = cplx(1.0, 0.5);
  REQUIRE_THROWS_AS(multiplication_operator(chi, g), std::invalid_argument);
}

TEST_CASE("assemble_P at lambda = 0 is the multiplier diagonal") {
  const FourierGrid g = make_grid(16);
  const SampleField zero = constant_field(g, 0.0);
  const Matrix P = assemble_P(0.0, 1.0, zero, g).entries;
  for (int i = 0; i < 16; ++i)
    for (int j = 0; j < 16; ++j) {
      const double expected = i == j ? std::abs(g.freqs[i]) : 0.0;
      REQUIRE(std::abs(P(i, j) - expected) < 1e-14);
    }
}

TEST_CASE("undamped P is singular exactly on the dispersion set") {
  const FourierGrid g = make_grid(16);
  const SampleField zero = constant_field(g, 0.0);
  const double lambda = std::sqrt(3.0);  // lambda^2 = 3 = |k|^alpha at k = 3, alpha = 1
  const Matrix P = assemble_P(lambda, 1.0, zero, g).entries;
  REQUIRE(std::abs(P(g.index_of(3), g.index_of(3))) < 1e-12);
  REQUIRE(std::abs(P(g.index_of(2), g.index_of(2))) > 0.5);
}

TEST_CASE("conjugate symmetry P(-conj(lambda)) = R P(lambda)* R off the Nyquist row") {
  for (const auto& profile : {indicator_profile(), holder_profile(0.5)}) {
    const FourierGrid g = make_grid(32);
    const SampleField chi = sample(profile, g);
    const cplx lambda(3.7, -0.41);
    const Matrix P = assemble_P(lambda, 1.0, chi, g).entries;
    const Matrix Q = assemble_P(-std::conj(lambda), 1.0, chi, g).entries;
    // reversal k -> -k pairs index i with 2*(n/2) - i = n - i; Nyquist (i = 0) excluded
    double worst = 0.0;
    for (int a = 1; a < g.n; ++a)
      for (int b = 1; b < g.n; ++b)
        worst = std::max(worst, std::abs(Q(g.n - a, g.n - b) - std::conj(P(a, b))));
    REQUIRE(worst < 1e-12);
  }
}

TEST_CASE("semiclassical pencil at h = 1 reduces to P(lambda = z)") {
  const FourierGrid g = make_grid(16);
  const SampleField chi = sample(indicator_profile(), g);
  const double z = 1.05;
  const Matrix A = assemble_P_semiclassical(1.0, z, 1.0, chi, g).entries;
  const Matrix B = assemble_P(z, 1.0, chi, g).entries;
  REQUIRE((A - B).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("rescaling identity P(h,z) = h^alpha P(h^{-alpha/2} z)") {
  const double alpha = 1.0, h = 0.01, z = 1.0;
  const FourierGrid g = make_grid(64);
  const SampleField chi = sample(indicator_profile(), g);
  const Matrix S = assemble_P_semiclassical(h, z, alpha, chi, g).entries;
  const Matrix P = assemble_P(std::pow(h, -alpha / 2.0) * z, alpha, chi, g).entries;
  const Matrix scaled = std::pow(h, alpha) * P;
  double worst = 0.0;
  for (int a = 0; a < g.n; ++a)
    for (int b = 0; b < g.n; ++b) {
      const double denom = std::max(std::abs(scaled(a, b)), 1e-30);
      if (std::abs(scaled(a, b)) > 1e-14)
        worst = std::max(worst, std::abs(S(a, b) - scaled(a, b)) / denom);
    }
  REQUIRE(worst < 1e-10);
}

TEST_CASE("undamped semiclassical pencil is singular exactly at |hk|^alpha = 1") {
  const FourierGrid g = make_grid(16);
  const SampleField zero = constant_field(g, 0.0);
  const double h = 1.0 / 4.0;  // |h*k| = 1 at k = 4
  const Matrix A = assemble_P_semiclassical(h, 1.0, 1.0, zero, g).entries;
  REQUIRE(std::abs(A(g.index_of(-4), g.index_of(-4))) < 1e-14);
  REQUIRE(std::abs(A(g.index_of(3), g.index_of(3))) > 0.1);
  REQUIRE_THROWS_AS(assemble_P_semiclassical(0.0, 1.0, 1.0, zero, g), std::invalid_argument);
  REQUIRE_THROWS_AS(assemble_P_semiclassical(-0.1, 1.0, 1.0, zero, g), std::invalid_argument);
}
