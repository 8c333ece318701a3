#include <catch2/catch.hpp>

#include <Eigen/Dense>
#include <algorithm>
#include <complex>
#include <vector>

#include "fdwave/damping.hpp"
#include "fdwave/qevp.hpp"

using namespace fdwave;

namespace {

SampleField constant_field(const FourierGrid& g, double v) {
  SampleField f;
  f.values.assign(g.n, v);
  return f;
}

// Newton refinement of det P(lambda) = 0 seeded on a complex grid; the
// log-derivative step uses tr(P^{-1} P').
std::vector<cplx> determinant_roots(double alpha, const SampleField& chi, const FourierGrid& g) {
  const Matrix M = multiplication_operator(chi, g).entries;
  const std::vector<double> L = fractional_multiplier(alpha, g);
  auto P_at = [&](cplx lambda) {
    Matrix P = cplx(0, -1) * lambda * M;
    for (int i = 0; i < g.n; ++i) P(i, i) += L[i] - lambda * lambda;
    return P;
  };
  std::vector<cplx> roots;
  for (double re = 0.3; re <= 2.3; re += 0.25)
    for (double im : {-0.5, -0.2, -0.02}) {
      cplx lambda(re, im);
      bool ok = false;
      for (int it = 0; it < 60; ++it) {
        const Matrix P = P_at(lambda);
        Matrix Pp = cplx(0, -1) * M;
        for (int i = 0; i < g.n; ++i) Pp(i, i) -= 2.0 * lambda;
        const cplx logderiv = Eigen::PartialPivLU<Matrix>(P).solve(Pp).trace();
        const cplx step = 1.0 / logderiv;
        lambda -= step;
        if (std::abs(step) < 1e-12) {
          ok = true;
          break;
        }
      }
      if (!ok || !std::isfinite(lambda.real()) || !std::isfinite(lambda.imag())) continue;
      bool dup = false;
      for (const cplx& r : roots)
        if (std::abs(r - lambda) < 1e-8) dup = true;
      if (!dup) roots.push_back(lambda);
    }
  return roots;
}

}  // namespace

TEST_CASE("generator has the companion block structure") {
  const FourierGrid g = make_grid(8);
  const SampleField chi = sample(indicator_profile(), g);
  const GeneratorMatrix gen = assemble_generator(1.0, chi, g);
  REQUIRE(gen.mat.rows() == 16);
  REQUIRE(gen.mat.topLeftCorner(8, 8).cwiseAbs().maxCoeff() == 0.0);
  REQUIRE((gen.mat.topRightCorner(8, 8) - Matrix::Identity(8, 8)).cwiseAbs().maxCoeff() == 0.0);
  for (int i = 0; i < 8; ++i)
    REQUIRE(gen.mat(8 + i, i) == cplx(-std::abs(g.freqs[i]), 0.0));
}

TEST_CASE("undamped spectrum is the dispersion set") {
  const FourierGrid g = make_grid(32);
  const auto pairs = spectrum(assemble_generator(1.0, constant_field(g, 0.0), g));
  REQUIRE(pairs.size() == 64);

  std::vector<double> expected;
  for (int k : g.freqs) {
    expected.push_back(std::sqrt(std::abs(static_cast<double>(k))));
    expected.push_back(-std::sqrt(std::abs(static_cast<double>(k))));
  }
  std::sort(expected.begin(), expected.end());
  std::vector<double> got;
  for (const auto& p : pairs) {
    REQUIRE(std::abs(p.lambda.imag()) < 1e-9);
    got.push_back(p.lambda.real());
  }
  std::sort(got.begin(), got.end());
  for (std::size_t i = 0; i < got.size(); ++i)
    REQUIRE(got[i] == Approx(expected[i]).margin(1e-8));
}

TEST_CASE("constant damping matches the per-mode closed form") {
  const double c = 0.7, alpha = 1.0;
  const FourierGrid g = make_grid(16);
  const auto pairs = spectrum(assemble_generator(alpha, constant_field(g, c), g));

  std::vector<cplx> expected;
  for (int k : g.freqs) {
    const double m = k == 0 ? 0.0 : std::pow(std::abs(static_cast<double>(k)), alpha);
    const cplx disc = std::sqrt(cplx(4.0 * m - c * c, 0.0));
    expected.push_back((cplx(0, -1) * c + disc) / 2.0);
    expected.push_back((cplx(0, -1) * c - disc) / 2.0);
  }
  for (const cplx& e : expected) {
    double best = 1e9;
    for (const auto& p : pairs) best = std::min(best, std::abs(p.lambda - e));
    REQUIRE(best < 1e-8);
  }
}

TEST_CASE("determinant-scan roots are eigenvalues (N=8, indicator)") {
  const FourierGrid g = make_grid(8);
  const SampleField chi = sample(indicator_profile(), g);
  const auto pairs = spectrum(assemble_generator(1.0, chi, g));
  const auto roots = determinant_roots(1.0, chi, g);
  REQUIRE(roots.size() >= 3);
  for (const cplx& r : roots) {
    double best = 1e9;
    for (const auto& p : pairs) best = std::min(best, std::abs(p.lambda - r));
    INFO("root " << r.real() << " + " << r.imag() << "i");
    REQUIRE(best < 1e-6);
  }
}

TEST_CASE("spectrum invariants: residual, dissipativity, conjugate pairing") {
  for (const auto& profile : {indicator_profile(), tanh_profile()}) {
    const FourierGrid g = make_grid(32);
    const SampleField chi = sample(profile, g);
    const GeneratorMatrix gen = assemble_generator(1.0, chi, g);
    const auto pairs = spectrum(gen);
    REQUIRE(pairs.size() == 64);
    for (const auto& p : pairs) {
      REQUIRE(p.residual <= 1e-8);
      REQUIRE(p.lambda.imag() <= 1e-10);
      double best = 1e9;
      for (const auto& q : pairs) best = std::min(best, std::abs(q.lambda + std::conj(p.lambda)));
      REQUIRE(best < 1e-8);
    }
  }
}

TEST_CASE("residuals are checked against an independently assembled pencil") {
  const FourierGrid g = make_grid(16);
  const SampleField chi = sample(holder_profile(0.5), g);
  const auto pairs = spectrum(assemble_generator(1.0, chi, g));
  for (const auto& p : pairs) {
    const Matrix P = assemble_P(p.lambda, 1.0, chi, g).entries;
    Vector v(g.n);
    for (int i = 0; i < g.n; ++i) v(i) = p.mode.coeffs[i];
    REQUIRE((P * v).norm() / v.norm() <= 1e-8);
  }
}

TEST_CASE("zero mode: constants sit at lambda = 0 and are excluded from selection") {
  const FourierGrid g = make_grid(16);

  // undamped: two-dimensional generalized eigenspace spanned by constants
  const auto free_pairs = spectrum(assemble_generator(1.0, constant_field(g, 0.0), g));
  int zeros = 0;
  for (const auto& p : free_pairs)
    if (std::abs(p.lambda) <= 1e-9) {
      ++zeros;
      double mass0 = std::norm(p.mode.coeffs[g.index_of(0)]);
      double mass = 0.0;
      for (const auto& c : p.mode.coeffs) mass += std::norm(c);
      REQUIRE(mass0 / mass > 0.999);
    }
  REQUIRE(zeros == 2);

  // damped: the constant eigenvector remains, its partner moves down
  const SampleField chi = sample(indicator_profile(), g);
  const auto pairs = spectrum(assemble_generator(1.0, chi, g));
  int zeros_damped = 0;
  for (const auto& p : pairs)
    if (std::abs(p.lambda) <= 1e-9) ++zeros_damped;
  REQUIRE(zeros_damped == 1);

  const EigenPair near0 = mode_near(cplx(0.0, 0.0), pairs);
  REQUIRE(std::abs(near0.lambda) > 1e-7);  // zero mode excluded by default
  const EigenPair incl = mode_near(cplx(0.0, 0.0), pairs, false);
  REQUIRE(std::abs(incl.lambda) <= 1e-9);
}

TEST_CASE("mode_near on the undamped problem picks the exact dispersion value") {
  const FourierGrid g = make_grid(64);
  const auto pairs = spectrum(assemble_generator(1.0, constant_field(g, 0.0), g));
  const EigenPair p = mode_near(cplx(5.0, 0.0), pairs);
  REQUIRE(p.lambda.real() == Approx(5.0).margin(1e-9));  // k = 25

  double l2 = 0.0;
  for (const auto& c : p.mode.coeffs) l2 += std::norm(c);
  REQUIRE(two_pi * l2 == Approx(1.0).epsilon(1e-10));

  // phase convention: largest-modulus entry is real positive
  int imax = 0;
  double vmax = 0.0;
  for (int i = 0; i < g.n; ++i)
    if (std::abs(p.mode.coeffs[i]) > vmax) vmax = std::abs(p.mode.coeffs[i]), imax = i;
  REQUIRE(p.mode.coeffs[imax].imag() == Approx(0.0).margin(1e-12));
  REQUIRE(p.mode.coeffs[imax].real() > 0.0);
}

TEST_CASE("spectral abscissa: undamped zero, constant damping closed form") {
  const FourierGrid g = make_grid(32);
  const auto free_pairs = spectrum(assemble_generator(1.0, constant_field(g, 0.0), g));
  REQUIRE(std::abs(spectral_abscissa(free_pairs)) < 1e-9);

  const double c = 0.8;
  const auto pairs = spectrum(assemble_generator(1.0, constant_field(g, c), g));
  double expected = -1e9;
  for (int k : g.freqs) {
    if (k == 0) continue;
    const double m = std::abs(static_cast<double>(k));
    const cplx disc = std::sqrt(cplx(4.0 * m - c * c, 0.0));
    expected = std::max(expected, (((cplx(0, -1) * c + disc) / 2.0)).imag());
    expected = std::max(expected, (((cplx(0, -1) * c - disc) / 2.0)).imag());
  }
  REQUIRE(spectral_abscissa(pairs) == Approx(expected).margin(1e-8));

  const auto damped = spectrum(assemble_generator(1.0, sample(indicator_profile(), g), g));
  REQUIRE(spectral_abscissa(damped) < -1e-4);
}

TEST_CASE("targeted shift-invert agrees with the dense spectrum at N=128") {
  const FourierGrid g = make_grid(128);
  const SampleField chi = sample(indicator_profile(), g);
  const auto dense = spectrum(assemble_generator(1.0, chi, g));
  const auto targeted = modes_near_target(1.0, chi, g, cplx(6.0, 0.0), 5);
  REQUIRE(targeted.size() == 5);
  for (std::size_t i = 0; i < targeted.size(); ++i) {
    REQUIRE(targeted[i].residual <= 1e-8);
    double best = 1e9;
    for (const auto& d : dense) best = std::min(best, std::abs(d.lambda - targeted[i].lambda));
    REQUIRE(best < 1e-8);
  }
  // the nearest-to-target eigenvalue matches the dense selection
  const EigenPair densest = mode_near(cplx(6.0, 0.0), dense);
  REQUIRE(std::abs(targeted[0].lambda - densest.lambda) < 1e-8);
}
