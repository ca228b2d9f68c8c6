#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "strat2d/errors.hpp"
#include "strat2d/random_fields.hpp"
#include "strat2d/spectral.hpp"

using namespace strat2d;

namespace {

constexpr double kPi = std::numbers::pi;

Grid grid_of(int n, double l0 = 1.0) { return Grid(GridSpec{n, l0, 2.0 / 3.0}); }

std::vector<double> random_samples(const Grid& g, std::uint64_t seed) {
  CounterRng rng(seed);
  std::vector<double> v(g.size());
  for (auto& x : v) x = rng.uniform(-1.0, 1.0);
  return v;
}

// c_k = n^-2 sum_j f_j exp(-2 pi i k . j / n), summed term by term.
std::vector<Complex> direct_forward(const std::vector<double>& f, int n) {
  std::vector<Complex> c(f.size());
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < n; ++b) {
      Complex acc = 0.0;
      for (int i1 = 0; i1 < n; ++i1) {
        for (int i2 = 0; i2 < n; ++i2) {
          const double ph = -2.0 * kPi * (a * i1 + b * i2) / n;
          acc += f[i1 * n + i2] * Complex(std::cos(ph), std::sin(ph));
        }
      }
      c[a * n + b] = acc / static_cast<double>(n * n);
    }
  }
  return c;
}

std::vector<double> direct_inverse(const SpectralField& f) {
  const int n = f.grid().n();
  std::vector<double> out(f.grid().size());
  for (int i1 = 0; i1 < n; ++i1) {
    for (int i2 = 0; i2 < n; ++i2) {
      Complex acc = 0.0;
      for (int a = 0; a < n; ++a) {
        for (int b = 0; b < n; ++b) {
          const double ph = 2.0 * kPi * (a * i1 + b * i2) / n;
          acc += f[a * n + b] * Complex(std::cos(ph), std::sin(ph));
        }
      }
      out[i1 * n + i2] = acc.real();
    }
  }
  return out;
}

SpectralField cos_mode(const Grid& g, int k1, int k2, double amp = 1.0) {
  SpectralField f(g);
  f.set_mode(k1, k2, amp / 2.0);
  return f;
}

double max_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

}  // namespace

TEST(Transform, ForwardMatchesDirectSum) {
  const Grid g = grid_of(16);
  const auto samples = random_samples(g, 3);
  const SpectralField f = forward_transform(g, samples);
  const auto ref = direct_forward(samples, 16);
  for (std::size_t i = 0; i < ref.size(); ++i) EXPECT_LT(std::abs(f[i] - ref[i]), 1e-10);
}

TEST(Transform, InverseMatchesDirectSum) {
  const Grid g = grid_of(16);
  CounterRng rng(8);
  SpectralField f(g);
  for (int k1 = -7; k1 <= 7; ++k1) {
    for (int k2 = 0; k2 <= 7; ++k2) {
      if (k2 == 0 && k1 < 0) continue;
      f.set_mode(k1, k2, Complex(rng.normal(), rng.normal()));
    }
  }
  f[0] = rng.normal();
  EXPECT_LT(max_diff(inverse_transform(f), direct_inverse(f)), 1e-10);
}

TEST(Transform, ConstantAndCosine) {
  const Grid g = grid_of(16);
  SpectralField c(g);
  c[0] = 2.5;
  for (double v : inverse_transform(c)) EXPECT_NEAR(v, 2.5, 1e-14);

  const auto p = to_physical(cos_mode(g, 0, 2));
  for (int i1 = 0; i1 < 16; ++i1) {
    for (int i2 = 0; i2 < 16; ++i2) {
      EXPECT_NEAR(p.values[g.flat(i1, i2)], std::cos(2.0 * g.coordinate(i2)), 1e-14);
    }
  }
}

TEST(Transform, CosineHasHalfCoefficients) {
  const Grid g = grid_of(32);
  const SpectralField f = forward_transform(sample(g, [](double x1, double) { return std::cos(x1); }));
  EXPECT_NEAR(f.mode(1, 0).real(), 0.5, 1e-15);
  EXPECT_NEAR(f.mode(-1, 0).real(), 0.5, 1e-15);
}

TEST(Transform, RejectsNonHermitianCoefficients) {
  const Grid g = grid_of(16);
  SpectralField f(g);
  f[g.flat(1, 0)] = 1.0;
  EXPECT_THROW(inverse_transform(f), SymmetryViolation);
}

TEST(Operators, DerivativeOfCosine) {
  const Grid g = grid_of(32);
  const SpectralField f = cos_mode(g, 1, 0);
  const auto d1 = to_physical(derivative(f, Axis::X1));
  const auto d2 = to_physical(derivative(f, Axis::X2));
  for (int i1 = 0; i1 < 32; ++i1) {
    for (int i2 = 0; i2 < 32; ++i2) {
      EXPECT_NEAR(d1.values[g.flat(i1, i2)], -std::sin(g.coordinate(i1)), 1e-13);
      EXPECT_NEAR(d2.values[g.flat(i1, i2)], 0.0, 1e-14);
    }
  }
}

TEST(Operators, DerivativePlancherelBound) {
  const Grid g = grid_of(64);
  CounterRng rng(5);
  const SpectralField f = random_scalar_field(g, PowerLawSpectrum{2.0, 1.0, 9.0, 1.0}, rng);
  double max_xi1 = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (std::abs(f[i]) > 0.0) max_xi1 = std::max(max_xi1, std::abs(g.xi1()[i]));
  }
  EXPECT_LE(l2_norm(derivative(f, Axis::X1)), max_xi1 * l2_norm(f) * (1 + 1e-14));

  const SpectralField m = cos_mode(g, 5, 3);
  EXPECT_NEAR(l2_norm(derivative(m, Axis::X1)), 5.0 * l2_norm(m), 1e-12);
}

TEST(Operators, LambdaHalfScalesModeNorm) {
  const Grid g = grid_of(32);
  const SpectralField f = cos_mode(g, 0, 4);
  EXPECT_NEAR(l2_norm(lambda_power(f, 0.5)), 2.0 * l2_norm(f), 1e-12);
}

TEST(Operators, InverseLaplacian) {
  const Grid g = grid_of(32);
  const SpectralField f = cos_mode(g, 0, 2);
  const SpectralField expect = 0.25 * f;
  EXPECT_LT((inverse_laplacian(f) - expect).coeff_norm(), 1e-15);

  CounterRng rng(2);
  const SpectralField r = random_scalar_field(g, PowerLawSpectrum{1.0, 1.0, 10.0, 1.0}, rng);
  EXPECT_LT((neg_laplacian(inverse_laplacian(r)) - r).coeff_norm() / r.coeff_norm(), 1e-12);

  SpectralField c = r;
  c[0] = 1.0;
  EXPECT_THROW(inverse_laplacian(c), NonzeroMean);
}

TEST(Operators, BiotSavartOfShear) {
  const Grid g = grid_of(32);
  const VectorField u = biot_savart(cos_mode(g, 0, 1));
  const auto u1 = to_physical(u.u1);
  const auto u2 = to_physical(u.u2);
  for (int i1 = 0; i1 < 32; ++i1) {
    for (int i2 = 0; i2 < 32; ++i2) {
      EXPECT_NEAR(u1.values[g.flat(i1, i2)], std::sin(g.coordinate(i2)), 1e-14);
      EXPECT_NEAR(u2.values[g.flat(i1, i2)], 0.0, 1e-14);
    }
  }
}

TEST(Operators, BiotSavartPlancherel) {
  const Grid g = grid_of(64, 1.5);
  for (std::uint64_t s = 0; s < 5; ++s) {
    CounterRng rng(s);
    const SpectralField w = random_scalar_field(g, PowerLawSpectrum{1.5, 0.7, 12.0, 1.0}, rng);
    const VectorField u = biot_savart(w);
    EXPECT_NEAR(l2_norm(u) / std::sqrt(inner_hminus1(w, w)), 1.0, 1e-12);
    EXPECT_LT(divergence(u).coeff_norm(), 1e-14);
  }
}

TEST(Operators, RieszSymbol) {
  const Grid g = grid_of(32);
  const SpectralField f = cos_mode(g, 3, 4);
  // R1 cos(3x1 + 4x2) = -(3/5) sin(3x1 + 4x2)
  const auto r = to_physical(riesz1(f));
  for (int i1 = 0; i1 < 32; i1 += 3) {
    for (int i2 = 0; i2 < 32; i2 += 5) {
      const double ph = 3 * g.coordinate(i1) + 4 * g.coordinate(i2);
      EXPECT_NEAR(r.values[g.flat(i1, i2)], -0.6 * std::sin(ph), 1e-14);
    }
  }
}

TEST(Dealias, Masks) {
  const Grid g = grid_of(48);
  const SpectralField low = cos_mode(g, 10, -12);
  EXPECT_LT((dealias(low) - low).coeff_norm(), 1e-300);
  EXPECT_TRUE(is_dealiased(low));
  const SpectralField high = cos_mode(g, 0, 20);
  EXPECT_EQ(dealias(high).coeff_norm(), 0.0);
  EXPECT_FALSE(is_dealiased(high));
}

TEST(Dealias, ProductOfLowFieldsIsExact) {
  // Supports below n/3 per axis: the product stays below 2n/3, so the
  // pseudospectral product equals the exact convolution.
  const Grid g = grid_of(16);
  const SpectralField f = cos_mode(g, 2, 1) + cos_mode(g, 0, 3, 0.5);
  const SpectralField h = cos_mode(g, 1, -2);
  const SpectralField p = product(f, h);
  EXPECT_LT((dealias(p) - p).coeff_norm(), 1e-15);
  // cos a cos b = (cos(a+b) + cos(a-b)) / 2
  const SpectralField expect = 0.5 * (cos_mode(g, 3, -1) + cos_mode(g, 1, 3)) +
                               0.25 * (cos_mode(g, 1, 1) + cos_mode(g, -1, 5));
  EXPECT_LT((p - expect).coeff_norm(), 1e-15);
}

TEST(Norms, LinfAndLp) {
  const Grid g = grid_of(64);
  const SpectralField f = cos_mode(g, 1, 0);
  EXPECT_NEAR(linf_norm(f), 1.0, 1e-15);
  EXPECT_NEAR(l2_norm(f), std::sqrt(2.0) * kPi, 1e-13);
  // int cos^4 over the torus = 2 pi * 3 pi / 4; the grid rule is exact.
  EXPECT_NEAR(lp_norm(f, 4.0), std::pow(1.5 * kPi * kPi, 0.25), 1e-13);
}

TEST(Norms, L1AgainstClosedForm) {
  // f = exp(2 sin x1) cos^2 x2 + 0.1 > 0, so ||f||_1 = int f
  //   = 2 pi I0(2) * pi + 0.1 (2 pi)^2.
  const double exact = 2.0 * kPi * std::cyl_bessel_i(0.0, 2.0) * kPi + 0.4 * kPi * kPi;
  for (int n : {32, 64}) {
    const Grid g = grid_of(n);
    const SpectralField f = forward_transform(sample(g, [](double x1, double x2) {
      return std::exp(2.0 * std::sin(x1)) * std::cos(x2) * std::cos(x2) + 0.1;
    }));
    EXPECT_NEAR(lp_norm(f, 1.0) / exact, 1.0, 1e-6) << "n=" << n;
  }
}

TEST(Norms, HMinusOneInnerProduct) {
  const Grid g = grid_of(64);
  CounterRng rng(4);
  const SpectralField f = random_scalar_field(g, PowerLawSpectrum{}, rng);
  const SpectralField h = random_scalar_field(g, PowerLawSpectrum{}, rng);
  const double a = inner_hminus1(f, h);
  const double b = inner_l2(inverse_laplacian(f), h);
  EXPECT_NEAR(a, b, 1e-12 * std::max(1.0, std::abs(a)));
}

TEST(Norms, GradientOfLinearProfile) {
  const Grid g = grid_of(32);
  // grad cos(x1) = (-sin x1, 0), max magnitude 1.
  EXPECT_NEAR(gradient_linf(cos_mode(g, 1, 0)), 1.0, 1e-3);
}

TEST(Grid, Validation) {
  EXPECT_THROW(validate(GridSpec{7, 1.0, 2.0 / 3.0}), InvalidArgument);
  EXPECT_THROW(validate(GridSpec{64, -1.0, 2.0 / 3.0}), InvalidArgument);
  EXPECT_THROW(validate(GridSpec{64, 1.0, 1.5}), InvalidArgument);
  EXPECT_NO_THROW(validate(GridSpec{64, 2.0, 2.0 / 3.0}));
}

TEST(Grid, GeometryWithBoxScale) {
  const Grid g = grid_of(32, 2.0);
  EXPECT_NEAR(g.spacing(), 2.0 * kPi * 2.0 / 32, 1e-15);
  EXPECT_NEAR(g.domain_area(), std::pow(4.0 * kPi, 2), 1e-12);
  EXPECT_DOUBLE_EQ(g.min_frequency(), 0.5);
  const std::size_t i = g.flat(g.index_of(-3), 4);
  EXPECT_DOUBLE_EQ(g.xi1()[i], -1.5);
  EXPECT_DOUBLE_EQ(g.xi2()[i], 2.0);
  EXPECT_EQ(g.conjugate_index(i), g.flat(3, g.index_of(-4)));
}
