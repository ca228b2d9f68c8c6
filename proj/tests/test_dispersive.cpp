#include <gtest/gtest.h>

#include <cmath>

#include "strat2d/dispersive.hpp"
#include "strat2d/errors.hpp"
#include "strat2d/initial_data.hpp"
#include "strat2d/random_fields.hpp"

using namespace strat2d;

namespace {

Grid grid_of(int n, double l0 = 1.0) { return Grid(GridSpec{n, l0, 2.0 / 3.0}); }

SpectralField random_field(const Grid& g, std::uint64_t seed, double xi_max = 6.0) {
  CounterRng rng(seed);
  return random_scalar_field(g, PowerLawSpectrum{2.0, g.min_frequency(), xi_max, 1.0}, rng);
}

double rel(const SpectralField& a, const SpectralField& b) { return (a - b).coeff_norm() / b.coeff_norm(); }

}  // namespace

TEST(Semigroup, UnitaryAndGroupLaw) {
  const Grid g = grid_of(64);
  const SpectralField f = random_field(g, 1);
  const SpectralField a = semigroup_apply(f, 0.3, 7.0, 1);
  EXPECT_NEAR(l2_norm(a), l2_norm(f), 1e-13);
  EXPECT_LT(rel(semigroup_apply(a, 0.2, 7.0, 1), semigroup_apply(f, 0.5, 7.0, 1)), 1e-14);
  EXPECT_LT(rel(semigroup_apply(a, 0.3, 7.0, -1), f), 1e-14);
  EXPECT_LT(rel(semigroup_apply(f, 0.0, 7.0, 1), f), 1e-15);
}

TEST(Semigroup, ModeRotation) {
  const Grid g = grid_of(32);
  SpectralField f(g);
  f.set_mode(3, 4, 0.5);
  // symbol exp(i kappa t xi1/|xi|) with xi1/|xi| = 3/5
  const SpectralField a = semigroup_apply(f, 1.0, 5.0, 1);
  EXPECT_NEAR(std::abs(a.mode(3, 4) - 0.5 * std::exp(Complex(0.0, 3.0))), 0.0, 1e-15);
}

TEST(Semigroup, RejectsMean) {
  const Grid g = grid_of(32);
  SpectralField f(g);
  f[0] = 1.0;
  EXPECT_THROW(semigroup_apply(f, 1.0, 1.0, 1), NonzeroMean);
  EXPECT_THROW(semigroup_apply(SpectralField(g), 1.0, 1.0, 0), InvalidArgument);
}

TEST(Diagonal, ZeroDensity) {
  const Grid g = grid_of(32);
  const SpectralField w = random_field(g, 2);
  const Diagonal d = diagonalize(w, SpectralField(g));
  EXPECT_LT(rel(d.v_plus, w), 1e-15);
  EXPECT_LT(rel(d.v_minus, w), 1e-15);
}

TEST(Diagonal, RoundTrip) {
  const Grid g = grid_of(32);
  const SpectralField w = random_field(g, 3);
  SpectralField r = random_field(g, 4);
  r[0] = 0.7;
  const Diagonal d = diagonalize(w, r);
  const auto [w2, r2] = undiagonalize(d.v_plus, d.v_minus);
  r[0] = 0.0;
  EXPECT_LT(rel(w2, w), 1e-12);
  EXPECT_LT(rel(r2, r), 1e-12);
}

TEST(Diagonal, PropagatorAgreesWithSemigroup) {
  const Grid g = grid_of(64);
  SpectralField w = random_field(g, 5), r = random_field(g, 6);
  const Diagonal d0 = diagonalize(w, r);
  propagate_linear(w, r, 12.0, 10.0);
  const Diagonal d = diagonalize(w, r);
  EXPECT_LT(rel(d.v_plus, semigroup_apply(d0.v_plus, 10.0, 12.0, 1)), 1e-10);
  EXPECT_LT(rel(d.v_minus, semigroup_apply(d0.v_minus, 10.0, 12.0, -1)), 1e-10);
}

TEST(GOperator, CutoffOnly) {
  const Grid g = grid_of(64, 8.0);
  const SpectralField f = random_field(g, 7, 2.5);
  const RadialCutoff c = default_cutoff();
  EXPECT_LT(rel(g_operator(f, 0.0, 1), apply_radial(f, c)), 1e-15);

  SpectralField high(g);
  high.set_mode(20, 0, 0.5);  // |xi| = 2.5, outside supp psi_0
  EXPECT_EQ(g_operator(high, 0.4, 1).coeff_norm(), 0.0);
}

TEST(Strichartz, Admissibility) {
  const double inf = std::numeric_limits<double>::infinity();
  EXPECT_TRUE(admissible(4.0, inf));
  EXPECT_TRUE(admissible(inf, 2.0));
  EXPECT_TRUE(admissible(8.0, 4.0));
  EXPECT_FALSE(admissible(4.0, 2.0));
  EXPECT_FALSE(admissible(2.0, inf));
  EXPECT_EQ(minimal_nodes(16.0, 1.0), 65);
  EXPECT_EQ(minimal_nodes(0.0, 1.0), 2);
}

TEST(Strichartz, RejectsBadInput) {
  const Grid g = grid_of(64, 8.0);
  CounterRng rng(1);
  const SpectralField f = wave_packet(g, rng);
  EXPECT_THROW(strichartz_measure(f, 16.0, 2.0, 2.0, 1.0, 100), InvalidArgument);
  EXPECT_THROW(strichartz_measure(f, 16.0, 4.0, std::numeric_limits<double>::infinity(), 1.0, 10), InvalidArgument);
}

TEST(Strichartz, ZeroKappaIsConstantInTime) {
  const Grid g = grid_of(64, 8.0);
  CounterRng rng(2);
  const SpectralField f = wave_packet(g, rng);
  const StrichartzSample s = strichartz_measure(f, 0.0, 4.0, std::numeric_limits<double>::infinity(), 2.0, 5);
  EXPECT_NEAR(s.value, std::pow(2.0, 0.25) * linf_norm(apply_radial(f, default_cutoff())), 1e-13);
}

TEST(Strichartz, NodeRefinement) {
  const Grid g = grid_of(64, 8.0);
  CounterRng rng(3);
  const SpectralField f = wave_packet(g, rng);
  const double inf = std::numeric_limits<double>::infinity();
  const int n0 = minimal_nodes(64.0, 1.0);
  const double a = strichartz_measure(f, 64.0, 4.0, inf, 1.0, n0).value;
  const double b = strichartz_measure(f, 64.0, 4.0, inf, 1.0, 2 * n0 - 1).value;
  EXPECT_LT(std::abs(a - b) / b, 0.005);
}

TEST(Strichartz, BesovSingleBandReduction) {
  const Grid g = grid_of(64, 4.0);
  const DyadicBank bank(g);
  SpectralField f(g);
  f.set_mode(8, 4, Complex(0.3, 0.1));  // |xi| = sqrt(5) in the plateau of band 1
  const double inf = std::numeric_limits<double>::infinity();
  const auto one = [](double) { return 1.0; };
  const double plain = strichartz_measure(f, 20.0, 4.0, inf, 1.0, 81, 1, one).value;
  const double besov = besov_strichartz_measure(f, 20.0, 4.0, inf, inf, 0.5, 1.0, 81, bank).value;
  EXPECT_NEAR(besov, std::pow(2.0, 0.5) * plain, 1e-12 * besov);
  EXPECT_THROW(besov_strichartz_measure(f, 20.0, 4.0, inf, 2.0, 0.5, 1.0, 81, bank), InvalidArgument);
}

TEST(Strichartz, WavePacketShape) {
  const Grid g = grid_of(64, 8.0);
  CounterRng rng(4);
  const SpectralField f = wave_packet(g, rng);
  EXPECT_NEAR(l2_norm(f), 1.0, 1e-13);
  EXPECT_LT(hermitian_defect(f), 1e-15);
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (g.abs_xi()[i] >= 1.75) {
      EXPECT_EQ(f[i], Complex(0.0));
    }
  }
}

TEST(Fit, ExactPowerLaw) {
  const std::vector<double> x{1, 2, 4, 8, 16};
  std::vector<double> y;
  for (double v : x) y.push_back(3.0 * std::pow(v, -0.25));
  const SlopeFit f = fit_loglog(x, y);
  EXPECT_NEAR(f.slope, -0.25, 1e-14);
  EXPECT_NEAR(std::exp(f.intercept), 3.0, 1e-13);
  EXPECT_EQ(f.points, 5);
  EXPECT_THROW(fit_loglog({1.0}, {1.0}), InvalidArgument);
}

TEST(Duhamel, LinearRunIsExact) {
  const Grid g = grid_of(64);
  InitialDataSpec spec;
  spec.preset = "random-spectrum";
  spec.seed = 2;
  auto [w, r] = make_initial_data(g, spec);
  StepperConfig cfg{Scheme::IntegratingFactor, DtPolicy::Fixed, 0.01};
  cfg.nonlinear_on = false;
  RunOptions o;
  o.t_final = 1.0;
  o.keep_snapshots = true;
  o.diagnostics.dispersive_norms = false;
  const RunResult res = run(make_state(w, r, 30.0), cfg, o);
  const DuhamelResidual d = duhamel_residual(res.snapshots, 30.0, true, false);
  EXPECT_LT(d.max_plus, 1e-10);
  EXPECT_LT(d.max_minus, 1e-10);
  EXPECT_NEAR(d.max_plus, d.max_minus, 1e-10);
}

TEST(Duhamel, SpacingGuard) {
  const Grid g = grid_of(32);
  InitialDataSpec spec;
  auto [w, r] = make_initial_data(g, spec);
  std::vector<SimState> snaps;
  for (int i = 0; i < 3; ++i) snaps.push_back(make_state(w, r, 10.0, 0.1 * i));
  EXPECT_THROW(duhamel_residual(snaps, 10.0), InvalidArgument);
  snaps[2].t = 0.25;
  EXPECT_THROW(duhamel_residual(snaps, 1.0), InvalidArgument);
}

TEST(Kappa0, Formula) {
  const Kappa0Result r = kappa0_estimate(Kappa0Inputs{1.0, 1.0, 1.0, 1.0, 4.0});
  EXPECT_NEAR(r.kappa0, std::pow(2.0 * (1.0 + std::exp(1.0)), 4.0), 1e-9);
  EXPECT_FALSE(r.overflow);
  // z = 0: kappa0 = 2^gamma
  EXPECT_NEAR(kappa0_estimate(Kappa0Inputs{1.0, 0.0, 1.0, 1.0, 4.0}).kappa0, 16.0, 1e-12);
  // T^{1-1/gamma} enters the exponent: T = 16, gamma = 4 gives 8.
  const double e = 2.0 * (1.0 + 16.0 * 0.5 * std::exp(0.5 * 8.0));
  EXPECT_NEAR(kappa0_estimate(Kappa0Inputs{16.0, 0.5, 1.0, 1.0, 4.0}).kappa0 / std::pow(e, 4.0), 1.0, 1e-12);
}

TEST(Kappa0, Overflow) {
  const Kappa0Result r = kappa0_estimate(Kappa0Inputs{10.0, 50.0, 3.0, 3.0, 4.0});
  EXPECT_TRUE(r.overflow);
  EXPECT_TRUE(std::isinf(r.kappa0));
  EXPECT_THROW(kappa0_estimate(Kappa0Inputs{1.0, 1.0, -1.0, 1.0, 4.0}), InvalidArgument);
}
