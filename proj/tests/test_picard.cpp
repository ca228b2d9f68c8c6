#include <gtest/gtest.h>

#include <cmath>

#include "strat2d/dispersive.hpp"
#include "strat2d/errors.hpp"
#include "strat2d/initial_data.hpp"
#include "strat2d/picard.hpp"

using namespace strat2d;

namespace {

Grid grid_of(int n) { return Grid(GridSpec{n, 1.0, 2.0 / 3.0}); }

std::pair<SpectralField, SpectralField> data(const Grid& g, std::uint64_t seed, double xi_max = 6.0) {
  InitialDataSpec spec;
  spec.preset = "random-spectrum";
  spec.seed = seed;
  spec.xi_max = xi_max;
  return make_initial_data(g, spec);
}

double rel(const SpectralField& a, const SpectralField& b) { return (a - b).coeff_norm() / b.coeff_norm(); }

}  // namespace

TEST(Frozen, CubicInTimeIsInterpolatedExactly) {
  const Grid g = grid_of(32);
  const SpectralField w = data(g, 1).first;
  auto p = [](double t) { return 1.0 + 0.5 * t - 2.0 * t * t + 0.7 * t * t * t; };
  std::vector<double> times;
  std::vector<SpectralField> ws;
  for (int i = 0; i <= 6; ++i) {
    times.push_back(0.1 * i);
    ws.push_back(p(0.1 * i) * w);
  }
  const FrozenVelocity f = FrozenVelocity::from_vorticity(times, ws);
  const VectorField u = biot_savart(w);
  for (double t : {0.0, 0.03, 0.25, 0.37, 0.59, 0.6}) {
    const VectorField ut = f.at(t);
    EXPECT_LT(rel(ut.u1, p(t) * u.u1), 1e-12) << "t=" << t;
    EXPECT_LT(rel(ut.u2, p(t) * u.u2), 1e-12) << "t=" << t;
  }
  EXPECT_THROW(f.at(0.7), OutOfRange);
  EXPECT_THROW(f.at(-0.01), OutOfRange);
}

TEST(Frozen, Validation) {
  const Grid g = grid_of(32);
  const SpectralField w = data(g, 1).first;
  EXPECT_THROW(FrozenVelocity::from_vorticity({0.0, 0.0}, {w, w}), InvalidArgument);
  EXPECT_THROW(FrozenVelocity::from_vorticity({0.0}, {w, w}), InvalidArgument);
  const VectorField u = biot_savart(w);
  EXPECT_THROW(FrozenVelocity::constant(u, 1.0, 0.0), InvalidArgument);
}

TEST(Mollify, PlateauAndCutoff) {
  const Grid g = grid_of(64);
  const DyadicBank b(g);
  SpectralField low(g), high(g);
  low.set_mode(1, 2, 0.5);    // |xi| < 5/4 2^2
  high.set_mode(0, 10, 0.5);  // |xi| > 7/4 2^2
  const auto [ml, mr] = mollify_initial(low, high, 0, b);
  EXPECT_LT(rel(ml, low), 1e-15);
  EXPECT_EQ(mr.coeff_norm(), 0.0);
  EXPECT_THROW(mollify_initial(low, high, -1, b), InvalidArgument);
}

TEST(Mollify, NearContraction) {
  const Grid g = grid_of(64);
  const DyadicBank b(g);
  for (std::uint64_t s = 0; s < 10; ++s) {
    const auto [w, r] = data(g, s, 16.0);
    for (int n = 0; n < 3; ++n) {
      const SpectralField m = mollify_initial(w, r, n, b).first;
      const double before = besov_norm(w, BesovSpec{1.0, 2.0, 1.0, true}, b) + hminus1_norm(w);
      const double after = besov_norm(m, BesovSpec{1.0, 2.0, 1.0, true}, b) + hminus1_norm(m);
      EXPECT_LE(after, 1.01 * before);
    }
  }
}

TEST(LinearSolve, ZeroVelocityMatchesSemigroup) {
  const Grid g = grid_of(64);
  const auto [w, r] = data(g, 3);
  const SimState s0 = make_state(w, r, 25.0);
  const FrozenVelocity zero = FrozenVelocity::constant(VectorField{SpectralField(g), SpectralField(g)}, 0.0, 1.0);
  const auto traj = linear_solve(zero, s0, 1.0, StepperConfig{Scheme::IntegratingFactor, DtPolicy::Fixed, 0.01});
  ASSERT_EQ(traj.size(), 101u);
  const Diagonal d0 = diagonalize(w, r);
  const Diagonal d = diagonalize(traj.back().omega, traj.back().rho);
  EXPECT_LT(rel(d.v_plus, semigroup_apply(d0.v_plus, 1.0, 25.0, 1)), 1e-10);
  EXPECT_LT(rel(d.v_minus, semigroup_apply(d0.v_minus, 1.0, 25.0, -1)), 1e-10);
}

TEST(LinearSolve, ShearTransportConservesDensity) {
  const Grid g = grid_of(64);
  const auto [w, r] = data(g, 4);
  SpectralField shear(g);
  shear.set_mode(0, 1, 0.5);
  const FrozenVelocity u = FrozenVelocity::constant(biot_savart(shear), 0.0, 1.0);
  const auto traj = linear_solve(u, make_state(w, r, 0.0), 1.0, StepperConfig{Scheme::Rk4, DtPolicy::Fixed, 1e-3});
  EXPECT_NEAR(l2_norm(traj.back().rho) / l2_norm(r), 1.0, 1e-8);
}

TEST(LinearSolve, OwnVelocityEnergyIdentity) {
  const Grid g = grid_of(64);
  const auto [w, r] = data(g, 5);
  const SimState s = make_state(w, r, 9.0);
  const Tendency frozen = rhs_with_transport(s.omega, s.rho, s.kappa, biot_savart(s.omega));
  const Tendency own = rhs(s);
  EXPECT_LT(rel(frozen.d_omega, own.d_omega), 1e-14);
  const double e = inner_hminus1(frozen.d_omega, s.omega) + inner_l2(frozen.d_rho, s.rho);
  EXPECT_LT(std::abs(e), 1e-10 * (std::sqrt(inner_hminus1(frozen.d_omega, frozen.d_omega) * energy(s)) +
                                  l2_norm(frozen.d_rho) * l2_norm(s.rho)));
}

TEST(LinearSolve, CoverageChecked) {
  const Grid g = grid_of(32);
  const auto [w, r] = data(g, 1);
  const FrozenVelocity u = FrozenVelocity::constant(biot_savart(w), 0.0, 0.5);
  EXPECT_THROW(linear_solve(u, make_state(w, r, 0.0), 1.0, StepperConfig{}), OutOfRange);
}

TEST(Picard, ZeroData) {
  const Grid g = grid_of(32);
  PicardOptions o;
  o.t_final = 0.05;
  o.n_max = 3;
  const PicardResult res = picard_run(SpectralField(g), SpectralField(g), 16.0, o);
  ASSERT_EQ(res.traces.size(), 4u);
  for (const auto& tr : res.traces) {
    EXPECT_EQ(tr.sup_a(), 0.0);
    EXPECT_EQ(tr.sup_a_bar(), 0.0);
  }
  const UniformityReport rep = uniformity_report({res.traces});
  EXPECT_EQ(rep.spread, 1.0);
  EXPECT_EQ(rep.sup_ratio.front(), 0.0);
}

TEST(Picard, IteratesContractAndReachSolver) {
  const Grid g = grid_of(32);
  const auto [w, r] = data(g, 2, 4.0);
  PicardOptions o;
  o.t_final = 0.2;
  o.n_max = 6;
  o.stepper.dt = 5e-3;
  const PicardResult res = picard_run(w, r, 16.0, o);
  ASSERT_EQ(res.traces.size(), 7u);
  EXPECT_TRUE(res.traces[0].a_bar.empty());
  for (int n = 3; n < 6; ++n) {
    EXPECT_LE(res.traces[n + 1].sup_a_bar(), 0.6 * res.traces[n].sup_a_bar()) << "n=" << n;
  }
  EXPECT_LT(fit_decay_rate(res.traces, 3), 0.6);

  RunOptions ro;
  ro.t_final = 0.2;
  ro.diagnostics.dispersive_norms = false;
  const RunResult sol = run(make_state(w, r, 16.0), o.stepper, ro);
  const DyadicBank b(g);
  const double d = difference_norm(res.final_iterate.omega - sol.final_state.omega,
                                   res.final_iterate.rho - sol.final_state.rho, 2.0, 1.0, b);
  const double scale = difference_norm(sol.final_state.omega, sol.final_state.rho, 2.0, 1.0, b);
  EXPECT_LT(d / scale, 1e-3);
}

TEST(Picard, Validation) {
  const Grid g = grid_of(32);
  PicardOptions o;
  o.n_max = 0;
  EXPECT_THROW(picard_run(SpectralField(g), SpectralField(g), 0.0, o), InvalidArgument);
  o.n_max = 2;
  o.stepper.dt_policy = DtPolicy::Cfl;
  EXPECT_THROW(picard_run(SpectralField(g), SpectralField(g), 0.0, o), InvalidArgument);
  EXPECT_THROW(uniformity_report({}), InvalidArgument);
}

TEST(Picard, DecayRateOfGeometricSequence) {
  std::vector<IterationTrace> traces(6);
  for (int n = 0; n < 6; ++n) {
    traces[n].n = n;
    traces[n].t = {0.0};
    traces[n].a = {1.0};
    if (n > 0) traces[n].a_bar = {3.0 * std::pow(0.25, n)};
  }
  EXPECT_NEAR(fit_decay_rate(traces, 1), 0.25, 1e-13);
}

TEST(Picard, SpreadAcrossRuns) {
  auto trace = [](double kappa, double peak) {
    IterationTrace t;
    t.kappa = kappa;
    t.a0 = 2.0;
    t.t = {0.0, 0.1};
    t.a = {2.0, peak};
    return std::vector<IterationTrace>{t};
  };
  const UniformityReport r = uniformity_report({trace(0.0, 3.0), trace(16.0, 4.0)}, 1.5);
  EXPECT_NEAR(r.sup_ratio[0], 1.5, 1e-15);
  EXPECT_NEAR(r.sup_ratio[1], 2.0, 1e-15);
  EXPECT_NEAR(r.spread, 4.0 / 3.0, 1e-15);
  EXPECT_TRUE(r.uniform_pass);
}
