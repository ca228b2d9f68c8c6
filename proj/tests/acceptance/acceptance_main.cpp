// Acceptance run: one PASS/FAIL line per criterion, exit 0 only if all pass.
//
//   strat2d_acceptance [criterion ...]     (default: all of 1..12)

#include <chrono>
#include <cstdarg>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <set>
#include <string>
#include <vector>

#include "strat2d/dispersive.hpp"
#include "strat2d/estimates.hpp"
#include "strat2d/initial_data.hpp"
#include "strat2d/picard.hpp"
#include "strat2d/solver.hpp"

using namespace strat2d;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

struct Criterion {
  int id;
  const char* name;
  double time_limit;  // seconds
  std::function<Outcome()> check;
};

std::string fmt(const char* f, ...) __attribute__((format(printf, 1, 2)));
std::string fmt(const char* f, ...) {
  char buf[512];
  va_list ap;
  va_start(ap, f);
  std::vsnprintf(buf, sizeof buf, f, ap);
  va_end(ap);
  return buf;
}

Grid grid_of(int n, double l0 = 1.0) { return Grid(GridSpec{n, l0, 2.0 / 3.0}); }

double rel(const SpectralField& a, const SpectralField& b) { return (a - b).coeff_norm() / b.coeff_norm(); }

RunOptions quiet(double t_final, double interval) {
  RunOptions o;
  o.t_final = t_final;
  o.sample_interval = interval;
  o.diagnostics.dispersive_norms = false;
  return o;
}

// 1 ---------------------------------------------------------------------
Outcome partition_of_unity() {
  double worst = 0.0;
  for (int n : {64, 128, 256}) worst = std::max(worst, DyadicBank(grid_of(n)).partition_residual());
  return {worst < 1e-12, fmt("max residual %.2e over N in {64,128,256}", worst)};
}

// 2 ---------------------------------------------------------------------
Outcome bernstein() {
  const DyadicBank bank(grid_of(128));
  int violations = 0;
  double lo = 1e300, hi = 0.0;
  for (int j = bank.j_min() + 1; j < bank.j_max(); ++j) {
    const BernsteinReport r = bernstein_check(bank, j, 100, 2024 + j);
    violations += r.violations;
    lo = std::min(lo, r.min_scaled);
    hi = std::max(hi, r.max_scaled);
  }
  return {violations == 0,
          fmt("interior bands 1..3, 100 fields each: scaled ratio in [%.4f, %.4f], %d violations", lo, hi,
              violations)};
}

// 3 ---------------------------------------------------------------------
Outcome cancellation() {
  const Grid g = grid_of(64);
  const DyadicBank bank(g);
  const CounterRng root(31);
  double worst = 0.0;
  for (std::uint64_t t = 0; t < 100; ++t) {
    CounterRng rng = root.split(t);
    const PowerLawSpectrum ps{1.5, 1.0, 20.0, 1.0};
    const SpectralField w = random_scalar_field(g, ps, rng);
    const SpectralField r = random_scalar_field(g, ps, rng);
    const CancellationResult c = cancellation_check(w, r, bank);
    worst = std::max(worst, c.residual / c.scale);
  }
  return {worst < 1e-10, fmt("max relative residual %.2e over 100 pairs", worst)};
}

// 4 ---------------------------------------------------------------------
Outcome energy_conservation() {
  const Grid g = grid_of(128);
  InitialDataSpec spec;
  spec.preset = "random-spectrum";
  spec.seed = 4;
  spec.amplitude = 1.0;
  spec.xi_max = 8.0;
  const auto [w, r] = make_initial_data(g, spec);

  double identity = 0.0;
  for (double kappa : {0.0, 64.0}) {
    const SimState s = make_state(w, r, kappa);
    const Tendency d = rhs(s);
    const double e = inner_hminus1(d.d_omega, s.omega) + inner_l2(d.d_rho, s.rho);
    const double scale = std::sqrt(inner_hminus1(d.d_omega, d.d_omega) * inner_hminus1(s.omega, s.omega)) +
                         l2_norm(d.d_rho) * l2_norm(s.rho);
    identity = std::max(identity, std::abs(e) / scale);
  }

  auto drift = [&](double kappa, Scheme scheme, double* rho_drift) {
    const RunResult res = run(make_state(w, r, kappa), StepperConfig{scheme, DtPolicy::Fixed, 1e-3}, quiet(1.0, 0.1));
    double m = 0.0;
    for (const auto& d : res.diagnostics) m = std::max(m, std::abs(d.energy / res.diagnostics.front().energy - 1.0));
    if (rho_drift) *rho_drift = std::abs(l2_norm(res.final_state.rho) / l2_norm(r) - 1.0);
    return m;
  };
  double rho0 = 0.0;
  const double e0 = drift(0.0, Scheme::Rk4, &rho0);
  const double e64 = drift(64.0, Scheme::IntegratingFactor, nullptr);
  const bool pass = identity < 1e-10 && e0 < 1e-6 && e64 < 1e-6 && rho0 < 1e-6;
  return {pass, fmt("identity %.2e; E drift %.2e (k=0, rk4), %.2e (k=64, if); |rho| drift %.2e (k=0)", identity, e0,
                    e64, rho0)};
}

// 5 ---------------------------------------------------------------------
Outcome linear_propagator() {
  const Grid g = grid_of(128);
  InitialDataSpec spec;
  spec.preset = "random-spectrum";
  spec.seed = 5;
  spec.amplitude = 1e-6;
  spec.xi_max = 30.0;
  const auto [w, r] = make_initial_data(g, spec);
  const double kappa = 50.0, dt = 0.01;
  StepperConfig cfg{Scheme::IntegratingFactor, DtPolicy::Fixed, dt};
  cfg.nonlinear_on = false;
  Stepper stepper(cfg);
  SimState s = make_state(w, r, kappa);
  const Diagonal v0 = diagonalize(s.omega, s.rho);
  double worst = 0.0;
  for (int k = 1; k <= 100; ++k) {
    stepper.advance(s, dt);
    const Diagonal v = diagonalize(s.omega, s.rho);
    worst = std::max(worst, rel(v.v_plus, semigroup_apply(v0.v_plus, k * dt, kappa, 1)));
    worst = std::max(worst, rel(v.v_minus, semigroup_apply(v0.v_minus, k * dt, kappa, -1)));
  }
  return {worst < 1e-10, fmt("max relative error on V+- over 100 steps %.2e", worst)};
}

// 6 ---------------------------------------------------------------------
Outcome strichartz_scaling() {
  const Grid g = grid_of(128, 16.0);
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> ks, means;
  for (int e = 4; e <= 10; ++e) {
    const double kappa = std::ldexp(1.0, e);
    double sum = 0.0;
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      CounterRng rng = CounterRng(seed).split(0);
      const SpectralField f = wave_packet(g, rng);
      sum += strichartz_measure(f, kappa, 4.0, inf, 1.0, minimal_nodes(kappa, 1.0)).value;
    }
    ks.push_back(kappa);
    means.push_back(sum / 10.0);
  }
  const SlopeFit fit = fit_loglog(ks, means);
  return {std::abs(fit.slope + 0.25) <= 0.08,
          fmt("slope %.4f (target -0.25 +- 0.08), mean value %.4f at kappa=16 -> %.4f at kappa=1024", fit.slope,
              means.front(), means.back())};
}

// 7, 8 ------------------------------------------------------------------
struct PicardSetup {
  SpectralField w, r;
  double t_final = 0.0;
  PicardOptions options;
  std::vector<double> kappas{0.0, 16.0, 256.0};
  std::vector<PicardResult> results;
};

PicardSetup& picard_setup() {
  static PicardSetup* setup = [] {
    const Grid g = grid_of(64);
    InitialDataSpec spec;
    spec.preset = "random-spectrum";
    spec.coupling = "balanced";
    spec.seed = 7;
    spec.amplitude = 1.0;
    spec.xi_max = 3.0;
    auto [w, r] = make_initial_data(g, spec);
    auto* s = new PicardSetup{w, r, 0.0, {}, {0.0, 16.0, 256.0}, {}};
    s->options.stepper = StepperConfig{Scheme::IntegratingFactor, DtPolicy::Fixed, 2e-3};
    s->t_final = local_time(w, r, 0.0, 4.0, s->options.stepper, 1.0);
    s->options.t_final = s->t_final;
    s->options.n_max = 8;
    s->options.s = 2.0;
    s->options.q = 1.0;
    s->options.sample_stride = 5;
    for (double k : s->kappas) s->results.push_back(picard_run(w, r, k, s->options));
    return s;
  }();
  return *setup;
}

Outcome picard_uniformity() {
  const PicardSetup& s = picard_setup();
  std::vector<std::vector<IterationTrace>> runs;
  for (const auto& r : s.results) runs.push_back(r.traces);
  const UniformityReport rep = uniformity_report(runs, 1.5, 3, 0.6);
  return {rep.uniform_pass && rep.cauchy_pass,
          fmt("T=%.4f; sup A_n/A_0 = %.4f, %.4f, %.4f (kappa 0, 16, 256), spread %.4f; worst Cauchy ratio n>=3 %.4f",
              s.t_final, rep.sup_ratio[0], rep.sup_ratio[1], rep.sup_ratio[2], rep.spread, rep.worst_cauchy_ratio)};
}

Outcome picard_agreement() {
  const PicardSetup& s = picard_setup();
  const DyadicBank bank(s.w.grid());
  double worst = 0.0;
  std::string parts;
  for (std::size_t i = 0; i < s.kappas.size(); ++i) {
    const RunResult sol = run(make_state(s.w, s.r, s.kappas[i]), s.options.stepper, quiet(s.t_final, s.t_final));
    const SimState& it = s.results[i].final_iterate;
    const double d = difference_norm(it.omega - sol.final_state.omega, it.rho - sol.final_state.rho, 2.0, 1.0, bank) /
                     difference_norm(sol.final_state.omega, sol.final_state.rho, 2.0, 1.0, bank);
    worst = std::max(worst, d);
    parts += fmt("%s%.1e", i ? ", " : "", d);
  }
  return {worst < 1e-3, "relative distance of iterate 8 to the solver: " + parts + " (kappa 0, 16, 256); iterates shared with 7"};
}

// 9, 11 -----------------------------------------------------------------
struct LifespanSetup {
  std::vector<double> kappas{0.0, 4.0, 16.0, 64.0, 256.0};
  std::vector<double> t_life, z_max, c6, c6_half;
};

LifespanSetup& lifespan_setup() {
  static LifespanSetup* setup = [] {
    auto* s = new LifespanSetup;
    const Grid g = grid_of(64);
    InitialDataSpec spec;
    spec.preset = "random-spectrum";
    spec.coupling = "balanced";
    spec.seed = 3;
    spec.amplitude = 20.0;
    spec.xi_max = 4.0;
    const auto [w, r] = make_initial_data(g, spec);
    const StepperConfig cfg{Scheme::IntegratingFactor, DtPolicy::Fixed, 2e-3};
    StepperConfig half = cfg;
    half.dt = cfg.dt / 2.0;
    for (double k : s->kappas) {
      const SimState s0 = make_state(w, r, k);
      s->t_life.push_back(lifespan(s0, 2.0, 10.0, cfg, quiet(2.0, 0.05)).t_life);
      const RunResult a = run(s0, cfg, quiet(1.0, 0.05));
      const RunResult b = run(s0, half, quiet(1.0, 0.05));
      double zm = 0.0;
      for (const auto& d : a.diagnostics) zm = std::max(zm, d.z / a.diagnostics.front().z);
      s->z_max.push_back(zm);
      s->c6.push_back(gronwall_fit(a.diagnostics));
      s->c6_half.push_back(gronwall_fit(b.diagnostics));
    }
    return s;
  }();
  return *setup;
}

Outcome lifespan_direction() {
  const LifespanSetup& s = lifespan_setup();
  bool monotone = true;
  for (std::size_t i = 1; i < s.t_life.size(); ++i) monotone &= s.t_life[i] >= 0.95 * s.t_life[i - 1];
  const bool calmer = s.z_max.back() < s.z_max.front();
  std::string table;
  for (std::size_t i = 0; i < s.kappas.size(); ++i) table += fmt("%s%.4f", i ? ", " : "", s.t_life[i]);
  return {monotone && calmer, fmt("T_life = %s (kappa 0..256); max z/z0 on [0,1]: %.4f (k=0) vs %.4f (k=256)",
                                  table.c_str(), s.z_max.front(), s.z_max.back())};
}

Outcome gronwall_consistency() {
  const LifespanSetup& s = lifespan_setup();
  bool pass = true;
  double worst = 0.0;
  std::string vals;
  for (std::size_t i = 0; i < s.c6.size(); ++i) {
    const double change = std::abs(s.c6_half[i] / s.c6[i] - 1.0);
    pass &= std::isfinite(s.c6[i]) && std::isfinite(s.c6_half[i]) && s.c6[i] > 0.0 && change <= 0.2;
    worst = std::max(worst, change);
    vals += fmt("%s%.4g", i ? ", " : "", s.c6[i]);
  }
  return {pass, fmt("C6 = %s (kappa 0..256); worst change under dt/2 %.2e; runs shared with 9", vals.c_str(), worst)};
}

// 10 --------------------------------------------------------------------
Outcome estimate_battery() {
  bool pass = true;
  std::string parts;
  for (Lemma l : {Lemma::Bracket, Lemma::Lambda, Lemma::Smoothed, Lemma::Product}) {
    BatteryOptions o;
    o.trials = 100;
    o.seed = 1;
    o.s = 1.0;
    o.q = 1.0;
    const RatioReport r = l == Lemma::Product ? verify_product_rule(o) : verify_commutator_lemma(l, o);
    pass &= std::isfinite(r.max_ratio) && std::isfinite(r.max_ratio_doubled) && r.max_ratio > 0.0 &&
            r.relative_change < 0.25;
    parts += fmt("%s%s %.4f/%.4f", parts.empty() ? "" : "; ", to_string(l).c_str(), r.max_ratio,
                 r.max_ratio_doubled);
  }
  return {pass, "max ratio N=64/N=128: " + parts};
}

// 12 --------------------------------------------------------------------
Outcome duhamel() {
  const Grid g = grid_of(64);
  InitialDataSpec spec;
  spec.preset = "random-spectrum";
  spec.seed = 5;
  spec.amplitude = 0.1;
  spec.xi_max = 4.0;
  const auto [w, r] = make_initial_data(g, spec);
  const double kappa = 16.0, dt = 1e-3, t_final = 0.512;

  StepperConfig lin{Scheme::IntegratingFactor, DtPolicy::Fixed, dt};
  lin.nonlinear_on = false;
  RunOptions o = quiet(t_final, 8 * dt);
  o.keep_snapshots = true;
  const DuhamelResidual dl = duhamel_residual(run(make_state(w, r, kappa), lin, o).snapshots, kappa, true, false);
  const double linear = std::max(dl.max_plus, dl.max_minus);
  const double asym = std::abs(dl.max_plus - dl.max_minus);

  const StepperConfig nl{Scheme::IntegratingFactor, DtPolicy::Fixed, dt};
  const DuhamelResidual coarse = duhamel_residual(run(make_state(w, r, kappa), nl, o).snapshots, kappa);
  o.sample_interval = 4 * dt;
  const DuhamelResidual fine = duhamel_residual(run(make_state(w, r, kappa), nl, o).snapshots, kappa);
  const double rc = std::max(coarse.max_plus, coarse.max_minus);
  const double rf = std::max(fine.max_plus, fine.max_minus);
  const bool pass = linear < 1e-10 && asym < 1e-10 && rc < 1e-4 && rf < 1e-4 && rc / rf >= 4.0;
  return {pass, fmt("linear %.2e (|+ - -| %.1e); nonlinear %.2e at spacing %g, %.2e at %g, reduction %.1fx", linear,
                    asym, rc, 8 * dt, rf, 4 * dt, rc / rf)};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> all{
      {1, "partition of unity", 1.0, partition_of_unity},
      {2, "Bernstein band bounds", 5.0, bernstein},
      {3, "cancellation identity", 5.0, cancellation},
      {4, "energy identity and conservation", 120.0, energy_conservation},
      {5, "exact linear propagator", 30.0, linear_propagator},
      {6, "Strichartz kappa scaling", 180.0, strichartz_scaling},
      {7, "uniform-in-kappa Picard bound", 300.0, picard_uniformity},
      {8, "Picard-solver agreement", 180.0, picard_agreement},
      {9, "lifespan grows with kappa", 600.0, lifespan_direction},
      {10, "estimate battery", 300.0, estimate_battery},
      {11, "Gronwall constant consistency", 180.0, gronwall_consistency},
      {12, "Duhamel consistency", 120.0, duhamel},
  };
  std::set<int> selected;
  for (int i = 1; i < argc; ++i) selected.insert(std::atoi(argv[i]));

  int failures = 0;
  for (const auto& c : all) {
    if (!selected.empty() && !selected.count(c.id)) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = c.check();
    } catch (const std::exception& e) {
      out = {false, std::string("exception: ") + e.what()};
    }
    const double sec = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool pass = out.pass && sec < c.time_limit;
    if (!pass) ++failures;
    std::printf("criterion %2d %s  %s: %s [%.2f s, limit %.0f s]\n", c.id, pass ? "PASS" : "FAIL", c.name,
                out.detail.c_str(), sec, c.time_limit);
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
