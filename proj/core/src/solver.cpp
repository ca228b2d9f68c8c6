#include "strat2d/solver.hpp"

#include <algorithm>
#include <cmath>

#include "strat2d/errors.hpp"

namespace strat2d {

namespace {

struct Pair {
  SpectralField w;
  SpectralField r;
};

Pair combine(const Pair& base, double a, const Pair& inc) {
  Pair out = base;
  out.w.axpy(a, inc.w);
  out.r.axpy(a, inc.r);
  return out;
}

bool all_finite(const SpectralField& f) { return std::isfinite(f.coeff_norm()); }

// Advection terms -(u . grad) omega, -(u . grad) rho.
Pair advection(const SpectralField& omega, const SpectralField& rho, const VectorField& u, bool dealias_on) {
  Pair out{SpectralField(omega.grid()), SpectralField(omega.grid())};
  detail::advect_pair(u, omega, rho, out.w, out.r, dealias_on);
  out.w *= -1.0;
  out.r *= -1.0;
  out.w[0] = 0.0;
  return out;
}

Pair full_tendency(const SpectralField& omega, const SpectralField& rho, double kappa, const VectorField* transport,
                   const StepperConfig& config) {
  const VectorField own = biot_savart(omega);
  Pair out = config.nonlinear_on ? advection(omega, rho, transport ? *transport : own, config.dealias_on)
                                 : Pair{SpectralField(omega.grid()), SpectralField(omega.grid())};
  if (kappa != 0.0) {
    const auto xi1 = omega.grid().xi1();
    const auto r = rho.coeffs();
    const auto u2 = own.u2.coeffs();
    auto dw = out.w.coeffs();
    auto dr = out.r.coeffs();
    for (std::size_t i = 1; i < dw.size(); ++i) {
      dw[i] += kappa * Complex{0.0, xi1[i]} * r[i];
      dr[i] += kappa * u2[i];
    }
  }
  out.w[0] = 0.0;
  return out;
}

VectorField stage_transport(const TransportFn* transport, double t, const SpectralField& omega) {
  return (*transport)(t, omega);
}

}  // namespace

SimState make_state(SpectralField omega, SpectralField rho, double kappa, double t) {
  require_same_grid(omega, rho, "make_state");
  require_mean_zero(omega, "make_state(omega)");
  omega[0] = 0.0;
  dealias_in_place(omega);
  dealias_in_place(rho);
  return SimState{std::move(omega), std::move(rho), t, kappa};
}

Tendency rhs(const SimState& state, const StepperConfig& config) {
  Pair p = full_tendency(state.omega, state.rho, state.kappa, nullptr, config);
  return Tendency{std::move(p.w), std::move(p.r)};
}

Tendency rhs_with_transport(const SpectralField& omega, const SpectralField& rho, double kappa,
                            const VectorField& transport, const StepperConfig& config) {
  Pair p = full_tendency(omega, rho, kappa, &transport, config);
  return Tendency{std::move(p.w), std::move(p.r)};
}

void propagate_linear(SpectralField& omega, SpectralField& rho, double kappa, double h) {
  require_same_grid(omega, rho, "propagate_linear");
  const auto xi1 = omega.grid().xi1();
  const auto a = omega.grid().abs_xi();
  auto w = omega.coeffs();
  auto r = rho.coeffs();
  for (std::size_t i = 1; i < w.size(); ++i) {
    const double theta = kappa * h * xi1[i] / a[i];
    const double c = std::cos(theta);
    const double s = std::sin(theta);
    const Complex wi = w[i];
    const Complex ri = r[i];
    w[i] = c * wi + Complex{0.0, s * a[i]} * ri;
    r[i] = Complex{0.0, s / a[i]} * wi + c * ri;
  }
}

double select_dt(const SimState& state, const StepperConfig& config) {
  if (!(config.dt > 0.0)) throw InvalidArgument("StepperConfig: dt must be positive");
  if (config.dt_policy == DtPolicy::Fixed) return config.dt;
  double dt = config.dt;
  const VectorField u = biot_savart(state.omega);
  const auto u1 = inverse_transform(u.u1);
  const auto u2 = inverse_transform(u.u2);
  double umax = 0.0;
  for (std::size_t i = 0; i < u1.size(); ++i) umax = std::max(umax, std::hypot(u1[i], u2[i]));
  if (umax > 0.0) dt = std::min(dt, config.cfl_c0 * state.omega.grid().spacing() / umax);
  if (config.scheme == Scheme::Rk4) dt = std::min(dt, config.cfl_c1 / (1.0 + std::abs(state.kappa)));
  return dt;
}

const Stepper::Rotation& Stepper::rotation(const Grid& grid, double kappa, double h, int slot) {
  Rotation& r = rot_[slot];
  if (r.kappa == kappa && r.h == h && r.c.size() == grid.size()) return r;
  r.kappa = kappa;
  r.h = h;
  r.c.assign(grid.size(), 1.0);
  r.s.assign(grid.size(), 0.0);
  const auto xi1 = grid.xi1();
  const auto a = grid.abs_xi();
  for (std::size_t i = 1; i < grid.size(); ++i) {
    const double theta = kappa * h * xi1[i] / a[i];
    r.c[i] = std::cos(theta);
    r.s[i] = std::sin(theta);
  }
  return r;
}

void Stepper::rotate(const Rotation& rot, SpectralField& omega, SpectralField& rho) const {
  const auto a = omega.grid().abs_xi();
  auto w = omega.coeffs();
  auto r = rho.coeffs();
  for (std::size_t i = 1; i < w.size(); ++i) {
    const double c = rot.c[i];
    const double s = rot.s[i];
    if (s == 0.0 && c == 1.0) continue;
    const Complex wi = w[i];
    const Complex ri = r[i];
    w[i] = c * wi + Complex{0.0, s * a[i]} * ri;
    r[i] = Complex{0.0, s / a[i]} * wi + c * ri;
  }
}

void Stepper::advance(SimState& state, double h, const TransportFn* transport) {
  if (!(h > 0.0)) throw InvalidArgument("step: dt must be positive");
  const double t = state.t;
  const double kappa = state.kappa;
  Pair v{state.omega, state.rho};

  auto tendency = [&](double ts, const Pair& p) {
    if (transport) {
      const VectorField u = stage_transport(transport, ts, p.w);
      return full_tendency(p.w, p.r, kappa, &u, config_);
    }
    return full_tendency(p.w, p.r, kappa, nullptr, config_);
  };

  if (config_.scheme == Scheme::Rk4) {
    const Pair k1 = tendency(t, v);
    const Pair k2 = tendency(t + 0.5 * h, combine(v, 0.5 * h, k1));
    const Pair k3 = tendency(t + 0.5 * h, combine(v, 0.5 * h, k2));
    const Pair k4 = tendency(t + h, combine(v, h, k3));
    for (const Pair* k : {&k1, &k4}) {
      v.w.axpy(h / 6.0, k->w);
      v.r.axpy(h / 6.0, k->r);
    }
    for (const Pair* k : {&k2, &k3}) {
      v.w.axpy(h / 3.0, k->w);
      v.r.axpy(h / 3.0, k->r);
    }
  } else {
    // Lawson RK4 in the rotating frame; only the half-step rotation is needed.
    StepperConfig nl = config_;
    auto nonlinear = [&](double ts, const Pair& p) {
      if (!nl.nonlinear_on) return Pair{SpectralField(p.w.grid()), SpectralField(p.w.grid())};
      if (transport) return advection(p.w, p.r, stage_transport(transport, ts, p.w), nl.dealias_on);
      return advection(p.w, p.r, biot_savart(p.w), nl.dealias_on);
    };
    const Rotation& half = rotation(v.w.grid(), kappa, 0.5 * h, 0);
    auto rot = [&](Pair& p) { rotate(half, p.w, p.r); };

    const Pair a = nonlinear(t, v);
    Pair v1 = combine(v, 0.5 * h, a);
    rot(v1);
    const Pair b = nonlinear(t + 0.5 * h, v1);
    Pair w = v;
    rot(w);
    const Pair v2 = combine(w, 0.5 * h, b);
    const Pair c = nonlinear(t + 0.5 * h, v2);
    Pair v3 = combine(w, h, c);
    rot(v3);
    const Pair d = nonlinear(t + h, v3);

    Pair acc = combine(v, h / 6.0, a);
    rot(acc);
    acc.w.axpy(h / 3.0, b.w);
    acc.r.axpy(h / 3.0, b.r);
    acc.w.axpy(h / 3.0, c.w);
    acc.r.axpy(h / 3.0, c.r);
    rot(acc);
    acc.w.axpy(h / 6.0, d.w);
    acc.r.axpy(h / 6.0, d.r);
    v = std::move(acc);
  }

  v.w[0] = 0.0;
  if (!all_finite(v.w) || !all_finite(v.r)) {
    throw BlowupSuspected(t + h, "non-finite values at t=" + std::to_string(t + h));
  }
  state.omega = std::move(v.w);
  state.rho = std::move(v.r);
  state.t = t + h;
}

SimState step(const SimState& state, double h, const StepperConfig& config) {
  Stepper s(config);
  SimState out = state;
  s.advance(out, h);
  return out;
}

SimState step(const SimState& state, double h, const StepperConfig& config, const TransportFn& transport) {
  Stepper s(config);
  SimState out = state;
  s.advance(out, h, &transport);
  return out;
}

double z_norm(const SpectralField& omega, const SpectralField& rho, double s, double q, const DyadicBank& bank) {
  return besov_norm(omega, BesovSpec{s - 1.0, 2.0, q, true}, bank) + hminus1_norm(omega) +
         besov_norm(rho, BesovSpec{s, 2.0, q, false}, bank);
}

double energy(const SimState& state) {
  const double h = hminus1_norm(state.omega);
  const double r = l2_norm(state.rho);
  return h * h + r * r;
}

double gradient_sum(const SimState& state) {
  return gradient_linf(state.rho) + gradient_linf(biot_savart(state.omega));
}

DiagnosticsRecord instantaneous_diagnostics(const SimState& state, const DyadicBank& bank,
                                            const DiagnosticsOptions& opts) {
  DiagnosticsRecord d;
  d.t = state.t;
  d.energy = energy(state);
  d.z = z_norm(state.omega, state.rho, opts.s, opts.q, bank);
  d.grad_u_linf = gradient_linf(biot_savart(state.omega));
  d.grad_rho_linf = gradient_linf(state.rho);
  if (opts.dispersive_norms) {
    const SpectralField lr = lambda_power(state.rho, 1.0);
    const BesovSpec b0{0.0, std::numeric_limits<double>::infinity(), 1.0, true};
    d.v_plus_besov = besov_norm(state.omega + lr, b0, bank);
    d.v_minus_besov = besov_norm(state.omega - lr, b0, bank);
  }
  return d;
}

std::string to_string(Termination t) {
  switch (t) {
    case Termination::Completed:
      return "completed";
    case Termination::BlowupSuspected:
      return "blowup_suspected";
    case Termination::ThresholdReached:
      return "threshold_reached";
  }
  return "unknown";
}

RunResult run(const SimState& initial, const StepperConfig& config, const RunOptions& options) {
  if (!(options.t_final >= 0.0)) throw InvalidArgument("run: t_final must be nonnegative");
  if (!(config.dt > 0.0)) throw InvalidArgument("run: dt must be positive");
  const DyadicBank bank(initial.omega.grid());
  Stepper stepper(config);

  RunResult res{{}, {}, {}, initial, Termination::Completed, 0.0, {}};
  SimState state = initial;
  const double t0 = initial.t;
  const double t_end = t0 + options.t_final;

  DiagnosticsRecord first = instantaneous_diagnostics(state, bank, options.diagnostics);
  const double z0 = first.z;
  res.diagnostics.push_back(first);
  if (options.keep_snapshots) res.snapshots.push_back(state);

  double b = 0.0;
  double g_prev = gradient_sum(state);
  res.b_curve.emplace_back(state.t, 0.0);
  DiagnosticsRecord last = first;

  auto take_sample = [&]() -> bool {
    DiagnosticsRecord d = instantaneous_diagnostics(state, bank, options.diagnostics);
    const double dt_s = d.t - last.t;
    d.m_plus = last.m_plus + 0.5 * dt_s * (last.v_plus_besov + d.v_plus_besov);
    d.m_minus = last.m_minus + 0.5 * dt_s * (last.v_minus_besov + d.v_minus_besov);
    d.b_integral = b;
    res.diagnostics.push_back(d);
    last = d;
    if (options.keep_snapshots) res.snapshots.push_back(state);
    if (!std::isfinite(d.z) || (z0 > 0.0 && d.z > options.blowup_guard * z0)) {
      res.termination = Termination::BlowupSuspected;
      res.end_time = d.t;
      res.message = "blow-up guard: z exceeded guard multiple of z(0)";
      return false;
    }
    return true;
  };

  // Returns false when the run must stop.
  auto do_step = [&](double h, bool sample) -> bool {
    const double t_prev = state.t;
    try {
      stepper.advance(state, h);
    } catch (const BlowupSuspected& e) {
      res.termination = Termination::BlowupSuspected;
      res.end_time = e.time();
      res.message = e.what();
      return false;
    }
    const double g = gradient_sum(state);
    const double b_prev = b;
    b += 0.5 * h * (g_prev + g);
    g_prev = g;
    res.b_curve.emplace_back(state.t, b);
    if (!std::isfinite(b)) {
      res.termination = Termination::BlowupSuspected;
      res.end_time = state.t;
      res.message = "non-finite gradient integral";
      return false;
    }
    if (b >= options.b_threshold) {
      const double frac = b > b_prev ? (options.b_threshold - b_prev) / (b - b_prev) : 1.0;
      take_sample();
      res.termination = Termination::ThresholdReached;
      res.end_time = t_prev + frac * h;
      res.message = "gradient integral reached threshold";
      return false;
    }
    if (sample) return take_sample();
    return true;
  };

  bool running = options.t_final > 0.0;
  if (config.dt_policy == DtPolicy::Fixed) {
    const long n_steps = std::max(1L, static_cast<long>(std::ceil(options.t_final / config.dt - 1e-9)));
    const double h = options.t_final / static_cast<double>(n_steps);
    const long every = options.sample_interval > 0.0
                           ? std::max(1L, std::lround(options.sample_interval / h))
                           : 1L;
    for (long k = 1; running && k <= n_steps; ++k) {
      // Exact step count keeps sample times on the k * h lattice.
      const double target = t0 + static_cast<double>(k) * h;
      running = do_step(target - state.t, k % every == 0 || k == n_steps);
    }
  } else {
    const double interval = options.sample_interval;
    long next_index = 1;
    while (running && state.t < t_end - 1e-12 * std::max(1.0, t_end)) {
      double h = select_dt(state, config);
      double boundary = t_end;
      bool sample = interval <= 0.0;
      if (interval > 0.0) boundary = std::min(t_end, t0 + static_cast<double>(next_index) * interval);
      if (state.t + h >= boundary - 1e-12 * std::max(1.0, boundary)) {
        h = boundary - state.t;
        sample = true;
        if (interval > 0.0 && boundary < t_end) ++next_index;
      }
      if (boundary == t_end && state.t + h >= t_end) sample = true;
      running = do_step(h, sample);
    }
  }

  if (res.termination == Termination::Completed) res.end_time = state.t;
  res.final_state = std::move(state);
  return res;
}

LifespanResult lifespan(const SimState& initial, double t_max, double theta, const StepperConfig& config,
                        RunOptions options) {
  if (!(theta > 0.0)) throw InvalidArgument("lifespan: threshold must be positive");
  options.t_final = t_max;
  options.b_threshold = theta;
  RunResult r = run(initial, config, options);
  LifespanResult out;
  out.termination = r.termination;
  out.threshold_reached = r.termination == Termination::ThresholdReached;
  out.t_life = r.termination == Termination::Completed ? t_max : r.end_time - initial.t;
  out.b_curve = std::move(r.b_curve);
  out.diagnostics = std::move(r.diagnostics);
  return out;
}

double gronwall_fit(const std::vector<DiagnosticsRecord>& series) {
  if (series.empty()) throw InvalidArgument("gronwall_fit: empty diagnostic series");
  const double z0 = series.front().z;
  if (!(z0 > 0.0)) return 0.0;
  double c6 = 0.0;
  for (const auto& d : series) {
    if (d.b_integral > 0.0 && d.z > 0.0) c6 = std::max(c6, std::log(d.z / z0) / d.b_integral);
  }
  return c6;
}

}  // namespace strat2d
