#include "strat2d/picard.hpp"

#include <algorithm>
#include <cmath>

#include "strat2d/errors.hpp"

namespace strat2d {

namespace {

VectorField combine4(const std::vector<VectorField>& u, std::size_t first, const double (&w)[4]) {
  VectorField out{SpectralField(u[first].u1.grid()), SpectralField(u[first].u1.grid())};
  for (int m = 0; m < 4; ++m) {
    out.u1.axpy(w[m], u[first + m].u1);
    out.u2.axpy(w[m], u[first + m].u2);
  }
  return out;
}

long step_count(double t_final, double dt) {
  return std::max(1L, static_cast<long>(std::ceil(t_final / dt - 1e-9)));
}

}  // namespace

FrozenVelocity FrozenVelocity::constant(VectorField u, double t_begin, double t_end) {
  if (!(t_end >= t_begin)) throw InvalidArgument("FrozenVelocity: empty time range");
  FrozenVelocity f;
  f.times_ = {t_begin, t_end};
  f.u_ = {u, u};
  return f;
}

FrozenVelocity FrozenVelocity::from_vorticity(const std::vector<double>& times,
                                              const std::vector<SpectralField>& omega) {
  if (times.empty() || times.size() != omega.size()) {
    throw InvalidArgument("FrozenVelocity: need one vorticity snapshot per time");
  }
  for (std::size_t i = 1; i < times.size(); ++i) {
    if (!(times[i] > times[i - 1])) throw InvalidArgument("FrozenVelocity: times must increase");
  }
  FrozenVelocity f;
  f.times_ = times;
  f.u_.reserve(omega.size());
  for (const auto& w : omega) f.u_.push_back(biot_savart(w));
  if (f.times_.size() == 1) {
    f.times_.push_back(times.front());
    f.u_.push_back(f.u_.front());
  }
  return f;
}

VectorField FrozenVelocity::at(double t) const {
  const double tol = 1e-9 * std::max(1.0, std::abs(times_.back()));
  if (t < times_.front() - tol || t > times_.back() + tol) {
    throw OutOfRange("FrozenVelocity: t=" + std::to_string(t) + " outside the sampled range");
  }
  const std::size_t n = times_.size();
  auto it = std::upper_bound(times_.begin(), times_.end(), t);
  std::size_t i = it == times_.begin() ? 0 : static_cast<std::size_t>(it - times_.begin()) - 1;
  i = std::min(i, n - 1);
  if (std::abs(t - times_[i]) <= 1e-12 * std::max(1.0, std::abs(t))) return u_[i];
  if (i + 1 < n && std::abs(t - times_[i + 1]) <= 1e-12 * std::max(1.0, std::abs(t))) return u_[i + 1];
  if (u_.size() < 4) {
    const std::size_t j = std::min(i + 1, n - 1);
    if (j == i) return u_[i];
    const double a = (t - times_[i]) / (times_[j] - times_[i]);
    VectorField out = u_[i];
    out.u1 *= 1.0 - a;
    out.u2 *= 1.0 - a;
    out.u1.axpy(a, u_[j].u1);
    out.u2.axpy(a, u_[j].u2);
    return out;
  }
  std::size_t first = i == 0 ? 0 : i - 1;
  first = std::min(first, n - 4);
  double w[4];
  for (int m = 0; m < 4; ++m) {
    double l = 1.0;
    for (int k = 0; k < 4; ++k) {
      if (k == m) continue;
      l *= (t - times_[first + k]) / (times_[first + m] - times_[first + k]);
    }
    w[m] = l;
  }
  return combine4(u_, first, w);
}

std::pair<SpectralField, SpectralField> mollify_initial(const SpectralField& omega0, const SpectralField& rho0, int n,
                                                        const DyadicBank& bank) {
  if (n < 0) throw InvalidArgument("mollify_initial: n must be nonnegative");
  return {lowpass_nonhom(omega0, n + 2, bank), lowpass_nonhom(rho0, n + 2, bank)};
}

std::vector<SimState> linear_solve(const FrozenVelocity& frozen, const SimState& initial, double t_final,
                                   const StepperConfig& config) {
  if (!(t_final > 0.0)) throw InvalidArgument("linear_solve: t_final must be positive");
  if (!(config.dt > 0.0)) throw InvalidArgument("linear_solve: dt must be positive");
  const double t0 = initial.t;
  const double tol = 1e-9 * std::max(1.0, t0 + t_final);
  if (frozen.t_begin() > t0 + tol || frozen.t_end() < t0 + t_final - tol) {
    throw OutOfRange("linear_solve: frozen velocity does not cover the time interval");
  }
  const long n_steps = step_count(t_final, config.dt);
  const double h = t_final / static_cast<double>(n_steps);
  const TransportFn transport = [&frozen](double t, const SpectralField&) { return frozen.at(t); };

  Stepper stepper(config);
  std::vector<SimState> out;
  out.reserve(static_cast<std::size_t>(n_steps) + 1);
  out.push_back(initial);
  SimState state = initial;
  for (long k = 1; k <= n_steps; ++k) {
    stepper.advance(state, t0 + static_cast<double>(k) * h - state.t, &transport);
    out.push_back(state);
  }
  return out;
}

double IterationTrace::sup_a() const {
  double m = 0.0;
  for (double v : a) m = std::max(m, v);
  return m;
}

double IterationTrace::sup_a_bar() const {
  double m = 0.0;
  for (double v : a_bar) m = std::max(m, v);
  return m;
}

double difference_norm(const SpectralField& d_omega, const SpectralField& d_rho, double s, double q,
                       const DyadicBank& bank) {
  return besov_norm(d_omega, BesovSpec{s - 2.0, 2.0, q, true}, bank) + hminus1_norm(d_omega) +
         besov_norm(d_rho, BesovSpec{s - 1.0, 2.0, q, false}, bank);
}

PicardResult picard_run(const SpectralField& omega0, const SpectralField& rho0, double kappa,
                        const PicardOptions& options) {
  if (options.n_max < 1) throw InvalidArgument("picard_run: n_max must be at least 1");
  if (options.sample_stride < 1) throw InvalidArgument("picard_run: sample_stride must be positive");
  if (options.stepper.dt_policy != DtPolicy::Fixed) {
    throw InvalidArgument("picard_run: iterates share a fixed time lattice");
  }
  require_same_grid(omega0, rho0, "picard_run");
  require_mean_zero(omega0, "picard_run(omega0)");
  const DyadicBank bank(omega0.grid());
  const double a0 = z_norm(omega0, rho0, options.s, options.q, bank);
  const double t_final = options.t_final;

  std::vector<SimState> previous;
  std::vector<IterationTrace> traces;
  for (int n = 0; n <= options.n_max; ++n) {
    // Seed iterate: data S_1, velocity BS(S_2 omega0); iterate n >= 1: data S_{n+1}.
    const auto data = n == 0 ? std::make_pair(lowpass_nonhom(omega0, 1, bank), lowpass_nonhom(rho0, 1, bank))
                             : mollify_initial(omega0, rho0, n - 1, bank);
    SpectralField w = data.first;
    w[0] = 0.0;
    const SimState initial = make_state(std::move(w), data.second, kappa);

    FrozenVelocity frozen;
    if (n == 0) {
      frozen = FrozenVelocity::constant(biot_savart(lowpass_nonhom(omega0, 2, bank)), 0.0, t_final);
    } else {
      std::vector<double> times;
      std::vector<SpectralField> omegas;
      times.reserve(previous.size());
      omegas.reserve(previous.size());
      for (const auto& st : previous) {
        times.push_back(st.t);
        omegas.push_back(st.omega);
      }
      frozen = FrozenVelocity::from_vorticity(times, omegas);
    }
    std::vector<SimState> traj = linear_solve(frozen, initial, t_final, options.stepper);

    IterationTrace trace;
    trace.n = n;
    trace.kappa = kappa;
    trace.s = options.s;
    trace.q = options.q;
    trace.a0 = a0;
    const std::size_t last = traj.size() - 1;
    for (std::size_t k = 0; k <= last; ++k) {
      if (k % static_cast<std::size_t>(options.sample_stride) != 0 && k != last) continue;
      trace.t.push_back(traj[k].t);
      trace.a.push_back(z_norm(traj[k].omega, traj[k].rho, options.s, options.q, bank));
      if (n > 0) {
        trace.a_bar.push_back(difference_norm(traj[k].omega - previous[k].omega, traj[k].rho - previous[k].rho,
                                              options.s, options.q, bank));
      }
    }
    traces.push_back(std::move(trace));
    previous = std::move(traj);
  }
  return PicardResult{std::move(traces), previous.back()};
}

UniformityReport uniformity_report(const std::vector<std::vector<IterationTrace>>& runs, double spread_limit,
                                   int cauchy_from, double cauchy_limit) {
  if (runs.empty()) throw InvalidArgument("uniformity_report: no runs");
  UniformityReport rep;
  rep.spread_limit = spread_limit;
  rep.cauchy_from = cauchy_from;
  rep.cauchy_limit = cauchy_limit;
  const auto& ref = runs.front();
  if (ref.empty()) throw InvalidArgument("uniformity_report: empty trace list");
  for (const auto& traces : runs) {
    if (traces.size() != ref.size()) throw InvalidArgument("uniformity_report: differing iteration counts");
    for (std::size_t i = 0; i < traces.size(); ++i) {
      if (traces[i].s != ref[i].s || traces[i].q != ref[i].q || traces[i].t != ref[i].t) {
        throw InvalidArgument("uniformity_report: runs use differing (s, q) or sample grids");
      }
    }
    double sup = 0.0;
    for (const auto& tr : traces) sup = std::max(sup, tr.sup_a());
    const double a0 = traces.front().a0;
    rep.kappas.push_back(traces.front().kappa);
    rep.sup_ratio.push_back(a0 > 0.0 ? sup / a0 : 0.0);

    std::vector<double> ratios;
    for (std::size_t i = 1; i + 1 < traces.size(); ++i) {
      const double d0 = traces[i].sup_a_bar();
      const double d1 = traces[i + 1].sup_a_bar();
      ratios.push_back(d0 > 0.0 ? d1 / d0 : 0.0);
      if (traces[i].n >= cauchy_from) rep.worst_cauchy_ratio = std::max(rep.worst_cauchy_ratio, ratios.back());
    }
    rep.cauchy_ratios.push_back(std::move(ratios));
  }
  const auto [lo, hi] = std::minmax_element(rep.sup_ratio.begin(), rep.sup_ratio.end());
  if (*hi == 0.0) {
    rep.spread = 1.0;
  } else {
    rep.spread = *lo > 0.0 ? *hi / *lo : std::numeric_limits<double>::infinity();
  }
  rep.uniform_pass = rep.spread < spread_limit;
  rep.cauchy_pass = rep.worst_cauchy_ratio <= cauchy_limit;
  return rep;
}

double fit_decay_rate(const std::vector<IterationTrace>& traces, int from) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int m = 0;
  for (const auto& tr : traces) {
    if (tr.n < std::max(1, from)) continue;
    const double d = tr.sup_a_bar();
    if (!(d > 0.0)) continue;
    const double x = tr.n;
    const double y = std::log(d);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++m;
  }
  if (m < 2) throw InvalidArgument("fit_decay_rate: need at least two nonzero differences");
  const double slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
  return std::exp(slope);
}

double local_time(const SpectralField& omega0, const SpectralField& rho0, double kappa, double t_max,
                  const StepperConfig& config, double theta) {
  RunOptions opts;
  opts.diagnostics.dispersive_norms = false;
  opts.sample_interval = t_max;
  const LifespanResult r = lifespan(make_state(omega0, rho0, kappa), t_max, theta, config, opts);
  return r.t_life;
}

}  // namespace strat2d
