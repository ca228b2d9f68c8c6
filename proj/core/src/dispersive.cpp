#include "strat2d/dispersive.hpp"

#include <cmath>
#include <numbers>

#include "strat2d/errors.hpp"
#include "strat2d/random_fields.hpp"

namespace strat2d {

namespace {

void check_sign(int sign) {
  if (sign != 1 && sign != -1) throw InvalidArgument("sign must be +1 or -1");
}

// Multiplies every mode by exp(i phase(xi) t).
void rotate_phases(SpectralField& f, double t_kappa, int sign) {
  const auto xi1 = f.grid().xi1();
  const auto a = f.grid().abs_xi();
  auto c = f.coeffs();
  for (std::size_t i = 1; i < c.size(); ++i) {
    if (c[i] == Complex{}) continue;
    c[i] *= std::polar(1.0, sign * t_kappa * xi1[i] / a[i]);
  }
}

double inv(double x) { return std::isinf(x) ? 0.0 : 1.0 / x; }

void check_nodes(double kappa, double t_max, int nodes) {
  if (!(t_max > 0.0)) throw InvalidArgument("strichartz: t_max must be positive");
  if (nodes < 2) throw InvalidArgument("strichartz: need at least two nodes");
  const double dt = t_max / (nodes - 1);
  if (std::abs(kappa) * dt > 0.25 * (1.0 + 1e-12)) {
    throw InvalidArgument("strichartz: too few nodes for kappa (need kappa * dt <= 1/4)");
  }
}

// Trapezoid of values^gamma; gamma = inf takes the max.
StrichartzSample integrate_nodes(const std::vector<double>& values, double kappa, double gamma, double r,
                                 double t_max) {
  StrichartzSample out;
  out.kappa = kappa;
  out.gamma = gamma;
  out.r = r;
  out.t_max = t_max;
  out.nodes = static_cast<int>(values.size());
  const std::size_t n = values.size();
  if (std::isinf(gamma)) {
    double m = 0.0;
    for (double v : values) m = std::max(m, v);
    out.value = m;
    return out;
  }
  const double dt = t_max / static_cast<double>(n - 1);
  const std::size_t tail_start = static_cast<std::size_t>(std::floor(0.9 * static_cast<double>(n - 1)));
  double total = 0.0;
  double tail = 0.0;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double piece = 0.5 * dt * (std::pow(values[i], gamma) + std::pow(values[i + 1], gamma));
    total += piece;
    if (i >= tail_start) tail += piece;
  }
  out.value = std::pow(total, 1.0 / gamma);
  out.tail_fraction = total > 0.0 ? tail / total : 0.0;
  return out;
}

}  // namespace

SpectralField semigroup_apply(const SpectralField& f, double t, double kappa, int sign) {
  check_sign(sign);
  require_mean_zero(f, "semigroup_apply");
  SpectralField out = f;
  out[0] = 0.0;
  rotate_phases(out, kappa * t, sign);
  return out;
}

Diagonal diagonalize(const SpectralField& omega, const SpectralField& rho) {
  require_same_grid(omega, rho, "diagonalize");
  require_mean_zero(omega, "diagonalize(omega)");
  SpectralField w = omega;
  w[0] = 0.0;
  const SpectralField lr = lambda_power(rho, 1.0);
  return Diagonal{w + lr, w - lr};
}

std::pair<SpectralField, SpectralField> undiagonalize(const SpectralField& v_plus, const SpectralField& v_minus) {
  require_same_grid(v_plus, v_minus, "undiagonalize");
  SpectralField omega = 0.5 * (v_plus + v_minus);
  SpectralField lr = 0.5 * (v_plus - v_minus);
  lr[0] = 0.0;
  omega[0] = 0.0;
  return {std::move(omega), lambda_power(lr, -1.0)};
}

RadialCutoff default_cutoff() {
  return [](double r) { return lp_psi(0, r); };
}

SpectralField g_operator(const SpectralField& f, double t, int sign, const RadialCutoff& cutoff) {
  check_sign(sign);
  SpectralField out = apply_radial(f, cutoff);
  out[0] = 0.0;
  rotate_phases(out, t, sign);
  return out;
}

bool admissible(double gamma, double r) {
  if (!(gamma >= 4.0) || !(r >= 2.0)) return false;
  return inv(gamma) + 0.5 * inv(r) <= 0.25 + 1e-15;
}

int minimal_nodes(double kappa, double t_max) {
  return std::max(2, static_cast<int>(std::ceil(4.0 * std::abs(kappa) * t_max - 1e-9)) + 1);
}

StrichartzSample strichartz_measure(const SpectralField& f, double kappa, double gamma, double r, double t_max,
                                    int nodes, int sign, const RadialCutoff& cutoff) {
  check_sign(sign);
  if (!admissible(gamma, r)) throw InvalidArgument("strichartz_measure: (gamma, r) not admissible");
  check_nodes(kappa, t_max, nodes);
  const SpectralField base = g_operator(f, 0.0, sign, cutoff);
  const double dt = t_max / (nodes - 1);
  std::vector<double> values(static_cast<std::size_t>(nodes));
  for (int i = 0; i < nodes; ++i) {
    SpectralField g = base;
    rotate_phases(g, kappa * dt * i, sign);
    values[static_cast<std::size_t>(i)] = lp_norm(g, r);
  }
  return integrate_nodes(values, kappa, gamma, r, t_max);
}

StrichartzSample besov_strichartz_measure(const SpectralField& f, double kappa, double gamma, double r, double q,
                                          double s, double t_max, int nodes, const DyadicBank& bank, int sign) {
  check_sign(sign);
  if (!admissible(gamma, r)) throw InvalidArgument("besov_strichartz_measure: (gamma, r) not admissible");
  if (gamma > q) throw InvalidArgument("besov_strichartz_measure: need gamma <= q");
  check_nodes(kappa, t_max, nodes);
  const SpectralField base = semigroup_apply(f, 0.0, kappa, sign);
  const double dt = t_max / (nodes - 1);
  const BesovSpec spec{s, r, q, true};
  std::vector<double> values(static_cast<std::size_t>(nodes));
  for (int i = 0; i < nodes; ++i) {
    SpectralField g = base;
    rotate_phases(g, kappa * dt * i, sign);
    values[static_cast<std::size_t>(i)] = besov_norm(g, spec, bank);
  }
  return integrate_nodes(values, kappa, gamma, r, t_max);
}

SlopeFit fit_loglog(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size()) throw DimensionMismatch("fit_loglog: x and y differ in length");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int m = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0)) continue;
    const double lx = std::log(x[i]);
    const double ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
    ++m;
  }
  if (m < 2) throw InvalidArgument("fit_loglog: need at least two positive points");
  const double den = m * sxx - sx * sx;
  if (!(den > 0.0)) throw InvalidArgument("fit_loglog: degenerate abscissae");
  SlopeFit fit;
  fit.slope = (m * sxy - sx * sy) / den;
  fit.intercept = (sy - fit.slope * sx) / m;
  fit.points = m;
  return fit;
}

SpectralField wave_packet(const Grid& grid, CounterRng& rng) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  const double radius = rng.uniform(0.8, 1.4);
  const double angle = rng.uniform(0.0, two_pi);
  const double sigma = rng.uniform(0.2, 0.4);
  const double x1 = rng.uniform(0.0, two_pi * grid.box_scale());
  const double x2 = rng.uniform(0.0, two_pi * grid.box_scale());
  const double c1 = radius * std::cos(angle);
  const double c2 = radius * std::sin(angle);
  if (1.75 > grid.dealias_cutoff()) throw InvalidArgument("wave_packet: band 0 not resolved");

  auto lobe = [&](double k1, double k2) {
    const double d = ((k1 - c1) * (k1 - c1) + (k2 - c2) * (k2 - c2)) / (2.0 * sigma * sigma);
    return std::polar(std::exp(-d), -(k1 * x1 + k2 * x2));
  };
  SpectralField f(grid);
  const auto xi1 = grid.xi1();
  const auto xi2 = grid.xi2();
  const auto a = grid.abs_xi();
  for (std::size_t i = 1; i < grid.size(); ++i) {
    const double w = lp_psi(0, a[i]);
    if (w == 0.0) continue;
    f[i] = w * (lobe(xi1[i], xi2[i]) + std::conj(lobe(-xi1[i], -xi2[i])));
  }
  const double n = l2_norm(f);
  if (n > 0.0) f *= 1.0 / n;
  return f;
}

DuhamelResidual duhamel_residual(const std::vector<SimState>& snapshots, double kappa, bool dealias_on,
                                 bool nonlinear_on) {
  if (snapshots.size() < 3) throw InvalidArgument("duhamel_residual: need at least three snapshots");
  const double t0 = snapshots.front().t;
  const double spacing = snapshots[1].t - t0;
  if (!(spacing > 0.0)) throw InvalidArgument("duhamel_residual: snapshot times must increase");
  for (std::size_t i = 1; i < snapshots.size(); ++i) {
    const double d = snapshots[i].t - snapshots[i - 1].t;
    if (std::abs(d - spacing) > 1e-9 * spacing) throw InvalidArgument("duhamel_residual: snapshots not equispaced");
  }
  if (std::abs(kappa) * spacing > 0.5) {
    throw InvalidArgument("duhamel_residual: snapshot spacing too coarse (kappa * dt > 1/2)");
  }

  const Grid& grid = snapshots.front().omega.grid();
  std::vector<Diagonal> forcing;
  forcing.reserve(snapshots.size());
  for (const auto& st : snapshots) {
    SpectralField f(grid), g(grid);
    if (nonlinear_on) detail::advect_pair(biot_savart(st.omega), st.omega, st.rho, f, g, dealias_on);
    f[0] = 0.0;
    const SpectralField lg = lambda_power(g, 1.0);
    forcing.push_back(Diagonal{f + lg, f - lg});
  }

  const Diagonal v0 = diagonalize(snapshots.front().omega, snapshots.front().rho);
  DuhamelResidual out;
  SpectralField i_plus(grid), i_minus(grid);
  auto residual = [](const SpectralField& solver, const SpectralField& duhamel) {
    const double n = l2_norm(solver);
    const double d = l2_norm(solver - duhamel);
    return n > 0.0 ? d / n : d;
  };
  for (std::size_t m = 2; m < snapshots.size(); m += 2) {
    auto piece = [&](int sign, const SpectralField& prev, const SpectralField& f0, const SpectralField& f1,
                     const SpectralField& f2) {
      SpectralField acc = semigroup_apply(prev + (spacing / 3.0) * f0, 2.0 * spacing, kappa, sign);
      acc.axpy(4.0 * spacing / 3.0, semigroup_apply(f1, spacing, kappa, sign));
      acc.axpy(spacing / 3.0, f2);
      return acc;
    };
    i_plus = piece(1, i_plus, forcing[m - 2].v_plus, forcing[m - 1].v_plus, forcing[m].v_plus);
    i_minus = piece(-1, i_minus, forcing[m - 2].v_minus, forcing[m - 1].v_minus, forcing[m].v_minus);

    const double t = snapshots[m].t - t0;
    const Diagonal vs = diagonalize(snapshots[m].omega, snapshots[m].rho);
    const SpectralField dp = semigroup_apply(v0.v_plus, t, kappa, 1) - i_plus;
    const SpectralField dm = semigroup_apply(v0.v_minus, t, kappa, -1) - i_minus;
    out.t.push_back(snapshots[m].t);
    out.plus.push_back(residual(vs.v_plus, dp));
    out.minus.push_back(residual(vs.v_minus, dm));
    out.max_plus = std::max(out.max_plus, out.plus.back());
    out.max_minus = std::max(out.max_minus, out.minus.back());
  }
  return out;
}

Kappa0Result kappa0_estimate(const Kappa0Inputs& in) {
  if (!(in.t > 0.0) || !(in.c6 > 0.0) || !(in.c7 > 0.0) || !(in.gamma > 0.0) || !(in.z >= 0.0)) {
    throw InvalidArgument("kappa0_estimate: inputs must be positive");
  }
  if (std::isinf(in.gamma)) throw InvalidArgument("kappa0_estimate: gamma must be finite");
  const double e = in.c6 * in.c7 * std::pow(in.t, 1.0 - 1.0 / in.gamma) * in.z;
  const double zt = in.z * in.t;
  // log(1 + zT e^E) without overflowing the exponential.
  double log_inner;
  if (zt == 0.0) {
    log_inner = 0.0;
  } else {
    const double l = std::log(zt) + e;
    log_inner = l > 30.0 ? l + std::log1p(std::exp(-l)) : std::log1p(std::exp(l));
  }
  const double log_k = in.gamma * (std::numbers::ln2 + log_inner);
  Kappa0Result r;
  if (!std::isfinite(log_k) || log_k >= std::log(std::numeric_limits<double>::max())) {
    r.kappa0 = std::numeric_limits<double>::infinity();
    r.overflow = true;
  } else {
    r.kappa0 = std::exp(log_k);
  }
  return r;
}

}  // namespace strat2d
