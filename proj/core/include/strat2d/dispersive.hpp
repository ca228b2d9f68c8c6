#pragma once

// Linear stratified propagator and dispersive measurements.
//
// The semigroup e^{+-t kappa R_1} is the multiplier exp(+- i kappa t xi_1/|xi|).
// G+-(t) additionally applies a compactly supported radial cutoff (default:
// psi_0 of the dyadic bank).

#include <functional>
#include <limits>
#include <vector>

#include "strat2d/littlewood_paley.hpp"
#include "strat2d/rng.hpp"
#include "strat2d/solver.hpp"

namespace strat2d {

/// sign is +1 or -1. Throws NonzeroMean when f has a mean.
SpectralField semigroup_apply(const SpectralField& f, double t, double kappa, int sign);

struct Diagonal {
  SpectralField v_plus;
  SpectralField v_minus;
};

/// V+- = omega +- Lambda rho (the mean of rho is dropped).
Diagonal diagonalize(const SpectralField& omega, const SpectralField& rho);
/// Returns (omega, rho) with mean-zero rho.
std::pair<SpectralField, SpectralField> undiagonalize(const SpectralField& v_plus, const SpectralField& v_minus);

using RadialCutoff = std::function<double(double)>;
/// psi_0 from the Littlewood-Paley construction.
RadialCutoff default_cutoff();

SpectralField g_operator(const SpectralField& f, double t, int sign, const RadialCutoff& cutoff = default_cutoff());

struct StrichartzSample {
  double kappa = 0.0;
  double gamma = 4.0;
  double r = std::numeric_limits<double>::infinity();
  double t_max = 1.0;
  int nodes = 0;
  double value = 0.0;
  /// Share of the integral from the last tenth of [0, t_max].
  double tail_fraction = 0.0;
};

/// 1/gamma + 1/(2r) <= 1/4 with gamma >= 4 (infinite exponents allowed).
bool admissible(double gamma, double r);

/// Smallest node count (at least 2) with kappa * dt <= 1/4 on [0, t_max].
int minimal_nodes(double kappa, double t_max);

/// (int_0^{t_max} ||G(kappa t) f||_{L^r}^gamma dt)^{1/gamma} by the trapezoid
/// rule on `nodes` equispaced nodes (max over nodes for gamma = inf). Throws
/// InvalidArgument for inadmissible exponents or too few nodes.
StrichartzSample strichartz_measure(const SpectralField& f, double kappa, double gamma, double r, double t_max,
                                    int nodes, int sign = 1, const RadialCutoff& cutoff = default_cutoff());

/// Same with X = B^s_{r,q} (homogeneous) and the bare semigroup; needs
/// 4 <= gamma <= q.
StrichartzSample besov_strichartz_measure(const SpectralField& f, double kappa, double gamma, double r, double q,
                                          double s, double t_max, int nodes, const DyadicBank& bank, int sign = 1);

struct SlopeFit {
  double slope = 0.0;
  double intercept = 0.0;
  int points = 0;
};

/// Least squares on (log x, log y). Needs at least two positive points.
SlopeFit fit_loglog(const std::vector<double>& x, const std::vector<double>& y);

/// Wave packet in band 0: Gaussian spectrum around a random center with
/// |xi_c| in [0.8, 1.4], width in [0.2, 0.4], random position, times psi_0.
/// Normalized to unit L2 norm.
SpectralField wave_packet(const Grid& grid, CounterRng& rng);

struct DuhamelResidual {
  std::vector<double> t;
  std::vector<double> plus;
  std::vector<double> minus;
  double max_plus = 0.0;
  double max_minus = 0.0;
};

/// Compares V+- of a stored trajectory with
///   e^{+-kappa R_1 t} V(0) - int_0^t e^{+-kappa R_1 (t - tau)} (f +- Lambda g)(tau) dtau,
/// f = u . grad omega, g = u . grad rho, by composite Simpson over equispaced
/// snapshots; residuals are reported at even snapshot indices. Throws
/// InvalidArgument when kappa * spacing > 1/2 or the snapshots are not
/// equispaced.
DuhamelResidual duhamel_residual(const std::vector<SimState>& snapshots, double kappa, bool dealias_on = true,
                                 bool nonlinear_on = true);

struct Kappa0Inputs {
  double t = 1.0;
  double z = 1.0;
  double c6 = 1.0;
  double c7 = 1.0;
  double gamma = 4.0;
};

struct Kappa0Result {
  double kappa0 = 0.0;
  bool overflow = false;
};

/// kappa0 = [2 (1 + z T exp(C6 C7 T^{1 - 1/gamma} z))]^gamma.
Kappa0Result kappa0_estimate(const Kappa0Inputs& in);

}  // namespace strat2d
