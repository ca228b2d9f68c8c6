#include "strat2d/initial_data.hpp"

#include <cmath>
#include <numbers>

#include "strat2d/errors.hpp"
#include "strat2d/random_fields.hpp"

namespace strat2d {

namespace {

// Minimum-image displacement on a circle of length period.
double wrap(double d, double period) { return d - period * std::round(d / period); }

SpectralField bump(const Grid& grid, double c1, double c2, double width) {
  const double period = 2.0 * std::numbers::pi * grid.box_scale();
  return forward_transform(sample(grid, [&](double x1, double x2) {
    const double d1 = wrap(x1 - c1, period);
    const double d2 = wrap(x2 - c2, period);
    return std::exp(-(d1 * d1 + d2 * d2) / (2.0 * width * width));
  }));
}

}  // namespace

std::pair<SpectralField, SpectralField> make_initial_data(const Grid& grid, const InitialDataSpec& spec) {
  const double l0 = grid.box_scale();
  const double a = spec.amplitude;
  SpectralField omega(grid), rho(grid);

  if (spec.preset == "taylor-green") {
    omega = forward_transform(sample(grid, [&](double x1, double x2) {
      return a * std::cos(x1 / l0) * std::cos(x2 / l0);
    }));
    rho = forward_transform(sample(grid, [&](double x1, double x2) {
      return spec.rho_ratio * a * std::sin(x1 / l0) * std::cos(x2 / l0);
    }));
  } else if (spec.preset == "random-spectrum") {
    CounterRng root(spec.seed);
    CounterRng rw = root.split(0);
    CounterRng rr = root.split(1);
    PowerLawSpectrum ps{spec.alpha, spec.xi_min, spec.xi_max, a};
    omega = random_scalar_field(grid, ps, rw);
    ps.l2_norm = spec.rho_ratio * a;
    rho = random_scalar_field(grid, ps, rr);
    if (spec.rho_ratio == 0.0) rho = SpectralField(grid);
  } else if (spec.preset == "gaussian-bump") {
    if (!(spec.width > 0.0)) throw ConfigError("gaussian-bump: width must be positive");
    const double c = std::numbers::pi * l0;
    omega = bump(grid, c, c, spec.width);
    omega[0] = 0.0;
    omega *= a;
    rho = bump(grid, c + spec.offset * spec.width, c, spec.width);
    rho *= spec.rho_ratio * a;
  } else {
    throw ConfigError("unknown initial-data preset '" + spec.preset + "'");
  }

  omega[0] = 0.0;
  if (spec.coupling == "balanced") {
    rho = lambda_power(omega, -1.0);
  } else if (spec.coupling != "independent") {
    throw ConfigError("unknown coupling '" + spec.coupling + "'");
  }
  return {dealias(omega), dealias(rho)};
}

}  // namespace strat2d
