#include "strat2d/random_fields.hpp"

#include <cmath>
#include <numbers>

#include "strat2d/errors.hpp"

namespace strat2d {

namespace {

// Fills a Hermitian spectrum; amplitude(|xi|) gives the modulus per mode.
template <class Amplitude>
SpectralField fill_half_plane(const Grid& grid, double xi_min, double xi_max, CounterRng& rng,
                              Amplitude amplitude) {
  if (xi_max > grid.dealias_cutoff() * (1.0 + 1e-12)) {
    throw InvalidArgument("random field: xi_max exceeds the dealias cutoff of the grid");
  }
  SpectralField f(grid);
  const double l0 = grid.box_scale();
  const int kmax = static_cast<int>(std::floor(xi_max * l0 + 1e-9));
  for (int k1 = 0; k1 <= kmax; ++k1) {
    for (int k2 = -kmax; k2 <= kmax; ++k2) {
      if (k1 == 0 && k2 <= 0) continue;
      const double r = std::hypot(static_cast<double>(k1), static_cast<double>(k2)) / l0;
      // Draw for every visited vector so the stream position is grid independent.
      const double phase = 2.0 * std::numbers::pi * rng.uniform();
      if (r < xi_min || r > xi_max) continue;
      f.set_mode(k1, k2, std::polar(amplitude(r), phase));
    }
  }
  return f;
}

}  // namespace

SpectralField random_scalar_field(const Grid& grid, const PowerLawSpectrum& spectrum, CounterRng& rng) {
  if (!(spectrum.xi_min > 0.0) || !(spectrum.xi_max >= spectrum.xi_min)) {
    throw InvalidArgument("random_scalar_field: need 0 < xi_min <= xi_max");
  }
  SpectralField f = fill_half_plane(grid, spectrum.xi_min, spectrum.xi_max, rng,
                                    [&](double r) { return std::pow(r, -spectrum.alpha); });
  if (spectrum.l2_norm > 0.0) {
    const double n = l2_norm(f);
    if (n > 0.0) f *= spectrum.l2_norm / n;
  }
  return f;
}

VectorField random_divergence_free(const Grid& grid, const PowerLawSpectrum& spectrum, CounterRng& rng) {
  PowerLawSpectrum stream = spectrum;
  stream.l2_norm = 0.0;
  stream.alpha = spectrum.alpha + 1.0;
  SpectralField phi = random_scalar_field(grid, stream, rng);
  VectorField u{derivative(phi, Axis::X2), derivative(phi, Axis::X1)};
  u.u1 *= -1.0;
  if (spectrum.l2_norm > 0.0) {
    const double n = l2_norm(u);
    if (n > 0.0) {
      u.u1 *= spectrum.l2_norm / n;
      u.u2 *= spectrum.l2_norm / n;
    }
  }
  return u;
}

SpectralField random_band_field(const DyadicBank& bank, int j, CounterRng& rng) {
  const double lo = 0.625 * std::ldexp(1.0, j);
  const double hi = 1.75 * std::ldexp(1.0, j);
  const auto& grid = bank.grid();
  SpectralField f(grid);
  const double l0 = grid.box_scale();
  const int kmax = static_cast<int>(std::floor(hi * l0 + 1e-9));
  if (kmax >= grid.n() / 2) throw InvalidArgument("random_band_field: band not resolved by grid");
  for (int k1 = 0; k1 <= kmax; ++k1) {
    for (int k2 = -kmax; k2 <= kmax; ++k2) {
      if (k1 == 0 && k2 <= 0) continue;
      const double re = rng.normal();
      const double im = rng.normal();
      const double r = std::hypot(static_cast<double>(k1), static_cast<double>(k2)) / l0;
      if (r < lo || r > hi) continue;
      f.set_mode(k1, k2, lp_psi(j, r) * Complex{re, im});
    }
  }
  return f;
}

PowerLawSpectrum interior_band_spectrum(int j_lo, int j_hi, double alpha) {
  PowerLawSpectrum s;
  s.alpha = alpha;
  s.xi_min = 0.625 * std::ldexp(1.0, j_lo);
  s.xi_max = 1.25 * std::ldexp(1.0, j_hi);
  return s;
}

}  // namespace strat2d
