#pragma once

#include "strat2d/littlewood_paley.hpp"
#include "strat2d/rng.hpp"
#include "strat2d/spectral.hpp"

namespace strat2d {

/// Isotropic power-law spectrum |xi|^-alpha with uniform random phases,
/// restricted to xi_min <= |xi| <= xi_max (physical frequencies).
struct PowerLawSpectrum {
  double alpha = 2.5;
  double xi_min = 1.0;
  double xi_max = 7.0;
  /// Target L2 norm of the generated field (0 leaves it unnormalized).
  double l2_norm = 1.0;
};

/// Mean-zero real random field. Modes are visited in a fixed order of integer
/// wave-vectors that does not depend on n, so the same seed produces the same
/// field on every grid that resolves xi_max. Throws InvalidArgument if xi_max
/// exceeds the dealias cutoff.
SpectralField random_scalar_field(const Grid& grid, const PowerLawSpectrum& spectrum, CounterRng& rng);

/// Divergence-free random velocity u = grad^perp phi whose components follow
/// the given spectrum.
VectorField random_divergence_free(const Grid& grid, const PowerLawSpectrum& spectrum, CounterRng& rng);

/// Random field with spectrum inside supp psi_j (white amplitudes times psi_j).
SpectralField random_band_field(const DyadicBank& bank, int j, CounterRng& rng);

/// Spectrum spanning the interior bands [j_lo, j_hi] of a bank:
/// 5/8 2^j_lo <= |xi| <= 5/4 2^j_hi.
PowerLawSpectrum interior_band_spectrum(int j_lo, int j_hi, double alpha = 2.5);

}  // namespace strat2d
