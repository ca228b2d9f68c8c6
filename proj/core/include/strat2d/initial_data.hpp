#pragma once

// Named initial-data presets.
//
//   taylor-green     omega = A cos(x1/L0) cos(x2/L0)
//                    rho   = rho_ratio A sin(x1/L0) cos(x2/L0)
//   random-spectrum  power-law spectra |xi|^-alpha on [xi_min, xi_max],
//                    ||omega||_2 = A, ||rho||_2 = rho_ratio A
//   gaussian-bump    omega = A (G(x - c) - mean G), rho = rho_ratio A G(x - c - offset),
//                    G(y) = exp(-|y|^2 / (2 width^2)), c the domain center
//
// coupling "balanced" replaces rho by Lambda^-1 omega (so V- = 0); the
// amplitude of rho then follows from omega.

#include <cstdint>
#include <string>
#include <utility>

#include "strat2d/spectral.hpp"

namespace strat2d {

struct InitialDataSpec {
  std::string preset = "taylor-green";
  double amplitude = 1.0;
  double rho_ratio = 1.0;
  std::string coupling = "independent";
  // random-spectrum
  double alpha = 2.5;
  double xi_min = 1.0;
  double xi_max = 4.0;
  std::uint64_t seed = 0;
  // gaussian-bump
  double width = 0.5;
  /// rho bump displacement along x1, in units of the width.
  double offset = 1.0;
};

/// Throws ConfigError for unknown presets or couplings.
std::pair<SpectralField, SpectralField> make_initial_data(const Grid& grid, const InitialDataSpec& spec);

}  // namespace strat2d
