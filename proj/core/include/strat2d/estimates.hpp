#pragma once

// Commutators, product rule and cancellation identities, measured on seeded
// random fields. Every ratio below is LHS / RHS of the corresponding bound with
// Holder split (2, inf).

#include <cstdint>
#include <string>
#include <vector>

#include "strat2d/littlewood_paley.hpp"
#include "strat2d/random_fields.hpp"

namespace strat2d {

/// f . grad(Delta_j g) - Delta_j(f . grad g)
SpectralField commutator_bracket(const VectorField& f, const SpectralField& g, int j, const DyadicBank& bank);
/// f . grad(Lambda^-1 Delta_j g) - Lambda^-1 Delta_j(f . grad g)
SpectralField commutator_lambda(const VectorField& f, const SpectralField& g, int j, const DyadicBank& bank);
/// (S_{j-2} f . grad) Delta_j g - Delta_j(f . grad g), homogeneous low-pass
SpectralField commutator_smoothed(const VectorField& f, const SpectralField& g, int j, const DyadicBank& bank);

enum class Lemma { Bracket, Lambda, Smoothed, Product, Bernstein };
std::string to_string(Lemma l);
/// Throws InvalidArgument for unknown names.
Lemma parse_lemma(const std::string& name);

struct RatioReport {
  Lemma lemma = Lemma::Bracket;
  int trials = 0;
  std::uint64_t seed = 0;
  double s = 1.0;
  double q = 1.0;
  int n = 64;
  std::vector<double> lhs;
  std::vector<double> rhs;
  double max_ratio = 0.0;
  /// Same seeds on the grid with 2n points per axis.
  double max_ratio_doubled = 0.0;
  /// |doubled / base - 1|
  double relative_change = 0.0;
};

struct BatteryOptions {
  int trials = 100;
  std::uint64_t seed = 1;
  double s = 1.0;
  double q = 1.0;
  GridSpec grid{64, 1.0, 2.0 / 3.0};
  /// Spectra of the random fields (interior bands of the L0 = 1 bank).
  int band_lo = 1;
  int band_hi = 2;
  double alpha = 2.5;
  /// Multiplier on f; 0 gives the degenerate f = 0 battery.
  double f_scale = 1.0;
};

/// Commutator families: Bracket needs s > 0, Smoothed s > -1, Lambda s > 0.
RatioReport verify_commutator_lemma(Lemma which, const BatteryOptions& options);
/// ||fg||_{B^s_{2,q}} <= C (||g||_inf ||f||_{B^s_{2,q}} + ||f||_inf ||g||_{B^s_{2,q}}), s > 0.
RatioReport verify_product_rule(const BatteryOptions& options);

struct BernsteinReport {
  int j = 0;
  int trials = 0;
  double min_scaled = 0.0;  ///< min ||grad f|| / (2^j ||f||)
  double max_scaled = 0.0;
  int violations = 0;       ///< ratios outside [5/8, 7/4] 2^j
};

/// Random band-j fields; ||grad f||_2 / ||f||_2 against [5/8, 7/4] 2^j.
BernsteinReport bernstein_check(const DyadicBank& bank, int j, int trials, std::uint64_t seed);

struct CancellationResult {
  double residual = 0.0;
  /// ||omega||_{H^-1} ||rho||_{L2}
  double scale = 0.0;
  std::vector<double> band_residuals;
};

/// |<d_1 rho, omega>_{H^-1} + <u_2, rho>_{L2}| with u = BS(omega), in total and
/// band by band (Delta_j applied to both fields).
CancellationResult cancellation_check(const SpectralField& omega, const SpectralField& rho, const DyadicBank& bank);

/// |<u . grad g, g>_{L2}| with dealiased products.
double transport_check(const VectorField& u, const SpectralField& g);

}  // namespace strat2d
