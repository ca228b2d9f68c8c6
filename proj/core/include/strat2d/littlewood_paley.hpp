#pragma once

// Littlewood-Paley machinery on the torus: the dyadic multiplier bank, band
// projections, low-pass operators, Besov norms and the Bony paraproduct.
//
// The radial profile is chi(r) = eta((7/4 - r) / (1/2)) with the C-infinity step
//   eta(t) = zeta(t) / (zeta(t) + zeta(1 - t)),  zeta(t) = exp(-1/t) (t > 0),
// so chi == 1 on r <= 5/4 and chi == 0 on r >= 7/4. The band multipliers are
//   psi_j(xi) = chi(2^-j |xi|) - chi(2^(1-j) |xi|),
// supported in 5/8 2^j <= |xi| <= 7/4 2^j, and they telescope to one.

#include <span>
#include <utility>
#include <vector>

#include "strat2d/spectral.hpp"

namespace strat2d {

double smooth_step(double t);
double lp_chi(double r);
/// psi_j evaluated at |xi| = r.
double lp_psi(int j, double r);

struct BandEntry {
  std::size_t index;
  double weight;
};

class DyadicBank {
 public:
  /// Throws InvalidArgument when the grid cannot host at least three bands.
  explicit DyadicBank(Grid grid);

  const Grid& grid() const noexcept { return grid_; }
  int j_min() const noexcept { return j_min_; }
  int j_max() const noexcept { return j_max_; }
  int band_count() const noexcept { return j_max_ - j_min_ + 1; }
  bool contains(int j) const noexcept { return j >= j_min_ && j <= j_max_; }
  /// Boundary bands see truncation effects from the finite dyadic range.
  bool is_boundary(int j) const noexcept { return j == j_min_ || j == j_max_; }

  /// Nonzero entries of psi_j on the grid.
  std::span<const BandEntry> band(int j) const;

  /// max |sum_j psi_j - 1| over grid frequencies in the interior annulus
  /// 5/8 2^(j_min+1) <= |xi| <= 5/8 2^j_max.
  double partition_residual() const;

 private:
  Grid grid_;
  int j_min_ = 0;
  int j_max_ = 0;
  std::vector<std::vector<BandEntry>> bands_;
};

DyadicBank build_bank(const Grid& grid);

struct BesovSpec {
  double s = 0.0;
  double p = 2.0;
  double q = 2.0;
  bool homogeneous = true;
};

/// Delta_j f. Throws OutOfRange when j is outside the bank.
SpectralField project_band(const SpectralField& f, int j, const DyadicBank& bank);
/// Homogeneous low-pass: multiplier chi(2^-k xi), zero mode removed.
SpectralField lowpass_hom(const SpectralField& f, int k, const DyadicBank& bank);
/// Nonhomogeneous low-pass S_k: multiplier chi(2^-k xi), zero mode kept.
SpectralField lowpass_nonhom(const SpectralField& f, int k, const DyadicBank& bank);

/// ||Delta_j f||_{L^p} for every band j_min..j_max (index j - j_min).
std::vector<double> band_norms(const SpectralField& f, double p, const DyadicBank& bank);
/// Vector version: per band, the L^p norm of the pointwise Euclidean magnitude.
std::vector<double> band_norms(const VectorField& u, double p, const DyadicBank& bank);

/// l^q aggregation of 2^(s j) ||Delta_j f||_{L^p}. Homogeneous: bands of the
/// bank. Nonhomogeneous: the block S_0 f followed by Delta_k f for k >= 1.
double besov_norm(const SpectralField& f, const BesovSpec& spec, const DyadicBank& bank);
double besov_norm(const VectorField& u, const BesovSpec& spec, const DyadicBank& bank);

/// ||f||_{H^-1} = ||Lambda^-1 f||_{L2}; requires mean zero.
double hminus1_norm(const SpectralField& f);

/// l^q norm of a sequence (q == inf gives the max).
double lq_aggregate(std::span<const double> values, double q);

struct BandDecomposition {
  std::vector<std::pair<int, SpectralField>> bands;
  /// S_0 f: the nonhomogeneous low block.
  SpectralField low_block;
  /// f - mean - sum_j Delta_j f: what the finite bank does not see.
  SpectralField remainder;
};

BandDecomposition decompose(const SpectralField& f, const DyadicBank& bank);

struct Paraproduct {
  SpectralField t_f_g;     ///< sum_j (S_{j-2} f)(Delta_j g)
  SpectralField t_g_f;     ///< sum_j (S_{j-2} g)(Delta_j f)
  SpectralField resonant;  ///< sum_{|j-j'|<=1} Delta_j f Delta_j' g
};

/// Bony decomposition with dealiased products. Means are dropped by the band
/// operators, so f g - (sum of the three parts) holds the mean and
/// unresolved-frequency interactions.
Paraproduct paraproduct(const SpectralField& f, const SpectralField& g, const DyadicBank& bank);

}  // namespace strat2d
