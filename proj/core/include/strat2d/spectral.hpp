#pragma once

// Periodic-grid spectral fields and exact Fourier-multiplier operators.
//
// Domain: the torus [0, 2*pi*L0)^2 sampled on an n x n grid. Physical samples
// and Fourier coefficients share the row-major layout index = i1 * n + i2
// (x2 / k2 fastest). Array index i maps to the integer wavenumber
// k = i for i <= n/2 and k = i - n otherwise; the physical frequency is
// xi = k / L0. Coefficients are normalized so that
//   f(x) = sum_k c_k exp(i xi . x),
// i.e. cos(x1) has c_{(+-1,0)} = 1/2.

#include <complex>
#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <vector>

#include "strat2d/fft.hpp"

namespace strat2d {

struct GridSpec {
  int n_per_axis = 64;
  double box_scale = 1.0;
  double dealias_fraction = 2.0 / 3.0;

  bool operator==(const GridSpec&) const = default;
};

/// Throws InvalidArgument unless n >= 8 is even, L0 > 0 and the dealias
/// fraction lies in (0, 1].
void validate(const GridSpec& spec);

enum class Axis { X1 = 1, X2 = 2 };

/// Immutable grid with cached wavenumber tables. Cheap to copy (shared state).
class Grid {
 public:
  explicit Grid(GridSpec spec);

  const GridSpec& spec() const noexcept { return data_->spec; }
  int n() const noexcept { return data_->spec.n_per_axis; }
  double box_scale() const noexcept { return data_->spec.box_scale; }
  std::size_t size() const noexcept { return data_->abs_xi.size(); }

  std::size_t flat(int i1, int i2) const noexcept {
    return static_cast<std::size_t>(i1) * static_cast<std::size_t>(n()) +
           static_cast<std::size_t>(i2);
  }
  int wavenumber(int index) const noexcept { return index <= n() / 2 ? index : index - n(); }
  int index_of(int k) const noexcept { return k >= 0 ? k : k + n(); }
  /// Index of the coefficient holding wave-vector -k.
  std::size_t conjugate_index(std::size_t idx) const noexcept { return data_->conj_index[idx]; }

  /// Physical frequency components with the Nyquist entry set to zero; used by
  /// odd symbols (derivatives, Riesz, Biot-Savart) so real fields stay real.
  std::span<const double> xi1() const noexcept { return data_->xi1; }
  std::span<const double> xi2() const noexcept { return data_->xi2; }
  /// True |xi| including Nyquist entries; used by radial symbols.
  std::span<const double> abs_xi() const noexcept { return data_->abs_xi; }
  /// Chebyshev index max(|k1|, |k2|) in integer units.
  std::span<const int> kmax_index() const noexcept { return data_->kmax; }

  double max_resolved_frequency() const noexcept { return (n() / 2) / box_scale(); }
  double dealias_cutoff() const noexcept { return spec().dealias_fraction * max_resolved_frequency(); }
  double min_frequency() const noexcept { return 1.0 / box_scale(); }
  double spacing() const noexcept;
  double domain_area() const noexcept;
  double cell_area() const noexcept;
  double coordinate(int index) const noexcept { return spacing() * index; }

  bool operator==(const Grid& other) const noexcept {
    return data_ == other.data_ || spec() == other.spec();
  }

 private:
  struct Data {
    GridSpec spec;
    std::vector<double> xi1, xi2, abs_xi;
    std::vector<int> kmax;
    std::vector<std::size_t> conj_index;
  };
  std::shared_ptr<const Data> data_;
};

/// Fourier coefficients of a real scalar field.
class SpectralField {
 public:
  explicit SpectralField(Grid grid);
  SpectralField(Grid grid, ComplexBuffer coeffs);

  const Grid& grid() const noexcept { return grid_; }
  std::span<Complex> coeffs() noexcept { return coeffs_; }
  std::span<const Complex> coeffs() const noexcept { return coeffs_; }
  Complex& operator[](std::size_t idx) noexcept { return coeffs_[idx]; }
  const Complex& operator[](std::size_t idx) const noexcept { return coeffs_[idx]; }

  /// Coefficient of the integer wave-vector (k1, k2).
  Complex mode(int k1, int k2) const;
  /// Sets (k1, k2) to c and (-k1, -k2) to conj(c).
  void set_mode(int k1, int k2, Complex c);

  Complex mean() const noexcept { return coeffs_[0]; }
  /// Euclidean norm of the coefficient vector.
  double coeff_norm() const noexcept;

  SpectralField& operator+=(const SpectralField& o);
  SpectralField& operator-=(const SpectralField& o);
  SpectralField& operator*=(double a) noexcept;
  /// this += a * o
  SpectralField& axpy(double a, const SpectralField& o);

  friend SpectralField operator+(SpectralField a, const SpectralField& b) { return a += b; }
  friend SpectralField operator-(SpectralField a, const SpectralField& b) { return a -= b; }
  friend SpectralField operator*(double s, SpectralField a) { return a *= s; }

 private:
  Grid grid_;
  ComplexBuffer coeffs_;
};

struct VectorField {
  SpectralField u1;
  SpectralField u2;
};

/// Real samples on the grid (row-major, x2 fastest).
struct PhysicalField {
  Grid grid;
  std::vector<double> values;
};

void require_same_grid(const SpectralField& a, const SpectralField& b, const char* where);
/// Throws NonzeroMean when |c_0| > 1e-12 * ||c||.
void require_mean_zero(const SpectralField& f, const char* where);

/// Max |c(-k) - conj(c(k))| relative to the coefficient norm (0 for the zero field).
double hermitian_defect(const SpectralField& f);

SpectralField forward_transform(const Grid& grid, std::span<const double> samples);
SpectralField forward_transform(const PhysicalField& f);
/// Throws SymmetryViolation if the Hermitian defect exceeds 1e-10.
std::vector<double> inverse_transform(const SpectralField& f);
PhysicalField to_physical(const SpectralField& f);

/// Samples a function of (x1, x2) on the grid.
PhysicalField sample(const Grid& grid, const std::function<double(double, double)>& fn);

SpectralField derivative(const SpectralField& f, Axis axis);
/// Lambda^s = (-Delta)^{s/2}. Negative s requires a mean-zero field.
SpectralField lambda_power(const SpectralField& f, double s);
/// (-Delta)^{-1}; requires a mean-zero field.
SpectralField inverse_laplacian(const SpectralField& f);
/// -Delta.
SpectralField neg_laplacian(const SpectralField& f);
/// u = grad^perp (-Delta)^{-1} omega with grad^perp = (-d2, d1).
VectorField biot_savart(const SpectralField& omega);
/// R_axis = d_axis Lambda^{-1}, symbol i xi_axis / |xi|.
SpectralField riesz(const SpectralField& f, Axis axis);
inline SpectralField riesz1(const SpectralField& f) { return riesz(f, Axis::X1); }
SpectralField divergence(const VectorField& u);
/// Zeroes coefficients with max(|k1|,|k2|) > dealias_fraction * n / 2.
SpectralField dealias(const SpectralField& f);
void dealias_in_place(SpectralField& f);
bool is_dealiased(const SpectralField& f);

/// Coefficient-wise multiplication by a real radial symbol m(|xi|).
SpectralField apply_radial(const SpectralField& f, const std::function<double(double)>& symbol);

/// Dealiased pseudospectral product f * g.
SpectralField product(const SpectralField& f, const SpectralField& g);
/// Dealiased advection term (u . grad) g formed from physical-space products.
SpectralField advect(const VectorField& u, const SpectralField& g);

/// p in [1, inf]; p == 2 by Plancherel, p == inf by grid maximum, otherwise
/// uniform-grid quadrature with cell weight (2 pi L0 / n)^2.
double lp_norm(const SpectralField& f, double p);
double l2_norm(const SpectralField& f);
double linf_norm(const SpectralField& f);
double l2_norm(const VectorField& u);
/// max_x |grad u(x)| (Frobenius norm of the 2x2 velocity gradient).
double gradient_linf(const VectorField& u);
/// max_x |grad g(x)|.
double gradient_linf(const SpectralField& g);

double inner_l2(const SpectralField& f, const SpectralField& g);
/// <Lambda^{-1} f, Lambda^{-1} g>_{L2}; both fields must be mean-zero.
double inner_hminus1(const SpectralField& f, const SpectralField& g);

namespace detail {
/// Advects two scalars by one velocity using packed transforms.
void advect_pair(const VectorField& u, const SpectralField& a, const SpectralField& b,
                 SpectralField& out_a, SpectralField& out_b, bool dealias = true);
}  // namespace detail

/// Sum over modes of |c|^2 weighted by w(|xi|), times the domain area.
double weighted_energy(const SpectralField& f, const std::function<double(double)>& weight);

}  // namespace strat2d
