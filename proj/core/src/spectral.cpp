#include "strat2d/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "strat2d/errors.hpp"

namespace strat2d {

namespace {

constexpr double kMeanTolerance = 1e-12;
constexpr double kSymmetryTolerance = 1e-10;

ComplexBuffer zeros(std::size_t n) { return ComplexBuffer(n, Complex{0.0, 0.0}); }

// Inverse transform of a and b packed as a + i b; both must be Hermitian.
void inverse_pair(const SpectralField& a, const SpectralField& b, std::vector<double>& ra,
                  std::vector<double>& rb) {
  const auto n = a.grid().n();
  const std::size_t size = a.grid().size();
  ComplexBuffer buf(size);
  const auto ca = a.coeffs();
  const auto cb = b.coeffs();
  for (std::size_t i = 0; i < size; ++i) {
    buf[i] = ca[i] + Complex{-cb[i].imag(), cb[i].real()};
  }
  fft2d_backward(buf, n);
  ra.resize(size);
  rb.resize(size);
  for (std::size_t i = 0; i < size; ++i) {
    ra[i] = buf[i].real();
    rb[i] = buf[i].imag();
  }
}

// Forward transform of two real arrays packed into one complex transform.
void forward_pair(const Grid& grid, std::span<const double> p, std::span<const double> q,
                  SpectralField& out_p, SpectralField& out_q) {
  const std::size_t size = grid.size();
  ComplexBuffer buf(size);
  for (std::size_t i = 0; i < size; ++i) buf[i] = Complex{p[i], q[i]};
  fft2d_forward(buf, grid.n());
  const double scale = 1.0 / static_cast<double>(size);
  auto cp = out_p.coeffs();
  auto cq = out_q.coeffs();
  for (std::size_t i = 0; i < size; ++i) {
    const Complex z = buf[i] * scale;
    const Complex zc = std::conj(buf[grid.conjugate_index(i)] * scale);
    cp[i] = 0.5 * (z + zc);
    const Complex d = 0.5 * (z - zc);
    cq[i] = Complex{d.imag(), -d.real()};
  }
}

std::vector<double> inverse_unchecked(const SpectralField& f) {
  ComplexBuffer buf(f.coeffs().begin(), f.coeffs().end());
  fft2d_backward(buf, f.grid().n());
  std::vector<double> out(buf.size());
  for (std::size_t i = 0; i < buf.size(); ++i) out[i] = buf[i].real();
  return out;
}

}  // namespace

void validate(const GridSpec& spec) {
  if (spec.n_per_axis < 8 || spec.n_per_axis % 2 != 0) {
    throw InvalidArgument("grid: n_per_axis must be an even integer >= 8, got " +
                          std::to_string(spec.n_per_axis));
  }
  if (!(spec.box_scale > 0.0) || !std::isfinite(spec.box_scale)) {
    throw InvalidArgument("grid: box_scale must be positive");
  }
  if (!(spec.dealias_fraction > 0.0 && spec.dealias_fraction <= 1.0)) {
    throw InvalidArgument("grid: dealias_fraction must lie in (0, 1]");
  }
}

Grid::Grid(GridSpec spec) {
  validate(spec);
  auto d = std::make_shared<Data>();
  d->spec = spec;
  const int n = spec.n_per_axis;
  const std::size_t size = static_cast<std::size_t>(n) * n;
  d->xi1.resize(size);
  d->xi2.resize(size);
  d->abs_xi.resize(size);
  d->kmax.resize(size);
  d->conj_index.resize(size);
  const double inv_l = 1.0 / spec.box_scale;
  auto wn = [n](int i) { return i <= n / 2 ? i : i - n; };
  auto idx = [n](int k) { return ((k % n) + n) % n; };
  for (int i1 = 0; i1 < n; ++i1) {
    const int k1 = wn(i1);
    for (int i2 = 0; i2 < n; ++i2) {
      const int k2 = wn(i2);
      const std::size_t f = static_cast<std::size_t>(i1) * n + i2;
      d->xi1[f] = (2 * k1 == n) ? 0.0 : k1 * inv_l;
      d->xi2[f] = (2 * k2 == n) ? 0.0 : k2 * inv_l;
      d->abs_xi[f] = std::hypot(static_cast<double>(k1), static_cast<double>(k2)) * inv_l;
      d->kmax[f] = std::max(std::abs(k1), std::abs(k2));
      d->conj_index[f] = static_cast<std::size_t>(idx(-k1)) * n + idx(-k2);
    }
  }
  data_ = std::move(d);
}

double Grid::spacing() const noexcept { return 2.0 * std::numbers::pi * box_scale() / n(); }
double Grid::domain_area() const noexcept {
  const double side = 2.0 * std::numbers::pi * box_scale();
  return side * side;
}
double Grid::cell_area() const noexcept { return spacing() * spacing(); }

SpectralField::SpectralField(Grid grid) : grid_(std::move(grid)), coeffs_(zeros(grid_.size())) {}

SpectralField::SpectralField(Grid grid, ComplexBuffer coeffs)
    : grid_(std::move(grid)), coeffs_(std::move(coeffs)) {
  if (coeffs_.size() != grid_.size()) {
    throw DimensionMismatch("SpectralField: coefficient count does not match grid");
  }
}

Complex SpectralField::mode(int k1, int k2) const {
  const int n = grid_.n();
  if (std::abs(k1) > n / 2 || std::abs(k2) > n / 2) throw OutOfRange("mode: wave-vector outside grid");
  return coeffs_[grid_.flat(grid_.index_of(k1), grid_.index_of(k2))];
}

void SpectralField::set_mode(int k1, int k2, Complex c) {
  const int n = grid_.n();
  if (std::abs(k1) > n / 2 || std::abs(k2) > n / 2) throw OutOfRange("set_mode: wave-vector outside grid");
  const std::size_t i = grid_.flat(grid_.index_of(k1), grid_.index_of(k2));
  const std::size_t j = grid_.conjugate_index(i);
  if (i == j) {
    coeffs_[i] = Complex{c.real(), 0.0};
  } else {
    coeffs_[i] = c;
    coeffs_[j] = std::conj(c);
  }
}

double SpectralField::coeff_norm() const noexcept {
  double s = 0.0;
  for (const auto& c : coeffs_) s += std::norm(c);
  return std::sqrt(s);
}

SpectralField& SpectralField::operator+=(const SpectralField& o) {
  require_same_grid(*this, o, "operator+=");
  for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] += o.coeffs_[i];
  return *this;
}

SpectralField& SpectralField::operator-=(const SpectralField& o) {
  require_same_grid(*this, o, "operator-=");
  for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] -= o.coeffs_[i];
  return *this;
}

SpectralField& SpectralField::operator*=(double a) noexcept {
  for (auto& c : coeffs_) c *= a;
  return *this;
}

SpectralField& SpectralField::axpy(double a, const SpectralField& o) {
  require_same_grid(*this, o, "axpy");
  for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] += a * o.coeffs_[i];
  return *this;
}

void require_same_grid(const SpectralField& a, const SpectralField& b, const char* where) {
  if (!(a.grid() == b.grid())) throw GridMismatch(std::string(where) + ": fields live on different grids");
}

void require_mean_zero(const SpectralField& f, const char* where) {
  const double m = std::abs(f.mean());
  if (m > kMeanTolerance * f.coeff_norm()) {
    throw NonzeroMean(std::string(where) + ": field must have zero mean");
  }
}

double hermitian_defect(const SpectralField& f) {
  const double norm = f.coeff_norm();
  if (norm == 0.0) return 0.0;
  const auto& g = f.grid();
  double worst = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    worst = std::max(worst, std::abs(f[g.conjugate_index(i)] - std::conj(f[i])));
  }
  return worst / norm;
}

SpectralField forward_transform(const Grid& grid, std::span<const double> samples) {
  if (samples.size() != grid.size()) {
    throw DimensionMismatch("forward_transform: expected " + std::to_string(grid.size()) +
                            " samples, got " + std::to_string(samples.size()));
  }
  ComplexBuffer buf(grid.size());
  for (std::size_t i = 0; i < buf.size(); ++i) buf[i] = Complex{samples[i], 0.0};
  fft2d_forward(buf, grid.n());
  const double scale = 1.0 / static_cast<double>(grid.size());
  for (auto& c : buf) c *= scale;
  SpectralField out(grid, std::move(buf));
  // Stored spectra are exactly Hermitian.
  auto c = out.coeffs();
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const std::size_t j = grid.conjugate_index(i);
    if (j < i) continue;
    if (j == i) {
      c[i] = Complex{c[i].real(), 0.0};
    } else {
      const Complex avg = 0.5 * (c[i] + std::conj(c[j]));
      c[i] = avg;
      c[j] = std::conj(avg);
    }
  }
  return out;
}

SpectralField forward_transform(const PhysicalField& f) { return forward_transform(f.grid, f.values); }

std::vector<double> inverse_transform(const SpectralField& f) {
  if (hermitian_defect(f) > kSymmetryTolerance) {
    throw SymmetryViolation("inverse_transform: coefficients are not Hermitian-symmetric");
  }
  return inverse_unchecked(f);
}

PhysicalField to_physical(const SpectralField& f) { return PhysicalField{f.grid(), inverse_transform(f)}; }

PhysicalField sample(const Grid& grid, const std::function<double(double, double)>& fn) {
  PhysicalField out{grid, std::vector<double>(grid.size())};
  const int n = grid.n();
  for (int i1 = 0; i1 < n; ++i1) {
    const double x1 = grid.coordinate(i1);
    for (int i2 = 0; i2 < n; ++i2) out.values[grid.flat(i1, i2)] = fn(x1, grid.coordinate(i2));
  }
  return out;
}

SpectralField derivative(const SpectralField& f, Axis axis) {
  SpectralField out(f.grid());
  const auto xi = axis == Axis::X1 ? f.grid().xi1() : f.grid().xi2();
  auto o = out.coeffs();
  const auto c = f.coeffs();
  for (std::size_t i = 0; i < c.size(); ++i) o[i] = Complex{0.0, xi[i]} * c[i];
  return out;
}

SpectralField lambda_power(const SpectralField& f, double s) {
  if (s < 0.0) require_mean_zero(f, "lambda_power");
  SpectralField out(f.grid());
  if (s == 0.0) {
    out = f;
    return out;
  }
  const auto a = f.grid().abs_xi();
  auto o = out.coeffs();
  const auto c = f.coeffs();
  for (std::size_t i = 1; i < c.size(); ++i) o[i] = std::pow(a[i], s) * c[i];
  o[0] = 0.0;
  return out;
}

SpectralField inverse_laplacian(const SpectralField& f) {
  require_mean_zero(f, "inverse_laplacian");
  SpectralField out(f.grid());
  const auto a = f.grid().abs_xi();
  auto o = out.coeffs();
  const auto c = f.coeffs();
  for (std::size_t i = 1; i < c.size(); ++i) o[i] = c[i] / (a[i] * a[i]);
  return out;
}

SpectralField neg_laplacian(const SpectralField& f) {
  SpectralField out(f.grid());
  const auto a = f.grid().abs_xi();
  auto o = out.coeffs();
  const auto c = f.coeffs();
  for (std::size_t i = 0; i < c.size(); ++i) o[i] = (a[i] * a[i]) * c[i];
  return out;
}

VectorField biot_savart(const SpectralField& omega) {
  require_mean_zero(omega, "biot_savart");
  const auto& g = omega.grid();
  VectorField u{SpectralField(g), SpectralField(g)};
  const auto x1 = g.xi1();
  const auto x2 = g.xi2();
  const auto a = g.abs_xi();
  const auto c = omega.coeffs();
  auto o1 = u.u1.coeffs();
  auto o2 = u.u2.coeffs();
  for (std::size_t i = 1; i < c.size(); ++i) {
    const Complex psi = c[i] / (a[i] * a[i]);
    o1[i] = Complex{0.0, -x2[i]} * psi;
    o2[i] = Complex{0.0, x1[i]} * psi;
  }
  return u;
}

SpectralField riesz(const SpectralField& f, Axis axis) {
  require_mean_zero(f, "riesz");
  SpectralField out(f.grid());
  const auto xi = axis == Axis::X1 ? f.grid().xi1() : f.grid().xi2();
  const auto a = f.grid().abs_xi();
  auto o = out.coeffs();
  const auto c = f.coeffs();
  for (std::size_t i = 1; i < c.size(); ++i) o[i] = Complex{0.0, xi[i] / a[i]} * c[i];
  return out;
}

SpectralField divergence(const VectorField& u) {
  require_same_grid(u.u1, u.u2, "divergence");
  SpectralField out = derivative(u.u1, Axis::X1);
  out += derivative(u.u2, Axis::X2);
  return out;
}

void dealias_in_place(SpectralField& f) {
  const auto& g = f.grid();
  const double limit = g.spec().dealias_fraction * (g.n() / 2);
  const auto km = g.kmax_index();
  auto c = f.coeffs();
  for (std::size_t i = 0; i < c.size(); ++i) {
    if (km[i] > limit) c[i] = 0.0;
  }
}

SpectralField dealias(const SpectralField& f) {
  SpectralField out = f;
  dealias_in_place(out);
  return out;
}

bool is_dealiased(const SpectralField& f) {
  const auto& g = f.grid();
  const double limit = g.spec().dealias_fraction * (g.n() / 2);
  const auto km = g.kmax_index();
  const auto c = f.coeffs();
  for (std::size_t i = 0; i < c.size(); ++i) {
    if (km[i] > limit && c[i] != Complex{0.0, 0.0}) return false;
  }
  return true;
}

SpectralField apply_radial(const SpectralField& f, const std::function<double(double)>& symbol) {
  SpectralField out(f.grid());
  const auto a = f.grid().abs_xi();
  auto o = out.coeffs();
  const auto c = f.coeffs();
  for (std::size_t i = 0; i < c.size(); ++i) o[i] = symbol(a[i]) * c[i];
  return out;
}

SpectralField product(const SpectralField& f, const SpectralField& g) {
  require_same_grid(f, g, "product");
  std::vector<double> pf, pg;
  inverse_pair(f, g, pf, pg);
  for (std::size_t i = 0; i < pf.size(); ++i) pf[i] *= pg[i];
  SpectralField out = forward_transform(f.grid(), pf);
  dealias_in_place(out);
  return out;
}

SpectralField advect(const VectorField& u, const SpectralField& g) {
  require_same_grid(u.u1, g, "advect");
  require_same_grid(u.u2, g, "advect");
  std::vector<double> u1, u2, g1, g2;
  inverse_pair(u.u1, u.u2, u1, u2);
  inverse_pair(derivative(g, Axis::X1), derivative(g, Axis::X2), g1, g2);
  for (std::size_t i = 0; i < u1.size(); ++i) u1[i] = u1[i] * g1[i] + u2[i] * g2[i];
  SpectralField out = forward_transform(g.grid(), u1);
  dealias_in_place(out);
  return out;
}

namespace detail {

// Used by the solver: advects two scalars by the same velocity with packed
// transforms (three inverse, one forward).
void advect_pair(const VectorField& u, const SpectralField& a, const SpectralField& b,
                 SpectralField& out_a, SpectralField& out_b, bool dealias) {
  std::vector<double> u1, u2, a1, a2, b1, b2;
  inverse_pair(u.u1, u.u2, u1, u2);
  inverse_pair(derivative(a, Axis::X1), derivative(a, Axis::X2), a1, a2);
  inverse_pair(derivative(b, Axis::X1), derivative(b, Axis::X2), b1, b2);
  for (std::size_t i = 0; i < u1.size(); ++i) {
    a1[i] = u1[i] * a1[i] + u2[i] * a2[i];
    b1[i] = u1[i] * b1[i] + u2[i] * b2[i];
  }
  forward_pair(a.grid(), a1, b1, out_a, out_b);
  if (dealias) {
    dealias_in_place(out_a);
    dealias_in_place(out_b);
  }
}

}  // namespace detail

double l2_norm(const SpectralField& f) {
  return std::sqrt(f.grid().domain_area()) * f.coeff_norm();
}

double l2_norm(const VectorField& u) { return std::hypot(l2_norm(u.u1), l2_norm(u.u2)); }

double linf_norm(const SpectralField& f) {
  const auto v = inverse_unchecked(f);
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

double lp_norm(const SpectralField& f, double p) {
  if (!(p >= 1.0)) throw InvalidArgument("lp_norm: p must be >= 1");
  if (p == 2.0) return l2_norm(f);
  if (std::isinf(p)) return linf_norm(f);
  const auto v = inverse_unchecked(f);
  double s = 0.0;
  for (double x : v) s += std::pow(std::abs(x), p);
  return std::pow(s * f.grid().cell_area(), 1.0 / p);
}

double gradient_linf(const VectorField& u) {
  std::vector<double> a, b, c, d;
  inverse_pair(derivative(u.u1, Axis::X1), derivative(u.u1, Axis::X2), a, b);
  inverse_pair(derivative(u.u2, Axis::X1), derivative(u.u2, Axis::X2), c, d);
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    m = std::max(m, a[i] * a[i] + b[i] * b[i] + c[i] * c[i] + d[i] * d[i]);
  }
  return std::sqrt(m);
}

double gradient_linf(const SpectralField& g) {
  std::vector<double> a, b;
  inverse_pair(derivative(g, Axis::X1), derivative(g, Axis::X2), a, b);
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, a[i] * a[i] + b[i] * b[i]);
  return std::sqrt(m);
}

double inner_l2(const SpectralField& f, const SpectralField& g) {
  require_same_grid(f, g, "inner_l2");
  const auto a = f.coeffs();
  const auto b = g.coeffs();
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] * std::conj(b[i])).real();
  return f.grid().domain_area() * s;
}

double inner_hminus1(const SpectralField& f, const SpectralField& g) {
  require_same_grid(f, g, "inner_hminus1");
  require_mean_zero(f, "inner_hminus1");
  require_mean_zero(g, "inner_hminus1");
  const auto a = f.coeffs();
  const auto b = g.coeffs();
  const auto m = f.grid().abs_xi();
  double s = 0.0;
  for (std::size_t i = 1; i < a.size(); ++i) s += (a[i] * std::conj(b[i])).real() / (m[i] * m[i]);
  return f.grid().domain_area() * s;
}

double weighted_energy(const SpectralField& f, const std::function<double(double)>& weight) {
  const auto c = f.coeffs();
  const auto m = f.grid().abs_xi();
  double s = 0.0;
  for (std::size_t i = 0; i < c.size(); ++i) s += weight(m[i]) * std::norm(c[i]);
  return f.grid().domain_area() * s;
}

}  // namespace strat2d
