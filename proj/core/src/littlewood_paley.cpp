#include "strat2d/littlewood_paley.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "strat2d/errors.hpp"

namespace strat2d {

double smooth_step(double t) {
  if (t <= 0.0) return 0.0;
  if (t >= 1.0) return 1.0;
  const double a = std::exp(-1.0 / t);
  const double b = std::exp(-1.0 / (1.0 - t));
  return a / (a + b);
}

double lp_chi(double r) { return smooth_step((1.75 - r) / 0.5); }

double lp_psi(int j, double r) {
  return lp_chi(std::ldexp(r, -j)) - lp_chi(std::ldexp(r, 1 - j));
}

DyadicBank::DyadicBank(Grid grid) : grid_(std::move(grid)) {
  const double xi_min = grid_.min_frequency();
  const double cutoff = grid_.dealias_cutoff();

  // Lowest band: psi_{j_min - 1} must vanish on every nonzero grid frequency,
  // i.e. 7/8 2^j_min <= 1/L0.
  j_min_ = static_cast<int>(std::floor(std::log2(xi_min / 0.875)));
  while (0.875 * std::ldexp(1.0, j_min_ + 1) <= xi_min) ++j_min_;
  while (0.875 * std::ldexp(1.0, j_min_) > xi_min) --j_min_;

  // Highest band fully supported below the dealias cutoff.
  j_max_ = static_cast<int>(std::floor(std::log2(cutoff / 1.75)));
  while (1.75 * std::ldexp(1.0, j_max_ + 1) <= cutoff) ++j_max_;
  while (1.75 * std::ldexp(1.0, j_max_) > cutoff) --j_max_;

  if (j_max_ - j_min_ + 1 < 3) {
    throw InvalidArgument("build_bank: grid too small to host three dyadic bands (n=" +
                          std::to_string(grid_.n()) + ")");
  }

  bands_.resize(static_cast<std::size_t>(band_count()));
  const auto a = grid_.abs_xi();
  for (std::size_t i = 1; i < a.size(); ++i) {
    for (int j = j_min_; j <= j_max_; ++j) {
      const double w = lp_psi(j, a[i]);
      if (w != 0.0) bands_[static_cast<std::size_t>(j - j_min_)].push_back({i, w});
    }
  }
}

std::span<const BandEntry> DyadicBank::band(int j) const {
  if (!contains(j)) {
    throw OutOfRange("band index " + std::to_string(j) + " outside [" + std::to_string(j_min_) +
                     ", " + std::to_string(j_max_) + "]");
  }
  return bands_[static_cast<std::size_t>(j - j_min_)];
}

double DyadicBank::partition_residual() const {
  const auto a = grid_.abs_xi();
  std::vector<double> sum(a.size(), 0.0);
  for (int j = j_min_; j <= j_max_; ++j) {
    for (const auto& e : band(j)) sum[e.index] += e.weight;
  }
  const double lo = 0.625 * std::ldexp(1.0, j_min_ + 1);
  const double hi = 0.625 * std::ldexp(1.0, j_max_);
  double worst = 0.0;
  for (std::size_t i = 1; i < a.size(); ++i) {
    if (a[i] >= lo && a[i] <= hi) worst = std::max(worst, std::abs(sum[i] - 1.0));
  }
  return worst;
}

DyadicBank build_bank(const Grid& grid) { return DyadicBank(grid); }

SpectralField project_band(const SpectralField& f, int j, const DyadicBank& bank) {
  if (!(f.grid() == bank.grid())) throw GridMismatch("project_band: bank built for another grid");
  SpectralField out(f.grid());
  for (const auto& e : bank.band(j)) out[e.index] = e.weight * f[e.index];
  return out;
}

namespace {

SpectralField lowpass(const SpectralField& f, int k, bool keep_mean) {
  SpectralField out(f.grid());
  const auto a = f.grid().abs_xi();
  for (std::size_t i = 1; i < a.size(); ++i) {
    const double w = lp_chi(std::ldexp(a[i], -k));
    if (w != 0.0) out[i] = w * f[i];
  }
  if (keep_mean) out[0] = f[0];
  return out;
}

double band_l2(const SpectralField& f, std::span<const BandEntry> entries) {
  double s = 0.0;
  for (const auto& e : entries) s += e.weight * e.weight * std::norm(f[e.index]);
  return std::sqrt(f.grid().domain_area() * s);
}

double vector_lp(const SpectralField& a, const SpectralField& b, double p) {
  if (p == 2.0) return std::hypot(l2_norm(a), l2_norm(b));
  const auto pa = inverse_transform(a);
  const auto pb = inverse_transform(b);
  if (std::isinf(p)) {
    double m = 0.0;
    for (std::size_t i = 0; i < pa.size(); ++i) m = std::max(m, pa[i] * pa[i] + pb[i] * pb[i]);
    return std::sqrt(m);
  }
  double s = 0.0;
  for (std::size_t i = 0; i < pa.size(); ++i) s += std::pow(std::hypot(pa[i], pb[i]), p);
  return std::pow(s * a.grid().cell_area(), 1.0 / p);
}

void check_spec(const BesovSpec& spec) {
  if (!(spec.p >= 1.0) || !(spec.q >= 1.0)) throw InvalidArgument("BesovSpec: p and q must be >= 1");
}

}  // namespace

SpectralField lowpass_hom(const SpectralField& f, int k, const DyadicBank& bank) {
  if (!(f.grid() == bank.grid())) throw GridMismatch("lowpass_hom: bank built for another grid");
  return lowpass(f, k, false);
}

SpectralField lowpass_nonhom(const SpectralField& f, int k, const DyadicBank& bank) {
  if (!(f.grid() == bank.grid())) throw GridMismatch("lowpass_nonhom: bank built for another grid");
  return lowpass(f, k, true);
}

std::vector<double> band_norms(const SpectralField& f, double p, const DyadicBank& bank) {
  if (!(f.grid() == bank.grid())) throw GridMismatch("band_norms: bank built for another grid");
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(bank.band_count()));
  for (int j = bank.j_min(); j <= bank.j_max(); ++j) {
    if (p == 2.0) {
      out.push_back(band_l2(f, bank.band(j)));
    } else {
      out.push_back(lp_norm(project_band(f, j, bank), p));
    }
  }
  return out;
}

std::vector<double> band_norms(const VectorField& u, double p, const DyadicBank& bank) {
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(bank.band_count()));
  for (int j = bank.j_min(); j <= bank.j_max(); ++j) {
    if (p == 2.0) {
      out.push_back(std::hypot(band_l2(u.u1, bank.band(j)), band_l2(u.u2, bank.band(j))));
    } else {
      out.push_back(vector_lp(project_band(u.u1, j, bank), project_band(u.u2, j, bank), p));
    }
  }
  return out;
}

double lq_aggregate(std::span<const double> values, double q) {
  if (std::isinf(q)) {
    double m = 0.0;
    for (double v : values) m = std::max(m, v);
    return m;
  }
  double s = 0.0;
  for (double v : values) s += std::pow(v, q);
  return std::pow(s, 1.0 / q);
}

double besov_norm(const SpectralField& f, const BesovSpec& spec, const DyadicBank& bank) {
  check_spec(spec);
  if (spec.homogeneous) {
    if (spec.s <= 0.0) require_mean_zero(f, "besov_norm");
    auto norms = band_norms(f, spec.p, bank);
    for (int j = bank.j_min(); j <= bank.j_max(); ++j) {
      norms[static_cast<std::size_t>(j - bank.j_min())] *= std::exp2(spec.s * j);
    }
    return lq_aggregate(norms, spec.q);
  }
  std::vector<double> blocks;
  const SpectralField low = lowpass_nonhom(f, 0, bank);
  blocks.push_back(lp_norm(low, spec.p));
  for (int k = std::max(1, bank.j_min()); k <= bank.j_max(); ++k) {
    const double nk = spec.p == 2.0 ? band_l2(f, bank.band(k)) : lp_norm(project_band(f, k, bank), spec.p);
    blocks.push_back(std::exp2(spec.s * k) * nk);
  }
  return lq_aggregate(blocks, spec.q);
}

double besov_norm(const VectorField& u, const BesovSpec& spec, const DyadicBank& bank) {
  check_spec(spec);
  if (spec.homogeneous) {
    auto norms = band_norms(u, spec.p, bank);
    for (int j = bank.j_min(); j <= bank.j_max(); ++j) {
      norms[static_cast<std::size_t>(j - bank.j_min())] *= std::exp2(spec.s * j);
    }
    return lq_aggregate(norms, spec.q);
  }
  std::vector<double> blocks;
  blocks.push_back(vector_lp(lowpass_nonhom(u.u1, 0, bank), lowpass_nonhom(u.u2, 0, bank), spec.p));
  for (int k = std::max(1, bank.j_min()); k <= bank.j_max(); ++k) {
    blocks.push_back(std::exp2(spec.s * k) *
                     vector_lp(project_band(u.u1, k, bank), project_band(u.u2, k, bank), spec.p));
  }
  return lq_aggregate(blocks, spec.q);
}

double hminus1_norm(const SpectralField& f) {
  require_mean_zero(f, "hminus1_norm");
  return std::sqrt(weighted_energy(f, [](double r) { return r > 0.0 ? 1.0 / (r * r) : 0.0; }));
}

BandDecomposition decompose(const SpectralField& f, const DyadicBank& bank) {
  BandDecomposition out{{}, lowpass_nonhom(f, 0, bank), f};
  out.remainder[0] = 0.0;
  for (int j = bank.j_min(); j <= bank.j_max(); ++j) {
    SpectralField b = project_band(f, j, bank);
    out.remainder -= b;
    out.bands.emplace_back(j, std::move(b));
  }
  return out;
}

Paraproduct paraproduct(const SpectralField& f, const SpectralField& g, const DyadicBank& bank) {
  require_same_grid(f, g, "paraproduct");
  if (!(f.grid() == bank.grid())) throw GridMismatch("paraproduct: bank built for another grid");
  const auto& grid = f.grid();
  Paraproduct out{SpectralField(grid), SpectralField(grid), SpectralField(grid)};

  std::vector<SpectralField> df, dg;
  for (int j = bank.j_min(); j <= bank.j_max(); ++j) {
    df.push_back(project_band(f, j, bank));
    dg.push_back(project_band(g, j, bank));
  }
  const auto at = [&](std::vector<SpectralField>& v, int j) -> SpectralField& {
    return v[static_cast<std::size_t>(j - bank.j_min())];
  };

  for (int j = bank.j_min(); j <= bank.j_max(); ++j) {
    const SpectralField sf = lowpass_hom(f, j - 2, bank);
    const SpectralField sg = lowpass_hom(g, j - 2, bank);
    if (sf.coeff_norm() > 0.0 && at(dg, j).coeff_norm() > 0.0) out.t_f_g += product(sf, at(dg, j));
    if (sg.coeff_norm() > 0.0 && at(df, j).coeff_norm() > 0.0) out.t_g_f += product(sg, at(df, j));

    SpectralField near(grid);
    for (int jj = std::max(bank.j_min(), j - 1); jj <= std::min(bank.j_max(), j + 1); ++jj) near += at(dg, jj);
    if (at(df, j).coeff_norm() > 0.0 && near.coeff_norm() > 0.0) out.resonant += product(at(df, j), near);
  }
  return out;
}

}  // namespace strat2d
