#include "strat2d/estimates.hpp"

#include <cmath>

#include "strat2d/errors.hpp"

namespace strat2d {

namespace {

VectorField scaled(VectorField u, double a) {
  u.u1 *= a;
  u.u2 *= a;
  return u;
}

VectorField lowpass_vector(const VectorField& f, int k, const DyadicBank& bank) {
  return VectorField{lowpass_hom(f.u1, k, bank), lowpass_hom(f.u2, k, bank)};
}

double hom(const SpectralField& f, double s, double q, const DyadicBank& bank) {
  return besov_norm(f, BesovSpec{s, 2.0, q, true}, bank);
}

double hom(const VectorField& f, double s, double q, const DyadicBank& bank) {
  return besov_norm(f, BesovSpec{s, 2.0, q, true}, bank);
}

struct TrialFields {
  VectorField f;
  SpectralField g;
};

TrialFields draw(const Grid& grid, const BatteryOptions& o, int trial) {
  CounterRng rng = CounterRng(o.seed).split(static_cast<std::uint64_t>(trial));
  const PowerLawSpectrum spec = interior_band_spectrum(o.band_lo, o.band_hi, o.alpha);
  VectorField f = scaled(random_divergence_free(grid, spec, rng), o.f_scale);
  SpectralField g = random_scalar_field(grid, spec, rng);
  return {std::move(f), std::move(g)};
}

double commutator_lhs(Lemma which, const VectorField& f, const SpectralField& g, double s, double q,
                      const DyadicBank& bank) {
  std::vector<double> terms;
  for (int j = bank.j_min(); j <= bank.j_max(); ++j) {
    SpectralField c = which == Lemma::Bracket  ? commutator_bracket(f, g, j, bank)
                      : which == Lemma::Lambda ? commutator_lambda(f, g, j, bank)
                                               : commutator_smoothed(f, g, j, bank);
    terms.push_back(std::exp2(s * j) * l2_norm(c));
  }
  return lq_aggregate(terms, q);
}

double commutator_rhs(Lemma which, const VectorField& f, const SpectralField& g, double s, double q,
                      const DyadicBank& bank) {
  const double grad_f = gradient_linf(f);
  switch (which) {
    case Lemma::Bracket:
      return grad_f * hom(g, s, q, bank) + gradient_linf(g) * hom(f, s, q, bank);
    case Lemma::Lambda:
      return grad_f * hom(g, s - 1.0, q, bank) + linf_norm(g) * hom(f, s, q, bank);
    default:
      return grad_f * hom(g, s, q, bank) + linf_norm(g) * hom(f, s + 1.0, q, bank);
  }
}

template <class Fn>
double max_ratio_on(const GridSpec& spec, const BatteryOptions& o, Fn&& fn, std::vector<double>* lhs,
                    std::vector<double>* rhs) {
  const Grid grid(spec);
  const DyadicBank bank(grid);
  double m = 0.0;
  for (int t = 0; t < o.trials; ++t) {
    const TrialFields tf = draw(grid, o, t);
    const auto [l, r] = fn(tf, bank);
    if (lhs) lhs->push_back(l);
    if (rhs) rhs->push_back(r);
    if (r > 0.0) m = std::max(m, l / r);
  }
  return m;
}

template <class Fn>
RatioReport battery(Lemma lemma, const BatteryOptions& o, Fn&& fn) {
  if (o.trials < 1) throw InvalidArgument("verify: trials must be positive");
  RatioReport rep;
  rep.lemma = lemma;
  rep.trials = o.trials;
  rep.seed = o.seed;
  rep.s = o.s;
  rep.q = o.q;
  rep.n = o.grid.n_per_axis;
  rep.max_ratio = max_ratio_on(o.grid, o, fn, &rep.lhs, &rep.rhs);
  GridSpec doubled = o.grid;
  doubled.n_per_axis *= 2;
  rep.max_ratio_doubled = max_ratio_on(doubled, o, fn, nullptr, nullptr);
  rep.relative_change = rep.max_ratio > 0.0 ? std::abs(rep.max_ratio_doubled / rep.max_ratio - 1.0) : 0.0;
  return rep;
}

}  // namespace

SpectralField commutator_bracket(const VectorField& f, const SpectralField& g, int j, const DyadicBank& bank) {
  require_same_grid(f.u1, g, "commutator_bracket");
  return advect(f, project_band(g, j, bank)) - project_band(advect(f, g), j, bank);
}

SpectralField commutator_lambda(const VectorField& f, const SpectralField& g, int j, const DyadicBank& bank) {
  require_same_grid(f.u1, g, "commutator_lambda");
  SpectralField inner = project_band(g, j, bank);
  inner[0] = 0.0;
  SpectralField outer = project_band(advect(f, g), j, bank);
  outer[0] = 0.0;
  return advect(f, lambda_power(inner, -1.0)) - lambda_power(outer, -1.0);
}

SpectralField commutator_smoothed(const VectorField& f, const SpectralField& g, int j, const DyadicBank& bank) {
  require_same_grid(f.u1, g, "commutator_smoothed");
  return advect(lowpass_vector(f, j - 2, bank), project_band(g, j, bank)) - project_band(advect(f, g), j, bank);
}

std::string to_string(Lemma l) {
  switch (l) {
    case Lemma::Bracket:
      return "bracket";
    case Lemma::Lambda:
      return "lambda";
    case Lemma::Smoothed:
      return "smoothed";
    case Lemma::Product:
      return "product";
    case Lemma::Bernstein:
      return "bernstein";
  }
  return "unknown";
}

Lemma parse_lemma(const std::string& name) {
  for (Lemma l : {Lemma::Bracket, Lemma::Lambda, Lemma::Smoothed, Lemma::Product, Lemma::Bernstein}) {
    if (to_string(l) == name) return l;
  }
  throw InvalidArgument("unknown lemma '" + name + "'");
}

RatioReport verify_commutator_lemma(Lemma which, const BatteryOptions& options) {
  switch (which) {
    case Lemma::Bracket:
    case Lemma::Lambda:
      if (!(options.s > 0.0)) throw InvalidArgument("verify_commutator_lemma: need s > 0");
      break;
    case Lemma::Smoothed:
      if (!(options.s > -1.0)) throw InvalidArgument("verify_commutator_lemma: need s > -1");
      break;
    default:
      throw InvalidArgument("verify_commutator_lemma: not a commutator family");
  }
  const double s = options.s;
  const double q = options.q;
  return battery(which, options, [&](const TrialFields& tf, const DyadicBank& bank) {
    return std::make_pair(commutator_lhs(which, tf.f, tf.g, s, q, bank), commutator_rhs(which, tf.f, tf.g, s, q, bank));
  });
}

RatioReport verify_product_rule(const BatteryOptions& options) {
  if (!(options.s > 0.0)) throw InvalidArgument("verify_product_rule: need s > 0");
  const double s = options.s;
  const double q = options.q;
  return battery(Lemma::Product, options, [&](const TrialFields& tf, const DyadicBank& bank) {
    // The scalar pair is (g, f_1): both follow the same spectrum.
    const SpectralField& f = tf.g;
    const SpectralField& g = tf.f.u1;
    const double lhs = hom(product(f, g), s, q, bank);
    const double rhs = linf_norm(g) * hom(f, s, q, bank) + linf_norm(f) * hom(g, s, q, bank);
    return std::make_pair(lhs, rhs);
  });
}

BernsteinReport bernstein_check(const DyadicBank& bank, int j, int trials, std::uint64_t seed) {
  if (!bank.contains(j)) throw OutOfRange("bernstein_check: band outside the bank");
  BernsteinReport rep;
  rep.j = j;
  rep.trials = trials;
  rep.min_scaled = std::numeric_limits<double>::infinity();
  const double scale = std::exp2(j);
  for (int t = 0; t < trials; ++t) {
    CounterRng rng = CounterRng(seed).split(static_cast<std::uint64_t>(t));
    const SpectralField f = random_band_field(bank, j, rng);
    const double nf = l2_norm(f);
    if (!(nf > 0.0)) continue;
    const double ng = std::hypot(l2_norm(derivative(f, Axis::X1)), l2_norm(derivative(f, Axis::X2)));
    const double r = ng / nf / scale;
    rep.min_scaled = std::min(rep.min_scaled, r);
    rep.max_scaled = std::max(rep.max_scaled, r);
    if (r < 0.625 || r > 1.75) ++rep.violations;
  }
  return rep;
}

CancellationResult cancellation_check(const SpectralField& omega, const SpectralField& rho, const DyadicBank& bank) {
  require_same_grid(omega, rho, "cancellation_check");
  require_mean_zero(omega, "cancellation_check");
  auto pairing = [](const SpectralField& w, const SpectralField& r) {
    return inner_hminus1(derivative(r, Axis::X1), w) + inner_l2(biot_savart(w).u2, r);
  };
  CancellationResult out;
  SpectralField w = omega;
  w[0] = 0.0;
  out.residual = std::abs(pairing(w, rho));
  out.scale = hminus1_norm(w) * l2_norm(rho);
  for (int j = bank.j_min(); j <= bank.j_max(); ++j) {
    SpectralField wj = project_band(w, j, bank);
    wj[0] = 0.0;
    out.band_residuals.push_back(std::abs(pairing(wj, project_band(rho, j, bank))));
  }
  return out;
}

double transport_check(const VectorField& u, const SpectralField& g) {
  return std::abs(inner_l2(advect(u, g), g));
}

}  // namespace strat2d
