#pragma once

// Approximate linear iteration: iterate n+1 solves
//
//   d_t omega' + (u_n . grad) omega' = kappa d_1 rho'
//   d_t rho'   + (u_n . grad) rho'   = kappa u'_2,   u' = BS(omega')
//
// from mollified data S_{n+2}(omega0, rho0), with u_n the velocity of the
// previous iterate. The seed iterate uses the constant velocity BS(S_2 omega0)
// and data S_1(omega0, rho0).

#include <vector>

#include "strat2d/solver.hpp"

namespace strat2d {

/// Time-sampled velocity with cubic (4-point Lagrange) interpolation.
class FrozenVelocity {
 public:
  static FrozenVelocity constant(VectorField u, double t_begin, double t_end);
  /// Velocities BS(omega) at the given increasing times.
  static FrozenVelocity from_vorticity(const std::vector<double>& times, const std::vector<SpectralField>& omega);

  /// Throws OutOfRange outside [t_begin, t_end].
  VectorField at(double t) const;
  double t_begin() const noexcept { return times_.front(); }
  double t_end() const noexcept { return times_.back(); }
  std::size_t size() const noexcept { return u_.size(); }

 private:
  std::vector<double> times_;
  std::vector<VectorField> u_;
};

/// (S_{n+2} omega0, S_{n+2} rho0); the mean of rho is kept.
std::pair<SpectralField, SpectralField> mollify_initial(const SpectralField& omega0, const SpectralField& rho0, int n,
                                                        const DyadicBank& bank);

/// Linear frozen-transport solve with a fixed step. Returns the state after
/// every step, the initial state first. Throws OutOfRange if the frozen
/// velocity does not cover [t0, t0 + t_final].
std::vector<SimState> linear_solve(const FrozenVelocity& frozen, const SimState& initial, double t_final,
                                   const StepperConfig& config);

struct IterationTrace {
  int n = 0;
  double kappa = 0.0;
  double s = 2.0;
  double q = 1.0;
  double a0 = 0.0;
  std::vector<double> t;
  std::vector<double> a;      ///< A_n(t)
  std::vector<double> a_bar;  ///< Abar_n(t); empty for n = 0

  double sup_a() const;
  double sup_a_bar() const;
};

struct PicardOptions {
  double t_final = 0.5;
  int n_max = 8;
  double s = 2.0;
  double q = 1.0;
  /// Records A_n every this many steps (the last step is always recorded).
  int sample_stride = 1;
  StepperConfig stepper{Scheme::IntegratingFactor, DtPolicy::Fixed, 2e-3};
};

struct PicardResult {
  std::vector<IterationTrace> traces;
  SimState final_iterate;
};

PicardResult picard_run(const SpectralField& omega0, const SpectralField& rho0, double kappa,
                        const PicardOptions& options);

/// ||omega||_{B^{s-2}_{2,q}} + ||omega||_{H^-1} + ||rho||_{B^{s-1}_{2,q}}
double difference_norm(const SpectralField& d_omega, const SpectralField& d_rho, double s, double q,
                       const DyadicBank& bank);

struct UniformityReport {
  std::vector<double> kappas;
  std::vector<double> sup_ratio;  ///< sup_{n,t} A_n(t) / A_0 per kappa
  /// sup_t Abar_{n+1} / sup_t Abar_n, per kappa, for n = 1 .. n_max - 1
  std::vector<std::vector<double>> cauchy_ratios;
  double spread = 0.0;
  double spread_limit = 1.5;
  double worst_cauchy_ratio = 0.0;  ///< over n >= cauchy_from
  int cauchy_from = 3;
  double cauchy_limit = 0.6;
  bool uniform_pass = false;
  bool cauchy_pass = false;
};

/// Throws InvalidArgument on an empty list or traces with differing (s, q) or
/// sample grids.
UniformityReport uniformity_report(const std::vector<std::vector<IterationTrace>>& runs, double spread_limit = 1.5,
                                   int cauchy_from = 3, double cauchy_limit = 0.6);

/// Least-squares rate r in sup_t Abar_n ~ c r^n over n >= from.
double fit_decay_rate(const std::vector<IterationTrace>& traces, int from = 1);

/// First t with B(t) >= theta for the nonlinear solution, or t_max.
double local_time(const SpectralField& omega0, const SpectralField& rho0, double kappa, double t_max,
                  const StepperConfig& config, double theta = 1.0);

}  // namespace strat2d
