#pragma once

// Stratified Boussinesq system in vorticity-density form on the torus:
//
//   d_t omega + (u . grad) omega = kappa d_1 rho
//   d_t rho   + (u . grad) rho   = kappa u_2
//   u = grad^perp (-Delta)^{-1} omega
//
// Linear part: on V+- = omega +- Lambda rho each Fourier mode rotates by the
// phase exp(+- i kappa t xi_1 / |xi|). The integrating-factor scheme applies
// that rotation exactly and steps only the advection terms.

#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "strat2d/littlewood_paley.hpp"
#include "strat2d/spectral.hpp"

namespace strat2d {

struct SimState {
  SpectralField omega;
  SpectralField rho;
  double t = 0.0;
  double kappa = 0.0;
};

/// Builds a state: checks grids, requires mean-zero omega (the residual mean is
/// then set to exactly zero) and dealiases both fields.
SimState make_state(SpectralField omega, SpectralField rho, double kappa, double t = 0.0);

enum class Scheme { Rk4, IntegratingFactor };
enum class DtPolicy { Fixed, Cfl };

struct StepperConfig {
  Scheme scheme = Scheme::Rk4;
  DtPolicy dt_policy = DtPolicy::Fixed;
  /// Fixed step, or the upper bound for the CFL policy.
  double dt = 1e-3;
  double cfl_c0 = 0.5;
  double cfl_c1 = 0.5;
  bool dealias_on = true;
  /// Disables the advection terms (linear stratified dynamics only).
  bool nonlinear_on = true;
};

struct Tendency {
  SpectralField d_omega;
  SpectralField d_rho;
};

/// Velocity that transports the unknowns; receives the stage time and the
/// stage vorticity. Absent means "the unknown's own Biot-Savart velocity".
using TransportFn = std::function<VectorField(double t, const SpectralField& omega)>;

/// Full right-hand side with self-transport.
Tendency rhs(const SimState& state, const StepperConfig& config = {});

/// Right-hand side with an externally prescribed transport velocity; the
/// coupling term kappa u_2 always uses the unknown's own velocity.
Tendency rhs_with_transport(const SpectralField& omega, const SpectralField& rho, double kappa,
                            const VectorField& transport, const StepperConfig& config = {});

/// Exact linear propagation over time h (in place).
void propagate_linear(SpectralField& omega, SpectralField& rho, double kappa, double h);

/// dt from the configured policy: the fixed step, or
/// min(c0 dx / ||u||_inf, c1 / (1 + |kappa|), dt) (the kappa cap only for RK4).
double select_dt(const SimState& state, const StepperConfig& config);

/// Advances the state by h. Throws BlowupSuspected on non-finite values.
SimState step(const SimState& state, double h, const StepperConfig& config);
SimState step(const SimState& state, double h, const StepperConfig& config, const TransportFn& transport);

/// Stepper that caches linear propagator tables between calls with equal h.
class Stepper {
 public:
  explicit Stepper(StepperConfig config) : config_(std::move(config)) {}
  const StepperConfig& config() const noexcept { return config_; }
  void advance(SimState& state, double h, const TransportFn* transport = nullptr);

 private:
  struct Rotation {
    double kappa = std::numeric_limits<double>::quiet_NaN();
    double h = std::numeric_limits<double>::quiet_NaN();
    std::vector<double> c, s;
  };
  const Rotation& rotation(const Grid& grid, double kappa, double h, int slot);
  void rotate(const Rotation& r, SpectralField& omega, SpectralField& rho) const;

  StepperConfig config_;
  Rotation rot_[2];
};

struct DiagnosticsOptions {
  double s = 2.0;
  double q = 1.0;
  /// ||V+-||_{B^0_{inf,1}} needs one inverse transform per band and sign.
  bool dispersive_norms = true;
};

struct DiagnosticsRecord {
  double t = 0.0;
  double energy = 0.0;     ///< ||omega||_{H^-1}^2 + ||rho||_{L2}^2
  double z = 0.0;          ///< ||omega||_{B^{s-1}_{2,q} cap H^-1} + ||rho||_{B^s_{2,q}}
  double grad_u_linf = 0.0;
  double grad_rho_linf = 0.0;
  double v_plus_besov = 0.0;   ///< ||V+||_{B^0_{inf,1}} (homogeneous)
  double v_minus_besov = 0.0;  ///< ||V-||_{B^0_{inf,1}} (homogeneous)
  double m_plus = 0.0;         ///< int_0^t ||V+||_{B^0_{inf,1}}
  double m_minus = 0.0;        ///< int_0^t ||V-||_{B^0_{inf,1}}
  double b_integral = 0.0;     ///< int_0^t ||grad rho||_inf + ||grad u||_inf
};

/// ||omega||_{B^{s-1}_{2,q}} + ||omega||_{H^-1} + ||rho||_{B^s_{2,q}} (sum
/// convention for the intersection norm; rho's norm is nonhomogeneous).
double z_norm(const SpectralField& omega, const SpectralField& rho, double s, double q, const DyadicBank& bank);
double energy(const SimState& state);
/// ||grad rho||_inf + ||grad u||_inf.
double gradient_sum(const SimState& state);
/// Instantaneous fields of a record (running integrals left at zero).
DiagnosticsRecord instantaneous_diagnostics(const SimState& state, const DyadicBank& bank,
                                            const DiagnosticsOptions& opts);

enum class Termination { Completed, BlowupSuspected, ThresholdReached };
std::string to_string(Termination t);

struct RunOptions {
  double t_final = 1.0;
  /// Spacing of diagnostic samples; 0 samples after every step. For the fixed
  /// policy it is rounded to a whole number of steps.
  double sample_interval = 0.0;
  /// Store the state at every sample time.
  bool keep_snapshots = false;
  /// Stop when z(t) exceeds guard * z(0) (blow-up guard).
  double blowup_guard = 1e6;
  /// Stop when B(t) reaches this value (lifespan criterion).
  double b_threshold = std::numeric_limits<double>::infinity();
  DiagnosticsOptions diagnostics;
};

struct RunResult {
  std::vector<DiagnosticsRecord> diagnostics;
  std::vector<SimState> snapshots;
  /// (t, B(t)) after every step.
  std::vector<std::pair<double, double>> b_curve;
  SimState final_state;
  Termination termination = Termination::Completed;
  /// Completion time, blow-up time, or interpolated threshold-crossing time.
  double end_time = 0.0;
  std::string message;
};

RunResult run(const SimState& initial, const StepperConfig& config, const RunOptions& options);

struct LifespanResult {
  double t_life = 0.0;
  bool threshold_reached = false;
  Termination termination = Termination::Completed;
  std::vector<std::pair<double, double>> b_curve;
  std::vector<DiagnosticsRecord> diagnostics;
};

/// First t with B(t) >= theta (or the blow-up guard firing), else t_max.
LifespanResult lifespan(const SimState& initial, double t_max, double theta, const StepperConfig& config,
                        RunOptions options = {});

/// Smallest C6 with z(t) <= z(0) exp(C6 B(t)) at every sample:
/// max_t log(z(t)/z(0)) / B(t), clamped at zero. Throws InvalidArgument on an
/// empty series.
double gronwall_fit(const std::vector<DiagnosticsRecord>& series);

}  // namespace strat2d
