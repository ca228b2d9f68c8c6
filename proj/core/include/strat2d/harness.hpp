#pragma once

// Experiment configuration, sweep expansion and result emission.
//
// Configs are JSON documents; every key is optional and falls back to the
// defaults of ExperimentConfig. Overrides use dotted paths into the document
// ("grid.n=128", "kappa=[0,16]", "initial_data.preset=gaussian-bump"); the
// value is parsed as JSON when possible and as a string otherwise.

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "strat2d/dispersive.hpp"
#include "strat2d/estimates.hpp"
#include "strat2d/initial_data.hpp"
#include "strat2d/solver.hpp"

namespace strat2d {

enum class ExperimentKind { Simulate, Picard, Strichartz, LifespanSweep, VerifyEstimates, Kappa0, Bands };
std::string to_string(ExperimentKind k);
/// Accepts the CLI names (simulate, picard, strichartz-sweep, lifespan-sweep,
/// verify-estimates, kappa0, bands) and "strichartz".
ExperimentKind parse_kind(const std::string& name);

std::string to_string(Scheme s);
Scheme parse_scheme(const std::string& name);

struct PicardSettings {
  int n_max = 8;
  int sample_stride = 1;
  /// t_final <= 0 selects the measured local time at kappa = 0.
  double local_time_threshold = 1.0;
  double local_time_max = 2.0;
  double spread_limit = 1.5;
  double cauchy_limit = 0.6;
  int cauchy_from = 3;
};

struct StrichartzSettings {
  double gamma = 4.0;
  double r = std::numeric_limits<double>::infinity();
  /// "lebesgue" (G+- with the psi_0 cutoff into L^r) or "besov" (B^s_{r,q}).
  std::string space = "lebesgue";
  double q = std::numeric_limits<double>::infinity();
  double s = 0.0;
  double t_max = 1.0;
  /// Nodes per unit of kappa t_max beyond the minimum (>= 1).
  double node_factor = 1.0;
  double slope_tolerance = 0.08;
};

struct EstimateSettings {
  std::string lemma = "bracket";
  double s = 1.0;
  double q = 1.0;
  int trials = 100;
  double tolerance = 0.25;
  int band = 2;  ///< band index for the Bernstein check
};

struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::Simulate;
  GridSpec grid;
  std::vector<double> kappas{0.0};
  std::vector<std::uint64_t> seeds{0};
  std::vector<Scheme> schemes{Scheme::Rk4};
  InitialDataSpec initial_data;
  StepperConfig stepper;
  double t_final = 1.0;
  double sample_interval = 0.0;
  bool keep_snapshots = false;
  double blowup_guard = 1e6;
  double lifespan_threshold = 1.0;
  double lifespan_tolerance = 0.05;
  DiagnosticsOptions diagnostics;
  PicardSettings picard;
  StrichartzSettings strichartz;
  EstimateSettings estimates;
  Kappa0Inputs kappa0;
  std::filesystem::path output_dir = "strat2d-out";
};

/// Throws ConfigError on malformed documents, unknown keys, or failed
/// validation.
ExperimentConfig parse_config(const std::string& json_text, const std::vector<std::string>& overrides = {});
ExperimentConfig load_config(const std::filesystem::path& path, const std::vector<std::string>& overrides = {});
/// Canonical JSON of a resolved config (the manifest embeds it).
std::string config_to_json(const ExperimentConfig& config);
/// Throws ConfigError (empty kappa list, bad grid, ...).
void validate(const ExperimentConfig& config);

struct RunSpec {
  std::size_t index = 0;
  double kappa = 0.0;
  std::uint64_t seed = 0;
  Scheme scheme = Scheme::Rk4;
};

/// kappa (outer) x seeds x schemes (inner), in config order.
std::vector<RunSpec> sweep_schedule(const ExperimentConfig& config);

/// Worker count: STRAT2D_THREADS if set and positive, else the hardware
/// concurrency, never more than `jobs`.
int worker_count(std::size_t jobs);

struct RunRecord {
  RunSpec spec;
  std::string status;  ///< completed | threshold_reached | blowup_suspected | error
  std::string message;
  std::string output;
};

struct RunManifest {
  std::string config_json;
  std::string version;
  double wall_seconds = 0.0;
  std::vector<RunRecord> runs;
  std::vector<std::string> outputs;
  std::map<std::string, bool> flags;
  /// Experiment-specific numbers (slope, spread, kappa0, ...).
  std::map<std::string, double> results;

  bool all_pass() const;
};

/// Runs the experiment, writes its products and manifest.json into
/// config.output_dir and returns the manifest.
RunManifest run_experiment(const ExperimentConfig& config);

std::string manifest_to_json(const RunManifest& m);
std::string version_string();

/// Decimal with 17 significant digits (round-trips doubles).
std::string format_double(double v);

}  // namespace strat2d
