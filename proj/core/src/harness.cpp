#include "strat2d/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <mutex>
#include <sstream>
#include <thread>

#include "json.hpp"
#include "strat2d/dispersive.hpp"
#include "strat2d/errors.hpp"
#include "strat2d/picard.hpp"
#include "strat2d/snapshot_io.hpp"

#ifndef STRAT2D_VERSION
#define STRAT2D_VERSION "unknown"
#endif

namespace strat2d {

using nlohmann::json;

namespace {

json number(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

double read_number(const json& j, const std::string& key) {
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "inf" || s == "infinity") return std::numeric_limits<double>::infinity();
    if (s == "-inf" || s == "-infinity") return -std::numeric_limits<double>::infinity();
    throw ConfigError("config: '" + key + "' must be a number");
  }
  if (!j.is_number()) throw ConfigError("config: '" + key + "' must be a number");
  return j.get<double>();
}

std::string dt_policy_name(DtPolicy p) { return p == DtPolicy::Fixed ? "fixed" : "cfl"; }

DtPolicy parse_dt_policy(const std::string& s) {
  if (s == "fixed") return DtPolicy::Fixed;
  if (s == "cfl") return DtPolicy::Cfl;
  throw ConfigError("config: unknown dt_policy '" + s + "'");
}

json to_json(const ExperimentConfig& c) {
  json j;
  j["experiment"] = to_string(c.kind);
  j["grid"] = {{"n", c.grid.n_per_axis}, {"box_scale", c.grid.box_scale}, {"dealias_fraction", c.grid.dealias_fraction}};
  j["kappa"] = c.kappas;
  j["seeds"] = c.seeds;
  json schemes = json::array();
  for (Scheme s : c.schemes) schemes.push_back(to_string(s));
  j["schemes"] = schemes;
  const auto& d = c.initial_data;
  j["initial_data"] = {{"preset", d.preset}, {"amplitude", d.amplitude}, {"rho_ratio", d.rho_ratio},
                       {"coupling", d.coupling}, {"alpha", d.alpha},         {"xi_min", d.xi_min},
                       {"xi_max", d.xi_max},     {"width", d.width},         {"offset", d.offset}};
  j["stepper"] = {{"dt", c.stepper.dt},
                  {"dt_policy", dt_policy_name(c.stepper.dt_policy)},
                  {"cfl_c0", c.stepper.cfl_c0},
                  {"cfl_c1", c.stepper.cfl_c1},
                  {"dealias", c.stepper.dealias_on},
                  {"nonlinear", c.stepper.nonlinear_on}};
  j["t_final"] = c.t_final;
  j["sample_interval"] = c.sample_interval;
  j["keep_snapshots"] = c.keep_snapshots;
  j["blowup_guard"] = c.blowup_guard;
  j["lifespan"] = {{"threshold", c.lifespan_threshold}, {"tolerance", c.lifespan_tolerance}};
  j["diagnostics"] = {{"s", c.diagnostics.s}, {"q", number(c.diagnostics.q)},
                      {"dispersive_norms", c.diagnostics.dispersive_norms}};
  const auto& p = c.picard;
  j["picard"] = {{"n_max", p.n_max},
                 {"sample_stride", p.sample_stride},
                 {"local_time_threshold", p.local_time_threshold},
                 {"local_time_max", p.local_time_max},
                 {"spread_limit", p.spread_limit},
                 {"cauchy_limit", p.cauchy_limit},
                 {"cauchy_from", p.cauchy_from}};
  const auto& st = c.strichartz;
  j["strichartz"] = {{"gamma", number(st.gamma)}, {"r", number(st.r)},           {"space", st.space},
                     {"q", number(st.q)},         {"s", st.s},                   {"t_max", st.t_max},
                     {"node_factor", st.node_factor}, {"slope_tolerance", st.slope_tolerance}};
  const auto& e = c.estimates;
  j["estimates"] = {{"lemma", e.lemma}, {"s", e.s},         {"q", number(e.q)},
                    {"trials", e.trials}, {"tolerance", e.tolerance}, {"band", e.band}};
  j["kappa0"] = {{"t", c.kappa0.t}, {"z", c.kappa0.z}, {"c6", c.kappa0.c6}, {"c7", c.kappa0.c7},
                 {"gamma", c.kappa0.gamma}};
  j["output_dir"] = c.output_dir.string();
  return j;
}

ExperimentConfig from_json(const json& j) {
  ExperimentConfig c;
  c.kind = parse_kind(j.at("experiment").get<std::string>());
  const auto& g = j.at("grid");
  c.grid.n_per_axis = g.at("n").get<int>();
  c.grid.box_scale = read_number(g.at("box_scale"), "grid.box_scale");
  c.grid.dealias_fraction = read_number(g.at("dealias_fraction"), "grid.dealias_fraction");
  c.kappas.clear();
  for (const auto& k : j.at("kappa")) c.kappas.push_back(read_number(k, "kappa"));
  c.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
  c.schemes.clear();
  for (const auto& s : j.at("schemes")) c.schemes.push_back(parse_scheme(s.get<std::string>()));
  const auto& d = j.at("initial_data");
  c.initial_data.preset = d.at("preset").get<std::string>();
  c.initial_data.amplitude = read_number(d.at("amplitude"), "initial_data.amplitude");
  c.initial_data.rho_ratio = read_number(d.at("rho_ratio"), "initial_data.rho_ratio");
  c.initial_data.coupling = d.at("coupling").get<std::string>();
  c.initial_data.alpha = read_number(d.at("alpha"), "initial_data.alpha");
  c.initial_data.xi_min = read_number(d.at("xi_min"), "initial_data.xi_min");
  c.initial_data.xi_max = read_number(d.at("xi_max"), "initial_data.xi_max");
  c.initial_data.width = read_number(d.at("width"), "initial_data.width");
  c.initial_data.offset = read_number(d.at("offset"), "initial_data.offset");
  const auto& s = j.at("stepper");
  c.stepper.dt = read_number(s.at("dt"), "stepper.dt");
  c.stepper.dt_policy = parse_dt_policy(s.at("dt_policy").get<std::string>());
  c.stepper.cfl_c0 = read_number(s.at("cfl_c0"), "stepper.cfl_c0");
  c.stepper.cfl_c1 = read_number(s.at("cfl_c1"), "stepper.cfl_c1");
  c.stepper.dealias_on = s.at("dealias").get<bool>();
  c.stepper.nonlinear_on = s.at("nonlinear").get<bool>();
  c.t_final = read_number(j.at("t_final"), "t_final");
  c.sample_interval = read_number(j.at("sample_interval"), "sample_interval");
  c.keep_snapshots = j.at("keep_snapshots").get<bool>();
  c.blowup_guard = read_number(j.at("blowup_guard"), "blowup_guard");
  c.lifespan_threshold = read_number(j.at("lifespan").at("threshold"), "lifespan.threshold");
  c.lifespan_tolerance = read_number(j.at("lifespan").at("tolerance"), "lifespan.tolerance");
  const auto& dg = j.at("diagnostics");
  c.diagnostics.s = read_number(dg.at("s"), "diagnostics.s");
  c.diagnostics.q = read_number(dg.at("q"), "diagnostics.q");
  c.diagnostics.dispersive_norms = dg.at("dispersive_norms").get<bool>();
  const auto& p = j.at("picard");
  c.picard.n_max = p.at("n_max").get<int>();
  c.picard.sample_stride = p.at("sample_stride").get<int>();
  c.picard.local_time_threshold = read_number(p.at("local_time_threshold"), "picard.local_time_threshold");
  c.picard.local_time_max = read_number(p.at("local_time_max"), "picard.local_time_max");
  c.picard.spread_limit = read_number(p.at("spread_limit"), "picard.spread_limit");
  c.picard.cauchy_limit = read_number(p.at("cauchy_limit"), "picard.cauchy_limit");
  c.picard.cauchy_from = p.at("cauchy_from").get<int>();
  const auto& st = j.at("strichartz");
  c.strichartz.gamma = read_number(st.at("gamma"), "strichartz.gamma");
  c.strichartz.r = read_number(st.at("r"), "strichartz.r");
  c.strichartz.space = st.at("space").get<std::string>();
  c.strichartz.q = read_number(st.at("q"), "strichartz.q");
  c.strichartz.s = read_number(st.at("s"), "strichartz.s");
  c.strichartz.t_max = read_number(st.at("t_max"), "strichartz.t_max");
  c.strichartz.node_factor = read_number(st.at("node_factor"), "strichartz.node_factor");
  c.strichartz.slope_tolerance = read_number(st.at("slope_tolerance"), "strichartz.slope_tolerance");
  const auto& e = j.at("estimates");
  c.estimates.lemma = e.at("lemma").get<std::string>();
  c.estimates.s = read_number(e.at("s"), "estimates.s");
  c.estimates.q = read_number(e.at("q"), "estimates.q");
  c.estimates.trials = e.at("trials").get<int>();
  c.estimates.tolerance = read_number(e.at("tolerance"), "estimates.tolerance");
  c.estimates.band = e.at("band").get<int>();
  const auto& k0 = j.at("kappa0");
  c.kappa0.t = read_number(k0.at("t"), "kappa0.t");
  c.kappa0.z = read_number(k0.at("z"), "kappa0.z");
  c.kappa0.c6 = read_number(k0.at("c6"), "kappa0.c6");
  c.kappa0.c7 = read_number(k0.at("c7"), "kappa0.c7");
  c.kappa0.gamma = read_number(k0.at("gamma"), "kappa0.gamma");
  c.output_dir = j.at("output_dir").get<std::string>();
  return c;
}

void merge(json& base, const json& patch, const std::string& path) {
  if (!patch.is_object()) throw ConfigError("config: '" + (path.empty() ? "<root>" : path) + "' must be an object");
  for (auto it = patch.begin(); it != patch.end(); ++it) {
    const std::string key = path.empty() ? it.key() : path + "." + it.key();
    if (!base.contains(it.key())) throw ConfigError("config: unknown key '" + key + "'");
    json& slot = base[it.key()];
    if (slot.is_object()) {
      merge(slot, it.value(), key);
    } else {
      slot = it.value();
    }
  }
}

json override_patch(const std::string& text) {
  const auto eq = text.find('=');
  if (eq == std::string::npos || eq == 0) throw ConfigError("override '" + text + "' is not key=value");
  const std::string key = text.substr(0, eq);
  const std::string raw = text.substr(eq + 1);
  json value;
  try {
    value = json::parse(raw);
  } catch (const json::exception&) {
    value = raw;
  }
  std::vector<std::string> parts;
  std::stringstream ss(key);
  std::string part;
  while (std::getline(ss, part, '.')) {
    if (part.empty()) throw ConfigError("override '" + text + "' has an empty path component");
    parts.push_back(part);
  }
  json patch = value;
  for (auto it = parts.rbegin(); it != parts.rend(); ++it) patch = json{{*it, patch}};
  return patch;
}

// ---------------------------------------------------------------- output

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write " + path.string());
  out << text;
  if (!out) throw ConfigError("write failed for " + path.string());
}

class Csv {
 public:
  explicit Csv(std::initializer_list<std::string> header) {
    bool first = true;
    for (const auto& h : header) {
      if (!first) text_ += ',';
      text_ += h;
      first = false;
    }
    text_ += '\n';
  }
  Csv& cell(const std::string& s) {
    sep();
    text_ += s;
    return *this;
  }
  Csv& cell(double v) { return cell(format_double(v)); }
  Csv& cell(long long v) { return cell(std::to_string(v)); }
  Csv& cell(int v) { return cell(std::to_string(v)); }
  Csv& cell(std::uint64_t v) { return cell(std::to_string(v)); }
  void end() {
    text_ += '\n';
    fresh_ = true;
  }
  const std::string& text() const { return text_; }

 private:
  void sep() {
    if (!fresh_) text_ += ',';
    fresh_ = false;
  }
  std::string text_;
  bool fresh_ = true;
};

std::string kappa_tag(double k) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%g", k);
  return buf;
}

std::string run_stem(const std::string& prefix, const RunSpec& r) {
  return prefix + "_k" + kappa_tag(r.kappa) + "_s" + std::to_string(r.seed) + "_" + to_string(r.scheme);
}

// Runs fn(i) for i in [0, n) on worker_count(n) threads; results are stored by
// index so the outcome does not depend on scheduling.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn) {
  const int workers = worker_count(n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) fn(i);
    });
  }
  for (auto& t : pool) t.join();
}

StepperConfig stepper_for(const ExperimentConfig& c, Scheme s) {
  StepperConfig cfg = c.stepper;
  cfg.scheme = s;
  return cfg;
}

SimState initial_state(const ExperimentConfig& c, const Grid& grid, std::uint64_t seed, double kappa) {
  InitialDataSpec spec = c.initial_data;
  spec.seed = seed;
  auto [w, r] = make_initial_data(grid, spec);
  return make_state(std::move(w), std::move(r), kappa);
}

RunOptions run_options(const ExperimentConfig& c) {
  RunOptions o;
  o.t_final = c.t_final;
  o.sample_interval = c.sample_interval;
  o.keep_snapshots = c.keep_snapshots;
  o.blowup_guard = c.blowup_guard;
  o.diagnostics = c.diagnostics;
  return o;
}

std::string diagnostics_csv(const std::vector<DiagnosticsRecord>& ds) {
  Csv csv{"t", "energy", "z", "grad_u_linf", "grad_rho_linf", "v_plus_besov", "v_minus_besov", "m_plus", "m_minus",
          "b_integral"};
  for (const auto& d : ds) {
    csv.cell(d.t).cell(d.energy).cell(d.z).cell(d.grad_u_linf).cell(d.grad_rho_linf).cell(d.v_plus_besov);
    csv.cell(d.v_minus_besov).cell(d.m_plus).cell(d.m_minus).cell(d.b_integral);
    csv.end();
  }
  return csv.text();
}

double max_z_ratio(const std::vector<DiagnosticsRecord>& ds) {
  if (ds.empty() || !(ds.front().z > 0.0)) return 0.0;
  double m = 0.0;
  for (const auto& d : ds) m = std::max(m, d.z / ds.front().z);
  return m;
}

std::string status_of(Termination t) { return to_string(t); }

// ------------------------------------------------------------ experiments

void run_simulate(const ExperimentConfig& c, RunManifest& m) {
  const Grid grid(c.grid);
  const auto schedule = sweep_schedule(c);
  std::vector<RunRecord> records(schedule.size());
  std::vector<std::string> rows(schedule.size());
  parallel_for(schedule.size(), [&](std::size_t i) {
    const RunSpec& r = schedule[i];
    RunRecord& rec = records[i];
    rec.spec = r;
    const std::string stem = run_stem("simulate", r);
    try {
      const SimState s0 = initial_state(c, grid, r.seed, r.kappa);
      const RunResult res = run(s0, stepper_for(c, r.scheme), run_options(c));
      write_text(c.output_dir / (stem + ".csv"), diagnostics_csv(res.diagnostics));
      if (c.keep_snapshots) {
        const auto dir = c.output_dir / (stem + "_snapshots");
        std::filesystem::create_directories(dir);
        for (std::size_t k = 0; k < res.snapshots.size(); ++k) {
          const auto& st = res.snapshots[k];
          write_snapshot(dir / ("omega_" + std::to_string(k) + ".json"),
                         make_snapshot(st.omega, SnapshotLayout::Coefficients, "omega", st.t));
          write_snapshot(dir / ("rho_" + std::to_string(k) + ".json"),
                         make_snapshot(st.rho, SnapshotLayout::Coefficients, "rho", st.t));
        }
      }
      rec.status = status_of(res.termination);
      rec.message = res.message;
      rec.output = stem + ".csv";
      const double e0 = res.diagnostics.front().energy;
      const double drift = e0 > 0.0 ? std::abs(res.diagnostics.back().energy / e0 - 1.0) : 0.0;
      rows[i] = format_double(res.end_time) + "," + format_double(gronwall_fit(res.diagnostics)) + "," +
                format_double(max_z_ratio(res.diagnostics)) + "," + format_double(drift);
    } catch (const std::exception& e) {
      rec.status = "error";
      rec.message = e.what();
      rows[i] = ",,,";
    }
  });
  Csv csv{"index", "kappa", "seed", "scheme", "status", "end_time", "c6", "max_z_ratio", "energy_drift"};
  bool errors = false, blowup = false;
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto& r = records[i];
    csv.cell(static_cast<int>(i)).cell(r.spec.kappa).cell(r.spec.seed).cell(to_string(r.spec.scheme));
    csv.cell(r.status).cell(rows[i]);
    csv.end();
    errors |= r.status == "error";
    blowup |= r.status == "blowup_suspected";
    if (!r.output.empty()) m.outputs.push_back(r.output);
  }
  write_text(c.output_dir / "summary.csv", csv.text());
  m.outputs.push_back("summary.csv");
  m.runs = std::move(records);
  m.flags["no_run_errors"] = !errors;
  m.flags["no_blowup"] = !blowup;
}

void run_lifespan(const ExperimentConfig& c, RunManifest& m) {
  const Grid grid(c.grid);
  const auto schedule = sweep_schedule(c);
  std::vector<RunRecord> records(schedule.size());
  std::vector<double> t_life(schedule.size(), std::numeric_limits<double>::quiet_NaN());
  std::vector<std::string> extra(schedule.size(), ",,");
  parallel_for(schedule.size(), [&](std::size_t i) {
    const RunSpec& r = schedule[i];
    RunRecord& rec = records[i];
    rec.spec = r;
    const std::string stem = run_stem("bcurve", r);
    try {
      const SimState s0 = initial_state(c, grid, r.seed, r.kappa);
      RunOptions o = run_options(c);
      o.keep_snapshots = false;
      const LifespanResult res = lifespan(s0, c.t_final, c.lifespan_threshold, stepper_for(c, r.scheme), o);
      Csv b{"t", "b"};
      for (const auto& [t, v] : res.b_curve) {
        b.cell(t).cell(v);
        b.end();
      }
      write_text(c.output_dir / (stem + ".csv"), b.text());
      rec.status = status_of(res.termination);
      rec.output = stem + ".csv";
      t_life[i] = res.t_life;
      extra[i] = std::string(res.threshold_reached ? "1" : "0") + "," + format_double(max_z_ratio(res.diagnostics)) +
                 "," + format_double(gronwall_fit(res.diagnostics));
    } catch (const std::exception& e) {
      rec.status = "error";
      rec.message = e.what();
    }
  });

  Csv csv{"kappa", "seed", "scheme", "t_life", "threshold_reached", "max_z_ratio", "c6", "status", "b_curve_file"};
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto& r = records[i];
    csv.cell(r.spec.kappa).cell(r.spec.seed).cell(to_string(r.spec.scheme)).cell(t_life[i]).cell(extra[i]);
    csv.cell(r.status).cell(r.output);
    csv.end();
    if (!r.output.empty()) m.outputs.push_back(r.output);
  }
  write_text(c.output_dir / "lifespan.csv", csv.text());
  m.outputs.push_back("lifespan.csv");

  // Monotonicity per (seed, scheme) group, kappa ordered by magnitude.
  bool monotone = true;
  for (std::uint64_t seed : c.seeds) {
    for (Scheme s : c.schemes) {
      std::vector<std::pair<double, double>> pts;
      for (std::size_t i = 0; i < schedule.size(); ++i) {
        if (schedule[i].seed == seed && schedule[i].scheme == s) pts.emplace_back(std::abs(schedule[i].kappa), t_life[i]);
      }
      std::stable_sort(pts.begin(), pts.end(), [](auto& a, auto& b) { return a.first < b.first; });
      for (std::size_t k = 1; k < pts.size(); ++k) {
        if (!(pts[k].second >= (1.0 - c.lifespan_tolerance) * pts[k - 1].second)) monotone = false;
      }
    }
  }
  bool errors = false;
  for (const auto& r : records) errors |= r.status == "error";
  m.runs = std::move(records);
  m.flags["no_run_errors"] = !errors;
  m.flags["lifespan_nondecreasing"] = monotone && !errors;
}

void run_picard(const ExperimentConfig& c, RunManifest& m) {
  const Grid grid(c.grid);
  const std::uint64_t seed = c.seeds.front();
  const Scheme scheme = c.schemes.front();
  InitialDataSpec spec = c.initial_data;
  spec.seed = seed;
  auto [w0, r0] = make_initial_data(grid, spec);

  double t_final = c.t_final;
  if (!(t_final > 0.0)) {
    t_final = local_time(w0, r0, 0.0, c.picard.local_time_max, stepper_for(c, scheme), c.picard.local_time_threshold);
  }
  m.results["t_final"] = t_final;

  PicardOptions opts;
  opts.t_final = t_final;
  opts.n_max = c.picard.n_max;
  opts.s = c.diagnostics.s;
  opts.q = c.diagnostics.q;
  opts.sample_stride = c.picard.sample_stride;
  opts.stepper = stepper_for(c, scheme);
  opts.stepper.dt_policy = DtPolicy::Fixed;

  std::vector<std::vector<IterationTrace>> traces(c.kappas.size());
  std::vector<RunRecord> records(c.kappas.size());
  parallel_for(c.kappas.size(), [&](std::size_t i) {
    RunRecord& rec = records[i];
    rec.spec = RunSpec{i, c.kappas[i], seed, scheme};
    try {
      traces[i] = picard_run(w0, r0, c.kappas[i], opts).traces;
      Csv csv{"n", "t", "a_n", "a_bar_n"};
      for (const auto& tr : traces[i]) {
        for (std::size_t k = 0; k < tr.t.size(); ++k) {
          csv.cell(tr.n).cell(tr.t[k]).cell(tr.a[k]).cell(tr.a_bar.empty() ? std::string() : format_double(tr.a_bar[k]));
          csv.end();
        }
      }
      rec.output = "picard_k" + kappa_tag(c.kappas[i]) + ".csv";
      write_text(c.output_dir / rec.output, csv.text());
      rec.status = "completed";
    } catch (const std::exception& e) {
      rec.status = "error";
      rec.message = e.what();
    }
  });
  bool errors = false;
  for (const auto& r : records) {
    errors |= r.status == "error";
    if (!r.output.empty()) m.outputs.push_back(r.output);
  }
  m.runs = records;
  m.flags["no_run_errors"] = !errors;
  if (errors) return;

  const UniformityReport rep =
      uniformity_report(traces, c.picard.spread_limit, c.picard.cauchy_from, c.picard.cauchy_limit);
  json j;
  j["t_final"] = t_final;
  j["kappa"] = rep.kappas;
  j["sup_ratio"] = rep.sup_ratio;
  j["spread"] = rep.spread;
  j["spread_limit"] = rep.spread_limit;
  j["cauchy_ratios"] = rep.cauchy_ratios;
  j["worst_cauchy_ratio"] = rep.worst_cauchy_ratio;
  j["cauchy_from"] = rep.cauchy_from;
  j["cauchy_limit"] = rep.cauchy_limit;
  json rates = json::array();
  for (const auto& t : traces) {
    try {
      rates.push_back(fit_decay_rate(t, c.picard.cauchy_from));
    } catch (const InvalidArgument&) {
      rates.push_back(nullptr);
    }
  }
  j["decay_rate"] = rates;
  j["uniform_pass"] = rep.uniform_pass;
  j["cauchy_pass"] = rep.cauchy_pass;
  write_text(c.output_dir / "uniformity.json", j.dump(2) + "\n");
  m.outputs.push_back("uniformity.json");
  m.results["spread"] = rep.spread;
  m.results["worst_cauchy_ratio"] = rep.worst_cauchy_ratio;
  m.flags["uniform_in_kappa"] = rep.uniform_pass;
  m.flags["cauchy_decay"] = rep.cauchy_pass;
}

void run_strichartz(const ExperimentConfig& c, RunManifest& m) {
  const Grid grid(c.grid);
  const auto& st = c.strichartz;
  const DyadicBank bank(grid);
  struct Job {
    double kappa;
    std::uint64_t seed;
  };
  std::vector<Job> jobs;
  for (double k : c.kappas) {
    for (std::uint64_t s : c.seeds) jobs.push_back({k, s});
  }
  std::vector<StrichartzSample> samples(jobs.size());
  std::vector<RunRecord> records(jobs.size());
  parallel_for(jobs.size(), [&](std::size_t i) {
    RunRecord& rec = records[i];
    rec.spec = RunSpec{i, jobs[i].kappa, jobs[i].seed, Scheme::IntegratingFactor};
    try {
      CounterRng rng = CounterRng(jobs[i].seed).split(0);
      const SpectralField f = wave_packet(grid, rng);
      const int base = minimal_nodes(jobs[i].kappa, st.t_max);
      const int nodes = static_cast<int>(std::ceil((base - 1) * std::max(1.0, st.node_factor))) + 1;
      samples[i] = st.space == "besov"
                       ? besov_strichartz_measure(f, jobs[i].kappa, st.gamma, st.r, st.q, st.s, st.t_max, nodes, bank)
                       : strichartz_measure(f, jobs[i].kappa, st.gamma, st.r, st.t_max, nodes);
      rec.status = "completed";
    } catch (const std::exception& e) {
      rec.status = "error";
      rec.message = e.what();
    }
  });
  Csv csv{"kappa", "seed", "gamma", "r", "q", "s", "t_max", "nodes", "value", "tail_fraction"};
  bool errors = false;
  for (std::size_t i = 0; i < jobs.size(); ++i) {
    const auto& s = samples[i];
    csv.cell(jobs[i].kappa).cell(jobs[i].seed).cell(st.gamma).cell(st.r).cell(st.q).cell(st.s).cell(st.t_max);
    csv.cell(s.nodes).cell(s.value).cell(s.tail_fraction);
    csv.end();
    errors |= records[i].status == "error";
  }
  write_text(c.output_dir / "strichartz.csv", csv.text());
  m.outputs.push_back("strichartz.csv");
  m.runs = records;
  m.flags["no_run_errors"] = !errors;
  if (errors) return;

  std::vector<double> ks, means;
  for (double k : c.kappas) {
    if (k == 0.0) continue;
    double sum = 0.0;
    int cnt = 0;
    for (std::size_t i = 0; i < jobs.size(); ++i) {
      if (jobs[i].kappa == k) {
        sum += samples[i].value;
        ++cnt;
      }
    }
    ks.push_back(std::abs(k));
    means.push_back(sum / cnt);
  }
  const double target = std::isinf(st.gamma) ? 0.0 : -1.0 / st.gamma;
  json j;
  j["kappa"] = ks;
  j["mean_value"] = means;
  j["target_slope"] = target;
  j["tolerance"] = st.slope_tolerance;
  j["note"] = "torus measurement; the reference exponent is stated on the plane";
  bool pass = false;
  if (ks.size() >= 2) {
    const SlopeFit fit = fit_loglog(ks, means);
    j["slope"] = fit.slope;
    j["intercept"] = fit.intercept;
    pass = std::abs(fit.slope - target) <= st.slope_tolerance;
    m.results["slope"] = fit.slope;
  }
  j["pass"] = pass;
  write_text(c.output_dir / "slope.json", j.dump(2) + "\n");
  m.outputs.push_back("slope.json");
  m.flags["slope_within_tolerance"] = pass;
}

void run_estimates(const ExperimentConfig& c, RunManifest& m) {
  const auto& e = c.estimates;
  const Lemma lemma = parse_lemma(e.lemma);
  const std::uint64_t seed = c.seeds.front();
  json j;
  j["lemma"] = e.lemma;
  j["seed"] = seed;
  j["trials"] = e.trials;
  if (lemma == Lemma::Bernstein) {
    const Grid grid(c.grid);
    const DyadicBank bank(grid);
    const BernsteinReport rep = bernstein_check(bank, e.band, e.trials, seed);
    j["band"] = rep.j;
    j["min_scaled"] = rep.min_scaled;
    j["max_scaled"] = rep.max_scaled;
    j["violations"] = rep.violations;
    m.flags["bernstein_bounds"] = rep.violations == 0;
    m.results["violations"] = rep.violations;
  } else {
    BatteryOptions o;
    o.trials = e.trials;
    o.seed = seed;
    o.s = e.s;
    o.q = e.q;
    o.grid = c.grid;
    const RatioReport rep = lemma == Lemma::Product ? verify_product_rule(o) : verify_commutator_lemma(lemma, o);
    Csv csv{"trial", "lhs", "rhs", "ratio"};
    bool finite = true;
    for (std::size_t i = 0; i < rep.lhs.size(); ++i) {
      const double ratio = rep.rhs[i] > 0.0 ? rep.lhs[i] / rep.rhs[i] : 0.0;
      finite &= std::isfinite(rep.lhs[i]) && std::isfinite(rep.rhs[i]) && rep.lhs[i] >= 0.0 && rep.rhs[i] >= 0.0;
      csv.cell(static_cast<int>(i)).cell(rep.lhs[i]).cell(rep.rhs[i]).cell(ratio);
      csv.end();
    }
    write_text(c.output_dir / "estimates.csv", csv.text());
    m.outputs.push_back("estimates.csv");
    j["s"] = rep.s;
    j["q"] = number(rep.q);
    j["n"] = rep.n;
    j["max_ratio"] = rep.max_ratio;
    j["max_ratio_doubled"] = rep.max_ratio_doubled;
    j["relative_change"] = rep.relative_change;
    finite &= std::isfinite(rep.max_ratio) && std::isfinite(rep.max_ratio_doubled);
    m.flags["ratios_finite"] = finite;
    m.flags["resolution_stable"] = rep.relative_change < e.tolerance;
    m.results["max_ratio"] = rep.max_ratio;
    m.results["relative_change"] = rep.relative_change;
  }
  write_text(c.output_dir / "estimates.json", j.dump(2) + "\n");
  m.outputs.push_back("estimates.json");
}

void run_kappa0(const ExperimentConfig& c, RunManifest& m) {
  const Kappa0Result r = kappa0_estimate(c.kappa0);
  json j;
  j["t"] = c.kappa0.t;
  j["z"] = c.kappa0.z;
  j["c6"] = c.kappa0.c6;
  j["c7"] = c.kappa0.c7;
  j["gamma"] = c.kappa0.gamma;
  j["kappa0"] = number(r.kappa0);
  j["overflow"] = r.overflow;
  write_text(c.output_dir / "kappa0.json", j.dump(2) + "\n");
  m.outputs.push_back("kappa0.json");
  m.results["kappa0"] = r.kappa0;
  m.flags["kappa0_finite"] = !r.overflow;
}

void run_bands(const ExperimentConfig& c, RunManifest& m) {
  const Grid grid(c.grid);
  const DyadicBank bank(grid);
  const double r_max = grid.max_resolved_frequency();
  const int samples = 1024;
  Csv csv{"xi", "j", "value"};
  for (int i = 0; i <= samples; ++i) {
    const double r = r_max * i / samples;
    double sum = 0.0;
    for (int j = bank.j_min(); j <= bank.j_max(); ++j) {
      const double v = lp_psi(j, r);
      sum += v;
      csv.cell(r).cell(j).cell(v);
      csv.end();
    }
    csv.cell(r).cell(std::string("sum")).cell(sum);
    csv.end();
  }
  write_text(c.output_dir / "bands.csv", csv.text());
  m.outputs.push_back("bands.csv");
  const double residual = bank.partition_residual();
  m.results["partition_residual"] = residual;
  m.results["j_min"] = bank.j_min();
  m.results["j_max"] = bank.j_max();
  m.flags["partition_of_unity"] = residual < 1e-12;
}

}  // namespace

std::string to_string(ExperimentKind k) {
  switch (k) {
    case ExperimentKind::Simulate:
      return "simulate";
    case ExperimentKind::Picard:
      return "picard";
    case ExperimentKind::Strichartz:
      return "strichartz-sweep";
    case ExperimentKind::LifespanSweep:
      return "lifespan-sweep";
    case ExperimentKind::VerifyEstimates:
      return "verify-estimates";
    case ExperimentKind::Kappa0:
      return "kappa0";
    case ExperimentKind::Bands:
      return "bands";
  }
  return "unknown";
}

ExperimentKind parse_kind(const std::string& name) {
  if (name == "strichartz") return ExperimentKind::Strichartz;
  for (auto k : {ExperimentKind::Simulate, ExperimentKind::Picard, ExperimentKind::Strichartz,
                 ExperimentKind::LifespanSweep, ExperimentKind::VerifyEstimates, ExperimentKind::Kappa0,
                 ExperimentKind::Bands}) {
    if (to_string(k) == name) return k;
  }
  throw ConfigError("unknown experiment kind '" + name + "'");
}

std::string to_string(Scheme s) { return s == Scheme::Rk4 ? "rk4" : "integrating-factor"; }

Scheme parse_scheme(const std::string& name) {
  if (name == "rk4") return Scheme::Rk4;
  if (name == "integrating-factor" || name == "if") return Scheme::IntegratingFactor;
  throw ConfigError("unknown scheme '" + name + "'");
}

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void validate(const ExperimentConfig& c) {
  try {
    validate(c.grid);
  } catch (const InvalidArgument& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  if (c.kappas.empty()) throw ConfigError("config: kappa list is empty");
  if (c.seeds.empty()) throw ConfigError("config: seed list is empty");
  if (c.schemes.empty()) throw ConfigError("config: scheme list is empty");
  for (double k : c.kappas) {
    if (!std::isfinite(k)) throw ConfigError("config: kappa values must be finite");
  }
  if (!(c.stepper.dt > 0.0)) throw ConfigError("config: stepper.dt must be positive");
  if (!(c.stepper.cfl_c0 > 0.0) || !(c.stepper.cfl_c1 > 0.0)) throw ConfigError("config: CFL constants must be positive");
  if (c.kind != ExperimentKind::Picard && !(c.t_final > 0.0)) throw ConfigError("config: t_final must be positive");
  if (!(c.sample_interval >= 0.0)) throw ConfigError("config: sample_interval must be nonnegative");
  if (!(c.blowup_guard > 1.0)) throw ConfigError("config: blowup_guard must exceed 1");
  if (!(c.lifespan_threshold > 0.0)) throw ConfigError("config: lifespan.threshold must be positive");
  if (!(c.diagnostics.q >= 1.0)) throw ConfigError("config: diagnostics.q must be >= 1");
  if (c.picard.n_max < 1) throw ConfigError("config: picard.n_max must be >= 1");
  if (c.picard.sample_stride < 1) throw ConfigError("config: picard.sample_stride must be >= 1");
  if (c.strichartz.space != "lebesgue" && c.strichartz.space != "besov") {
    throw ConfigError("config: strichartz.space must be lebesgue or besov");
  }
  if (!(c.strichartz.t_max > 0.0)) throw ConfigError("config: strichartz.t_max must be positive");
  if (c.estimates.trials < 1) throw ConfigError("config: estimates.trials must be positive");
  parse_lemma(c.estimates.lemma);
  const auto& p = c.initial_data.preset;
  if (p != "taylor-green" && p != "random-spectrum" && p != "gaussian-bump") {
    throw ConfigError("config: unknown initial-data preset '" + p + "'");
  }
  if (c.initial_data.coupling != "independent" && c.initial_data.coupling != "balanced") {
    throw ConfigError("config: unknown coupling '" + c.initial_data.coupling + "'");
  }
}

ExperimentConfig parse_config(const std::string& json_text, const std::vector<std::string>& overrides) {
  try {
    json doc = to_json(ExperimentConfig{});
    if (!json_text.empty()) merge(doc, json::parse(json_text), "");
    for (const auto& o : overrides) merge(doc, override_patch(o), "");
    ExperimentConfig c = from_json(doc);
    validate(c);
    return c;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  } catch (const InvalidArgument& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
}

ExperimentConfig load_config(const std::filesystem::path& path, const std::vector<std::string>& overrides) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), overrides);
}

std::string config_to_json(const ExperimentConfig& config) { return to_json(config).dump(2); }

std::vector<RunSpec> sweep_schedule(const ExperimentConfig& config) {
  std::vector<RunSpec> out;
  for (double k : config.kappas) {
    for (std::uint64_t s : config.seeds) {
      for (Scheme sc : config.schemes) out.push_back(RunSpec{out.size(), k, s, sc});
    }
  }
  return out;
}

int worker_count(std::size_t jobs) {
  int n = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  if (const char* env = std::getenv("STRAT2D_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && v > 0) n = static_cast<int>(v);
  }
  return static_cast<int>(std::max<std::size_t>(1, std::min<std::size_t>(static_cast<std::size_t>(n), jobs)));
}

bool RunManifest::all_pass() const {
  return std::all_of(flags.begin(), flags.end(), [](const auto& kv) { return kv.second; });
}

std::string version_string() { return STRAT2D_VERSION; }

std::string manifest_to_json(const RunManifest& m) {
  json j;
  j["version"] = m.version;
  j["config"] = json::parse(m.config_json);
  j["wall_seconds"] = m.wall_seconds;
  json runs = json::array();
  for (const auto& r : m.runs) {
    runs.push_back({{"index", r.spec.index},
                    {"kappa", r.spec.kappa},
                    {"seed", r.spec.seed},
                    {"scheme", to_string(r.spec.scheme)},
                    {"status", r.status},
                    {"message", r.message},
                    {"output", r.output}});
  }
  j["runs"] = runs;
  j["outputs"] = m.outputs;
  j["flags"] = m.flags;
  json results = json::object();
  for (const auto& [k, v] : m.results) results[k] = number(v);
  j["results"] = results;
  j["all_pass"] = m.all_pass();
  return j.dump(2) + "\n";
}

RunManifest run_experiment(const ExperimentConfig& config) {
  validate(config);
  const auto start = std::chrono::steady_clock::now();
  std::filesystem::create_directories(config.output_dir);
  RunManifest m;
  m.config_json = config_to_json(config);
  m.version = version_string();
  switch (config.kind) {
    case ExperimentKind::Simulate:
      run_simulate(config, m);
      break;
    case ExperimentKind::LifespanSweep:
      run_lifespan(config, m);
      break;
    case ExperimentKind::Picard:
      run_picard(config, m);
      break;
    case ExperimentKind::Strichartz:
      run_strichartz(config, m);
      break;
    case ExperimentKind::VerifyEstimates:
      run_estimates(config, m);
      break;
    case ExperimentKind::Kappa0:
      run_kappa0(config, m);
      break;
    case ExperimentKind::Bands:
      run_bands(config, m);
      break;
  }
  m.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  write_text(config.output_dir / "manifest.json", manifest_to_json(m));
  return m;
}

}  // namespace strat2d
