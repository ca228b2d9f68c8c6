// strat2d command-line driver.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "strat2d/errors.hpp"
#include "strat2d/harness.hpp"

namespace {

struct Flag {
  std::string key;
  std::optional<std::string> value;
};

// "0,16,256" or "[0,16,256]" -> "[0,16,256]"
std::string as_list(std::string s) {
  if (!s.empty() && s.front() == '[') return s;
  return "[" + s + "]";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"strat2d: stratified 2D Boussinesq experiments"};
  app.set_version_flag("--version", strat2d::version_string());
  app.require_subcommand(1);

  std::string config_path;
  std::vector<std::string> overrides;
  std::vector<Flag> flags;

  auto common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "JSON config file (defaults are used for missing keys)");
    sub->add_option("--override", overrides, "dotted key=value override, repeatable")->take_all();
  };
  auto flag = [&](CLI::App* sub, const std::string& name, const std::string& key, const std::string& help,
                  std::string (*wrap)(std::string) = nullptr) {
    flags.push_back({key, std::nullopt});
    const std::size_t idx = flags.size() - 1;
    sub->add_option_function<std::string>(
        name,
        [&flags, idx, wrap](const std::string& v) { flags[idx].value = wrap ? wrap(v) : v; },
        help);
  };

  auto* simulate = app.add_subcommand("simulate", "nonlinear runs over the kappa x seed x scheme sweep");
  auto* picard = app.add_subcommand("picard", "Picard iterates and uniformity report");
  auto* strich = app.add_subcommand("strichartz-sweep", "dispersive space-time norms against kappa");
  auto* lifespan = app.add_subcommand("lifespan-sweep", "lifespan table over kappa");
  auto* estimates = app.add_subcommand("verify-estimates", "commutator, product and Bernstein batteries");
  auto* kappa0 = app.add_subcommand("kappa0", "evaluate the kappa0 threshold formula");
  auto* bands = app.add_subcommand("bands", "dyadic profiles and partition-of-unity residual");
  for (auto* s : {simulate, picard, strich, lifespan, estimates, kappa0, bands}) common(s);

  flag(picard, "--kappa-list", "kappa", "comma-separated kappa values", as_list);
  flag(picard, "--n-max", "picard.n_max", "last iterate index");
  flag(picard, "--s", "diagnostics.s", "regularity index s");
  flag(picard, "--q", "diagnostics.q", "summability index q");
  flag(picard, "--t-final", "t_final", "final time (<= 0: measured local time)");

  flag(strich, "--gamma", "strichartz.gamma", "time exponent");
  flag(strich, "--r", "strichartz.r", "space exponent");
  flag(strich, "--q", "strichartz.q", "Besov summability (space=besov)");
  flag(strich, "--s", "strichartz.s", "Besov regularity (space=besov)");
  flag(strich, "--kappa-list", "kappa", "comma-separated kappa values", as_list);
  flag(strich, "--t-max", "strichartz.t_max", "time window");
  flag(strich, "--seed", "seeds", "comma-separated seeds", as_list);

  flag(estimates, "--lemma", "estimates.lemma", "bracket|lambda|smoothed|product|bernstein");
  flag(estimates, "--s", "estimates.s", "regularity index s");
  flag(estimates, "--q", "estimates.q", "summability index q");
  flag(estimates, "--trials", "estimates.trials", "number of random trials");
  flag(estimates, "--seed", "seeds", "seed", as_list);
  flag(estimates, "--n", "grid.n", "grid points per axis (the battery also runs at 2n)");

  flag(kappa0, "--T", "kappa0.t", "time horizon T");
  flag(kappa0, "--z", "kappa0.z", "initial size z");
  flag(kappa0, "--C6", "kappa0.c6", "Gronwall constant C6");
  flag(kappa0, "--C7", "kappa0.c7", "Strichartz constant C7");
  flag(kappa0, "--gamma", "kappa0.gamma", "Strichartz time exponent");

  CLI11_PARSE(app, argc, argv);

  CLI::App* chosen = app.get_subcommands().front();
  std::vector<std::string> all;
  all.push_back("experiment=" + chosen->get_name());
  for (const auto& f : flags) {
    if (f.value) all.push_back(f.key + "=" + *f.value);
  }
  all.insert(all.end(), overrides.begin(), overrides.end());

  try {
    std::string text = "{}";
    if (!config_path.empty()) {
      std::ifstream in(config_path);
      if (!in) throw strat2d::ConfigError("cannot open config file '" + config_path + "'");
      std::stringstream ss;
      ss << in.rdbuf();
      text = ss.str();
    }
    const strat2d::ExperimentConfig config = strat2d::parse_config(text, all);
    const strat2d::RunManifest m = strat2d::run_experiment(config);

    for (const auto& r : m.runs) {
      if (r.status == "error" || r.status == "blowup_suspected") {
        std::fprintf(stderr, "run %zu (kappa=%g seed=%llu): %s %s\n", r.spec.index, r.spec.kappa,
                     static_cast<unsigned long long>(r.spec.seed), r.status.c_str(), r.message.c_str());
      }
    }
    for (const auto& [k, v] : m.results) std::printf("%s = %s\n", k.c_str(), strat2d::format_double(v).c_str());
    for (const auto& [k, v] : m.flags) std::printf("%-24s %s\n", k.c_str(), v ? "PASS" : "FAIL");
    std::printf("output: %s (%.2f s)\n", config.output_dir.string().c_str(), m.wall_seconds);
    return m.all_pass() ? 0 : 1;
  } catch (const strat2d::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 3;
  }
}
