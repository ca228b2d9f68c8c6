#include "strat2d/snapshot_io.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "strat2d/errors.hpp"

namespace strat2d {

using nlohmann::json;

namespace {
constexpr const char* kFormat = "strat2d-field";
constexpr int kVersion = 1;

void require_finite(double v) {
  if (!std::isfinite(v)) throw InvalidArgument("snapshot: non-finite value cannot be serialized");
}
}  // namespace

Snapshot make_snapshot(const SpectralField& f, SnapshotLayout layout, std::string name, double time) {
  Snapshot s;
  s.name = std::move(name);
  s.time = time;
  s.grid = f.grid().spec();
  s.layout = layout;
  if (layout == SnapshotLayout::Samples) {
    s.samples = inverse_transform(f);
  } else {
    s.coeffs.assign(f.coeffs().begin(), f.coeffs().end());
  }
  return s;
}

SpectralField snapshot_field(const Snapshot& s) {
  Grid grid(s.grid);
  if (s.layout == SnapshotLayout::Samples) return forward_transform(grid, s.samples);
  if (s.coeffs.size() != grid.size()) throw DimensionMismatch("snapshot: coefficient count mismatch");
  return SpectralField(grid, ComplexBuffer(s.coeffs.begin(), s.coeffs.end()));
}

std::string encode_snapshot(const Snapshot& s) {
  json j;
  j["format"] = kFormat;
  j["version"] = kVersion;
  j["name"] = s.name;
  j["time"] = s.time;
  j["grid"] = {{"n_per_axis", s.grid.n_per_axis},
               {"box_scale", s.grid.box_scale},
               {"dealias_fraction", s.grid.dealias_fraction}};
  if (s.layout == SnapshotLayout::Samples) {
    j["layout"] = "samples";
    for (double v : s.samples) require_finite(v);
    j["samples"] = s.samples;
  } else {
    j["layout"] = "coefficients";
    const int n = s.grid.n_per_axis;
    std::vector<int> k1, k2;
    std::vector<double> re, im;
    k1.reserve(s.coeffs.size());
    for (std::size_t idx = 0; idx < s.coeffs.size(); ++idx) {
      const int i1 = static_cast<int>(idx) / n;
      const int i2 = static_cast<int>(idx) % n;
      k1.push_back(i1 <= n / 2 ? i1 : i1 - n);
      k2.push_back(i2 <= n / 2 ? i2 : i2 - n);
      require_finite(s.coeffs[idx].real());
      require_finite(s.coeffs[idx].imag());
      re.push_back(s.coeffs[idx].real());
      im.push_back(s.coeffs[idx].imag());
    }
    j["k1"] = k1;
    j["k2"] = k2;
    j["re"] = re;
    j["im"] = im;
  }
  return j.dump();
}

Snapshot decode_snapshot(const std::string& text) {
  try {
    const json j = json::parse(text);
    if (j.at("format").get<std::string>() != kFormat) throw ConfigError("snapshot: unknown format");
    if (j.at("version").get<int>() != kVersion) throw ConfigError("snapshot: unsupported version");
    Snapshot s;
    s.name = j.value("name", std::string{});
    s.time = j.value("time", 0.0);
    const auto& g = j.at("grid");
    s.grid.n_per_axis = g.at("n_per_axis").get<int>();
    s.grid.box_scale = g.at("box_scale").get<double>();
    s.grid.dealias_fraction = g.at("dealias_fraction").get<double>();
    validate(s.grid);
    const std::size_t size = static_cast<std::size_t>(s.grid.n_per_axis) * s.grid.n_per_axis;
    const auto layout = j.at("layout").get<std::string>();
    if (layout == "samples") {
      s.layout = SnapshotLayout::Samples;
      s.samples = j.at("samples").get<std::vector<double>>();
      if (s.samples.size() != size) throw ConfigError("snapshot: sample count mismatch");
    } else if (layout == "coefficients") {
      s.layout = SnapshotLayout::Coefficients;
      const auto re = j.at("re").get<std::vector<double>>();
      const auto im = j.at("im").get<std::vector<double>>();
      if (re.size() != size || im.size() != size) throw ConfigError("snapshot: coefficient count mismatch");
      s.coeffs.resize(size);
      for (std::size_t i = 0; i < size; ++i) s.coeffs[i] = Complex{re[i], im[i]};
    } else {
      throw ConfigError("snapshot: unknown layout '" + layout + "'");
    }
    return s;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("snapshot: malformed JSON: ") + e.what());
  } catch (const InvalidArgument& e) {
    throw ConfigError(std::string("snapshot: ") + e.what());
  }
}

void write_snapshot(const std::filesystem::path& path, const Snapshot& s) {
  std::ofstream out(path);
  if (!out) throw ConfigError("snapshot: cannot open " + path.string());
  out << encode_snapshot(s) << '\n';
}

Snapshot read_snapshot(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("snapshot: cannot open " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return decode_snapshot(ss.str());
}

}  // namespace strat2d
