#pragma once

// Field snapshot container (JSON, "strat2d-field" format, version 1):
//
//   {
//     "format": "strat2d-field", "version": 1,
//     "name": "...", "time": t,
//     "grid": {"n_per_axis": n, "box_scale": L0, "dealias_fraction": f},
//     "layout": "samples" | "coefficients",
//     "samples": [n*n reals, row-major, x2 fastest]                 (samples)
//     "k1": [...], "k2": [...], "re": [...], "im": [...]            (coefficients)
//   }
//
// Coefficient entries are listed in storage order (index i1 * n + i2) with the
// integer wave-vector written out explicitly. Numbers are emitted with 17
// significant digits, so finite values round-trip bit-exactly.

#include <filesystem>
#include <string>
#include <vector>

#include "strat2d/spectral.hpp"

namespace strat2d {

enum class SnapshotLayout { Samples, Coefficients };

struct Snapshot {
  std::string name;
  double time = 0.0;
  GridSpec grid;
  SnapshotLayout layout = SnapshotLayout::Coefficients;
  std::vector<double> samples;
  std::vector<Complex> coeffs;
};

Snapshot make_snapshot(const SpectralField& f, SnapshotLayout layout, std::string name = {}, double time = 0.0);
/// Reconstructs the field (forward transform for the samples layout).
SpectralField snapshot_field(const Snapshot& s);

std::string encode_snapshot(const Snapshot& s);
/// Throws ConfigError on malformed input.
Snapshot decode_snapshot(const std::string& text);

void write_snapshot(const std::filesystem::path& path, const Snapshot& s);
Snapshot read_snapshot(const std::filesystem::path& path);

}  // namespace strat2d
