#pragma once

#include <string>

#include "pfqm/dynamics.hpp"
#include "pfqm/spectral.hpp"

namespace pfqm {

// Binary snapshot, little-endian throughout:
//   magic "PFQM", u16 version (= 1), u16 dim, u32 nx, u32 ny,
//   f64 lx, f64 ly, f64 t, then nx*ny interleaved (re, im) f64 pairs in
//   row-major order (x fastest). 1D files carry ny = 1, ly = 0.
void write_snapshot(const SimState& state, const std::string& path);
SimState read_snapshot(const std::string& path);

// Density/phase maps and generic grid-shaped scalars as CSV with explicit
// coordinates, row-major, one node per line.
void write_field_csv(const SpectralField& field, const std::string& path);

}  // namespace pfqm
