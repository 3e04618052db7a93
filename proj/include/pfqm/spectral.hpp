#pragma once

#include <complex>
#include <functional>
#include <vector>

namespace pfqm {

// Periodic lattice in 1 or 2 dimensions. Real-space nodes sit at
// x_i = (i - n/2) dx (domain centred on the origin); the dual lattice is
// k_j = 2*pi*j/L with j in standard FFT order {0,...,n/2-1,-n/2,...,-1}.
// 2D storage is row-major with x fastest: index = iy*nx + ix.
struct Grid {
  int dim = 1;
  int nx = 0, ny = 1;
  double lx = 0.0, ly = 0.0;

  static Grid make_1d(int nx, double lx);
  static Grid make_2d(int nx, int ny, double lx, double ly);

  int size() const { return nx * ny; }
  double dx() const { return lx / nx; }
  double dy() const { return dim == 2 ? ly / ny : 1.0; }
  double cell() const { return dim == 2 ? dx() * dy() : dx(); }
  double x(int ix) const { return (ix - nx / 2) * dx(); }
  double y(int iy) const { return dim == 2 ? (iy - ny / 2) * dy() : 0.0; }

  double kx(int ix) const;
  double ky(int iy) const;
  double kmag(int ix, int iy) const;
  double kmax() const;  // largest |k| on the lattice

  // |k| for every node in storage order
  std::vector<double> kmag_table() const;
};

enum class Space { real, reciprocal };

struct SpectralField {
  Grid grid;
  Space space = Space::real;
  std::vector<std::complex<double>> values;

  static SpectralField zeros(const Grid& g, Space s = Space::real);
};

// Unnormalized forward transform, F_m = sum_j f_j exp(-2*pi*i*j*m/N);
// the inverse carries the 1/(nx*ny) factor. Both throw
// std::invalid_argument when handed a field in the wrong space.
SpectralField forward(const SpectralField& f);
SpectralField inverse(const SpectralField& f);

// F^-1( K(|k|) F(f) ). K is evaluated at |k| = sqrt(kx^2+ky^2) per node and
// must be finite on [0, kmax]; a non-finite value raises std::domain_error.
SpectralField apply_multiplier(const SpectralField& f,
                               const std::function<double(double)>& K);

// Same but with a precomputed per-node symbol table (storage order).
SpectralField apply_multiplier(const SpectralField& f,
                               const std::vector<double>& symbol);

// (-Laplacian)^s via the |k|^(2s) symbol; s in (0, 1].
SpectralField fractional_laplacian(const SpectralField& f, double s);

// Discrete L2 inner product <f, g> = sum conj(f_i) g_i * cell.
std::complex<double> inner_product(const SpectralField& f,
                                   const SpectralField& g);

}  // namespace pfqm
