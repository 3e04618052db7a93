#include "pfqm/io.hpp"

#include <cstdint>
#include <cstdio>
#include <cstring>
#include <memory>
#include <stdexcept>
#include <vector>

namespace pfqm {

namespace {

constexpr char kMagic[4] = {'P', 'F', 'Q', 'M'};
constexpr std::uint16_t kVersion = 1;

// The format is little-endian; this code targets little-endian hosts and
// writes native representations.
static_assert(sizeof(double) == 8);

struct FileCloser {
  void operator()(std::FILE* f) const {
    if (f) std::fclose(f);
  }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

template <typename T>
void put(std::FILE* f, T v) {
  if (std::fwrite(&v, sizeof(T), 1, f) != 1)
    throw std::runtime_error("snapshot write failed");
}

template <typename T>
T get(std::FILE* f) {
  T v;
  if (std::fread(&v, sizeof(T), 1, f) != 1)
    throw std::runtime_error("snapshot read failed (truncated file)");
  return v;
}

}  // namespace

void write_snapshot(const SimState& state, const std::string& path) {
  if (state.field.space != Space::real)
    throw std::invalid_argument("write_snapshot: field must be in real space");
  FilePtr f(std::fopen(path.c_str(), "wb"));
  if (!f) throw std::runtime_error("cannot open " + path);
  if (std::fwrite(kMagic, 1, 4, f.get()) != 4)
    throw std::runtime_error("snapshot write failed");
  const Grid& g = state.field.grid;
  put<std::uint16_t>(f.get(), kVersion);
  put<std::uint16_t>(f.get(), static_cast<std::uint16_t>(g.dim));
  put<std::uint32_t>(f.get(), static_cast<std::uint32_t>(g.nx));
  put<std::uint32_t>(f.get(), static_cast<std::uint32_t>(g.ny));
  put<double>(f.get(), g.lx);
  put<double>(f.get(), g.dim == 2 ? g.ly : 0.0);
  put<double>(f.get(), state.time);
  const size_t n = state.field.values.size();
  if (std::fwrite(state.field.values.data(), sizeof(double) * 2, n, f.get()) !=
      n)
    throw std::runtime_error("snapshot write failed");
}

SimState read_snapshot(const std::string& path) {
  FilePtr f(std::fopen(path.c_str(), "rb"));
  if (!f) throw std::runtime_error("cannot open " + path);
  char magic[4];
  if (std::fread(magic, 1, 4, f.get()) != 4 ||
      std::memcmp(magic, kMagic, 4) != 0)
    throw std::runtime_error(path + ": not a PFQM snapshot");
  const auto version = get<std::uint16_t>(f.get());
  if (version != kVersion)
    throw std::runtime_error(path + ": unsupported snapshot version " +
                             std::to_string(version));
  const auto dim = get<std::uint16_t>(f.get());
  const auto nx = get<std::uint32_t>(f.get());
  const auto ny = get<std::uint32_t>(f.get());
  const double lx = get<double>(f.get());
  const double ly = get<double>(f.get());
  const double t = get<double>(f.get());

  SimState state;
  state.time = t;
  state.field.grid = dim == 2 ? Grid::make_2d(static_cast<int>(nx),
                                              static_cast<int>(ny), lx, ly)
                              : Grid::make_1d(static_cast<int>(nx), lx);
  state.field.space = Space::real;
  state.field.values.resize(static_cast<size_t>(nx) * ny);
  if (std::fread(state.field.values.data(), sizeof(double) * 2,
                 state.field.values.size(), f.get()) !=
      state.field.values.size())
    throw std::runtime_error(path + ": truncated snapshot payload");
  return state;
}

void write_field_csv(const SpectralField& field, const std::string& path) {
  std::FILE* f = std::fopen(path.c_str(), "w");
  if (!f) throw std::runtime_error("cannot open " + path);
  const Grid& g = field.grid;
  if (g.dim == 2) {
    std::fprintf(f, "x_um,y_um,re,im,density\n");
    for (int iy = 0; iy < g.ny; ++iy)
      for (int ix = 0; ix < g.nx; ++ix) {
        const auto v = field.values[static_cast<size_t>(iy) * g.nx + ix];
        std::fprintf(f, "%.17g,%.17g,%.17g,%.17g,%.17g\n", g.x(ix), g.y(iy),
                     v.real(), v.imag(), std::norm(v));
      }
  } else {
    std::fprintf(f, "x_um,re,im,density\n");
    for (int ix = 0; ix < g.nx; ++ix) {
      const auto v = field.values[static_cast<size_t>(ix)];
      std::fprintf(f, "%.17g,%.17g,%.17g,%.17g\n", g.x(ix), v.real(), v.imag(),
                   std::norm(v));
    }
  }
  std::fclose(f);
}

}  // namespace pfqm
