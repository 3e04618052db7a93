#include "pfqm/spectral.hpp"

#include <fftw3.h>

#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>
#include <string>

namespace pfqm {

namespace {

constexpr double two_pi = 6.283185307179586476925286766559;

// FFTW planning is not thread safe; executing a plan on new arrays is.
// Plans are created once per grid shape with FFTW_UNALIGNED so they can run
// on any caller buffer, and kept for the process lifetime.
class PlanCache {
 public:
  struct Plans {
    fftw_plan fwd = nullptr;
    fftw_plan bwd = nullptr;
  };

  static const Plans& get(int nx, int ny) {
    static PlanCache cache;
    std::lock_guard<std::mutex> lock(cache.mutex_);
    auto it = cache.plans_.find({nx, ny});
    if (it != cache.plans_.end()) return it->second;

    std::vector<std::complex<double>> a(static_cast<size_t>(nx) * ny);
    std::vector<std::complex<double>> b(a.size());
    auto* pa = reinterpret_cast<fftw_complex*>(a.data());
    auto* pb = reinterpret_cast<fftw_complex*>(b.data());
    const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
    Plans p;
    if (ny == 1) {
      p.fwd = fftw_plan_dft_1d(nx, pa, pb, FFTW_FORWARD, flags);
      p.bwd = fftw_plan_dft_1d(nx, pa, pb, FFTW_BACKWARD, flags);
    } else {
      p.fwd = fftw_plan_dft_2d(ny, nx, pa, pb, FFTW_FORWARD, flags);
      p.bwd = fftw_plan_dft_2d(ny, nx, pa, pb, FFTW_BACKWARD, flags);
    }
    if (!p.fwd || !p.bwd) throw std::runtime_error("fftw plan creation failed");
    return cache.plans_.emplace(std::make_pair(nx, ny), p).first->second;
  }

 private:
  std::mutex mutex_;
  std::map<std::pair<int, int>, Plans> plans_;
};

void execute(fftw_plan plan, const std::vector<std::complex<double>>& in,
             std::vector<std::complex<double>>& out) {
  // c2c out-of-place execution preserves the input
  auto* pin = reinterpret_cast<fftw_complex*>(
      const_cast<std::complex<double>*>(in.data()));
  auto* pout = reinterpret_cast<fftw_complex*>(out.data());
  fftw_execute_dft(plan, pin, pout);
}

void check_space(const SpectralField& f, Space expected, const char* op) {
  if (f.space != expected)
    throw std::invalid_argument(std::string(op) +
                                ": field is in the wrong space");
  if (static_cast<int>(f.values.size()) != f.grid.size())
    throw std::invalid_argument(std::string(op) +
                                ": value count does not match grid");
}

}  // namespace

Grid Grid::make_1d(int nx, double lx) {
  if (nx < 8 || nx % 2 != 0)
    throw std::invalid_argument("Grid: nx must be even and >= 8");
  if (!(lx > 0.0)) throw std::invalid_argument("Grid: lx must be > 0");
  Grid g;
  g.dim = 1;
  g.nx = nx;
  g.ny = 1;
  g.lx = lx;
  g.ly = 0.0;
  return g;
}

Grid Grid::make_2d(int nx, int ny, double lx, double ly) {
  if (nx < 8 || nx % 2 != 0 || ny < 8 || ny % 2 != 0)
    throw std::invalid_argument("Grid: nx, ny must be even and >= 8");
  if (!(lx > 0.0) || !(ly > 0.0))
    throw std::invalid_argument("Grid: extents must be > 0");
  Grid g;
  g.dim = 2;
  g.nx = nx;
  g.ny = ny;
  g.lx = lx;
  g.ly = ly;
  return g;
}

double Grid::kx(int ix) const {
  const int j = ix < nx / 2 ? ix : ix - nx;
  return two_pi * j / lx;
}

double Grid::ky(int iy) const {
  if (dim == 1) return 0.0;
  const int j = iy < ny / 2 ? iy : iy - ny;
  return two_pi * j / ly;
}

double Grid::kmag(int ix, int iy) const {
  const double a = kx(ix), b = ky(iy);
  return std::sqrt(a * a + b * b);
}

double Grid::kmax() const {
  const double a = two_pi * (nx / 2) / lx;
  if (dim == 1) return a;
  const double b = two_pi * (ny / 2) / ly;
  return std::sqrt(a * a + b * b);
}

std::vector<double> Grid::kmag_table() const {
  std::vector<double> t(static_cast<size_t>(size()));
  for (int iy = 0; iy < ny; ++iy)
    for (int ix = 0; ix < nx; ++ix)
      t[static_cast<size_t>(iy) * nx + ix] = kmag(ix, iy);
  return t;
}

SpectralField SpectralField::zeros(const Grid& g, Space s) {
  SpectralField f;
  f.grid = g;
  f.space = s;
  f.values.assign(static_cast<size_t>(g.size()), {0.0, 0.0});
  return f;
}

SpectralField forward(const SpectralField& f) {
  check_space(f, Space::real, "forward");
  SpectralField out;
  out.grid = f.grid;
  out.space = Space::reciprocal;
  out.values.resize(f.values.size());
  execute(PlanCache::get(f.grid.nx, f.grid.ny).fwd, f.values, out.values);
  return out;
}

SpectralField inverse(const SpectralField& f) {
  check_space(f, Space::reciprocal, "inverse");
  SpectralField out;
  out.grid = f.grid;
  out.space = Space::real;
  out.values.resize(f.values.size());
  execute(PlanCache::get(f.grid.nx, f.grid.ny).bwd, f.values, out.values);
  const double norm = 1.0 / f.grid.size();
  for (auto& v : out.values) v *= norm;
  return out;
}

SpectralField apply_multiplier(const SpectralField& f,
                               const std::vector<double>& symbol) {
  check_space(f, Space::real, "apply_multiplier");
  if (symbol.size() != f.values.size())
    throw std::invalid_argument("apply_multiplier: symbol table size mismatch");
  SpectralField hat = forward(f);
  for (size_t i = 0; i < hat.values.size(); ++i) {
    if (!std::isfinite(symbol[i]))
      throw std::domain_error(
          "apply_multiplier: symbol is not finite at lattice node " +
          std::to_string(i));
    hat.values[i] *= symbol[i];
  }
  return inverse(hat);
}

SpectralField apply_multiplier(const SpectralField& f,
                               const std::function<double(double)>& K) {
  check_space(f, Space::real, "apply_multiplier");
  const Grid& g = f.grid;
  std::vector<double> symbol(f.values.size());
  for (int iy = 0; iy < g.ny; ++iy)
    for (int ix = 0; ix < g.nx; ++ix) {
      const double kk = g.kmag(ix, iy);
      const double val = K(kk);
      if (!std::isfinite(val))
        throw std::domain_error("apply_multiplier: K undefined at |k| = " +
                                std::to_string(kk));
      symbol[static_cast<size_t>(iy) * g.nx + ix] = val;
    }
  return apply_multiplier(f, symbol);
}

SpectralField fractional_laplacian(const SpectralField& f, double s) {
  if (!(s > 0.0 && s <= 1.0))
    throw std::invalid_argument("fractional_laplacian: s must be in (0, 1]");
  return apply_multiplier(
      f, [s](double k) { return std::pow(k * k, s); });
}

std::complex<double> inner_product(const SpectralField& f,
                                   const SpectralField& g) {
  if (f.values.size() != g.values.size())
    throw std::invalid_argument("inner_product: size mismatch");
  std::complex<double> acc{0.0, 0.0};
  for (size_t i = 0; i < f.values.size(); ++i)
    acc += std::conj(f.values[i]) * g.values[i];
  return acc * f.grid.cell();
}

}  // namespace pfqm
