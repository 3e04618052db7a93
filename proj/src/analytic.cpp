#include "pfqm/analytic.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace pfqm {

namespace {

// Cubic in rho: c3 rho^3 + c2 rho^2 + c1 rho + c0 = 0 with
// c3 = alpha^2, c2 = -2 a alpha, c1 = a^2 + b^2, c0 = -pump^2.
struct Cubic {
  double c3, c2, c1, c0;
  double eval(double r) const { return ((c3 * r + c2) * r + c1) * r + c0; }
  double deriv(double r) const { return (3.0 * c3 * r + 2.0 * c2) * r + c1; }
  // scale used for relative residuals
  double scale(double r) const {
    const double ar = std::abs(r);
    return std::max({std::abs(c3) * ar * ar * ar, std::abs(c2) * ar * ar,
                     std::abs(c1) * ar, std::abs(c0), 1e-300});
  }
};

Cubic make_cubic(const PlaneWaveProblem& p) {
  const double a = p.a(), b = p.b();
  return {p.alpha * p.alpha, -2.0 * a * p.alpha, a * a + b * b,
          -p.pump * p.pump};
}

double polish(const Cubic& c, double r) {
  for (int i = 0; i < 40; ++i) {
    const double f = c.eval(r);
    if (std::abs(f) <= 1e-14 * c.scale(r)) break;
    const double d = c.deriv(r);
    if (d == 0.0) break;
    const double step = f / d;
    r -= step;
    if (std::abs(step) <= 1e-16 * std::max(1.0, std::abs(r))) break;
  }
  return r;
}

}  // namespace

std::vector<double> density_cubic_roots(const PlaneWaveProblem& prob) {
  if (prob.pump < 0.0)
    throw std::invalid_argument("density_cubic_roots: pump must be >= 0");
  const double a = prob.a(), b = prob.b();

  if (prob.alpha == 0.0) {
    const double denom = a * a + b * b;
    if (denom == 0.0)
      throw std::domain_error("density_cubic_roots: a = b = 0 with alpha = 0");
    return {prob.pump * prob.pump / denom};
  }

  const Cubic cub = make_cubic(prob);
  // normalized monic form r^3 + p r^2 + q r + s
  const double p = cub.c2 / cub.c3;
  const double q = cub.c1 / cub.c3;
  const double s = cub.c0 / cub.c3;
  // depressed cubic t^3 + pt t + qt with r = t - p/3
  const double pt = q - p * p / 3.0;
  const double qt = 2.0 * p * p * p / 27.0 - p * q / 3.0 + s;
  const double disc = -4.0 * pt * pt * pt - 27.0 * qt * qt;

  std::vector<double> roots;
  if (disc > 0.0) {
    // three real roots, trigonometric form
    const double m = 2.0 * std::sqrt(-pt / 3.0);
    const double arg = std::clamp(3.0 * qt / (pt * m), -1.0, 1.0);
    const double theta = std::acos(arg) / 3.0;
    for (int k = 0; k < 3; ++k)
      roots.push_back(m * std::cos(theta - 2.0 * M_PI * k / 3.0) - p / 3.0);
  } else if (disc == 0.0) {
    if (pt == 0.0) {
      roots.push_back(-p / 3.0);  // triple root
    } else {
      roots.push_back(3.0 * qt / pt - p / 3.0);
      roots.push_back(-1.5 * qt / pt - p / 3.0);  // double root
    }
  } else {
    // single real root; take the non-cancelling cube-root branch
    const double D = std::sqrt(0.25 * qt * qt + pt * pt * pt / 27.0);
    const double A = -0.5 * qt - std::copysign(D, qt);
    double t;
    if (A != 0.0) {
      const double u = std::cbrt(A);
      t = u + (-pt / 3.0) / u;
    } else {
      t = 0.0;
    }
    roots.push_back(t - p / 3.0);
  }

  std::vector<double> out;
  for (double r : roots) {
    r = polish(cub, r);
    if (r < 0.0 && r > -1e-12 * std::max(1.0, std::abs(cub.c1 / cub.c3)))
      r = 0.0;  // pump = 0 root, rounded below zero
    if (r >= 0.0 && std::abs(cub.eval(r)) <= 1e-10 * cub.scale(r))
      out.push_back(r);
  }
  std::sort(out.begin(), out.end());
  // merge numerically coincident roots
  out.erase(std::unique(out.begin(), out.end(),
                        [](double x, double y) {
                          return std::abs(x - y) <=
                                 1e-9 * std::max(1.0, std::abs(x));
                        }),
            out.end());
  return out;
}

std::complex<double> plane_wave_state(const PlaneWaveProblem& prob,
                                      double rho) {
  const std::complex<double> denom(prob.a() - prob.alpha * rho, prob.b());
  if (std::abs(denom) == 0.0)
    throw std::domain_error("plane_wave_state: degenerate root, a + ib = "
                            "alpha rho");
  return std::complex<double>(0.0, prob.pump) / denom;
}

BranchCurve physical_branch(const PlaneWaveProblem& base,
                            std::span<const double> pump_grid) {
  if (pump_grid.empty())
    throw std::invalid_argument("physical_branch: empty pump grid");
  for (size_t i = 0; i + 1 < pump_grid.size(); ++i)
    if (!(pump_grid[i] < pump_grid[i + 1]))
      throw std::invalid_argument("physical_branch: pump grid must ascend");

  BranchCurve curve;
  double prev_rho = 0.0;
  std::optional<size_t> bistable_start;
  for (size_t i = 0; i < pump_grid.size(); ++i) {
    PlaneWaveProblem p = base;
    p.pump = pump_grid[i];
    const auto roots = density_cubic_roots(p);
    if (roots.empty())
      throw std::domain_error("physical_branch: no admissible root at pump = " +
                              std::to_string(p.pump));
    // follow the branch contiguous with the previous density; from rho = 0
    // this is the lowest root until a fold removes it
    double chosen = roots.front();
    double best = std::abs(roots.front() - prev_rho);
    for (double r : roots) {
      const double d = std::abs(r - prev_rho);
      if (d < best) {
        best = d;
        chosen = r;
      }
    }
    if (chosen != roots.front() && !curve.fold_pump)
      curve.fold_pump = p.pump;  // lowest branch vanished under continuation

    curve.points.push_back({p.pump, chosen, static_cast<int>(roots.size())});
    if (roots.size() == 3 && !bistable_start) bistable_start = i;
    if (roots.size() != 3 && bistable_start) {
      curve.bistable_ranges.emplace_back(*bistable_start, i - 1);
      bistable_start.reset();
    }
    prev_rho = chosen;
  }
  if (bistable_start)
    curve.bistable_ranges.emplace_back(*bistable_start,
                                       pump_grid.size() - 1);
  return curve;
}

std::complex<double> bogoliubov_response_rates(
    double g, double mu, double gamma, double w,
    std::complex<double> pump_tilde) {
  const std::complex<double> num =
      pump_tilde * mu +
      std::conj(pump_tilde) * std::complex<double>(w - g - mu, gamma);
  const std::complex<double> den(gamma * gamma + 2.0 * mu * g + g * g - w * w,
                                 -2.0 * gamma * w);
  if (std::abs(den) <= 1e-12)
    throw resonance_error("bogoliubov response denominator vanishes", 0.0, 0.0);
  return num / den;
}

std::complex<double> bogoliubov_response(const ResponseQuery& q) {
  const double kk = std::sqrt(q.k_x * q.k_x + q.k_y * q.k_y);
  const double g = kinetic_prefactor_g(kk, q.kinetic) / hbar;
  const double w = q.k_x * q.v_x + q.k_y * q.v_y;
  try {
    return bogoliubov_response_rates(g, q.mu / hbar, q.gamma, w, q.pump_tilde);
  } catch (const resonance_error&) {
    throw resonance_error("bogoliubov response resonant at k = (" +
                              std::to_string(q.k_x) + ", " +
                              std::to_string(q.k_y) + ")",
                          q.k_x, q.k_y);
  }
}

ResponseMap response_map(const Grid& grid, const ResponseQuery& tmpl) {
  ResponseMap map;
  map.grid = grid;
  map.magnitude.assign(static_cast<size_t>(grid.size()), 0.0);
  map.masked.assign(static_cast<size_t>(grid.size()), 0);
  for (int iy = 0; iy < grid.ny; ++iy)
    for (int ix = 0; ix < grid.nx; ++ix) {
      ResponseQuery q = tmpl;
      q.k_x = grid.kx(ix);
      q.k_y = grid.ky(iy);
      const size_t idx = static_cast<size_t>(iy) * grid.nx + ix;
      try {
        map.magnitude[idx] = std::abs(bogoliubov_response(q));
      } catch (const resonance_error&) {
        map.masked[idx] = 1;
        ++map.n_masked;
      }
    }
  return map;
}

}  // namespace pfqm
