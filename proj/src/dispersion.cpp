#include "pfqm/dispersion.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace pfqm {

namespace {

void require(bool ok, const char* what) {
  if (!ok) throw std::invalid_argument(what);
}

// First and second k-derivatives of the photon branch.
struct Deriv2 {
  double v, d1, d2;
};

Deriv2 cavity_derivs(double k, const CavityParams& p) {
  if (p.paraxial) {
    return {p.cavity_offset + k * k / (2.0 * p.photon_mass),
            k / p.photon_mass, 1.0 / p.photon_mass};
  }
  // Exact branch E_c0 * sqrt(1 + k^2/(m E_c0)); reduces to the paraxial
  // form to second order at small k.
  const double u = k * k / (p.photon_mass * p.cavity_offset);
  const double s = std::sqrt(1.0 + u);
  const double v = p.cavity_offset * s;
  const double d1 = k / (p.photon_mass * s);
  const double d2 = 1.0 / (p.photon_mass * s) -
                    k * k / (p.photon_mass * p.photon_mass * p.cavity_offset *
                             s * s * s);
  return {v, d1, d2};
}

Deriv2 exciton_derivs(double k, const CavityParams& p) {
  return {p.exciton_energy + k * k / (2.0 * p.exciton_mass),
          k / p.exciton_mass, 1.0 / p.exciton_mass};
}

// Monotone (Fritsch-Carlson) cubic interpolation through the table.
double pchip_eval(const std::vector<double>& x, const std::vector<double>& y,
                  double q) {
  const size_t n = x.size();
  if (q < x.front() || q > x.back())
    throw std::domain_error("tabulated multiplier queried at k = " +
                            std::to_string(q) + " outside [" +
                            std::to_string(x.front()) + ", " +
                            std::to_string(x.back()) + "]");
  // node slopes
  std::vector<double> h(n - 1), delta(n - 1), m(n);
  for (size_t i = 0; i + 1 < n; ++i) {
    h[i] = x[i + 1] - x[i];
    delta[i] = (y[i + 1] - y[i]) / h[i];
  }
  if (n == 2) {
    m[0] = m[1] = delta[0];
  } else {
    for (size_t i = 1; i + 1 < n; ++i) {
      if (delta[i - 1] * delta[i] <= 0.0) {
        m[i] = 0.0;
      } else {
        const double w1 = 2.0 * h[i] + h[i - 1];
        const double w2 = h[i] + 2.0 * h[i - 1];
        m[i] = (w1 + w2) / (w1 / delta[i - 1] + w2 / delta[i]);
      }
    }
    auto end_slope = [](double del0, double del1, double h0, double h1) {
      double s = ((2.0 * h0 + h1) * del0 - h0 * del1) / (h0 + h1);
      if (s * del0 <= 0.0)
        s = 0.0;
      else if (del0 * del1 < 0.0 && std::abs(s) > 3.0 * std::abs(del0))
        s = 3.0 * del0;
      return s;
    };
    m[0] = end_slope(delta[0], delta[1], h[0], h[1]);
    m[n - 1] = end_slope(delta[n - 2], delta[n - 3], h[n - 2], h[n - 3]);
  }
  size_t i =
      std::upper_bound(x.begin(), x.end(), q) - x.begin();
  i = std::min(std::max<size_t>(i, 1), n - 1) - 1;
  const double t = (q - x[i]) / h[i];
  const double t2 = t * t, t3 = t2 * t;
  return y[i] * (2 * t3 - 3 * t2 + 1) + h[i] * m[i] * (t3 - 2 * t2 + t) +
         y[i + 1] * (-2 * t3 + 3 * t2) + h[i] * m[i + 1] * (t3 - t2);
}

}  // namespace

void CavityParams::validate() const {
  require(exciton_energy > 0.0, "CavityParams: exciton_energy must be > 0");
  require(photon_mass > 0.0, "CavityParams: photon_mass must be > 0");
  require(exciton_mass > 0.0, "CavityParams: exciton_mass must be > 0");
  require(rabi > 0.0, "CavityParams: rabi must be > 0");
}

CavityParams default_cavity() { return CavityParams{}; }

double cavity_energy(double k, const CavityParams& p) {
  return cavity_derivs(k, p).v;
}

double exciton_energy(double k, const CavityParams& p) {
  return exciton_derivs(k, p).v;
}

BranchEnergies branch_energies(double k, const CavityParams& p) {
  const double ec = cavity_energy(k, p);
  const double ex = exciton_energy(k, p);
  const double root =
      std::sqrt((ex - ec) * (ex - ec) + 4.0 * p.rabi * p.rabi);
  return {0.5 * (ec + ex - root), 0.5 * (ec + ex + root)};
}

double lower_branch_curvature(double k, const CavityParams& p) {
  const Deriv2 c = cavity_derivs(k, p);
  const Deriv2 x = exciton_derivs(k, p);
  const double d = x.v - c.v;
  const double dp = x.d1 - c.d1;
  const double dpp = x.d2 - c.d2;
  const double s = std::sqrt(d * d + 4.0 * p.rabi * p.rabi);
  const double spp = (dp * dp + d * dpp) / s - (d * dp) * (d * dp) / (s * s * s);
  return 0.5 * (c.d2 + x.d2 - spp);
}

double inverse_effective_mass(double k, const CavityParams& p) {
  return lower_branch_curvature(k, p) / (hbar * hbar);
}

double find_inflection(const CavityParams& p, double k_lo, double k_hi,
                       double tol) {
  double flo = lower_branch_curvature(k_lo, p);
  double fhi = lower_branch_curvature(k_hi, p);
  if (flo == 0.0) return k_lo;
  if (fhi == 0.0) return k_hi;
  if (flo * fhi > 0.0)
    throw std::domain_error("find_inflection: curvature has no sign change on ["
                            + std::to_string(k_lo) + ", " +
                            std::to_string(k_hi) + "]");
  while (k_hi - k_lo > tol) {
    const double mid = 0.5 * (k_lo + k_hi);
    if (mid == k_lo || mid == k_hi) break;
    const double fm = lower_branch_curvature(mid, p);
    if (fm == 0.0) return mid;
    if (flo * fm < 0.0) {
      k_hi = mid;
    } else {
      k_lo = mid;
      flo = fm;
    }
  }
  return 0.5 * (k_lo + k_hi);
}

double rabi_for_inflection(CavityParams base, double k_inf) {
  // E_L''(k_inf) is monotone increasing in the Rabi energy.
  auto f = [&](double w) {
    base.rabi = w;
    return lower_branch_curvature(k_inf, base);
  };
  double lo = 1e-6, hi = 1.0;
  while (f(hi) < 0.0) hi *= 2.0;
  for (int i = 0; i < 200 && hi - lo > 1e-14 * hi; ++i) {
    const double mid = 0.5 * (lo + hi);
    (f(mid) < 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

void KineticSpec::validate() const {
  if (const auto* cm = std::get_if<ConstantMass>(&form)) {
    require(cm->mass > 0.0, "KineticSpec: mass must be > 0");
  } else if (const auto* fp = std::get_if<FractionalPower>(&form)) {
    require(fp->s > 0.0 && fp->s <= 1.0,
            "KineticSpec: fractional power s must be in (0, 1]");
    require(std::isfinite(fp->coefficient),
            "KineticSpec: fractional coefficient must be finite");
  } else if (const auto* lc = std::get_if<LowerBranchCurvature>(&form)) {
    lc->params.validate();
  } else if (const auto* tb = std::get_if<Tabulated>(&form)) {
    require(tb->k_nodes.size() >= 2,
            "KineticSpec: tabulated multiplier needs >= 2 nodes");
    require(tb->k_nodes.size() == tb->g_values.size(),
            "KineticSpec: tabulated node/value size mismatch");
    for (size_t i = 0; i + 1 < tb->k_nodes.size(); ++i)
      require(tb->k_nodes[i] < tb->k_nodes[i + 1],
              "KineticSpec: tabulated nodes must be strictly increasing");
  }
}

KineticSpec constant_mass_spec(double mass, bool half) {
  return {ConstantMass{mass}, half};
}
KineticSpec fractional_spec(double s, double coefficient, bool half) {
  return {FractionalPower{s, coefficient}, half};
}
KineticSpec curvature_spec(const CavityParams& p, bool half) {
  return {LowerBranchCurvature{p}, half};
}

double kinetic_prefactor_g(double k, const KineticSpec& spec) {
  const double scale = spec.prefactor_half ? 0.5 : 1.0;
  if (const auto* cm = std::get_if<ConstantMass>(&spec.form))
    return scale * k * k / cm->mass;
  if (const auto* fp = std::get_if<FractionalPower>(&spec.form))
    return scale * fp->coefficient * std::pow(k, 2.0 * fp->s);
  if (const auto* lc = std::get_if<LowerBranchCurvature>(&spec.form))
    return scale * k * k * lower_branch_curvature(k, lc->params);
  const auto& tb = std::get<Tabulated>(spec.form);
  return scale * pchip_eval(tb.k_nodes, tb.g_values, k);
}

}  // namespace pfqm
