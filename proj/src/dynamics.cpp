#include "pfqm/dynamics.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace pfqm {

namespace {

void require(bool ok, const char* what) {
  if (!ok) throw std::invalid_argument(what);
}

}  // namespace

void PumpSpec::validate() const {
  if (const auto* h = std::get_if<HomogeneousPump>(&profile))
    require(h->amplitude >= 0.0, "PumpSpec: amplitude must be >= 0");
  if (const auto* g = std::get_if<GaussianPump>(&profile)) {
    require(g->amplitude >= 0.0, "PumpSpec: amplitude must be >= 0");
    require(g->width > 0.0, "PumpSpec: width must be > 0");
  }
}

void PotentialSpec::validate() const {
  if (const auto* h = std::get_if<HarmonicPotential>(&form))
    require(h->strength >= 0.0, "PotentialSpec: strength must be >= 0");
  if (const auto* m = std::get_if<MexicanHatPotential>(&form)) {
    require(m->strength >= 0.0, "PotentialSpec: strength must be >= 0");
    require(m->hat_width > 0.0, "PotentialSpec: hat_width must be > 0");
  }
}

void ModelParams::validate() const {
  require(gamma >= 0.0, "ModelParams: gamma must be >= 0");
  require(eta >= 0.0, "ModelParams: eta must be >= 0");
  require(std::isfinite(alpha), "ModelParams: alpha must be finite");
  kinetic.validate();
  pump.validate();
  potential.validate();
}

std::vector<double> potential_table(const Grid& grid, const PotentialSpec& p) {
  std::vector<double> v(static_cast<size_t>(grid.size()), 0.0);
  if (std::holds_alternative<NoPotential>(p.form)) return v;
  if (const auto* tab = std::get_if<TabulatedPotential>(&p.form)) {
    if (tab->values.size() != v.size())
      throw std::invalid_argument("potential table size does not match grid");
    return tab->values;
  }
  for (int iy = 0; iy < grid.ny; ++iy)
    for (int ix = 0; ix < grid.nx; ++ix) {
      const double x = grid.x(ix), y = grid.y(iy);
      const double r2 = x * x + y * y;
      double val = 0.0;
      if (const auto* h = std::get_if<HarmonicPotential>(&p.form)) {
        val = h->strength * r2;
      } else if (const auto* m = std::get_if<MexicanHatPotential>(&p.form)) {
        val = m->strength * r2 +
              m->hat_amplitude * std::exp(-r2 / (m->hat_width * m->hat_width));
      }
      v[static_cast<size_t>(iy) * grid.nx + ix] = val;
    }
  return v;
}

std::vector<std::complex<double>> kinetic_phase_table(const Grid& grid,
                                                      const ModelParams& p,
                                                      double dt) {
  const std::complex<double> relax(1.0, -p.eta);
  std::vector<std::complex<double>> table(static_cast<size_t>(grid.size()));
  for (int iy = 0; iy < grid.ny; ++iy)
    for (int ix = 0; ix < grid.nx; ++ix) {
      const double g = kinetic_prefactor_g(grid.kmag(ix, iy), p.kinetic);
      if (!std::isfinite(g))
        throw std::domain_error("kinetic multiplier not finite on lattice");
      table[static_cast<size_t>(iy) * grid.nx + ix] =
          std::exp(std::complex<double>(0.0, -1.0) * relax * (g / hbar) * dt);
    }
  return table;
}

Evolver::Evolver(const Grid& grid, const ModelParams& params, double dt,
                 EvolveOptions options)
    : grid_(grid), params_(params), dt_(dt), options_(options) {
  if (!(dt > 0.0)) throw std::invalid_argument("Evolver: dt must be > 0");
  params_.validate();
  v_ = potential_table(grid_, params_.potential);

  if (!params_.pump.is_none()) {
    pump_env_.resize(static_cast<size_t>(grid_.size()));
    for (int iy = 0; iy < grid_.ny; ++iy)
      for (int ix = 0; ix < grid_.nx; ++ix) {
        const double x = grid_.x(ix), y = grid_.y(iy);
        double amp = 0.0;
        if (const auto* h = std::get_if<HomogeneousPump>(&params_.pump.profile)) {
          amp = h->amplitude;
        } else if (const auto* g =
                       std::get_if<GaussianPump>(&params_.pump.profile)) {
          const double rx = x - g->center_x, ry = y - g->center_y;
          amp = g->amplitude *
                std::exp(-(rx * rx + ry * ry) / (g->width * g->width));
        }
        const double phase = params_.pump.k_i_x * x + params_.pump.k_i_y * y;
        pump_env_[static_cast<size_t>(iy) * grid_.nx + ix] =
            amp * std::polar(1.0, phase);
      }
  }

  symbol_.resize(static_cast<size_t>(grid_.size()));
  for (int iy = 0; iy < grid_.ny; ++iy)
    for (int ix = 0; ix < grid_.nx; ++ix)
      symbol_[static_cast<size_t>(iy) * grid_.nx + ix] =
          kinetic_prefactor_g(grid_.kmag(ix, iy), params_.kinetic);
  kin_phase_ = kinetic_phase_table(grid_, params_, dt_);
  if (options_.split == SplitOrder::kinetic_local_kinetic)
    kin_phase_half_ = kinetic_phase_table(grid_, params_, 0.5 * dt_);
}

std::complex<double> Evolver::local_rhs(std::complex<double> psi, double v,
                                        std::complex<double> pump_env,
                                        std::complex<double> pump_phase) const {
  const double rho = std::norm(psi);
  const std::complex<double> lin(
      -0.5 * params_.gamma, -(params_.alpha * rho + v + params_.omega) / hbar);
  return lin * psi + pump_env * pump_phase / hbar;
}

double Evolver::local_step(std::vector<std::complex<double>>& psi, double t,
                           double dt) {
  const size_t n = psi.size();
  double max_abs2 = 0.0;
  long bad_node = -1;

  if (params_.pump.is_none()) {
    // |psi| decays exactly at gamma/2 and the phase integral of alpha|psi|^2
    // has a closed form, so no substepping is needed.
    const double decay = std::exp(-0.5 * params_.gamma * dt);
    const double lam = params_.gamma > 0.0
                           ? (1.0 - std::exp(-params_.gamma * dt)) / params_.gamma
                           : dt;
    for (size_t i = 0; i < n; ++i) {
      const double rho0 = std::norm(psi[i]);
      const double phase =
          -(params_.alpha * rho0 * lam + (v_[i] + params_.omega) * dt) / hbar;
      psi[i] *= decay * std::polar(1.0, phase);
      const double a2 = std::norm(psi[i]);
      if (!std::isfinite(a2)) {
        bad_node = static_cast<long>(i);
        break;
      }
      max_abs2 = std::max(max_abs2, a2);
    }
  } else {
    const int nsub = std::max(1, options_.local_substeps);
    const double h = dt / nsub;
    const double w = params_.pump.omega_i / hbar;
    for (int sub = 0; sub < nsub; ++sub) {
      const double t0 = t + sub * h;
      const std::complex<double> ph0 = std::polar(1.0, -w * t0);
      const std::complex<double> phm = std::polar(1.0, -w * (t0 + 0.5 * h));
      const std::complex<double> ph1 = std::polar(1.0, -w * (t0 + h));
      const bool last = (sub == nsub - 1);
      for (size_t i = 0; i < n; ++i) {
        const std::complex<double> p = psi[i];
        const std::complex<double> env = pump_env_[i];
        const std::complex<double> k1 = local_rhs(p, v_[i], env, ph0);
        const std::complex<double> k2 =
            local_rhs(p + 0.5 * h * k1, v_[i], env, phm);
        const std::complex<double> k3 =
            local_rhs(p + 0.5 * h * k2, v_[i], env, phm);
        const std::complex<double> k4 = local_rhs(p + h * k3, v_[i], env, ph1);
        psi[i] = p + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        if (last) {
          const double a2 = std::norm(psi[i]);
          if (!std::isfinite(a2)) {
            bad_node = static_cast<long>(i);
            break;
          }
          max_abs2 = std::max(max_abs2, a2);
        }
      }
      if (bad_node >= 0) break;
    }
  }

  if (bad_node >= 0)
    throw evolve_error("local step produced a non-finite value at node " +
                           std::to_string(bad_node) + ", t = " +
                           std::to_string(t),
                       t, std::numeric_limits<double>::quiet_NaN(), steps_done_,
                       bad_node);
  return std::sqrt(max_abs2);
}

void Evolver::kinetic_step(std::vector<std::complex<double>>& psi) {
  SpectralField f;
  f.grid = grid_;
  f.space = Space::real;
  f.values = std::move(psi);
  SpectralField hat = forward(f);
  for (size_t i = 0; i < hat.values.size(); ++i) hat.values[i] *= kin_phase_[i];
  f = inverse(hat);
  psi = std::move(f.values);
}

void Evolver::step(SimState& state) {
  const double t0 = state.time;
  double max_abs = 0.0;
  if (options_.split == SplitOrder::local_kinetic_local) {
    local_step(state.field.values, t0, 0.5 * dt_);
    kinetic_step(state.field.values);
    max_abs = local_step(state.field.values, t0 + 0.5 * dt_, 0.5 * dt_);
  } else {
    // half kinetic, full local, half kinetic (testing variant)
    auto half_kick = [&] {
      SpectralField hat = forward(state.field);
      for (size_t i = 0; i < hat.values.size(); ++i)
        hat.values[i] *= kin_phase_half_[i];
      state.field = inverse(hat);
    };
    half_kick();
    local_step(state.field.values, t0, dt_);
    half_kick();
    max_abs = 0.0;
    for (const auto& v : state.field.values)
      max_abs = std::max(max_abs, std::abs(v));
  }
  state.time = t0 + dt_;
  ++steps_done_;
  if (max_abs > options_.watchdog_max_abs)
    throw evolve_error(
        "amplitude watchdog tripped: max |psi| = " + std::to_string(max_abs) +
            " at t = " + std::to_string(state.time),
        state.time, max_abs, steps_done_);
}

ObserverSample Evolver::sample(const SimState& state) {
  ObserverSample s;
  s.t = state.time;
  const auto& vals = state.field.values;
  double mass = 0.0, max_abs2 = 0.0;
  for (const auto& v : vals) {
    const double a2 = std::norm(v);
    mass += a2;
    max_abs2 = std::max(max_abs2, a2);
  }
  s.mass = mass * grid_.cell();
  s.max_abs = std::sqrt(max_abs2);

  SpectralField hat = forward(state.field);
  double kexp = 0.0;
  for (size_t i = 0; i < hat.values.size(); ++i)
    kexp += symbol_[i] * std::norm(hat.values[i]);
  s.kinetic_expectation = kexp * grid_.cell() / grid_.size();

  if (!params_.pump.is_none()) {
    std::complex<double> acc{0.0, 0.0};
    for (size_t i = 0; i < vals.size(); ++i)
      acc += std::conj(vals[i]) * pump_env_[i];
    acc *= std::polar(1.0, -params_.pump.omega_i / hbar * state.time) *
           grid_.cell();
    s.pump_inner_real = acc.real();
  }
  return s;
}

EvolveResult evolve(SimState& state, const ModelParams& params, double t_final,
                    double dt, int observer_stride,
                    const EvolveOptions& options, const ObserverHook& hook) {
  if (!(t_final > state.time))
    throw std::invalid_argument("evolve: t_final must exceed state.time");
  if (state.field.space != Space::real ||
      static_cast<int>(state.field.values.size()) != state.field.grid.size())
    throw std::invalid_argument("evolve: state field must be a real-space "
                                "field matching its grid");
  Evolver ev(state.field.grid, params, dt, options);
  const long nsteps = std::lround((t_final - state.time) / dt);

  EvolveResult result;
  auto record = [&](long) {
    ObserverSample s = ev.sample(state);
    result.samples.push_back(s);
    if (hook) hook(state, s);
  };
  record(0);
  for (long i = 1; i <= nsteps; ++i) {
    ev.step(state);
    if ((observer_stride > 0 && i % observer_stride == 0) || i == nsteps)
      record(i);
  }
  result.steps = nsteps;
  return result;
}

}  // namespace pfqm
