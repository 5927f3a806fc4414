#include "congestion/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "congestion/errors.hpp"

namespace congestion {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Safety factor on the acoustic-viscous limit dt <= (2 mu + lambda) / (rho c^2).
constexpr double kAcousticViscousSafety = 0.05;

// The bare viscous limit leaves the highest grid mode with amplification -1.
constexpr double kViscousSafety = 0.5;

void mirror_x_ghosts(Field& f, int nx, int ny) {
  for (int j = 0; j < ny; ++j) {
    f(-1, j) = f(0, j);
    f(nx, j) = f(nx - 1, j);
  }
}

void mirror_ghosts(Field& f, const Grid& g) {
  const int nx = g.nx();
  const int ny = g.ny();
  mirror_x_ghosts(f, nx, ny);
  if (g.dim == 2) {
    for (int i = -1; i <= nx; ++i) {
      f(i, -1) = f(i, 0);
      f(i, ny) = f(i, ny - 1);
    }
  } else {
    for (int i = -1; i <= nx; ++i) {
      f(i, -1) = f(i, 0);
      f(i, 1) = f(i, 0);
    }
  }
}

double upwind(double face_vel, double left, double right) {
  if (face_vel > 0.0) return left;
  if (face_vel < 0.0) return right;
  return 0.5 * (left + right);
}

// Normal mass flux: centred momentum plus upwind diffusion of rho / rho_star
// at the local convective speed, scaled by the face barrier. Equals
// u rho_upwind when both cells move with the same u and share rho_star, and
// never draws mass out of an empty cell.
double mass_flux(double m_l, double m_r, double rho_l, double rho_r, double u_l, double u_r,
                 double star_l, double star_r, double star_f) {
  const double a =
      std::max(std::abs(u_l), std::abs(u_r)) * std::max(star_l, star_r) / star_f;
  return 0.5 * (m_l + m_r) - 0.5 * a * star_f * (rho_r / star_r - rho_l / star_l);
}

}  // namespace

void SolverConfig::validate() const {
  if (!(cfl > 0.0 && cfl <= 1.0)) throw ParameterError("solver.cfl must lie in (0,1]");
  if (!(barrier_tol > 0.0 && barrier_tol < 0.1))
    throw ParameterError("solver.barrier_tol must lie in (0,0.1)");
  if (max_substeps < 0) throw ParameterError("solver.max_substeps must be >= 0");
  if (!(t_end >= 0.0)) throw ParameterError("solver.t_end must be >= 0");
  if (!(snapshot_every > 0.0)) throw ParameterError("solver.snapshot_every must be > 0");
}

Field congestion_ratio(const FlowState& state, const BarrierField& barrier) {
  Field r(state.grid);
  for (int j = 0; j < state.grid.ny(); ++j)
    for (int i = 0; i < state.grid.nx(); ++i) r(i, j) = state.rho(i, j) / barrier.values(i, j);
  return r;
}

Field effective_sound_speed(const FlowState& state, const PressureLaw& law,
                            const FluidParams& params, const BarrierField& barrier) {
  Field c(state.grid);
  for (int j = 0; j < state.grid.ny(); ++j) {
    for (int i = 0; i < state.grid.nx(); ++i) {
      const double rho = std::max(state.rho(i, j), 0.0);
      double c2 = eval_dpi(law, rho / barrier.values(i, j));
      if (rho > 0.0) c2 += params.p_coeff * params.gamma * std::pow(rho, params.gamma - 1.0);
      c(i, j) = std::sqrt(c2);
    }
  }
  return c;
}

TimeStepLimits time_step_limits(const FlowState& state, const PressureLaw& law,
                                const FluidParams& params, const BarrierField& barrier,
                                double cfl) {
  const Grid& g = state.grid;
  const double h = g.dim == 2 ? std::min(g.dx(), g.dy()) : g.dx();
  const double vac = kVacuumFraction * barrier.sup;
  const double visc = 2.0 * params.mu + params.lambda;
  const double visc_max = std::max(visc, params.mu);
  const Field c = effective_sound_speed(state, law, params, barrier);

  TimeStepLimits lim{kInf, kInf, kInf, kInf};
  double min_rho = kInf;
  for (int j = 0; j < g.ny(); ++j) {
    for (int i = 0; i < g.nx(); ++i) {
      const double rho = state.rho(i, j);
      if (rho <= vac) continue;
      const double u = state.mx(i, j) / rho;
      const double v = state.my(i, j) / rho;
      const double speed = std::sqrt(u * u + v * v) + c(i, j);
      if (speed > 0.0) lim.convective = std::min(lim.convective, cfl * h / speed);
      const double c2 = c(i, j) * c(i, j);
      if (c2 > 0.0)
        lim.acoustic_viscous =
            std::min(lim.acoustic_viscous, kAcousticViscousSafety * visc / (rho * c2));
      min_rho = std::min(min_rho, rho);
    }
  }
  if (std::isfinite(min_rho))
    lim.viscous = kViscousSafety * h * h * min_rho / (2.0 * g.dim * visc_max);
  lim.dt = std::min({lim.convective, lim.viscous, lim.acoustic_viscous});
  return lim;
}

double stable_dt(const FlowState& state, const PressureLaw& law, const FluidParams& params,
                 const BarrierField& barrier, double cfl) {
  return time_step_limits(state, law, params, barrier, cfl).dt;
}

FlowState step(const FlowState& state_in, double dt, const PressureLaw& law,
               const FluidParams& params, const BarrierField& barrier, const SolverConfig& cfg,
               const SourceFn* source) {
  const FlowState s = apply_velocity_bc(state_in);
  const Grid& g = s.grid;
  const int nx = g.nx();
  const int ny = g.ny();
  const bool two_d = g.dim == 2;
  const double dx = g.dx();
  const double dy = g.dy();
  const double vac = kVacuumFraction * barrier.sup;
  const Velocity vel = velocity(s, vac);
  const Field& u = vel.u;
  const Field& v = vel.v;

  // Pressure scalars on interior cells, mirrored into the ghosts.
  Field phi(g), p_int(g), pi_c(g);
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      const double rho = s.rho(i, j);
      const double r = rho / barrier.values(i, j);
      if (cfg.force_form == ForceForm::Potential) {
        phi(i, j) = eval_internal(params, rho).H + eval_Q(law, r);
      } else {
        p_int(i, j) = eval_internal(params, rho).p;
        pi_c(i, j) = eval_pi(law, r);
      }
    }
  }
  mirror_ghosts(phi, g);
  mirror_ghosts(p_int, g);
  mirror_ghosts(pi_c, g);

  // Face fluxes. x-face i separates cells i-1 and i; faces 0 and nx are walls.
  const std::size_t nfx = static_cast<std::size_t>(nx + 1) * ny;
  std::vector<double> fr_x(nfx, 0.0), fmx_x(nfx, 0.0), fmy_x(nfx, 0.0);
  for (int j = 0; j < ny; ++j) {
    for (int i = 1; i < nx; ++i) {
      const std::size_t k = static_cast<std::size_t>(j) * (nx + 1) + i;
      const double f = mass_flux(s.mx(i - 1, j), s.mx(i, j), s.rho(i - 1, j), s.rho(i, j),
                                 u(i - 1, j), u(i, j), barrier.values(i - 1, j),
                                 barrier.values(i, j), barrier.face_x_at(i, j, nx));
      fr_x[k] = f;
      const int up = f > 0.0 ? i - 1 : i;
      const bool vacuum_up = f != 0.0 && s.rho(up, j) <= vac;
      if (!vacuum_up) {
        fmx_x[k] = f * upwind(f, u(i - 1, j), u(i, j));
        fmy_x[k] = f * upwind(f, v(i - 1, j), v(i, j));
      }
    }
  }
  std::vector<double> fr_y, fmx_y, fmy_y;
  if (two_d) {
    const std::size_t nfy = static_cast<std::size_t>(nx) * (ny + 1);
    fr_y.assign(nfy, 0.0);
    fmx_y.assign(nfy, 0.0);
    fmy_y.assign(nfy, 0.0);
    for (int j = 1; j < ny; ++j) {
      for (int i = 0; i < nx; ++i) {
        const std::size_t k = static_cast<std::size_t>(j) * nx + i;
        const double f = mass_flux(s.my(i, j - 1), s.my(i, j), s.rho(i, j - 1), s.rho(i, j),
                                   v(i, j - 1), v(i, j), barrier.values(i, j - 1),
                                   barrier.values(i, j), barrier.face_y[k]);
        fr_y[k] = f;
        const int up = f > 0.0 ? j - 1 : j;
        const bool vacuum_up = f != 0.0 && s.rho(i, up) <= vac;
        if (!vacuum_up) {
          fmx_y[k] = f * upwind(f, u(i, j - 1), u(i, j));
          fmy_y[k] = f * upwind(f, v(i, j - 1), v(i, j));
        }
      }
    }
  }

  const double mu = params.mu;
  const double lam = params.lambda;
  FlowState out = FlowState::zeros(g);
  out.t = s.t + dt;
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      const std::size_t kx = static_cast<std::size_t>(j) * (nx + 1) + i;
      double drho = -(fr_x[kx + 1] - fr_x[kx]) / dx;
      double dmx = -(fmx_x[kx + 1] - fmx_x[kx]) / dx;
      double dmy = -(fmy_x[kx + 1] - fmy_x[kx]) / dx;
      if (two_d) {
        const std::size_t ky = static_cast<std::size_t>(j) * nx + i;
        drho -= (fr_y[ky + nx] - fr_y[ky]) / dy;
        dmx -= (fmx_y[ky + nx] - fmx_y[ky]) / dy;
        dmy -= (fmy_y[ky + nx] - fmy_y[ky]) / dy;
      }

      // Pressure force.
      const double rho = s.rho(i, j);
      if (cfg.force_form == ForceForm::Potential) {
        dmx -= rho * (phi(i + 1, j) - phi(i - 1, j)) / (2.0 * dx);
        if (two_d) dmy -= rho * (phi(i, j + 1) - phi(i, j - 1)) / (2.0 * dy);
      } else {
        const double star = barrier.values(i, j);
        dmx -= (p_int(i + 1, j) - p_int(i - 1, j)) / (2.0 * dx) +
               star * (pi_c(i + 1, j) - pi_c(i - 1, j)) / (2.0 * dx);
        if (two_d)
          dmy -= (p_int(i, j + 1) - p_int(i, j - 1)) / (2.0 * dy) +
                 star * (pi_c(i, j + 1) - pi_c(i, j - 1)) / (2.0 * dy);
      }

      // div S with S = 2 mu D(u) + lambda div(u) I.
      const double uxx = (u(i + 1, j) - 2.0 * u(i, j) + u(i - 1, j)) / (dx * dx);
      if (!two_d) {
        dmx += (2.0 * mu + lam) * uxx;
      } else {
        const double uyy = (u(i, j + 1) - 2.0 * u(i, j) + u(i, j - 1)) / (dy * dy);
        const double vxx = (v(i + 1, j) - 2.0 * v(i, j) + v(i - 1, j)) / (dx * dx);
        const double vyy = (v(i, j + 1) - 2.0 * v(i, j) + v(i, j - 1)) / (dy * dy);
        const double uxy =
            (u(i + 1, j + 1) - u(i + 1, j - 1) - u(i - 1, j + 1) + u(i - 1, j - 1)) /
            (4.0 * dx * dy);
        const double vxy =
            (v(i + 1, j + 1) - v(i + 1, j - 1) - v(i - 1, j + 1) + v(i - 1, j - 1)) /
            (4.0 * dx * dy);
        dmx += (2.0 * mu + lam) * uxx + mu * uyy + (mu + lam) * vxy;
        dmy += mu * vxx + (2.0 * mu + lam) * vyy + (mu + lam) * uxy;
      }

      if (source != nullptr) {
        const SourceValue src = (*source)(s.t, g.xc(i), g.yc(j));
        drho += src.mass;
        dmx += src.mom_x;
        dmy += src.mom_y;
      }

      out.rho(i, j) = rho + dt * drho;
      out.mx(i, j) = s.mx(i, j) + dt * dmx;
      out.my(i, j) = two_d ? s.my(i, j) + dt * dmy : 0.0;
    }
  }
  out = apply_velocity_bc(std::move(out));

  const bool singular = is_singular(law);
  const double limit = 1.0 - cfg.barrier_tol;
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      const double rho = out.rho(i, j);
      if (!std::isfinite(rho) || !std::isfinite(out.mx(i, j)) || !std::isfinite(out.my(i, j))) {
        std::ostringstream os;
        os << "non-finite state at cell (" << i << ", " << j << "), t = " << out.t;
        throw NonFinite(os.str());
      }
      if (rho < 0.0) {
        std::ostringstream os;
        os << "negative density " << rho << " at cell (" << i << ", " << j << ")";
        throw BarrierViolation(os.str());
      }
      if (singular && rho / barrier.values(i, j) > limit) {
        std::ostringstream os;
        os << "ratio " << rho / barrier.values(i, j) << " exceeds 1 - barrier_tol at cell (" << i
           << ", " << j << ")";
        throw BarrierViolation(os.str());
      }
    }
  }
  return out;
}

AdvanceResult advance(FlowState state, double t_target, const PressureLaw& law,
                      const FluidParams& params, const BarrierField& barrier,
                      const SolverConfig& cfg, const AdvanceSink& sink, const SourceFn* source) {
  cfg.validate();
  state = apply_velocity_bc(std::move(state));
  AdvanceResult res;
  res.stats.min_dt = kInf;
  auto track_ratio = [&](const FlowState& s) {
    for (int j = 0; j < s.grid.ny(); ++j)
      for (int i = 0; i < s.grid.nx(); ++i)
        res.stats.max_ratio = std::max(res.stats.max_ratio, s.rho(i, j) / barrier.values(i, j));
  };
  track_ratio(state);
  if (sink.on_state) sink.on_state(state);

  const double horizon = std::max(cfg.t_end, t_target);
  const double dt_floor = 1e-14 * horizon;
  while (t_target - state.t > dt_floor) {
    const double remaining = t_target - state.t;
    double dt = std::min(stable_dt(state, law, params, barrier, cfg.cfl), remaining);
    if (!(dt >= dt_floor)) {
      std::ostringstream os;
      os << "time step " << dt << " underflowed at t = " << state.t;
      throw DegenerateState(os.str());
    }
    FlowState next;
    bool accepted = false;
    for (int attempt = 0; attempt <= cfg.max_substeps; ++attempt) {
      try {
        next = step(state, dt, law, params, barrier, cfg, source);
        accepted = true;
        break;
      } catch (const BarrierViolation&) {
        ++res.stats.rejected;
        dt *= 0.5;
      }
    }
    if (!accepted) {
      std::ostringstream os;
      os << "step rejected after " << cfg.max_substeps << " halvings at t = " << state.t;
      throw StepFailure(os.str());
    }
    if (dt == remaining) next.t = t_target;
    ++res.stats.steps;
    res.stats.min_dt = std::min(res.stats.min_dt, dt);
    track_ratio(next);
    if (sink.on_step) sink.on_step(state, dt, next);
    state = std::move(next);
    if (sink.on_state) sink.on_state(state);
  }
  if (res.stats.steps == 0) res.stats.min_dt = 0.0;
  res.state = std::move(state);
  return res;
}

Field step_ratio(const Field& ratio_in, const Velocity& vel, double dt,
                 const BarrierField& barrier, const Grid& grid) {
  Field R = ratio_in;
  mirror_ghosts(R, grid);
  const int nx = grid.nx();
  const int ny = grid.ny();
  const double dx = grid.dx();
  const double dy = grid.dy();
  const bool two_d = grid.dim == 2;

  Field out(grid);
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      auto flux_x = [&](int f) {  // face between cells f-1 and f
        if (f == 0 || f == nx) return 0.0;
        const double uf = 0.5 * (vel.u(f - 1, j) + vel.u(f, j));
        return uf * upwind(uf, R(f - 1, j), R(f, j));
      };
      double div = (flux_x(i + 1) - flux_x(i)) / dx;
      double geo = vel.u(i, j) * barrier.log_grad_x(i, j);
      if (two_d) {
        auto flux_y = [&](int f) {
          if (f == 0 || f == ny) return 0.0;
          const double vf = 0.5 * (vel.v(i, f - 1) + vel.v(i, f));
          return vf * upwind(vf, R(i, f - 1), R(i, f));
        };
        div += (flux_y(j + 1) - flux_y(j)) / dy;
        geo += vel.v(i, j) * barrier.log_grad_y(i, j);
      }
      const double next = R(i, j) - dt * (div + R(i, j) * geo);
      if (!std::isfinite(next)) throw NonFinite("non-finite congestion ratio in step_ratio");
      out(i, j) = next;
    }
  }
  mirror_ghosts(out, grid);
  return out;
}

}  // namespace congestion
