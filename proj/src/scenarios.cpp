#include "congestion/scenarios.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "congestion/errors.hpp"

namespace congestion {

std::string initial_kind(const InitialProfile& profile) {
  switch (profile.index()) {
    case 0: return "gaussian_pulse";
    case 1: return "barrier_fill";
    case 2: return "uniform";
    default: return "manufactured";
  }
}

const std::vector<std::string>& scenario_names() {
  static const std::vector<std::string> names = {"traffic_1d", "lane_narrowing_1d", "pipe_1d",
                                                 "crowd_blob_2d", "manufactured_1d"};
  return names;
}

Scenario make_scenario(const std::string& name) {
  Scenario sc;
  sc.name = name;
  const FluidParams traffic_fluid{0.01, 0.0, 2.0, 0.02};
  const Singular traffic_law{1e-3, 3.0, 3.0};

  if (name == "traffic_1d") {
    sc.grid = Grid::line(1.0, 200);
    sc.barrier = ConstantBarrier{1.0};
    sc.initial = GaussianPulse{0.3, 0.4, {0.3, 0.0}, 0.1, {0.5, 0.0}};
    sc.fluid = FluidParams{0.005, 0.0, 2.0, 0.005};
    sc.law = Singular{1e-3, 3.0, 2.0};
    sc.t_end = 1.0;
    sc.snapshot_every = 0.1;
  } else if (name == "lane_narrowing_1d") {
    sc.grid = Grid::line(1.0, 200);
    sc.barrier = TanhStep{1.0, 0.6, 0.5, 0.05};
    sc.initial = UniformDensity{0.5, {0.3, 0.0}};
    sc.fluid = traffic_fluid;
    sc.law = traffic_law;
    sc.t_end = 0.5;
    sc.snapshot_every = 0.1;
  } else if (name == "pipe_1d") {
    sc.grid = Grid::line(1.0, 200);
    sc.barrier = PipeProfile{1.0, 0.15, 0.5, 0.2};
    sc.initial = BarrierFill{0.8, {0.2, 0.0}};
    sc.fluid = traffic_fluid;
    sc.law = traffic_law;
    sc.t_end = 0.5;
    sc.snapshot_every = 0.1;
  } else if (name == "crowd_blob_2d") {
    sc.grid = Grid::rect(1.0, 1.0, 96, 96);
    sc.barrier = GaussianBump{1.0, -0.6, {0.65, 0.5}, 0.1};
    sc.initial = GaussianPulse{0.05, 0.8, {0.3, 0.5}, 0.12, {0.5, 0.0}, 0.15};
    sc.fluid = traffic_fluid;
    sc.law = traffic_law;
    sc.t_end = 0.3;
    sc.snapshot_every = 0.1;
  } else if (name == "manufactured_1d") {
    sc.grid = Grid::line(1.0, 200);
    sc.barrier = ConstantBarrier{1.0};
    sc.initial = ManufacturedSolution{};
    sc.fluid = FluidParams{0.05, 0.0, 2.0, 1.0};
    sc.law = Singular{1e-2, 3.0, 3.0};
    sc.t_end = 0.2;
    sc.snapshot_every = 0.1;
  } else {
    throw UnknownScenario("unknown scenario '" + name + "'");
  }
  return sc;
}

InitialData make_initial_data(const InitialProfile& profile, const Grid& grid,
                              const BarrierField& barrier) {
  InitialData d{Field(grid), Field(grid), Field(grid)};
  for (int j = 0; j < grid.ny(); ++j) {
    for (int i = 0; i < grid.nx(); ++i) {
      const double x = grid.xc(i);
      const double y = grid.yc(j);
      double rho = 0.0;
      std::array<double, 2> vel{0.0, 0.0};
      if (const auto* g = std::get_if<GaussianPulse>(&profile)) {
        const double ddx = x - g->center[0];
        const double ddy = grid.dim == 2 ? y - g->center[1] : 0.0;
        const double d2 = ddx * ddx + ddy * ddy;
        rho = g->base + g->amp * std::exp(-d2 / (g->width * g->width));
        vel = g->velocity;
        if (g->velocity_width > 0.0) {
          const double shape = std::exp(-d2 / (g->velocity_width * g->velocity_width));
          vel = {vel[0] * shape, vel[1] * shape};
        }
      } else if (const auto* f = std::get_if<BarrierFill>(&profile)) {
        rho = f->fraction * barrier.values(i, j);
        vel = f->velocity;
      } else if (const auto* u = std::get_if<UniformDensity>(&profile)) {
        rho = u->rho;
        vel = u->velocity;
      } else {
        const auto& ms = std::get<ManufacturedSolution>(profile);
        const auto f0 = manufactured_fields(ms, grid.extents[0], 0.0, x);
        rho = f0.rho;
        vel = {f0.u, 0.0};
      }
      if (grid.dim == 1) vel[1] = 0.0;
      d.rho0(i, j) = rho;
      d.mx0(i, j) = rho * vel[0];
      d.my0(i, j) = rho * vel[1];
    }
  }
  return d;
}

FlowState make_initial_state(const InitialProfile& profile, const Grid& grid,
                             const BarrierField& barrier) {
  InitialData d = make_initial_data(profile, grid, barrier);
  FlowState s;
  s.grid = grid;
  s.t = 0.0;
  s.rho = std::move(d.rho0);
  s.mx = std::move(d.mx0);
  s.my = std::move(d.my0);
  return apply_velocity_bc(std::move(s));
}

ManufacturedFields manufactured_fields(const ManufacturedSolution& ms, double length, double t,
                                       double x) {
  const double k = 2.0 * std::numbers::pi / length;
  return {ms.rho_mean + ms.rho_amp * std::sin(k * x) * std::cos(t), ms.u_amp * std::sin(k * x)};
}

SourceValue manufactured_sources(const ManufacturedSolution& ms, double length,
                                 const std::optional<PressureLaw>& law, const FluidParams& params,
                                 const BarrierSpec& barrier, double t, double x) {
  const double k = 2.0 * std::numbers::pi / length;
  const double sk = std::sin(k * x);
  const double ck = std::cos(k * x);

  const double rho = ms.rho_mean + ms.rho_amp * sk * std::cos(t);
  const double rho_t = -ms.rho_amp * sk * std::sin(t);
  const double rho_x = ms.rho_amp * k * ck * std::cos(t);
  const double u = ms.u_amp * sk;
  const double u_x = ms.u_amp * k * ck;
  const double u_xx = -ms.u_amp * k * k * sk;

  SourceValue src;
  src.mass = rho_t + rho_x * u + rho * u_x;

  const double dp_dx =
      params.p_coeff * params.gamma * std::pow(rho, params.gamma - 1.0) * rho_x;
  double congestion_force = 0.0;
  if (law) {
    const BarrierSample b = sample_barrier(barrier, 1, x, 0.0);
    const double r = rho / b.value;
    if (r > 0.8) {
      std::ostringstream os;
      os << "manufactured ratio " << r << " exceeds 0.8 at x = " << x;
      throw BarrierViolation(os.str());
    }
    const double r_x = (rho_x * b.value - rho * b.grad[0]) / (b.value * b.value);
    congestion_force = b.value * eval_dpi(*law, r) * r_x;
  }
  src.mom_x = rho_t * u + rho_x * u * u + 2.0 * rho * u * u_x + dp_dx + congestion_force -
              (2.0 * params.mu + params.lambda) * u_xx;
  return src;
}

}  // namespace congestion
