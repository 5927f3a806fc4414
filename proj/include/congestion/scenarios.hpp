#pragma once

#include <array>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "congestion/domain.hpp"
#include "congestion/pressure.hpp"
#include "congestion/solver.hpp"

namespace congestion {

/// rho0 = base + amp exp(-|x - center|^2 / width^2), m0 = rho0 * u0 with
/// u0 = velocity, or velocity * exp(-|x - center|^2 / velocity_width^2) when
/// velocity_width > 0.
struct GaussianPulse {
  double base = 0.3;
  double amp = 0.4;
  std::array<double, 2> center{0.3, 0.5};
  double width = 0.1;
  std::array<double, 2> velocity{0.5, 0.0};
  double velocity_width = 0.0;

  bool operator==(const GaussianPulse&) const = default;
};

/// rho0 = fraction * rho_star(x).
struct BarrierFill {
  double fraction = 0.8;
  std::array<double, 2> velocity{0.0, 0.0};

  bool operator==(const BarrierFill&) const = default;
};

struct UniformDensity {
  double rho = 0.5;
  std::array<double, 2> velocity{0.0, 0.0};

  bool operator==(const UniformDensity&) const = default;
};

/// Smooth 1D fields for source-term verification:
///   rho(x,t) = rho_mean + rho_amp sin(k x) cos(t),  u(x,t) = u_amp sin(k x),
/// with k = 2 pi / L so that u vanishes on both walls.
struct ManufacturedSolution {
  double rho_mean = 0.5;
  double rho_amp = 0.2;
  double u_amp = 0.1;

  bool operator==(const ManufacturedSolution&) const = default;
};

using InitialProfile = std::variant<GaussianPulse, BarrierFill, UniformDensity, ManufacturedSolution>;

std::string initial_kind(const InitialProfile& profile);

struct Scenario {
  std::string name;
  Grid grid;
  BarrierSpec barrier;
  InitialProfile initial;
  FluidParams fluid;
  PressureLaw law;
  double t_end = 0.5;
  double snapshot_every = 0.1;

  bool operator==(const Scenario&) const = default;
};

const std::vector<std::string>& scenario_names();

/// Throws UnknownScenario for names outside scenario_names().
Scenario make_scenario(const std::string& name);

InitialData make_initial_data(const InitialProfile& profile, const Grid& grid,
                              const BarrierField& barrier);

/// Initial FlowState at t = 0 with ghost layers filled.
FlowState make_initial_state(const InitialProfile& profile, const Grid& grid,
                             const BarrierField& barrier);

struct ManufacturedFields {
  double rho = 0.0;
  double u = 0.0;
};

ManufacturedFields manufactured_fields(const ManufacturedSolution& ms, double length, double t,
                                       double x);

/// Residual sources of the mass and momentum equations for the manufactured
/// fields. Without a law the congestion force is dropped. Throws
/// BarrierViolation when rho / rho_star exceeds 0.8.
SourceValue manufactured_sources(const ManufacturedSolution& ms, double length,
                                 const std::optional<PressureLaw>& law, const FluidParams& params,
                                 const BarrierSpec& barrier, double t, double x);

}  // namespace congestion
