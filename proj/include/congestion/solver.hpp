#pragma once

#include <functional>
#include <optional>

#include "congestion/domain.hpp"
#include "congestion/pressure.hpp"

namespace congestion {

enum class ForceForm {
  Potential,  // rho grad(H(rho) + Q(rho / rho_star))
  Direct,     // grad p + rho_star grad pi(rho / rho_star)
};

struct SolverConfig {
  double cfl = 0.4;
  double barrier_tol = 1e-6;  // accepted states keep rho / rho_star <= 1 - barrier_tol
  int max_substeps = 40;
  double t_end = 0.5;
  double snapshot_every = 0.1;
  ForceForm force_form = ForceForm::Potential;

  void validate() const;

  bool operator==(const SolverConfig&) const = default;
};

/// Mass and momentum source densities evaluated at (t, x, y); used by the
/// manufactured-solution verification.
struct SourceValue {
  double mass = 0.0;
  double mom_x = 0.0;
  double mom_y = 0.0;
};
using SourceFn = std::function<SourceValue(double t, double x, double y)>;

/// Per-cell sqrt(gamma p_coeff rho^(gamma-1) + pi'(rho / rho_star)).
Field effective_sound_speed(const FlowState& state, const PressureLaw& law,
                            const FluidParams& params, const BarrierField& barrier);

struct TimeStepLimits {
  double convective = 0.0;
  double viscous = 0.0;
  double acoustic_viscous = 0.0;
  double dt = 0.0;
};

TimeStepLimits time_step_limits(const FlowState& state, const PressureLaw& law,
                                const FluidParams& params, const BarrierField& barrier,
                                double cfl);

/// Largest stable explicit step: the minimum of the limits above.
double stable_dt(const FlowState& state, const PressureLaw& law, const FluidParams& params,
                 const BarrierField& barrier, double cfl);

/// One forward-Euler step of the upwind finite-volume scheme. Throws
/// BarrierViolation if the result leaves [0, 1 - barrier_tol] in ratio.
FlowState step(const FlowState& state, double dt, const PressureLaw& law,
               const FluidParams& params, const BarrierField& barrier, const SolverConfig& cfg,
               const SourceFn* source = nullptr);

struct AdvanceSink {
  /// Called on the initial state and after every accepted step.
  std::function<void(const FlowState&)> on_state;
  /// Called for every accepted step with the state before it and dt.
  std::function<void(const FlowState& before, double dt, const FlowState& after)> on_step;
};

struct AdvanceStats {
  long steps = 0;
  long rejected = 0;   // dt halvings after BarrierViolation
  double min_dt = 0.0;
  double max_ratio = 0.0;
};

struct AdvanceResult {
  FlowState state;
  AdvanceStats stats;
};

/// Advances to t_target with adaptive dt, halving on BarrierViolation up to
/// cfg.max_substeps times per step (StepFailure beyond that).
AdvanceResult advance(FlowState state, double t_target, const PressureLaw& law,
                      const FluidParams& params, const BarrierField& barrier,
                      const SolverConfig& cfg, const AdvanceSink& sink = {},
                      const SourceFn* source = nullptr);

/// Upwind transport of R = rho / rho_star with the source -R u . grad log rho_star,
/// u frozen from the main solve. Ghosts of R are mirrored.
Field step_ratio(const Field& ratio, const Velocity& vel, double dt, const BarrierField& barrier,
                 const Grid& grid);

/// rho / rho_star on interior cells.
Field congestion_ratio(const FlowState& state, const BarrierField& barrier);

}  // namespace congestion
