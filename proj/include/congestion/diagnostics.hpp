#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "congestion/domain.hpp"
#include "congestion/pressure.hpp"

namespace congestion {

/// One emission of the energy and congestion diagnostics. Integrals use
/// midpoint quadrature over interior cells.
struct DiagnosticsRecord {
  double t = 0.0;
  double kinetic = 0.0;             // int 1/2 rho |u|^2
  double internal = 0.0;            // int p_coeff rho^gamma / (gamma - 1)
  double singular_potential = 0.0;  // int rho Gamma(rho / rho_star)
  double energy = 0.0;              // sum of the three above
  double dissipation_rate = 0.0;    // int S : grad u
  double mass = 0.0;
  double min_density = 0.0;
  double max_ratio = 0.0;
  double congested_measure = 0.0;   // |{rho / rho_star >= 1 - delta_c}|
  double pi_l1 = 0.0;               // int pi
  double complementarity = 0.0;     // int (rho_star - rho) pi
  double divu_congested = 0.0;      // || div(rho_star u) ||_L2 over congested cells
  double divu_total = 0.0;          // || div(rho_star u) ||_L2 over the domain
};

struct EnergyParts {
  double kinetic = 0.0;
  double internal = 0.0;
  double singular_potential = 0.0;

  double total() const { return kinetic + internal + singular_potential; }
};

EnergyParts energy(const FlowState& state, const PressureLaw& law, const FluidParams& params,
                   const BarrierField& barrier);

/// int [2 mu |D(u)|^2 + lambda (div u)^2] with centred gradients inside the
/// domain and second-order one-sided gradients in boundary cells.
double dissipation_rate(const FlowState& state, const FluidParams& params,
                        double vacuum_threshold = 0.0);

struct CongestionMetrics {
  double max_ratio = 0.0;
  double congested_measure = 0.0;
  double pi_l1 = 0.0;
  double complementarity = 0.0;
  double divu_congested = 0.0;
  double divu_total = 0.0;
};

inline constexpr double kDefaultDeltaC = 0.05;

CongestionMetrics congestion_metrics(const FlowState& state, const PressureLaw& law,
                                     const BarrierField& barrier,
                                     double delta_c = kDefaultDeltaC);

/// Cell-wise div(rho_star u) from face fluxes rho_star_f * mean(u); wall
/// faces carry no flux.
Field barrier_weighted_divergence(const FlowState& state, const BarrierField& barrier);

DiagnosticsRecord make_record(const FlowState& state, const PressureLaw& law,
                              const FluidParams& params, const BarrierField& barrier,
                              double delta_c = kDefaultDeltaC);

struct BudgetReport {
  std::vector<double> residuals;  // E(t_{n+1}) - E(t_n) + trapezoid of dissipation
  double max_positive = 0.0;
  double cumulative_positive = 0.0;
  double initial_energy = 0.0;

  /// cumulative_positive / E(0), or 0 when E(0) = 0.
  double relative() const;
};

BudgetReport energy_budget(const std::vector<DiagnosticsRecord>& records);

struct LmpReport {
  std::vector<double> times;
  std::vector<double> ratios;  // divu_congested / (divu_total + floor); 0 if uncongested
  int congested_snapshots = 0;
  double mean_ratio = 0.0;     // mean over congested snapshots, 0 if none
};

inline constexpr double kLmpFloor = 1e-12;

LmpReport lmp_crosscheck(const std::vector<DiagnosticsRecord>& records,
                         double floor = kLmpFloor);

/// Largest |mass(t) - mass(0)| / |mass(0)| over the records (0 without mass).
double max_mass_drift(const std::vector<DiagnosticsRecord>& records);

/// True when the sequence is strictly decreasing (vacuous for < 2 values).
bool strictly_decreasing(const std::vector<double>& values);

/// Time integral of a record column by the trapezoid rule.
double time_integral(const std::vector<DiagnosticsRecord>& records,
                     double DiagnosticsRecord::*column);

/// Stable CSV column contract for DiagnosticsRecord.
const std::vector<std::string>& diagnostics_columns();
/// Record fields in diagnostics_columns() order.
std::vector<double> record_values(const DiagnosticsRecord& rec);
void write_csv_header(std::ostream& os);
void write_csv_row(std::ostream& os, const DiagnosticsRecord& rec);

}  // namespace congestion
