#include "congestion/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

#include "congestion/format.hpp"

namespace congestion {

namespace {

// d/dx along one axis of an interior-only sample: centred inside, second
// order one-sided at the two ends.
template <class Get>
double axis_derivative(Get get, int k, int n, double h) {
  if (n < 3) return n == 2 ? (get(1) - get(0)) / h : 0.0;
  if (k == 0) return (-3.0 * get(0) + 4.0 * get(1) - get(2)) / (2.0 * h);
  if (k == n - 1) return (3.0 * get(n - 1) - 4.0 * get(n - 2) + get(n - 3)) / (2.0 * h);
  return (get(k + 1) - get(k - 1)) / (2.0 * h);
}

}  // namespace

EnergyParts energy(const FlowState& state, const PressureLaw& law, const FluidParams& params,
                   const BarrierField& barrier) {
  EnergyParts e;
  const double vac = kVacuumFraction * barrier.sup;
  for (int j = 0; j < state.grid.ny(); ++j) {
    for (int i = 0; i < state.grid.nx(); ++i) {
      const double rho = state.rho(i, j);
      if (rho > vac) {
        const double mx = state.mx(i, j);
        const double my = state.my(i, j);
        e.kinetic += 0.5 * (mx * mx + my * my) / rho;
      }
      e.internal += internal_energy_density(params, rho);
      if (rho > 0.0) e.singular_potential += rho * eval_Gamma(law, rho / barrier.values(i, j));
    }
  }
  const double vol = state.grid.cell_volume();
  e.kinetic *= vol;
  e.internal *= vol;
  e.singular_potential *= vol;
  return e;
}

double dissipation_rate(const FlowState& state, const FluidParams& params,
                        double vacuum_threshold) {
  const Grid& g = state.grid;
  const int nx = g.nx();
  const int ny = g.ny();
  const Velocity vel = velocity(state, vacuum_threshold);
  double sum = 0.0;
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      const double ux = axis_derivative([&](int k) { return vel.u(k, j); }, i, nx, g.dx());
      if (g.dim == 1) {
        sum += 2.0 * params.mu * ux * ux + params.lambda * ux * ux;
        continue;
      }
      const double vx = axis_derivative([&](int k) { return vel.v(k, j); }, i, nx, g.dx());
      const double uy = axis_derivative([&](int k) { return vel.u(i, k); }, j, ny, g.dy());
      const double vy = axis_derivative([&](int k) { return vel.v(i, k); }, j, ny, g.dy());
      const double shear = 0.5 * (uy + vx);
      const double d2 = ux * ux + vy * vy + 2.0 * shear * shear;
      const double div = ux + vy;
      sum += 2.0 * params.mu * d2 + params.lambda * div * div;
    }
  }
  return sum * g.cell_volume();
}

Field barrier_weighted_divergence(const FlowState& state_in, const BarrierField& barrier) {
  const FlowState state = apply_velocity_bc(state_in);
  const Grid& g = state.grid;
  const int nx = g.nx();
  const int ny = g.ny();
  const Velocity vel = velocity(state, kVacuumFraction * barrier.sup);
  Field div(g);
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      auto fx = [&](int f) {
        if (f == 0 || f == nx) return 0.0;
        return barrier.face_x_at(f, j, nx) * 0.5 * (vel.u(f - 1, j) + vel.u(f, j));
      };
      double d = (fx(i + 1) - fx(i)) / g.dx();
      if (g.dim == 2) {
        auto fy = [&](int f) {
          if (f == 0 || f == ny) return 0.0;
          return barrier.face_y[static_cast<std::size_t>(f) * nx + i] * 0.5 *
                 (vel.v(i, f - 1) + vel.v(i, f));
        };
        d += (fy(j + 1) - fy(j)) / g.dy();
      }
      div(i, j) = d;
    }
  }
  return div;
}

CongestionMetrics congestion_metrics(const FlowState& state, const PressureLaw& law,
                                     const BarrierField& barrier, double delta_c) {
  CongestionMetrics m;
  const Field div = barrier_weighted_divergence(state, barrier);
  const double vol = state.grid.cell_volume();
  double div_cong2 = 0.0;
  double div_all2 = 0.0;
  for (int j = 0; j < state.grid.ny(); ++j) {
    for (int i = 0; i < state.grid.nx(); ++i) {
      const double rho = state.rho(i, j);
      const double star = barrier.values(i, j);
      const double r = rho / star;
      const double pi = eval_pi(law, std::max(r, 0.0));
      m.max_ratio = std::max(m.max_ratio, r);
      m.pi_l1 += pi;
      m.complementarity += (star - rho) * pi;
      const double d2 = div(i, j) * div(i, j);
      div_all2 += d2;
      if (r >= 1.0 - delta_c) {
        m.congested_measure += vol;
        div_cong2 += d2;
      }
    }
  }
  m.pi_l1 *= vol;
  m.complementarity *= vol;
  m.divu_congested = std::sqrt(div_cong2 * vol);
  m.divu_total = std::sqrt(div_all2 * vol);
  return m;
}

DiagnosticsRecord make_record(const FlowState& state, const PressureLaw& law,
                              const FluidParams& params, const BarrierField& barrier,
                              double delta_c) {
  DiagnosticsRecord rec;
  rec.t = state.t;
  const EnergyParts e = energy(state, law, params, barrier);
  rec.kinetic = e.kinetic;
  rec.internal = e.internal;
  rec.singular_potential = e.singular_potential;
  rec.energy = e.total();
  rec.dissipation_rate = dissipation_rate(state, params, kVacuumFraction * barrier.sup);
  rec.mass = total_mass(state);
  rec.min_density = std::numeric_limits<double>::infinity();
  for (int j = 0; j < state.grid.ny(); ++j)
    for (int i = 0; i < state.grid.nx(); ++i) rec.min_density = std::min(rec.min_density, state.rho(i, j));
  const CongestionMetrics m = congestion_metrics(state, law, barrier, delta_c);
  rec.max_ratio = m.max_ratio;
  rec.congested_measure = m.congested_measure;
  rec.pi_l1 = m.pi_l1;
  rec.complementarity = m.complementarity;
  rec.divu_congested = m.divu_congested;
  rec.divu_total = m.divu_total;
  return rec;
}

double BudgetReport::relative() const {
  return initial_energy > 0.0 ? cumulative_positive / initial_energy : 0.0;
}

BudgetReport energy_budget(const std::vector<DiagnosticsRecord>& records) {
  BudgetReport rep;
  if (records.empty()) return rep;
  rep.initial_energy = records.front().energy;
  for (std::size_t n = 0; n + 1 < records.size(); ++n) {
    const auto& a = records[n];
    const auto& b = records[n + 1];
    const double r =
        b.energy - a.energy + 0.5 * (a.dissipation_rate + b.dissipation_rate) * (b.t - a.t);
    rep.residuals.push_back(r);
    if (r > 0.0) {
      rep.max_positive = std::max(rep.max_positive, r);
      rep.cumulative_positive += r;
    }
  }
  return rep;
}

LmpReport lmp_crosscheck(const std::vector<DiagnosticsRecord>& records, double floor) {
  LmpReport rep;
  double sum = 0.0;
  for (const auto& rec : records) {
    double ratio = 0.0;
    if (rec.congested_measure > 0.0) {
      ratio = rec.divu_congested / (rec.divu_total + floor);
      ++rep.congested_snapshots;
      sum += ratio;
    }
    rep.times.push_back(rec.t);
    rep.ratios.push_back(ratio);
  }
  if (rep.congested_snapshots > 0) rep.mean_ratio = sum / rep.congested_snapshots;
  return rep;
}

bool strictly_decreasing(const std::vector<double>& values) {
  for (std::size_t k = 1; k < values.size(); ++k)
    if (!(values[k] < values[k - 1])) return false;
  return true;
}

double time_integral(const std::vector<DiagnosticsRecord>& records,
                     double DiagnosticsRecord::*column) {
  double sum = 0.0;
  for (std::size_t n = 0; n + 1 < records.size(); ++n)
    sum += 0.5 * (records[n].*column + records[n + 1].*column) * (records[n + 1].t - records[n].t);
  return sum;
}

double max_mass_drift(const std::vector<DiagnosticsRecord>& records) {
  if (records.empty() || records.front().mass == 0.0) return 0.0;
  const double m0 = records.front().mass;
  double worst = 0.0;
  for (const auto& r : records) worst = std::max(worst, std::abs(r.mass - m0) / std::abs(m0));
  return worst;
}

const std::vector<std::string>& diagnostics_columns() {
  static const std::vector<std::string> cols = {
      "t",           "kinetic",          "internal",       "singular_potential",
      "energy",      "dissipation_rate", "mass",           "min_density",
      "max_ratio",
      "congested_measure", "pi_l1",      "complementarity", "divu_congested",
      "divu_total"};
  return cols;
}

void write_csv_header(std::ostream& os) {
  const auto& cols = diagnostics_columns();
  for (std::size_t k = 0; k < cols.size(); ++k) os << (k ? "," : "") << cols[k];
  os << '\n';
}

std::vector<double> record_values(const DiagnosticsRecord& r) {
  return {r.t,           r.kinetic,           r.internal,    r.singular_potential, r.energy,
          r.dissipation_rate, r.mass,          r.min_density, r.max_ratio,          r.congested_measure,
          r.pi_l1,       r.complementarity,   r.divu_congested, r.divu_total};
}

void write_csv_row(std::ostream& os, const DiagnosticsRecord& r) {
  bool first = true;
  for (double v : record_values(r)) {
    if (!first) os << ',';
    os << format_double(v);
    first = false;
  }
  os << '\n';
}

}  // namespace congestion
