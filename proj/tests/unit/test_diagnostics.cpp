#include <algorithm>
#include <cmath>
#include <functional>
#include <sstream>

#include "congestion/diagnostics.hpp"
#include "congestion/format.hpp"
#include "doctest.h"

using namespace congestion;

namespace {

FlowState filled(const Grid& g, double rho, const std::function<double(double)>& u) {
  FlowState s = FlowState::zeros(g);
  for (int j = 0; j < g.ny(); ++j)
    for (int i = 0; i < g.nx(); ++i) {
      s.rho(i, j) = rho;
      s.mx(i, j) = rho * u(g.xc(i));
    }
  return s;
}

DiagnosticsRecord record_at(double t, double energy, double dissipation) {
  DiagnosticsRecord r;
  r.t = t;
  r.energy = energy;
  r.dissipation_rate = dissipation;
  return r;
}

}  // namespace

TEST_CASE("energy of vacuum and of a uniform rest state") {
  const Grid g = Grid::line(1.0, 64);
  const BarrierField b = build_barrier(ConstantBarrier{1.0}, g);
  const FluidParams fluid{1e-2, 0.0, 2.0, 1.0};
  const Singular law{1e-3, 2.0, 4.0};

  const EnergyParts zero = energy(FlowState::zeros(g), law, fluid, b);
  CHECK(zero.kinetic == 0.0);
  CHECK(zero.internal == 0.0);
  CHECK(zero.singular_potential == 0.0);

  const EnergyParts e = energy(filled(g, 0.5, [](double) { return 0.0; }), law, fluid, b);
  CHECK(e.kinetic == 0.0);
  CHECK(e.internal == doctest::Approx(0.25));
  CHECK(e.singular_potential == doctest::Approx(0.5 * 1e-3 * 7.0 / 3.0));
  CHECK(e.singular_potential == doctest::Approx(1.1667e-3).epsilon(1e-4));
  CHECK(e.total() == doctest::Approx(0.25 + 0.5 * 1e-3 * 7.0 / 3.0));
}

TEST_CASE("kinetic energy of a uniform translation") {
  const Grid g = Grid::line(2.0, 10);
  const BarrierField b = build_barrier(ConstantBarrier{1.0}, g);
  const EnergyParts e =
      energy(filled(g, 0.4, [](double) { return 0.5; }), Barotropic{}, FluidParams{}, b);
  CHECK(e.kinetic == doctest::Approx(0.5 * 0.4 * 0.25 * 2.0));
}

TEST_CASE("dissipation rate") {
  const Grid g = Grid::line(1.0, 100);
  const FluidParams unit{1.0, 0.0, 2.0, 1.0};
  CHECK(dissipation_rate(filled(g, 0.3, [](double) { return 0.0; }), unit) == 0.0);
  CHECK(dissipation_rate(filled(g, 0.3, [](double) { return 0.7; }), unit) ==
        doctest::Approx(0.0).epsilon(1e-14));
  CHECK(dissipation_rate(filled(g, 0.3, [](double x) { return x; }), unit) ==
        doctest::Approx(2.0).epsilon(1e-12));
  // 1D: 2 mu u_x^2 + lambda u_x^2.
  const FluidParams both{1.0, 0.5, 2.0, 1.0};
  CHECK(dissipation_rate(filled(g, 0.3, [](double x) { return 3 * x; }), both) ==
        doctest::Approx(2.5 * 9.0).epsilon(1e-12));
}

TEST_CASE("dissipation of a 2D shear flow") {
  // u = (y, 0): D has off-diagonal 1/2, |D|^2 = 1/2, div u = 0, so 2 mu |D|^2 = mu.
  const Grid g = Grid::rect(1.0, 1.0, 40, 40);
  FlowState s = FlowState::zeros(g);
  for (int j = 0; j < 40; ++j)
    for (int i = 0; i < 40; ++i) {
      s.rho(i, j) = 0.5;
      s.mx(i, j) = 0.5 * g.yc(j);
    }
  CHECK(dissipation_rate(s, FluidParams{0.3, 0.0, 2.0, 1.0}) == doctest::Approx(0.3).epsilon(1e-12));
}

TEST_CASE("congestion metrics") {
  const Grid g = Grid::line(1.0, 50);
  const BarrierField b = build_barrier(ConstantBarrier{1.0}, g);
  const Singular law{1e-3, 3.0, 3.0};

  SUBCASE("free flow") {
    const auto m = congestion_metrics(filled(g, 0.5, [](double x) { return x; }), law, b, 0.05);
    CHECK(m.max_ratio == doctest::Approx(0.5));
    CHECK(m.congested_measure == 0.0);
    CHECK(m.divu_congested == 0.0);
  }

  SUBCASE("fully congested") {
    const auto m = congestion_metrics(filled(g, 0.97, [](double) { return 0.0; }), law, b, 0.05);
    CHECK(m.congested_measure == doctest::Approx(1.0));
    CHECK(m.divu_total == 0.0);
  }

  SUBCASE("complementarity factorises") {
    const BarrierField lane = build_barrier(TanhStep{1.0, 0.6, 0.5, 0.05}, g);
    FlowState s = FlowState::zeros(g);
    for (int i = 0; i < 50; ++i) s.rho(i) = 0.5 * lane.values(i) * (1.0 + 0.8 * g.xc(i));
    const auto m = congestion_metrics(s, law, lane, 0.05);
    double expected = 0.0;
    double pi_l1 = 0.0;
    for (int i = 0; i < 50; ++i) {
      const double r = s.rho(i) / lane.values(i);
      expected += law.eps * lane.values(i) * std::pow(1 - r, 1 - law.beta) * std::pow(r, law.alpha);
      pi_l1 += law.eps * std::pow(r, law.alpha) / std::pow(1 - r, law.beta);
    }
    CHECK(m.complementarity == doctest::Approx(expected * g.dx()).epsilon(1e-12));
    CHECK(m.pi_l1 == doctest::Approx(pi_l1 * g.dx()).epsilon(1e-12));
  }
}

TEST_CASE("barrier-weighted divergence scales with a constant barrier") {
  const Grid g = Grid::line(1.0, 30);
  const FlowState s = filled(g, 0.4, [](double x) { return std::sin(3 * x); });
  const Field d1 = barrier_weighted_divergence(s, build_barrier(ConstantBarrier{1.0}, g));
  const Field d2 = barrier_weighted_divergence(s, build_barrier(ConstantBarrier{2.5}, g));
  for (int i = 0; i < 30; ++i) CHECK(d2(i) == doctest::Approx(2.5 * d1(i)));
  // Interior cells approximate u' = 3 cos(3x).
  CHECK(d1(15) == doctest::Approx(3 * std::cos(3 * g.xc(15))).epsilon(1e-2));
}

TEST_CASE("energy budget") {
  SUBCASE("stationary records") {
    std::vector<DiagnosticsRecord> recs;
    for (int n = 0; n < 5; ++n) recs.push_back(record_at(0.1 * n, 2.0, 0.0));
    const BudgetReport rep = energy_budget(recs);
    REQUIRE(rep.residuals.size() == 4);
    for (double r : rep.residuals) CHECK(r == 0.0);
    CHECK(rep.max_positive == 0.0);
    CHECK(rep.relative() == 0.0);
  }
  SUBCASE("exact dissipation balance") {
    // E(t) = 2 - 0.3 t with constant dissipation 0.3: every residual vanishes.
    std::vector<DiagnosticsRecord> recs;
    for (int n = 0; n < 5; ++n) recs.push_back(record_at(0.1 * n, 2.0 - 0.03 * n, 0.3));
    for (double r : energy_budget(recs).residuals) CHECK(r == doctest::Approx(0.0).scale(1.0));
  }
  SUBCASE("dissipation without energy loss is a positive residual") {
    const BudgetReport rep = energy_budget({record_at(0.0, 2.0, 0.3), record_at(0.1, 2.0, 0.3)});
    CHECK(rep.residuals[0] == doctest::Approx(0.03));
  }
  SUBCASE("single record") {
    const BudgetReport rep = energy_budget({record_at(0.0, 1.0, 0.0)});
    CHECK(rep.residuals.empty());
    CHECK(rep.cumulative_positive == 0.0);
  }
  SUBCASE("energy gain is reported") {
    const BudgetReport rep =
        energy_budget({record_at(0.0, 1.0, 0.0), record_at(0.5, 1.1, 0.0), record_at(1.0, 1.0, 0.0)});
    CHECK(rep.max_positive == doctest::Approx(0.1));
    CHECK(rep.relative() == doctest::Approx(0.1));
  }
}

TEST_CASE("LMP cross-check") {
  std::vector<DiagnosticsRecord> recs(3);
  for (auto& r : recs) r.divu_total = 1.0;
  CHECK(lmp_crosscheck(recs).mean_ratio == 0.0);
  CHECK(lmp_crosscheck(recs).congested_snapshots == 0);

  recs[1].congested_measure = 0.1;
  recs[1].divu_congested = 0.2;
  recs[2].congested_measure = 0.2;
  recs[2].divu_congested = 0.4;
  const LmpReport rep = lmp_crosscheck(recs);
  CHECK(rep.congested_snapshots == 2);
  CHECK(rep.mean_ratio == doctest::Approx(0.3));
  CHECK(rep.ratios[0] == 0.0);
}

TEST_CASE("helpers") {
  CHECK(strictly_decreasing({3.0, 2.0, 1.0}));
  CHECK_FALSE(strictly_decreasing({3.0, 3.0, 1.0}));
  CHECK(strictly_decreasing({1.0}));
  CHECK(strictly_decreasing({}));

  std::vector<DiagnosticsRecord> recs;
  for (int n = 0; n <= 4; ++n) {
    DiagnosticsRecord r;
    r.t = 0.25 * n;
    r.pi_l1 = 1.0 + 2.0 * r.t;
    recs.push_back(r);
  }
  CHECK(time_integral(recs, &DiagnosticsRecord::pi_l1) == doctest::Approx(2.0));
}

TEST_CASE("CSV contract") {
  std::ostringstream os;
  write_csv_header(os);
  DiagnosticsRecord r;
  r.t = 0.1;
  r.energy = 1.0 / 3.0;
  write_csv_row(os, r);
  std::istringstream in(os.str());
  std::string header, row;
  std::getline(in, header);
  std::getline(in, row);
  CHECK(header.rfind("t,", 0) == 0);
  CHECK(std::count(header.begin(), header.end(), ',') + 1 == long(diagnostics_columns().size()));
  CHECK(std::count(row.begin(), row.end(), ',') == std::count(header.begin(), header.end(), ','));
  std::vector<std::string> cells;
  std::istringstream cols(row);
  for (std::string c; std::getline(cols, c, ',');) cells.push_back(c);
  const auto& names = diagnostics_columns();
  const auto pos = std::find(names.begin(), names.end(), "energy") - names.begin();
  REQUIRE(pos < long(cells.size()));
  CHECK(parse_double(cells[pos]) == 1.0 / 3.0);
}
