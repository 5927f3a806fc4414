#include <cmath>

#include "congestion/domain.hpp"
#include "congestion/errors.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace congestion;

namespace {

InitialData uniform_data(const Grid& g, double rho, double m = 0.0) {
  return {Field(g, rho), Field(g, m), Field(g, 0.0)};
}

}  // namespace

TEST_CASE("grid geometry") {
  const Grid line = Grid::line(2.0, 50);
  CHECK(line.dx() == doctest::Approx(0.04));
  CHECK(line.dy() == 1.0);
  CHECK(line.num_cells() == 50);
  CHECK(line.xc(0) == doctest::Approx(0.02));

  const Grid rect = Grid::rect(1.0, 0.5, 10, 20);
  CHECK(rect.cell_volume() == doctest::Approx(0.1 * 0.025));
  CHECK(rect.num_cells() == 200);
  CHECK(rect.yc(19) == doctest::Approx(0.5 - 0.0125));

  CHECK_THROWS_AS(Grid::line(1.0, 2).validate(), SpecError);
  CHECK_THROWS_AS(Grid::line(-1.0, 20).validate(), SpecError);
}

TEST_CASE("field ghost layers are addressable") {
  Field f(4, 3, 1.5);
  f(-1, -1) = 2.0;
  f(4, 3) = 3.0;
  CHECK(f(-1, -1) == 2.0);
  CHECK(f(4, 3) == 3.0);
  CHECK(f(0, 0) == 1.5);
  CHECK(f.raw().size() == 6 * 5);
}

TEST_CASE("constant barrier") {
  const BarrierField b = build_barrier(ConstantBarrier{0.8}, Grid::line(1.0, 20));
  CHECK(b.inf == 0.8);
  CHECK(b.sup == 0.8);
  for (int i = -1; i <= 20; ++i) CHECK(b.grad_x(i) == 0.0);
  CHECK(b.face_x.size() == 21);
}

TEST_CASE("tanh step spans its end values") {
  const TanhStep spec{1.0, 0.6, 0.5, 0.05};
  CHECK(sample_barrier(spec, 1, 0.0, 0.0).value == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(sample_barrier(spec, 1, 1.0, 0.0).value == doctest::Approx(0.6).epsilon(1e-6));
  const BarrierField b = build_barrier(spec, Grid::line(1.0, 200));
  CHECK(b.sup == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(b.inf == doctest::Approx(0.6).epsilon(1e-6));
}

TEST_CASE("gaussian bump minimum") {
  const GaussianBump spec{1.0, -0.3, {0.5, 0.5}, 0.1};
  CHECK(sample_barrier(spec, 1, 0.5, 0.0).value == doctest::Approx(0.7));
  CHECK(sample_barrier(spec, 2, 0.5, 0.5).value == doctest::Approx(0.7));
  const BarrierField b = build_barrier(spec, Grid::rect(1.0, 1.0, 51, 51));
  CHECK(b.inf == doctest::Approx(0.7));
}

TEST_CASE("analytic barrier gradients match finite differences") {
  const std::vector<BarrierSpec> specs = {TanhStep{1.0, 0.6, 0.45, 0.07},
                                          GaussianBump{1.0, -0.4, {0.4, 0.6}, 0.15},
                                          PipeProfile{1.0, 0.15, 0.5, 0.2}};
  for (const auto& spec : specs) {
    for (double x : {0.2, 0.37, 0.5, 0.61}) {
      const double y = 0.55;
      const auto s = sample_barrier(spec, 2, x, y);
      const double gx = oracle::derivative(
          [&](double xx) { return sample_barrier(spec, 2, xx, y).value; }, x, 1e-4);
      const double gy = oracle::derivative(
          [&](double yy) { return sample_barrier(spec, 2, x, yy).value; }, y, 1e-4);
      CHECK(s.grad[0] == doctest::Approx(gx).epsilon(1e-8).scale(1.0));
      CHECK(s.grad[1] == doctest::Approx(gy).epsilon(1e-8).scale(1.0));
    }
  }
}

TEST_CASE("non-positive barriers are rejected") {
  CHECK_THROWS_AS(build_barrier(ConstantBarrier{0.0}, Grid::line(1.0, 10)), SpecError);
  CHECK_THROWS_AS(build_barrier(GaussianBump{1.0, -1.2, {0.5, 0.5}, 0.1}, Grid::line(1.0, 11)),
                  SpecError);
  CHECK_THROWS_AS(build_barrier(TanhStep{1.0, -0.1, 0.5, 0.05}, Grid::line(1.0, 10)), SpecError);
}

TEST_CASE("initial data gate") {
  const Grid g = Grid::line(1.0, 100);

  SUBCASE("uniform data below a constant barrier") {
    const auto rep = validate_initial(uniform_data(g, 0.7), build_barrier(ConstantBarrier{}, g), g);
    CHECK(rep.valid);
    CHECK(rep.mean_density == doctest::Approx(0.7));
    CHECK(rep.violations.empty());
  }

  SUBCASE("uniform 0.9 against a narrowing lane") {
    const auto rep =
        validate_initial(uniform_data(g, 0.9), build_barrier(TanhStep{1.0, 0.6, 0.5, 0.05}, g), g);
    CHECK_FALSE(rep.valid);
    bool pointwise = false;
    bool mean = false;
    for (const auto& v : rep.violations) {
      pointwise = pointwise || v.kind == InitialViolation::Kind::AboveBarrier;
      mean = mean || v.kind == InitialViolation::Kind::MeanAboveBarrierInf;
    }
    CHECK(pointwise);
    CHECK(mean);
  }

  SUBCASE("momentum on vacuum is flagged with its cell") {
    InitialData d = uniform_data(g, 0.3);
    d.rho0(17) = 0.0;
    d.mx0(17) = 0.1;
    const auto rep = validate_initial(d, build_barrier(ConstantBarrier{}, g), g);
    CHECK_FALSE(rep.valid);
    REQUIRE(rep.violations.size() == 1);
    CHECK(rep.violations[0].kind == InitialViolation::Kind::VacuumMomentum);
    CHECK(rep.violations[0].i == 17);
  }

  SUBCASE("negative and non-finite densities") {
    InitialData d = uniform_data(g, 0.3);
    d.rho0(3) = -0.1;
    d.rho0(4) = std::nan("");
    const auto rep = validate_initial(d, build_barrier(ConstantBarrier{}, g), g);
    CHECK_FALSE(rep.valid);
    CHECK(rep.violations.size() == 2);
  }

  SUBCASE("shape mismatch") {
    CHECK_THROWS_AS(validate_initial(uniform_data(Grid::line(1.0, 50), 0.3),
                                     build_barrier(ConstantBarrier{}, g), g),
                    SpecError);
  }
}

TEST_CASE("wall conditions give zero velocity on every wall face") {
  SUBCASE("1D") {
    FlowState s = FlowState::zeros(Grid::line(1.0, 10));
    for (int i = 0; i < 10; ++i) {
      s.rho(i) = 0.2 + 0.05 * i;
      s.mx(i) = 0.1 * (i - 4);
    }
    s = apply_velocity_bc(s);
    CHECK(s.rho(-1) == s.rho(0));
    CHECK(s.rho(10) == s.rho(9));
    CHECK(s.mx(-1) + s.mx(0) == 0.0);
    CHECK(s.mx(10) + s.mx(9) == 0.0);
  }
  SUBCASE("2D") {
    FlowState s = FlowState::zeros(Grid::rect(1.0, 1.0, 6, 5));
    for (int j = 0; j < 5; ++j)
      for (int i = 0; i < 6; ++i) {
        s.rho(i, j) = 0.3;
        s.mx(i, j) = 0.01 * (i + 2 * j + 1);
        s.my(i, j) = -0.02 * (i - j);
      }
    s = apply_velocity_bc(s);
    for (int j = 0; j < 5; ++j) {
      CHECK(s.mx(-1, j) + s.mx(0, j) == 0.0);
      CHECK(s.my(-1, j) + s.my(0, j) == 0.0);
      CHECK(s.mx(6, j) + s.mx(5, j) == 0.0);
    }
    for (int i = 0; i < 6; ++i) {
      CHECK(s.my(i, -1) + s.my(i, 0) == 0.0);
      CHECK(s.mx(i, 5) + s.mx(i, 4) == 0.0);
    }
  }
}

TEST_CASE("velocity and mass") {
  FlowState s = FlowState::zeros(Grid::line(1.0, 4));
  s.rho(0) = 0.5;
  s.mx(0) = 0.25;
  s.rho(1) = 0.0;
  s.mx(1) = 0.0;
  const Velocity v = velocity(s, 1e-12);
  CHECK(v.u(0) == 0.5);
  CHECK(v.u(1) == 0.0);
  CHECK(total_mass(s) == doctest::Approx(0.125));
}
