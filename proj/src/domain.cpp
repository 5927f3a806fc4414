#include "congestion/domain.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "congestion/errors.hpp"

namespace congestion {

Grid Grid::line(double length, int n) {
  Grid g;
  g.dim = 1;
  g.extents = {length, 1.0};
  g.cells = {n, 1};
  return g;
}

Grid Grid::rect(double lx, double ly, int nx, int ny) {
  Grid g;
  g.dim = 2;
  g.extents = {lx, ly};
  g.cells = {nx, ny};
  return g;
}

void Grid::validate() const {
  if (dim != 1 && dim != 2) throw SpecError("grid.dim must be 1 or 2");
  for (int a = 0; a < dim; ++a) {
    if (!(extents[a] > 0.0)) throw SpecError("grid extents must be positive");
    if (cells[a] < 3) throw SpecError("grid needs at least 3 cells per axis");
  }
}

std::string barrier_kind(const BarrierSpec& spec) {
  switch (spec.index()) {
    case 0: return "constant";
    case 1: return "tanh_step";
    case 2: return "gaussian_bump";
    default: return "pipe_profile";
  }
}

BarrierSample sample_barrier(const BarrierSpec& spec, int dim, double x, double y) {
  BarrierSample s;
  if (const auto* c = std::get_if<ConstantBarrier>(&spec)) {
    s.value = c->value;
  } else if (const auto* t = std::get_if<TanhStep>(&spec)) {
    const double th = std::tanh((x - t->center) / t->width);
    s.value = t->left + (t->right - t->left) * 0.5 * (1.0 + th);
    s.grad[0] = (t->right - t->left) * 0.5 * (1.0 - th * th) / t->width;
  } else if (const auto* b = std::get_if<GaussianBump>(&spec)) {
    const double ddx = x - b->center[0];
    const double ddy = dim == 2 ? y - b->center[1] : 0.0;
    const double w2 = b->width * b->width;
    const double e = std::exp(-(ddx * ddx + ddy * ddy) / w2);
    s.value = b->base + b->amp * e;
    s.grad[0] = -2.0 * ddx / w2 * b->amp * e;
    s.grad[1] = -2.0 * ddy / w2 * b->amp * e;
  } else {
    const auto& p = std::get<PipeProfile>(spec);
    const double z = (x - p.center) / p.half_length;
    s.value = p.base;
    if (std::abs(z) < 1.0) {
      const double pi = std::numbers::pi;
      s.value -= p.depth * 0.5 * (1.0 + std::cos(pi * z));
      s.grad[0] = p.depth * 0.5 * pi / p.half_length * std::sin(pi * z);
    }
  }
  if (dim == 1) s.grad[1] = 0.0;
  return s;
}

BarrierField build_barrier(const BarrierSpec& spec, const Grid& grid) {
  grid.validate();
  const int nx = grid.nx();
  const int ny = grid.ny();
  const double dx = grid.dx();
  const double dy = grid.dy();

  BarrierField f;
  f.values = Field(grid);
  f.grad_x = Field(grid);
  f.grad_y = Field(grid);
  f.log_grad_x = Field(grid);
  f.log_grad_y = Field(grid);
  f.inf = INFINITY;
  f.sup = -INFINITY;

  auto fail = [](double x, double y, double v) {
    std::ostringstream os;
    os << "barrier value " << v << " <= 0 at (" << x << ", " << y << ")";
    throw SpecError(os.str());
  };

  const int jlo = grid.dim == 2 ? -1 : 0;
  const int jhi = grid.dim == 2 ? ny : 0;
  for (int j = jlo; j <= jhi; ++j) {
    for (int i = -1; i <= nx; ++i) {
      const double x = (i + 0.5) * dx;
      const double y = grid.dim == 2 ? (j + 0.5) * dy : 0.0;
      const auto s = sample_barrier(spec, grid.dim, x, y);
      if (!(s.value > 0.0)) fail(x, y, s.value);
      f.values(i, j) = s.value;
      f.grad_x(i, j) = s.grad[0];
      f.grad_y(i, j) = s.grad[1];
      f.log_grad_x(i, j) = s.grad[0] / s.value;
      f.log_grad_y(i, j) = s.grad[1] / s.value;
      const bool interior = i >= 0 && i < nx && j >= 0 && j < ny;
      if (interior) {
        f.inf = std::min(f.inf, s.value);
        f.sup = std::max(f.sup, s.value);
      }
    }
  }
  if (grid.dim == 1) {
    // y ghosts of a 1D field mirror the single row.
    for (int i = -1; i <= nx; ++i) {
      for (Field* fld : {&f.values, &f.grad_x, &f.grad_y, &f.log_grad_x, &f.log_grad_y}) {
        (*fld)(i, -1) = (*fld)(i, 0);
        (*fld)(i, 1) = (*fld)(i, 0);
      }
    }
  }

  f.face_x.resize(static_cast<std::size_t>(nx + 1) * ny);
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i <= nx; ++i) {
      const double x = i * dx;
      const double y = grid.dim == 2 ? (j + 0.5) * dy : 0.0;
      const double v = sample_barrier(spec, grid.dim, x, y).value;
      if (!(v > 0.0)) fail(x, y, v);
      f.face_x[static_cast<std::size_t>(j) * (nx + 1) + i] = v;
    }
  }
  if (grid.dim == 2) {
    f.face_y.resize(static_cast<std::size_t>(nx) * (ny + 1));
    for (int j = 0; j <= ny; ++j) {
      for (int i = 0; i < nx; ++i) {
        const double v = sample_barrier(spec, 2, (i + 0.5) * dx, j * dy).value;
        if (!(v > 0.0)) fail((i + 0.5) * dx, j * dy, v);
        f.face_y[static_cast<std::size_t>(j) * nx + i] = v;
      }
    }
  }
  return f;
}

FlowState FlowState::zeros(const Grid& grid) {
  FlowState s;
  s.grid = grid;
  s.rho = Field(grid);
  s.mx = Field(grid);
  s.my = Field(grid);
  return s;
}

Velocity velocity(const FlowState& state, double vacuum_threshold) {
  const int nx = state.grid.nx();
  const int ny = state.grid.ny();
  Velocity vel{Field(nx, ny), Field(nx, ny)};
  for (int j = -1; j <= ny; ++j) {
    for (int i = -1; i <= nx; ++i) {
      const double rho = state.rho(i, j);
      if (rho > vacuum_threshold) {
        vel.u(i, j) = state.mx(i, j) / rho;
        vel.v(i, j) = state.my(i, j) / rho;
      }
    }
  }
  return vel;
}

double total_mass(const FlowState& state) {
  double sum = 0.0;
  for (int j = 0; j < state.grid.ny(); ++j)
    for (int i = 0; i < state.grid.nx(); ++i) sum += state.rho(i, j);
  return sum * state.grid.cell_volume();
}

ValidationReport validate_initial(const InitialData& data, const BarrierField& barrier,
                                  const Grid& grid) {
  ValidationReport rep;
  const int nx = grid.nx();
  const int ny = grid.ny();
  if (data.rho0.nx() != nx || data.rho0.ny() != ny || barrier.values.nx() != nx ||
      barrier.values.ny() != ny) {
    throw SpecError("initial data and barrier shapes do not match the grid");
  }
  using Kind = InitialViolation::Kind;
  auto add = [&](Kind k, int i, int j, std::string msg) {
    rep.valid = false;
    rep.violations.push_back({k, i, j, std::move(msg)});
  };

  double sum = 0.0;
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      const double rho = data.rho0(i, j);
      const double mx = data.mx0.nx() == nx ? data.mx0(i, j) : 0.0;
      const double my = data.my0.nx() == nx ? data.my0(i, j) : 0.0;
      const double star = barrier.values(i, j);
      std::ostringstream os;
      if (!std::isfinite(rho) || !std::isfinite(mx) || !std::isfinite(my)) {
        os << "non-finite initial value at cell (" << i << ", " << j << ")";
        add(Kind::NonFinite, i, j, os.str());
        continue;
      }
      if (rho < 0.0) {
        os << "rho0 = " << rho << " < 0 at cell (" << i << ", " << j << ")";
        add(Kind::NegativeDensity, i, j, os.str());
      } else if (rho >= star) {
        os << "rho0 = " << rho << " >= rho_star = " << star << " at cell (" << i << ", " << j
           << ")";
        add(Kind::AboveBarrier, i, j, os.str());
      }
      if (rho == 0.0 && (mx != 0.0 || my != 0.0)) {
        os << "nonzero momentum on vacuum at cell (" << i << ", " << j << ")";
        add(Kind::VacuumMomentum, i, j, os.str());
      }
      sum += rho;
    }
  }
  rep.mean_density = sum / static_cast<double>(grid.num_cells());
  rep.barrier_inf = barrier.inf;
  if (!(rep.mean_density < barrier.inf)) {
    std::ostringstream os;
    os << "mean initial density M0 = " << rep.mean_density << " is not below inf rho_star = "
       << barrier.inf;
    add(Kind::MeanAboveBarrierInf, -1, -1, os.str());
  }
  return rep;
}

FlowState apply_velocity_bc(FlowState s) {
  const int nx = s.grid.nx();
  const int ny = s.grid.ny();
  for (int j = 0; j < ny; ++j) {
    s.rho(-1, j) = s.rho(0, j);
    s.rho(nx, j) = s.rho(nx - 1, j);
    s.mx(-1, j) = -s.mx(0, j);
    s.mx(nx, j) = -s.mx(nx - 1, j);
    s.my(-1, j) = -s.my(0, j);
    s.my(nx, j) = -s.my(nx - 1, j);
  }
  if (s.grid.dim == 2) {
    for (int i = -1; i <= nx; ++i) {
      s.rho(i, -1) = s.rho(i, 0);
      s.rho(i, ny) = s.rho(i, ny - 1);
      s.mx(i, -1) = -s.mx(i, 0);
      s.mx(i, ny) = -s.mx(i, ny - 1);
      s.my(i, -1) = -s.my(i, 0);
      s.my(i, ny) = -s.my(i, ny - 1);
    }
  } else {
    for (int i = -1; i <= nx; ++i) {
      for (Field* f : {&s.rho, &s.mx, &s.my}) {
        (*f)(i, -1) = (*f)(i, 0);
        (*f)(i, 1) = (*f)(i, 0);
      }
    }
  }
  return s;
}

}  // namespace congestion
