#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <variant>
#include <vector>

namespace congestion {

/// Uniform Cartesian grid on [0, Lx] (x [0, Ly] in 2D) with cell-centred
/// unknowns. A 1D grid keeps ny = 1 and dy = 1 so that a cell volume is dx.
struct Grid {
  int dim = 1;
  std::array<double, 2> extents{1.0, 1.0};
  std::array<int, 2> cells{200, 1};

  static Grid line(double length, int n);
  static Grid rect(double lx, double ly, int nx, int ny);

  int nx() const { return cells[0]; }
  int ny() const { return dim == 2 ? cells[1] : 1; }
  double dx() const { return extents[0] / cells[0]; }
  double dy() const { return dim == 2 ? extents[1] / cells[1] : 1.0; }
  double cell_volume() const { return dx() * dy(); }
  std::size_t num_cells() const { return static_cast<std::size_t>(nx()) * ny(); }

  double xc(int i) const { return (i + 0.5) * dx(); }
  double yc(int j) const { return dim == 2 ? (j + 0.5) * dy() : 0.0; }

  void validate() const;

  bool operator==(const Grid&) const = default;
};

/// Cell field with one ghost layer on every side. Indices run over
/// i in [-1, nx], j in [-1, ny]; a 1D field has ny = 1.
class Field {
public:
  Field() = default;
  Field(int nx, int ny, double value = 0.0)
      : nx_(nx), ny_(ny), data_(static_cast<std::size_t>(nx + 2) * (ny + 2), value) {}
  explicit Field(const Grid& g, double value = 0.0) : Field(g.nx(), g.ny(), value) {}

  double& operator()(int i, int j = 0) { return data_[index(i, j)]; }
  double operator()(int i, int j = 0) const { return data_[index(i, j)]; }

  int nx() const { return nx_; }
  int ny() const { return ny_; }
  const std::vector<double>& raw() const { return data_; }

  bool operator==(const Field&) const = default;

private:
  std::size_t index(int i, int j) const {
    return static_cast<std::size_t>(j + 1) * (nx_ + 2) + static_cast<std::size_t>(i + 1);
  }

  int nx_ = 0;
  int ny_ = 0;
  std::vector<double> data_;
};

// Barrier (maximal density) parameterisations. Profiles that vary along one
// axis vary along x; the gaussian bump is radial about its centre.

struct ConstantBarrier {
  double value = 1.0;

  bool operator==(const ConstantBarrier&) const = default;
};

/// left + (right - left) (1 + tanh((x - center)/width)) / 2
struct TanhStep {
  double left = 1.0;
  double right = 0.6;
  double center = 0.5;
  double width = 0.05;

  bool operator==(const TanhStep&) const = default;
};

/// base + amp exp(-|x - center|^2 / width^2)
struct GaussianBump {
  double base = 1.0;
  double amp = -0.3;
  std::array<double, 2> center{0.5, 0.5};
  double width = 0.1;

  bool operator==(const GaussianBump&) const = default;
};

/// Pipe height with a smooth cosine constriction of compact support:
/// base - depth (1 + cos(pi (x - center)/half_length)) / 2 on |x - center| < half_length.
struct PipeProfile {
  double base = 1.0;
  double depth = 0.15;
  double center = 0.5;
  double half_length = 0.2;

  bool operator==(const PipeProfile&) const = default;
};

using BarrierSpec = std::variant<ConstantBarrier, TanhStep, GaussianBump, PipeProfile>;

std::string barrier_kind(const BarrierSpec& spec);

struct BarrierSample {
  double value = 0.0;
  std::array<double, 2> grad{0.0, 0.0};
};

/// Analytic value and gradient of the barrier at a point (y ignored in 1D).
BarrierSample sample_barrier(const BarrierSpec& spec, int dim, double x, double y);

/// rho_star at cell centres (ghosts included), at faces, and its gradients.
struct BarrierField {
  Field values;
  Field grad_x, grad_y;
  Field log_grad_x, log_grad_y;
  std::vector<double> face_x;  // (nx + 1) * ny, x-face i between cells i-1 and i
  std::vector<double> face_y;  // nx * (ny + 1)
  double inf = 0.0;
  double sup = 0.0;

  double face_x_at(int i, int j, int nx) const {
    return face_x[static_cast<std::size_t>(j) * (nx + 1) + i];
  }
};

/// Throws SpecError if any sampled value is <= 0.
BarrierField build_barrier(const BarrierSpec& spec, const Grid& grid);

/// Conservative unknowns. Ghost layers are filled by apply_velocity_bc.
struct FlowState {
  Grid grid;
  double t = 0.0;
  Field rho;
  Field mx;
  Field my;

  static FlowState zeros(const Grid& grid);
  bool operator==(const FlowState&) const = default;
};

/// Density below this multiple of sup rho_star is treated as vacuum (u = 0).
inline constexpr double kVacuumFraction = 1e-12;

struct Velocity {
  Field u;
  Field v;
};

/// u = m / rho on cells (ghosts included) with u = 0 in vacuum.
Velocity velocity(const FlowState& state, double vacuum_threshold);

/// Total mass sum(rho) * cell volume over interior cells.
double total_mass(const FlowState& state);

struct InitialData {
  Field rho0;
  Field mx0;
  Field my0;
};

struct InitialViolation {
  enum class Kind { NegativeDensity, AboveBarrier, VacuumMomentum, MeanAboveBarrierInf, NonFinite };
  Kind kind;
  int i = -1;
  int j = -1;
  std::string message;
};

struct ValidationReport {
  bool valid = true;
  double mean_density = 0.0;   // M0
  double barrier_inf = 0.0;
  std::vector<InitialViolation> violations;
};

/// Checks 0 <= rho0 < rho_star, m0 = 0 on vacuum and M0 < inf rho_star.
ValidationReport validate_initial(const InitialData& data, const BarrierField& barrier,
                                  const Grid& grid);

/// Fills ghost layers: density mirrored, momentum reflected so the velocity
/// vanishes on every wall face (no-slip).
FlowState apply_velocity_bc(FlowState state);

}  // namespace congestion
