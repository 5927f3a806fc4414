#pragma once

#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace congestion {

// Congestion pressure laws. Every law is evaluated on the congestion ratio
// r = rho / rho_star (or the volume fraction phi for the sedimentation law).

/// pi(r) = eps * r^alpha / (1 - r)^beta, singular at r = 1.
struct Singular {
  double eps = 1e-3;
  double alpha = 3.0;
  double beta = 3.0;

  bool operator==(const Singular&) const = default;
};

/// pi(r) = a * r^gamma_n. No density bound at finite gamma_n.
struct Barotropic {
  double a = 1.0;
  double gamma_n = 2.0;

  bool operator==(const Barotropic&) const = default;
};

/// Singular law frozen at its value for r >= 1 - delta, plus kappa * r^K
/// everywhere. Defined for all r >= 0.
struct Truncated {
  double eps = 1e-3;
  double alpha = 3.0;
  double beta = 3.0;
  double kappa = 1e-2;
  double cap_K = 6.0;
  double delta = 0.05;

  bool operator==(const Truncated&) const = default;
};

/// pi(phi) = c0 * phi^s / (phi_star - phi), a granular sedimentation law.
struct Sedimentation {
  double c0 = 1.0;
  double s_exp = 2.0;
  double phi_star = 0.64;

  bool operator==(const Sedimentation&) const = default;
};

using PressureLaw = std::variant<Singular, Barotropic, Truncated, Sedimentation>;

/// Viscosity and internal barotropic pressure p(rho) = p_coeff * rho^gamma.
struct FluidParams {
  double mu = 1e-2;
  double lambda = 0.0;
  double gamma = 2.0;
  double p_coeff = 1.0;

  bool operator==(const FluidParams&) const = default;
};

std::string_view law_kind(const PressureLaw& law);

/// Throws ParameterError on any violated parameter invariant.
void validate(const PressureLaw& law);
void validate(const FluidParams& params);

/// Human-readable warnings for parameters outside the analysed range
/// (alpha, beta < 3 for singular-type laws). Never throws.
std::vector<std::string> law_warnings(const PressureLaw& law);

/// True when the law has a hard barrier at r = 1 (phi = phi_star).
bool is_singular(const PressureLaw& law);

double eval_pi(const PressureLaw& law, double r);

/// Exact derivative d pi / dr. The truncated law returns the right
/// derivative at r = 1 - delta.
double eval_dpi(const PressureLaw& law, double r);

/// Q(r) = int_0^r pi'(s)/s ds, normalised so that Q(0) = 0.
double eval_Q(const PressureLaw& law, double r);

/// Gamma(r) = int_0^r pi(s)/s^2 ds. Satisfies Gamma + r Gamma' = Q.
double eval_Gamma(const PressureLaw& law, double r);

struct GammaBound {
  bool holds = false;
  double slack = 0.0;  // Gamma(r) - (c1 eps (1-r)^(1-beta) - c2)
  double c1 = 0.0;
  double c2 = 0.0;
};

/// Checks Gamma(r) >= c1 eps (1-r)^-(beta-1) - c2 with c1 = 1/(2(beta-1))
/// and c2 the maximum of the remainder over [0, 0.999].
GammaBound gamma_lower_bound_check(const Singular& law, double r);

/// Internal pressure and its enthalpy H with rho grad H = grad p.
struct InternalPressure {
  double p = 0.0;
  double H = 0.0;
};

InternalPressure eval_internal(const FluidParams& params, double rho);

/// Internal energy density p_coeff * rho^gamma / (gamma - 1).
double internal_energy_density(const FluidParams& params, double rho);

}  // namespace congestion
