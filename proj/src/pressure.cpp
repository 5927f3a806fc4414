#include "congestion/pressure.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/tools/minima.hpp>

#include "congestion/errors.hpp"

namespace congestion {

namespace {

constexpr double kQuadratureRelTol = 1e-10;

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

bool is_integer(double x) { return std::abs(x - std::round(x)) < 1e-12; }

void require(bool ok, const char* what) {
  if (!ok) throw ParameterError(what);
}

void check_ratio(double r) {
  if (!(r >= 0.0) || !std::isfinite(r)) {
    std::ostringstream os;
    os << "congestion ratio must be finite and nonnegative, got " << r;
    throw ParameterError(os.str());
  }
}

void check_below_barrier(double r) {
  if (r >= 1.0) {
    std::ostringstream os;
    os << "congestion ratio " << r << " reached the barrier";
    throw BarrierViolation(os.str());
  }
}

// Unit-scale singular law: r^alpha (1 - r)^-beta.
double unit_pi(double alpha, double beta, double r) {
  return std::pow(r, alpha) * std::pow(1.0 - r, -beta);
}

double unit_dpi(double alpha, double beta, double r) {
  if (r == 0.0) {
    if (alpha > 1.0) return 0.0;
    if (alpha == 1.0) return 1.0;
    return INFINITY;
  }
  const double w = 1.0 - r;
  return alpha * std::pow(r, alpha - 1.0) * std::pow(w, -beta) +
         beta * std::pow(r, alpha) * std::pow(w, -beta - 1.0);
}

// int_0^r s^(alpha-2) (1-s)^-beta ds by the power series of (1-s)^-beta.
// All terms are positive; used for r <= 1/2 where it converges quickly.
double unit_gamma_series(double alpha, double beta, double r) {
  double coeff = 1.0;  // binomial(beta + j - 1, j)
  double rpow = std::pow(r, alpha - 1.0);
  double sum = 0.0;
  for (int j = 0; j < 4000; ++j) {
    const double term = coeff * rpow / (alpha - 1.0 + j);
    sum += term;
    if (term < 1e-18 * sum) break;
    coeff *= (beta + j) / (j + 1.0);
    rpow *= r;
  }
  return sum;
}

// Same integral through t = 1 - s and the binomial expansion of
// (1 - t)^(alpha - 2); exact for integer alpha >= 2 and integer beta.
double unit_gamma_binomial(int alpha, int beta, double r) {
  const int n = alpha - 2;
  const double log_w = std::log1p(-r);
  double binom = 1.0;
  double sum = 0.0;
  for (int k = 0; k <= n; ++k) {
    const int e = k - beta + 1;
    // int_{1-r}^1 t^(e-1) dt
    const double piece = (e == 0) ? -log_w : -std::expm1(e * log_w) / e;
    sum += ((k % 2 == 0) ? 1.0 : -1.0) * binom * piece;
    binom = binom * (n - k) / (k + 1.0);
  }
  return sum;
}

double unit_gamma_quadrature(double alpha, double beta, double r) {
  boost::math::quadrature::tanh_sinh<double> integrator;
  auto f = [&](double s, double sc) {
    // sc is the distance to the nearest endpoint; use it near s = r for
    // accuracy when (1 - s) is small.
    const double one_minus = (s > 0.5 * r && sc > 0.0) ? (1.0 - r) + sc : 1.0 - s;
    return std::pow(s, alpha - 2.0) * std::pow(one_minus, -beta);
  };
  double error = 0.0;
  double l1 = 0.0;
  const double value = integrator.integrate(f, 0.0, r, 1e-13, &error, &l1);
  if (!std::isfinite(value) || error > kQuadratureRelTol * std::max(l1, 1e-300)) {
    std::ostringstream os;
    os << "quadrature for Gamma did not reach relative tolerance "
       << kQuadratureRelTol << " at r=" << r << " (estimate " << error << ")";
    throw QuadratureFailure(os.str());
  }
  return value;
}

double unit_gamma(double alpha, double beta, double r) {
  require(alpha > 1.0, "Gamma and Q require alpha > 1");
  if (r == 0.0) return 0.0;
  if (is_integer(alpha) && is_integer(beta)) {
    if (r <= 0.5) return unit_gamma_series(alpha, beta, r);
    return unit_gamma_binomial(static_cast<int>(std::lround(alpha)),
                               static_cast<int>(std::lround(beta)), r);
  }
  return unit_gamma_quadrature(alpha, beta, r);
}

double unit_Q(double alpha, double beta, double r) {
  if (r == 0.0) return 0.0;
  // Integration by parts: Q = pi / r + Gamma.
  return unit_pi(alpha, beta, r) / r + unit_gamma(alpha, beta, r);
}

// Pieces of the truncated law that do not involve kappa.
double truncated_core_pi(const Truncated& t, double r) {
  return t.eps * std::pow(r, t.alpha) / std::pow(std::max(1.0 - r, t.delta), t.beta);
}

double truncated_core_gamma(const Truncated& t, double r) {
  const double s0 = 1.0 - t.delta;
  double g = t.eps * unit_gamma(t.alpha, t.beta, std::min(r, s0));
  if (r > s0) {
    g += t.eps * (std::pow(r, t.alpha - 1.0) - std::pow(s0, t.alpha - 1.0)) /
         ((t.alpha - 1.0) * std::pow(t.delta, t.beta));
  }
  return g;
}

double sed_scale(const Sedimentation& s) { return s.c0 * std::pow(s.phi_star, s.s_exp - 2.0); }

}  // namespace

std::string_view law_kind(const PressureLaw& law) {
  return std::visit(overloaded{[](const Singular&) { return std::string_view("singular"); },
                               [](const Barotropic&) { return std::string_view("barotropic"); },
                               [](const Truncated&) { return std::string_view("truncated"); },
                               [](const Sedimentation&) {
                                 return std::string_view("sedimentation");
                               }},
                    law);
}

void validate(const PressureLaw& law) {
  std::visit(overloaded{[](const Singular& s) {
                          require(s.eps > 0.0, "pressure.eps must be > 0");
                          require(s.alpha > 0.0, "pressure.alpha must be > 0");
                          require(s.beta > 0.0, "pressure.beta must be > 0");
                        },
                        [](const Barotropic& b) {
                          require(b.a > 0.0, "pressure.a must be > 0");
                          require(b.gamma_n > 1.0, "pressure.gamma_n must be > 1");
                        },
                        [](const Truncated& t) {
                          require(t.eps > 0.0, "pressure.eps must be > 0");
                          require(t.alpha > 0.0, "pressure.alpha must be > 0");
                          require(t.beta > 0.0, "pressure.beta must be > 0");
                          require(t.kappa > 0.0, "pressure.kappa must be > 0");
                          require(t.cap_K > 4.0, "pressure.cap_K must be > 4");
                          require(t.delta > 0.0 && t.delta < 1.0,
                                  "pressure.delta must lie in (0,1)");
                        },
                        [](const Sedimentation& s) {
                          require(s.c0 > 0.0, "pressure.c0 must be > 0");
                          require(s.s_exp >= 2.0 && s.s_exp <= 5.0,
                                  "pressure.s_exp must lie in [2,5]");
                          require(s.phi_star > 0.0 && s.phi_star <= 1.0,
                                  "pressure.phi_star must lie in (0,1]");
                        }},
             law);
}

void validate(const FluidParams& p) {
  require(p.mu > 0.0, "fluid.mu must be > 0");
  require(2.0 * p.mu + p.lambda > 0.0, "fluid.lambda must satisfy 2 mu + lambda > 0");
  require(p.gamma > 1.0, "fluid.gamma must be > 1");
  require(p.p_coeff >= 0.0, "fluid.p_coeff must be >= 0");
}

std::vector<std::string> law_warnings(const PressureLaw& law) {
  std::vector<std::string> out;
  auto check = [&](double alpha, double beta) {
    if (alpha < 3.0) out.emplace_back("pressure.alpha < 3 is below the analysed range");
    if (beta < 3.0) out.emplace_back("pressure.beta < 3 is below the analysed range");
  };
  if (const auto* s = std::get_if<Singular>(&law)) check(s->alpha, s->beta);
  if (const auto* t = std::get_if<Truncated>(&law)) check(t->alpha, t->beta);
  return out;
}

bool is_singular(const PressureLaw& law) {
  return std::holds_alternative<Singular>(law) || std::holds_alternative<Sedimentation>(law);
}

double eval_pi(const PressureLaw& law, double r) {
  validate(law);
  check_ratio(r);
  return std::visit(
      overloaded{[&](const Singular& s) {
                   check_below_barrier(r);
                   return s.eps * unit_pi(s.alpha, s.beta, r);
                 },
                 [&](const Barotropic& b) { return b.a * std::pow(r, b.gamma_n); },
                 [&](const Truncated& t) {
                   return t.kappa * std::pow(r, t.cap_K) + truncated_core_pi(t, r);
                 },
                 [&](const Sedimentation& s) {
                   check_below_barrier(r / s.phi_star);
                   return s.c0 * std::pow(r, s.s_exp) / (s.phi_star - r);
                 }},
      law);
}

double eval_dpi(const PressureLaw& law, double r) {
  validate(law);
  check_ratio(r);
  return std::visit(
      overloaded{[&](const Singular& s) {
                   check_below_barrier(r);
                   return s.eps * unit_dpi(s.alpha, s.beta, r);
                 },
                 [&](const Barotropic& b) {
                   return b.a * b.gamma_n * std::pow(r, b.gamma_n - 1.0);
                 },
                 [&](const Truncated& t) {
                   const double stiff = t.kappa * t.cap_K * std::pow(r, t.cap_K - 1.0);
                   if (r < 1.0 - t.delta) return stiff + t.eps * unit_dpi(t.alpha, t.beta, r);
                   return stiff +
                          t.eps * t.alpha * std::pow(r, t.alpha - 1.0) / std::pow(t.delta, t.beta);
                 },
                 [&](const Sedimentation& s) {
                   const double u = r / s.phi_star;
                   check_below_barrier(u);
                   return sed_scale(s) * unit_dpi(s.s_exp, 1.0, u);
                 }},
      law);
}

double eval_Gamma(const PressureLaw& law, double r) {
  validate(law);
  check_ratio(r);
  if (r == 0.0) return 0.0;
  return std::visit(
      overloaded{[&](const Singular& s) {
                   check_below_barrier(r);
                   return s.eps * unit_gamma(s.alpha, s.beta, r);
                 },
                 [&](const Barotropic& b) {
                   return b.a * std::pow(r, b.gamma_n - 1.0) / (b.gamma_n - 1.0);
                 },
                 [&](const Truncated& t) {
                   return t.kappa * std::pow(r, t.cap_K - 1.0) / (t.cap_K - 1.0) +
                          truncated_core_gamma(t, r);
                 },
                 [&](const Sedimentation& s) {
                   const double u = r / s.phi_star;
                   check_below_barrier(u);
                   return sed_scale(s) * unit_gamma(s.s_exp, 1.0, u);
                 }},
      law);
}

double eval_Q(const PressureLaw& law, double r) {
  validate(law);
  check_ratio(r);
  if (r == 0.0) return 0.0;
  return std::visit(
      overloaded{[&](const Singular& s) {
                   check_below_barrier(r);
                   return s.eps * unit_Q(s.alpha, s.beta, r);
                 },
                 [&](const Barotropic& b) {
                   return b.a * b.gamma_n / (b.gamma_n - 1.0) * std::pow(r, b.gamma_n - 1.0);
                 },
                 [&](const Truncated& t) {
                   const double stiff =
                       t.kappa * t.cap_K / (t.cap_K - 1.0) * std::pow(r, t.cap_K - 1.0);
                   return stiff + truncated_core_pi(t, r) / r + truncated_core_gamma(t, r);
                 },
                 [&](const Sedimentation& s) {
                   const double u = r / s.phi_star;
                   check_below_barrier(u);
                   return sed_scale(s) * unit_Q(s.s_exp, 1.0, u);
                 }},
      law);
}

GammaBound gamma_lower_bound_check(const Singular& law, double r) {
  validate(PressureLaw{law});
  require(law.beta > 1.0, "lower bound on Gamma needs beta > 1");
  check_ratio(r);
  check_below_barrier(r);

  GammaBound out;
  out.c1 = 1.0 / (2.0 * (law.beta - 1.0));
  const PressureLaw as_law{law};
  auto remainder = [&](double s) {
    return out.c1 * law.eps * std::pow(1.0 - s, 1.0 - law.beta) - eval_Gamma(as_law, s);
  };

  // Coarse scan, then Brent refinement around the best sample.
  constexpr double kUpper = 0.999;
  constexpr int kSamples = 2000;
  double best_s = 0.0;
  double best = remainder(0.0);
  for (int k = 1; k <= kSamples; ++k) {
    const double s = kUpper * k / kSamples;
    const double v = remainder(s);
    if (v > best) {
      best = v;
      best_s = s;
    }
  }
  const double h = kUpper / kSamples;
  const double lo = std::max(0.0, best_s - h);
  const double hi = std::min(kUpper, best_s + h);
  if (hi > lo) {
    auto neg = [&](double s) { return -remainder(s); };
    const auto [s_opt, v_opt] = boost::math::tools::brent_find_minima(neg, lo, hi, 50);
    (void)s_opt;
    best = std::max(best, -v_opt);
  }
  out.c2 = best;

  const double rhs = out.c1 * law.eps * std::pow(1.0 - r, 1.0 - law.beta) - out.c2;
  out.slack = eval_Gamma(as_law, r) - rhs;
  out.holds = out.slack >= -1e-12 * std::max(1.0, std::abs(rhs));
  return out;
}

InternalPressure eval_internal(const FluidParams& params, double rho) {
  if (rho <= 0.0) return {};
  const double pg = std::pow(rho, params.gamma - 1.0);
  return {params.p_coeff * pg * rho, params.p_coeff * params.gamma / (params.gamma - 1.0) * pg};
}

double internal_energy_density(const FluidParams& params, double rho) {
  if (rho <= 0.0) return 0.0;
  return params.p_coeff * std::pow(rho, params.gamma) / (params.gamma - 1.0);
}

}  // namespace congestion
