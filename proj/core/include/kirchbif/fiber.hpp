#ifndef KIRCHBIF_FIBER_HPP
#define KIRCHBIF_FIBER_HPP

#include <utility>

namespace kirchbif {

/// Problem triple (a, gamma, lambda) of the Kirchhoff-type equation
///   -(a + lambda * |grad u|_2^2) Lap u = |u|^{gamma-2} u,  u = 0 on the boundary.
/// a > 0, gamma in (2,4); lambda >= 0, where lambda = 0 is the local limit problem.
struct ProblemParams {
  double a = 1.0;
  double gamma = 3.0;
  double lambda = 0.0;

  /// Throws ConfigError unless a > 0, 2 < gamma < 4, lambda >= 0.
  void validate() const;
};

/// Closed-form constants attached to (a, gamma).
struct DerivedConstants {
  double c_agamma;       ///< a * ((g-2)/(4-g)) * ((4-g)/(2a))^{2/(g-2)}
  double c0_agamma;      ///< 2 * (2/g)^{2/(g-2)}, always < 1
  double ratio_exponent; ///< 2g/(g-2)

  static DerivedConstants from(double a, double gamma);
};

/// The two scalars P = |grad u|_2^2 and Q = |u|_gamma^gamma that fully
/// determine the fiber map t -> Phi_lambda(t*u).
struct FiberScalars {
  double p = 0.0;
  double q = 0.0;
};

enum class FiberKind { TwoCritical, Degenerate, Monotone };

/// Shape of one fiber map psi(t) = (a/2)P t^2 + (lambda/4)P^2 t^4 - (1/gamma)Q t^gamma.
/// TwoCritical: local max at t_minus, local min at t_plus, with
/// 0 < t_minus < t_bracket < t_plus. Degenerate: single inflection-critical
/// point t_deg. Monotone: strictly increasing, no critical point.
/// t_bracket is the minimizer of g(t) = aP + lambda P^2 t^2 - Q t^{gamma-2},
/// always filled in; it separates the two roots of g when they exist.
struct FiberClass {
  FiberKind kind = FiberKind::Monotone;
  double t_minus = 0.0;
  double t_plus = 0.0;
  double t_deg = 0.0;
  double t_bracket = 0.0;
};

/// Solution of { psi(t) = 0, psi'(t) = 0 }: the scaling t0 at which the fiber
/// map touches zero energy with zero slope, and the parameter lambda0 at which
/// that happens.
struct ZeroEnergyPoint {
  double t0;
  double lambda0;
};

/// psi(t) for t >= 0. Throws std::domain_error for t < 0.
double eval_psi(const ProblemParams& params, const FiberScalars& s, double t);

/// (psi'(t), psi''(t)) for t > 0. Throws std::domain_error for t <= 0.
///   psi'(t)  = t * (aP + lambda P^2 t^2 - Q t^{gamma-2})
///   psi''(t) = aP + 3 lambda P^2 t^2 - (gamma-1) Q t^{gamma-2}
std::pair<double, double> eval_psi_derivs(const ProblemParams& params,
                                          const FiberScalars& s, double t);

/// Extremal map lambda(u) = C_{a,gamma} * (Q^{1/gamma} / P^{1/2})^{2gamma/(gamma-2)}:
/// the unique parameter at which this fiber degenerates. 0-homogeneous in the
/// underlying field. params.lambda is ignored.
double lambda_of(double a, double gamma, const FiberScalars& s);

/// Zero-energy map lambda0(u) = C_{0,a,gamma} * lambda(u), strictly below lambda_of.
double lambda0_of(double a, double gamma, const FiberScalars& s);

/// Degenerate scaling t(u) = ((2a/(4-gamma)) * P/Q)^{1/(gamma-2)}. At
/// lambda = lambda_of(s) both psi' and psi'' vanish there.
double degenerate_point(double a, double gamma, const FiberScalars& s);

/// Zero-energy scaling and parameter: t0 = ((gamma/(4-gamma)) * aP/Q)^{1/(gamma-2)},
/// lambda0 = lambda0_of(s). psi(t0) = psi'(t0) = 0 at lambda = lambda0.
ZeroEnergyPoint zero_energy_point(double a, double gamma, const FiberScalars& s);

/// Classify the fiber map at params.lambda (> 0 required) against lambda_of:
/// below -> TwoCritical (roots of g found by bracketed bisection plus Newton,
/// each certified to |g| <= 1e-12 * aP), within 1e-12 relative -> Degenerate,
/// above -> Monotone. Throws BracketError if a sign change cannot be certified.
FiberClass classify_fiber(const ProblemParams& params, const FiberScalars& s);

/// Energy value shared by every degenerate Nehari point:
/// (gamma-2)^2 / (4 gamma (4-gamma)) * a^2 / lambda. Requires lambda > 0.
double n0_energy(const ProblemParams& params);

namespace detail {
/// pow that switches to exp/log form for large exponents; keeps the
/// near-gamma=2 and near-gamma=4 exponent blowups accurate.
double pow_safe(double base, double exponent);
/// Minimizer of g(t) = aP + lambda P^2 t^2 - Q t^{gamma-2} on (0, inf).
double g_bracket_point(const ProblemParams& params, const FiberScalars& s);
/// Root of g on a bracket [lo, hi] with g(lo) > 0 > g(hi) or the reverse.
double g_root(const ProblemParams& params, const FiberScalars& s, double lo, double hi);
} // namespace detail

} // namespace kirchbif

#endif
