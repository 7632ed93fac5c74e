#include "kirchbif/fiber.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "kirchbif/errors.hpp"

namespace kirchbif {

namespace {

constexpr double kDegenerateRelTol = 1e-12; // |lambda - lambda(u)| band, relative
constexpr double kExponentLogSwitch = 10.0;

void check_scalars(const FiberScalars& s) {
  if (!(s.p > 0.0) || !(s.q > 0.0))
    throw std::domain_error("fiber scalars must be strictly positive");
}

} // namespace

namespace detail {

double pow_safe(double base, double exponent) {
  if (std::abs(exponent) > kExponentLogSwitch && base > 0.0)
    return std::exp(exponent * std::log(base));
  return std::pow(base, exponent);
}

double g_bracket_point(const ProblemParams& params, const FiberScalars& s) {
  // g'(t) = t^{gamma-3} (2 lambda P^2 t^{4-gamma} - (gamma-2) Q) = 0
  const double g = params.gamma;
  return pow_safe((g - 2.0) * s.q / (2.0 * params.lambda * s.p * s.p), 1.0 / (4.0 - g));
}

double g_root(const ProblemParams& params, const FiberScalars& s, double lo, double hi) {
  const double a = params.a;
  const double g = params.gamma;
  const double lam = params.lambda;
  const auto gval = [&](double t) {
    return a * s.p + lam * s.p * s.p * t * t - s.q * pow_safe(t, g - 2.0);
  };
  const auto gder = [&](double t) {
    return 2.0 * lam * s.p * s.p * t - (g - 2.0) * s.q * pow_safe(t, g - 3.0);
  };

  double flo = gval(lo);
  double fhi = gval(hi);
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  if (flo * fhi > 0.0) {
    std::ostringstream msg;
    msg << "g has no certified sign change on [" << lo << ", " << hi << "]";
    throw BracketError(msg.str());
  }

  // Certification scale: the terms of g at the root. At a local-minimum root
  // far right of the bracket point the balancing terms dwarf aP, so a pure
  // aP-relative bound is unreachable in double precision.
  const auto gscale = [&](double t) {
    return a * s.p + lam * s.p * s.p * t * t + s.q * pow_safe(t, g - 2.0);
  };

  const double gtol = 1e-14 * gscale(0.5 * (lo + hi));
  double mid = 0.5 * (lo + hi);
  for (int it = 0; it < 200; ++it) {
    mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) break;
    const double fm = gval(mid);
    if (std::abs(fm) <= gtol) break;
    if ((fm > 0.0) == (flo > 0.0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  // Newton polish, clamped to the bracket.
  for (int it = 0; it < 8; ++it) {
    const double fm = gval(mid);
    const double dm = gder(mid);
    if (dm == 0.0) break;
    double next = mid - fm / dm;
    if (!(next > lo && next < hi)) break;
    if (next == mid) break;
    mid = next;
  }
  if (!(std::abs(gval(mid)) <= 1e-12 * gscale(mid))) {
    std::ostringstream msg;
    msg << "root of g not certified at t = " << mid;
    throw BracketError(msg.str());
  }
  return mid;
}

} // namespace detail

void ProblemParams::validate() const {
  if (!(a > 0.0)) throw ConfigError("problem coefficient a must be > 0");
  if (!(gamma > 2.0 && gamma < 4.0))
    throw ConfigError("nonlinearity exponent gamma must lie in (2, 4)");
  if (!(lambda >= 0.0)) throw ConfigError("lambda must be >= 0");
}

DerivedConstants DerivedConstants::from(double a, double gamma) {
  ProblemParams{a, gamma, 0.0}.validate();
  DerivedConstants c{};
  const double g = gamma;
  c.c_agamma = a * ((g - 2.0) / (4.0 - g)) *
               detail::pow_safe((4.0 - g) / (2.0 * a), 2.0 / (g - 2.0));
  c.c0_agamma = 2.0 * detail::pow_safe(2.0 / g, 2.0 / (g - 2.0));
  c.ratio_exponent = 2.0 * g / (g - 2.0);
  return c;
}

double eval_psi(const ProblemParams& params, const FiberScalars& s, double t) {
  check_scalars(s);
  if (t < 0.0) throw std::domain_error("fiber map is defined for t >= 0");
  if (t == 0.0) return 0.0;
  const double t2 = t * t;
  return 0.5 * params.a * s.p * t2 +
         0.25 * params.lambda * s.p * s.p * t2 * t2 -
         s.q / params.gamma * detail::pow_safe(t, params.gamma);
}

std::pair<double, double> eval_psi_derivs(const ProblemParams& params,
                                          const FiberScalars& s, double t) {
  check_scalars(s);
  if (!(t > 0.0)) throw std::domain_error("fiber derivatives are defined for t > 0");
  const double g = params.gamma;
  const double p2 = s.p * s.p;
  const double tg2 = detail::pow_safe(t, g - 2.0);
  const double first = t * (params.a * s.p + params.lambda * p2 * t * t - s.q * tg2);
  const double second =
      params.a * s.p + 3.0 * params.lambda * p2 * t * t - (g - 1.0) * s.q * tg2;
  return {first, second};
}

double lambda_of(double a, double gamma, const FiberScalars& s) {
  check_scalars(s);
  const DerivedConstants c = DerivedConstants::from(a, gamma);
  if (c.ratio_exponent > kExponentLogSwitch) {
    const double log_ratio = std::log(s.q) / gamma - 0.5 * std::log(s.p);
    return std::exp(std::log(c.c_agamma) + c.ratio_exponent * log_ratio);
  }
  const double ratio = std::pow(s.q, 1.0 / gamma) / std::sqrt(s.p);
  return c.c_agamma * std::pow(ratio, c.ratio_exponent);
}

double lambda0_of(double a, double gamma, const FiberScalars& s) {
  return DerivedConstants::from(a, gamma).c0_agamma * lambda_of(a, gamma, s);
}

double degenerate_point(double a, double gamma, const FiberScalars& s) {
  check_scalars(s);
  return detail::pow_safe(2.0 * a / (4.0 - gamma) * s.p / s.q, 1.0 / (gamma - 2.0));
}

ZeroEnergyPoint zero_energy_point(double a, double gamma, const FiberScalars& s) {
  check_scalars(s);
  // Eliminating lambda t^2 between psi = 0 and psi' = 0 leaves
  // Q t^{gamma-2} = aP * gamma/(4-gamma).
  const double t0 =
      detail::pow_safe(gamma / (4.0 - gamma) * a * s.p / s.q, 1.0 / (gamma - 2.0));
  return {t0, lambda0_of(a, gamma, s)};
}

FiberClass classify_fiber(const ProblemParams& params, const FiberScalars& s) {
  params.validate();
  check_scalars(s);
  if (!(params.lambda > 0.0))
    throw std::domain_error("classify_fiber requires lambda > 0");

  const double lam_u = lambda_of(params.a, params.gamma, s);
  FiberClass out{};
  out.t_bracket = detail::g_bracket_point(params, s);

  if (std::abs(params.lambda - lam_u) <= kDegenerateRelTol * lam_u) {
    out.kind = FiberKind::Degenerate;
    out.t_deg = degenerate_point(params.a, params.gamma, s);
    return out;
  }
  if (params.lambda > lam_u) {
    out.kind = FiberKind::Monotone;
    return out;
  }

  out.kind = FiberKind::TwoCritical;
  const double a = params.a;
  const double g = params.gamma;
  const auto gval = [&](double t) {
    return a * s.p + params.lambda * s.p * s.p * t * t - s.q * detail::pow_safe(t, g - 2.0);
  };

  // Left bracket: g(0+) = aP > 0; shrink until the sign is certified.
  double lo = 0.5 * out.t_bracket;
  int guard = 0;
  while (gval(lo) <= 0.0) {
    lo *= 0.5;
    if (++guard > 4096)
      throw BracketError("could not certify g > 0 near t = 0");
  }
  out.t_minus = detail::g_root(params, s, lo, out.t_bracket);

  // Right bracket: the quadratic term wins eventually.
  double hi = 2.0 * out.t_bracket;
  guard = 0;
  while (gval(hi) <= 0.0) {
    hi *= 2.0;
    if (++guard > 4096)
      throw BracketError("could not certify g > 0 for large t");
  }
  out.t_plus = detail::g_root(params, s, out.t_bracket, hi);
  return out;
}

double n0_energy(const ProblemParams& params) {
  params.validate();
  if (!(params.lambda > 0.0))
    throw std::domain_error("n0_energy requires lambda > 0");
  const double g = params.gamma;
  return (g - 2.0) * (g - 2.0) / (4.0 * g * (4.0 - g)) * params.a * params.a /
         params.lambda;
}

} // namespace kirchbif
