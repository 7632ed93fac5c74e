#ifndef KIRCHBIF_EXTREMAL_HPP
#define KIRCHBIF_EXTREMAL_HPP

#include <optional>
#include <vector>

#include "kirchbif/fiber.hpp"
#include "kirchbif/space.hpp"

namespace kirchbif {

/// Discrete estimate of the extremal parameter: the supremum of lambda_of over
/// the discrete space, attained (up to iteration tolerance) at `maximizer`.
struct ExtremalEstimate {
  double lambda_star = 0.0;   ///< sup of lambda_of over the space
  double lambda0_star = 0.0;  ///< C_{0,a,gamma} * lambda_star, exactly
  double sobolev_ratio = 0.0; ///< max of |u|_gamma / |u|_{H^1_0}
  DiscreteField maximizer;    ///< unit H^1_0 norm, sign-constant
  int iterations = 0;
  bool converged = false;
};

struct MaximizeOptions {
  std::optional<DiscreteField> init; ///< default: half-sine interpolant
  int max_iterations = 20000;
  double ratio_tol = 1e-12;   ///< stop when the ratio gain per step drops below this
  double grad_tol = 1e-9;     ///< and the projected gradient norm is below this
  double cg_tol = 1e-12;
  bool line_search_ascent = false; ///< cross-check scheme instead of the fixed-point map
};

/// Maximize the 0-homogeneous Sobolev ratio |u|_gamma / |u| over the discrete
/// space by the inverse-stiffness fixed-point iteration
///   u <- normalize(K^{-1} (w |u|^{gamma-2} u)),
/// which is the natural fixed-point map of the Euler-Lagrange equation of the
/// ratio and increases the ratio monotonically. Returns the stationary
/// estimate; `converged = false` (best-so-far values) if the cap is hit.
ExtremalEstimate maximize_lambda(const DiscreteSpace& space, double a, double gamma,
                                 const MaximizeOptions& opts = {});

/// One mesh-refinement study: per-mesh estimates, successive differences of
/// lambda_star, and a Richardson-extrapolated guess from the last pair
/// (second-order stencil assumed).
/// Maximizer fields inside the report carry a null space handle (the per-mesh
/// spaces are internal to the study); call maximize_lambda directly when the
/// field itself is needed.
struct RefinementReport {
  std::vector<ExtremalEstimate> estimates;
  std::vector<double> deltas; ///< lambda_star[i+1] - lambda_star[i]
  std::optional<double> extrapolated;
};

RefinementReport refine_extremal(const std::vector<SpaceConfig>& configs, double a,
                                 double gamma, const MaximizeOptions& opts = {});

/// Norm of the gradient of the ratio functional at u, projected onto the
/// tangent space of the unit H^1_0 sphere, measured in the H^1_0 norm.
/// Diagnostic for maximizer stationarity.
double ratio_stationarity(const DiscreteSpace& space, double gamma,
                          const DiscreteField& u, double cg_tol = 1e-12);

} // namespace kirchbif

#endif
