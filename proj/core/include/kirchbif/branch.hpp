#ifndef KIRCHBIF_BRANCH_HPP
#define KIRCHBIF_BRANCH_HPP

#include <optional>
#include <vector>

#include "kirchbif/extremal.hpp"
#include "kirchbif/fiber.hpp"
#include "kirchbif/space.hpp"

namespace kirchbif {

enum class BranchKind { Minimizer, MountainPass, LimitProblem };

/// One solved point of a solution branch.
struct BranchPoint {
  double lambda = 0.0;
  DiscreteField field;
  double energy = 0.0;
  int nehari_class = 0;  ///< sign of psi'' at 1: +1, 0, -1
  double psi2 = 0.0;     ///< raw psi'' at 1
  double residual = 0.0; ///< relative dual-norm residual of the discrete equation
  BranchKind kind = BranchKind::Minimizer;
  int iterations = 0;
};

struct BranchSolveOptions {
  double residual_tol = 1e-8;
  int max_steps = 2000;
  double cg_tol = 1e-10;
  std::optional<DiscreteField> warm_start; ///< previous branch point, tried first
  std::optional<DiscreteField> seed;       ///< fallback start (e.g. extremal maximizer)
};

/// Scale u onto the Nehari set along its ray: returns t*u with psi'(1) = 0 and
/// the requested sign of psi''(1) (+1 -> local fiber minimum t_plus, -1 ->
/// local fiber maximum t_minus). Throws ProjectionInfeasible when the fiber is
/// Monotone or Degenerate. At lambda = 0 only sign = -1 exists (single root).
DiscreteField project_nehari(const DiscreteField& u, const ProblemParams& params,
                             int sign);

/// Local-minimizer branch point at params.lambda in (0, lambda_star_h):
/// preconditioned projected descent on N^+ with Armijo acceptance, finished by
/// a damped Newton polish. The returned field is radially projected back onto
/// the Nehari set, so the Nehari identity holds to root-finder precision.
BranchPoint minimize_branch(const DiscreteSpace& space, const ProblemParams& params,
                            const BranchSolveOptions& opts = {});

/// Saddle search configuration. rho/ring_level/barrier realize the mountain
/// ring: every field of H^1_0 norm rho has energy >= ring_level, while the
/// path endpoint lies outside the ring with energy below it.
struct MountainPassConfig {
  DiscreteField endpoint;
  int path_points = 32;
  double deform_step = 1.0;
  int max_sweeps = 50000;
  double rho = 0.0;
  double ring_level = 0.0;
  double barrier = 0.0; ///< min(ring_level, n0_energy)
  double path_residual_tol = 1e-7;
  double polish_residual_tol = 1e-9;
  double cg_tol = 1e-10;
  std::optional<DiscreteField> guide; ///< e.g. the saddle at a neighboring lambda
};

/// Ring data and default endpoint derived from the discrete Sobolev ratio:
/// on the sphere of radius rho, Phi >= (a/2)rho^2 - (S^gamma/gamma)rho^gamma
/// for every discrete field, maximized at rho = (a/S^gamma)^{1/(gamma-2)}.
/// For lambda <= lambda0_star the endpoint defaults to the zero-energy scaling
/// of the maximizer; above it the caller must supply the local minimizer.
MountainPassConfig make_mountain_pass_config(const ProblemParams& params,
                                             const ExtremalEstimate& extremal,
                                             std::optional<DiscreteField> endpoint = {});

/// Mountain-pass branch point: path deformation (lower the max-energy interior
/// point one damped preconditioned-descent step per sweep, redistribute by
/// graph-space arclength) with a Newton polish of the pass point. Throws
/// GeometryViolation when the endpoint violates the ring geometry and
/// SaddleEscape when the polished point is not N^- like.
BranchPoint mountain_pass(const DiscreteSpace& space, const ProblemParams& params,
                          const MountainPassConfig& cfg);

/// Independent route to the saddle: minimize Phi over N^- by projected descent
/// (sign -1 projections). Cross-check oracle for mountain_pass.
BranchPoint minimize_nehari_minus(const DiscreteSpace& space,
                                  const ProblemParams& params,
                                  const BranchSolveOptions& opts = {});

/// Mountain-pass solution of the limit problem -a Lap w = |w|^{gamma-2} w
/// (lambda = 0), endpoint obtained by upscaling the extremal maximizer past
/// its zero-energy crossing.
BranchPoint limit_problem(const DiscreteSpace& space, double a, double gamma,
                          const ExtremalEstimate& extremal);

/// Warm-started minimizer continuation along lambda = fraction * lambda_star_h.
/// The last point carries the degeneracy indicator psi2 -> 0.
struct ContinuationResult {
  std::vector<BranchPoint> points;
};
ContinuationResult continue_to_lambda_star(const DiscreteSpace& space, double a,
                                           double gamma,
                                           const ExtremalEstimate& extremal,
                                           const std::vector<double>& fractions = {
                                               0.9, 0.99, 0.999});

/// Small-lambda diagnostics along a decreasing sequence within (0, lambda0*).
struct AsymRow {
  double lambda;
  double energy_min;      ///< Phi_lambda(u_lambda)
  double normsq_min;      ///< |u_lambda|^2
  double energy_mp;       ///< c_lambda = Phi_lambda(w_lambda)
  double lambda_norm4_mp; ///< lambda * |w_lambda|^4
  double dist_w0;         ///< |w_lambda - w_0| in H^1_0
};
struct AsymReport {
  std::vector<AsymRow> rows;
  double c0 = 0.0; ///< limit-problem mountain-pass level
  double w0_norm = 0.0;
};
AsymReport asymptotic_study(const DiscreteSpace& space, double a, double gamma,
                            const std::vector<double>& lambdas,
                            const ExtremalEstimate& extremal);

/// Bisection on the sign of the minimizer energy: the second, solver-side
/// route to lambda0_star. Refines until the bracket width is below
/// rel_tol * lambda0_star.
struct Lambda0Bracket {
  double lo = 0.0;
  double hi = 0.0;
  double refined = 0.0; ///< midpoint of the final bracket
  int solves = 0;
};
Lambda0Bracket refine_lambda0_bisection(const DiscreteSpace& space, double a,
                                        double gamma,
                                        const ExtremalEstimate& extremal,
                                        double rel_tol = 1e-6);

} // namespace kirchbif

#endif
