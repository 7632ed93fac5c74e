#include "kirchbif/branch.hpp"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <cmath>
#include <sstream>
#include <utility>

#include <lapacke.h>

#include "kirchbif/errors.hpp"

namespace kirchbif {

namespace {

constexpr double kClassTol = 1e-6; // relative threshold for the N^0 label

double dual_residual_and_riesz(const ProblemParams& params, const DiscreteField& u,
                               double cg_tol, DiscreteField* riesz_out) {
  const DiscreteField g = gradient(params, u);
  DiscreteField riesz = solve_shifted_laplacian(*u.space, 1.0, g, cg_tol);
  const double dual2 = std::max(0.0, dot(g, riesz));
  const double p = u.space->stiffness_quadratic(u.values);
  const double scale = (params.a + params.lambda * p) * std::sqrt(p);
  if (riesz_out) *riesz_out = std::move(riesz);
  return std::sqrt(dual2) / scale;
}

int classify_nehari_point(const ProblemParams& params, const FiberScalars& s,
                          double psi2) {
  const double scale = params.a * s.p + 3.0 * params.lambda * s.p * s.p +
                       (params.gamma - 1.0) * s.q;
  if (std::abs(psi2) <= kClassTol * scale) return 0;
  return psi2 > 0.0 ? +1 : -1;
}

/// Radial rescale of a (near-)critical point back onto the Nehari set; keeps
/// the Nehari identity at root-finder precision. No-op when the fiber offers
/// no projection of the requested sign.
DiscreteField settle_on_nehari(const DiscreteField& u, const ProblemParams& params,
                               int sign) {
  try {
    return project_nehari(u, params, sign);
  } catch (const ProjectionInfeasible&) {
    return u;
  }
}

BranchPoint finalize_point(const ProblemParams& params, DiscreteField u, int sign,
                           BranchKind kind, int iterations, double cg_tol) {
  BranchPoint bp;
  bp.field = settle_on_nehari(u, params, sign);
  bp.lambda = params.lambda;
  bp.energy = energy(params, bp.field);
  const FiberScalars s = fiber_scalars(params.gamma, bp.field);
  bp.psi2 = params.a * s.p + 3.0 * params.lambda * s.p * s.p -
            (params.gamma - 1.0) * s.q;
  bp.nehari_class = classify_nehari_point(params, s, bp.psi2);
  bp.residual = dual_residual_and_riesz(params, bp.field, cg_tol, nullptr);
  bp.kind = kind;
  bp.iterations = iterations;
  return bp;
}

// --- dense Newton polish ----------------------------------------------------

std::vector<double> dense_hessian(const ProblemParams& params, const DiscreteField& u) {
  const DiscreteSpace& space = *u.space;
  const std::size_t n = space.size();
  std::vector<double> H(n * n, 0.0);
  const double p = space.stiffness_quadratic(u.values);
  const double coef = params.a + params.lambda * p;
  const auto& cfg = space.config();

  if (cfg.dim == 1) {
    const double c = coef / space.spacing(0);
    for (std::size_t i = 0; i < n; ++i) {
      H[i * n + i] = 2.0 * c;
      if (i > 0) H[i * n + i - 1] = -c;
      if (i + 1 < n) H[i * n + i + 1] = -c;
    }
  } else {
    const int nx = cfg.n[0];
    const int ny = cfg.n[1];
    const double cx = coef * space.spacing(1) / space.spacing(0);
    const double cy = coef * space.spacing(0) / space.spacing(1);
    for (int j = 0; j < ny; ++j) {
      for (int i = 0; i < nx; ++i) {
        const std::size_t k = static_cast<std::size_t>(j) * nx + i;
        H[k * n + k] = 2.0 * (cx + cy);
        if (i > 0) H[k * n + k - 1] = -cx;
        if (i + 1 < nx) H[k * n + k + 1] = -cx;
        if (j > 0) H[k * n + k - nx] = -cy;
        if (j + 1 < ny) H[k * n + k + nx] = -cy;
      }
    }
  }

  if (params.lambda > 0.0) {
    std::vector<double> ku;
    space.apply_stiffness(u.values, ku);
    const double two_lambda = 2.0 * params.lambda;
    for (std::size_t i = 0; i < n; ++i) {
      const double li = two_lambda * ku[i];
      for (std::size_t j = 0; j < n; ++j) H[i * n + j] += li * ku[j];
    }
  }

  const double w = space.node_weight();
  const double gm1 = params.gamma - 1.0;
  for (std::size_t i = 0; i < n; ++i)
    H[i * n + i] -= gm1 * w * std::pow(std::abs(u.values[i]), params.gamma - 2.0);
  return H;
}

/// Damped Newton on the gradient system. Returns the final relative residual
/// on success (<= target), nullopt when the step fails to reduce the residual
/// or the Hessian solve breaks down; u is updated only on success.
std::optional<double> newton_polish(const ProblemParams& params, DiscreteField& u,
                                    double target, double cg_tol, int max_iter = 40) {
  DiscreteField cur = u;
  double res = dual_residual_and_riesz(params, cur, cg_tol, nullptr);
  const double res_start = res;
  for (int it = 0; it < max_iter; ++it) {
    if (res <= target) {
      u = std::move(cur);
      return res;
    }
    std::vector<double> H = dense_hessian(params, cur);
    DiscreteField g = gradient(params, cur);
    const auto n = static_cast<lapack_int>(cur.size());
    std::vector<lapack_int> ipiv(cur.size());
    const lapack_int info = LAPACKE_dgesv(LAPACK_ROW_MAJOR, n, 1, H.data(), n,
                                          ipiv.data(), g.values.data(), 1);
    if (info != 0) return std::nullopt;

    bool improved = false;
    double alpha = 1.0;
    for (int ls = 0; ls < 20; ++ls) {
      DiscreteField trial = cur;
      axpy(-alpha, g, trial); // g now holds the Newton step
      bool zero = true;
      for (double v : trial.values)
        if (v != 0.0) {
          zero = false;
          break;
        }
      if (!zero) {
        const double res_t = dual_residual_and_riesz(params, trial, cg_tol, nullptr);
        if (res_t < res) {
          cur = std::move(trial);
          res = res_t;
          improved = true;
          break;
        }
      }
      alpha *= 0.5;
    }
    if (!improved) break;
  }
  if (res <= target && res < res_start) {
    u = std::move(cur);
    return res;
  }
  return std::nullopt;
}


bool basically_same_field(const DiscreteField& a, const DiscreteField& b) {
  DiscreteField diff = a;
  axpy(-1.0, b, diff);
  double d2 = dot(diff, diff);
  double b2 = dot(b, b);
  return d2 <= 0.25 * b2;
}

} // namespace

DiscreteField project_nehari(const DiscreteField& u, const ProblemParams& params,
                             int sign) {
  if (sign != 1 && sign != -1)
    throw std::invalid_argument("project_nehari sign must be +1 or -1");
  const FiberScalars s = fiber_scalars(params.gamma, u);

  double t = 0.0;
  if (params.lambda == 0.0) {
    if (sign != -1)
      throw ProjectionInfeasible(
          "the fiber map has no local minimum at lambda = 0");
    t = detail::pow_safe(params.a * s.p / s.q, 1.0 / (params.gamma - 2.0));
  } else {
    const FiberClass cls = classify_fiber(params, s);
    if (cls.kind != FiberKind::TwoCritical) {
      std::ostringstream msg;
      msg << "fiber map is "
          << (cls.kind == FiberKind::Monotone ? "Monotone" : "Degenerate")
          << "; no N" << (sign > 0 ? "+" : "-") << " projection exists";
      throw ProjectionInfeasible(msg.str());
    }
    t = sign > 0 ? cls.t_plus : cls.t_minus;
  }
  if (std::abs(t - 1.0) <= 1e-10) return u;
  DiscreteField out = u;
  scale_field(out, t);
  return out;
}

BranchPoint minimize_branch(const DiscreteSpace& space, const ProblemParams& params,
                            const BranchSolveOptions& opts) {
  params.validate();
  if (!(params.lambda > 0.0))
    throw std::domain_error("minimize_branch requires lambda > 0");

  // Admissible start: first candidate whose fiber has two critical points.
  DiscreteField u;
  bool started = false;
  std::vector<const DiscreteField*> candidates;
  if (opts.warm_start) candidates.push_back(&*opts.warm_start);
  if (opts.seed) candidates.push_back(&*opts.seed);
  DiscreteField fallback = half_sine_field(space);
  candidates.push_back(&fallback);
  for (const DiscreteField* cand : candidates) {
    try {
      u = project_nehari(*cand, params, +1);
      u.space = &space;
      started = true;
      break;
    } catch (const ProjectionInfeasible&) {
    }
  }
  if (!started)
    throw InfeasibleStart(
        "no starting field with a TwoCritical fiber at this lambda");

  double step = 1.0;
  int it = 0;
  bool converged = false;
  for (; it < opts.max_steps; ++it) {
    DiscreteField riesz;
    const double res = dual_residual_and_riesz(params, u, opts.cg_tol, &riesz);
    if (res <= opts.residual_tol) {
      converged = true;
      break;
    }
    if (res <= 1e-4) {
      DiscreteField polished = u;
      const auto polished_res =
          newton_polish(params, polished, opts.residual_tol * 0.5, opts.cg_tol);
      if (polished_res && basically_same_field(polished, u)) {
        const double psi2 = psi_second_at_one(params, polished);
        const FiberScalars s = fiber_scalars(params.gamma, polished);
        if (classify_nehari_point(params, s, psi2) >= 0) {
          u = std::move(polished);
          converged = true;
          break;
        }
      }
    }

    const DiscreteField g = gradient(params, u);
    const double p = space.stiffness_quadratic(u.values);
    DiscreteField d = riesz;
    scale_field(d, 1.0 / (params.a + params.lambda * p));
    const double slope = dot(g, d);
    const double e0 = energy(params, u);

    bool accepted = false;
    double s_try = step;
    for (int ls = 0; ls < 45; ++ls) {
      DiscreteField trial = u;
      axpy(-s_try, d, trial);
      try {
        trial = project_nehari(trial, params, +1);
      } catch (const ProjectionInfeasible&) {
        s_try *= 0.5;
        continue;
      }
      if (energy(params, trial) <= e0 - 1e-4 * s_try * slope) {
        u = std::move(trial);
        step = std::min(1.0, 2.0 * s_try);
        accepted = true;
        break;
      }
      s_try *= 0.5;
    }
    if (!accepted) {
      DiscreteField polished = u;
      const auto polished_res =
          newton_polish(params, polished, opts.residual_tol, opts.cg_tol);
      if (polished_res && basically_same_field(polished, u)) {
        u = std::move(polished);
        converged = true;
        break;
      }
      std::ostringstream msg;
      msg << "projected descent stalled at relative residual " << res
          << " (lambda = " << params.lambda << ", step floor reached)";
      throw DescentStall(msg.str());
    }
  }
  if (!converged) {
    std::ostringstream msg;
    msg << "minimizer descent did not reach tol " << opts.residual_tol << " in "
        << opts.max_steps << " steps (lambda = " << params.lambda << ")";
    throw ConvergenceError(msg.str());
  }
  return finalize_point(params, std::move(u), +1, BranchKind::Minimizer, it,
                        opts.cg_tol);
}

MountainPassConfig make_mountain_pass_config(const ProblemParams& params,
                                             const ExtremalEstimate& extremal,
                                             std::optional<DiscreteField> endpoint) {
  params.validate();
  MountainPassConfig cfg;
  // Slightly inflate the discrete Sobolev ratio so the ring bound stays a true
  // lower bound under the iteration tolerance of the estimate.
  const double s_gamma =
      detail::pow_safe(extremal.sobolev_ratio * (1.0 + 1e-8), params.gamma);
  cfg.rho = detail::pow_safe(params.a / s_gamma, 1.0 / (params.gamma - 2.0));
  cfg.ring_level =
      params.a * cfg.rho * cfg.rho * (params.gamma - 2.0) / (2.0 * params.gamma);
  cfg.barrier = params.lambda > 0.0
                    ? std::min(cfg.ring_level, n0_energy(params))
                    : cfg.ring_level;

  if (endpoint) {
    cfg.endpoint = std::move(*endpoint);
  } else {
    if (params.lambda > extremal.lambda0_star)
      throw ConfigError(
          "above lambda0_star the saddle endpoint must be the local minimizer; "
          "none was supplied");
    const FiberScalars s = fiber_scalars(params.gamma, extremal.maximizer);
    const double t0 = zero_energy_point(params.a, params.gamma, s).t0;
    cfg.endpoint = extremal.maximizer;
    scale_field(cfg.endpoint, t0);
  }
  return cfg;
}

BranchPoint mountain_pass(const DiscreteSpace& space, const ProblemParams& params,
                          const MountainPassConfig& cfg) {
  params.validate();
  if (cfg.path_points < 5) throw ConfigError("mountain pass needs >= 5 path points");
  const double e_end = energy(params, cfg.endpoint);
  if (!(e_end < cfg.ring_level)) {
    std::ostringstream msg;
    msg << "endpoint energy " << e_end << " is not below the ring level "
        << cfg.ring_level << " (lambda = " << params.lambda << ")";
    throw GeometryViolation(msg.str());
  }
  if (!(h1_norm(cfg.endpoint) > cfg.rho)) {
    std::ostringstream msg;
    msg << "endpoint norm " << h1_norm(cfg.endpoint)
        << " does not clear the ring radius " << cfg.rho;
    throw GeometryViolation(msg.str());
  }

  const int m = cfg.path_points;
  const std::size_t n = space.size();
  std::vector<DiscreteField> path;
  path.reserve(m);
  // Initial path: straight segment, or a two-leg polyline through the guide.
  if (cfg.guide && cfg.guide->values.size() == n) {
    const int half = m / 2;
    for (int i = 0; i < half; ++i) {
      DiscreteField v = *cfg.guide;
      v.space = &space;
      scale_field(v, static_cast<double>(i) / half);
      path.push_back(std::move(v));
    }
    for (int i = half; i < m; ++i) {
      const double th = static_cast<double>(i - half) / (m - 1 - half);
      DiscreteField v = *cfg.guide;
      v.space = &space;
      scale_field(v, 1.0 - th);
      DiscreteField e = cfg.endpoint;
      scale_field(e, th);
      axpy(1.0, e, v);
      path.push_back(std::move(v));
    }
  } else {
    for (int i = 0; i < m; ++i) {
      DiscreteField v = cfg.endpoint;
      v.space = &space;
      scale_field(v, static_cast<double>(i) / (m - 1));
      path.push_back(std::move(v));
    }
  }

  std::vector<double> energies(m);
  const auto recompute_energies = [&] {
    for (int i = 0; i < m; ++i) energies[i] = energy(params, path[i]);
  };
  recompute_energies();

  const double endpoint_norm2 = dot(cfg.endpoint, cfg.endpoint);

  // Re-space the nodes strictly between lo and hi along the sub-polyline, by
  // arclength in graph space (normalized field distance x energy drop). The
  // anchors stay put, so a freshly lowered pass point keeps its progress.
  const auto redistribute_between = [&](int lo, int hi) {
    const int count = hi - lo;
    if (count < 2) return;
    double e_scale = 0.0;
    for (int i = lo; i <= hi; ++i) e_scale = std::max(e_scale, std::abs(energies[i]));
    if (e_scale == 0.0) e_scale = 1.0;
    std::vector<double> cum(count + 1, 0.0);
    for (int i = 1; i <= count; ++i) {
      DiscreteField diff = path[lo + i];
      axpy(-1.0, path[lo + i - 1], diff);
      const double dd = dot(diff, diff) / std::max(1e-300, endpoint_norm2);
      const double de = (energies[lo + i] - energies[lo + i - 1]) / e_scale;
      cum[i] = cum[i - 1] + std::sqrt(dd + de * de);
    }
    if (!(cum[count] > 0.0)) return;
    std::vector<DiscreteField> fresh;
    fresh.reserve(count - 1);
    int seg = 0;
    for (int j = 1; j < count; ++j) {
      const double target = cum[count] * j / count;
      while (seg + 2 <= count && cum[seg + 1] < target) ++seg;
      const double len = cum[seg + 1] - cum[seg];
      const double th = len > 0.0 ? (target - cum[seg]) / len : 0.0;
      DiscreteField v = path[lo + seg];
      scale_field(v, 1.0 - th);
      DiscreteField w = path[lo + seg + 1];
      scale_field(w, th);
      axpy(1.0, w, v);
      fresh.push_back(std::move(v));
    }
    for (int j = 1; j < count; ++j) {
      path[lo + j] = std::move(fresh[j - 1]);
      energies[lo + j] = energy(params, path[lo + j]);
    }
  };

  const auto finish = [&](DiscreteField w, int sweeps) {
    auto polished = newton_polish(params, w, cfg.polish_residual_tol, cfg.cg_tol);
    if (!polished) {
      std::ostringstream msg;
      msg << "saddle polish failed to reach tol " << cfg.polish_residual_tol
          << " (lambda = " << params.lambda << ")";
      throw ConvergenceError(msg.str());
    }
    BranchPoint bp = finalize_point(params, std::move(w), -1,
                                    params.lambda == 0.0 ? BranchKind::LimitProblem
                                                         : BranchKind::MountainPass,
                                    sweeps, cfg.cg_tol);
    if (bp.nehari_class != -1) {
      std::ostringstream msg;
      msg << "polished pass point is not saddle-like (psi'' class "
          << bp.nehari_class << ", lambda = " << params.lambda << ")";
      throw SaddleEscape(msg.str());
    }
    if (!(bp.energy >= cfg.barrier * (1.0 - 1e-9))) {
      std::ostringstream msg;
      msg << "polished pass point fell below the barrier: " << bp.energy << " < "
          << cfg.barrier;
      throw SaddleEscape(msg.str());
    }
    return bp;
  };

  double newton_trigger = 1e-3;
  double best_res = 1e300;
  int stagnant = 0;
  for (int sweep = 0; sweep < cfg.max_sweeps; ++sweep) {
    int imax = 1;
    for (int i = 2; i + 1 < m; ++i)
      if (energies[i] > energies[imax]) imax = i;

    DiscreteField riesz;
    const double res = dual_residual_and_riesz(params, path[imax], cfg.cg_tol, &riesz);
    if (res <= cfg.path_residual_tol) return finish(path[imax], sweep);
    if (res <= newton_trigger && energies[imax] >= cfg.barrier * (1.0 - 1e-9)) {
      DiscreteField candidate = path[imax];
      auto polished =
          newton_polish(params, candidate, cfg.polish_residual_tol, cfg.cg_tol);
      if (polished) {
        const double e_cand = energy(params, candidate);
        const double psi2 = psi_second_at_one(params, candidate);
        if (e_cand >= cfg.barrier * (1.0 - 1e-9) &&
            e_cand <= energies[imax] * 1.25 && psi2 < 0.0)
          return finish(std::move(candidate), sweep);
      }
    }
    if (res < best_res * (1.0 - 1e-3)) {
      best_res = res;
      stagnant = 0;
    } else if (++stagnant >= 100) {
      newton_trigger = std::min(newton_trigger * 10.0, 0.3);
      stagnant = 0;
    }

    // One damped preconditioned descent move of the max point.
    const DiscreteField g = gradient(params, path[imax]);
    const double p = space.stiffness_quadratic(path[imax].values);
    DiscreteField d = riesz;
    scale_field(d, 1.0 / (params.a + params.lambda * p));
    const double slope = dot(g, d);
    double s_try = cfg.deform_step;
    for (int ls = 0; ls < 30; ++ls) {
      DiscreteField trial = path[imax];
      axpy(-s_try, d, trial);
      const double e_t = energy(params, trial);
      if (e_t <= energies[imax] - 1e-4 * s_try * slope) {
        path[imax] = std::move(trial);
        energies[imax] = e_t;
        break;
      }
      s_try *= 0.5;
    }
    redistribute_between(0, imax);
    redistribute_between(imax, m - 1);
  }
  std::ostringstream msg;
  msg << "path deformation did not localize the pass point in " << cfg.max_sweeps
      << " sweeps (best residual " << best_res << ", lambda = " << params.lambda
      << ")";
  throw ConvergenceError(msg.str());
}

BranchPoint minimize_nehari_minus(const DiscreteSpace& space,
                                  const ProblemParams& params,
                                  const BranchSolveOptions& opts) {
  params.validate();

  DiscreteField u;
  bool started = false;
  std::vector<const DiscreteField*> candidates;
  if (opts.warm_start) candidates.push_back(&*opts.warm_start);
  if (opts.seed) candidates.push_back(&*opts.seed);
  DiscreteField fallback = half_sine_field(space);
  candidates.push_back(&fallback);
  for (const DiscreteField* cand : candidates) {
    try {
      u = project_nehari(*cand, params, -1);
      u.space = &space;
      started = true;
      break;
    } catch (const ProjectionInfeasible&) {
    }
  }
  if (!started)
    throw InfeasibleStart("no starting field admits an N^- projection here");

  double step = 1.0;
  int it = 0;
  bool converged = false;
  for (; it < opts.max_steps; ++it) {
    DiscreteField riesz;
    const double res = dual_residual_and_riesz(params, u, opts.cg_tol, &riesz);
    if (res <= opts.residual_tol) {
      converged = true;
      break;
    }
    if (res <= 1e-4) {
      DiscreteField polished = u;
      const auto polished_res =
          newton_polish(params, polished, opts.residual_tol * 0.5, opts.cg_tol);
      if (polished_res && basically_same_field(polished, u) &&
          psi_second_at_one(params, polished) < 0.0) {
        u = std::move(polished);
        converged = true;
        break;
      }
    }

    const DiscreteField g = gradient(params, u);
    const double p = space.stiffness_quadratic(u.values);
    DiscreteField d = riesz;
    scale_field(d, 1.0 / (params.a + params.lambda * p));
    const double slope = dot(g, d);
    const double e0 = energy(params, u);

    bool accepted = false;
    double s_try = step;
    for (int ls = 0; ls < 45; ++ls) {
      DiscreteField trial = u;
      axpy(-s_try, d, trial);
      try {
        trial = project_nehari(trial, params, -1);
      } catch (const ProjectionInfeasible&) {
        s_try *= 0.5;
        continue;
      }
      if (energy(params, trial) <= e0 - 1e-4 * s_try * slope) {
        u = std::move(trial);
        step = std::min(1.0, 2.0 * s_try);
        accepted = true;
        break;
      }
      s_try *= 0.5;
    }
    if (!accepted) {
      DiscreteField polished = u;
      const auto polished_res =
          newton_polish(params, polished, opts.residual_tol, opts.cg_tol);
      if (polished_res && basically_same_field(polished, u)) {
        u = std::move(polished);
        converged = true;
        break;
      }
      std::ostringstream msg;
      msg << "N^- descent stalled at relative residual " << res
          << " (lambda = " << params.lambda << ")";
      throw DescentStall(msg.str());
    }
  }
  if (!converged)
    throw ConvergenceError("N^- minimization hit its step cap");
  return finalize_point(params, std::move(u), -1,
                        params.lambda == 0.0 ? BranchKind::LimitProblem
                                             : BranchKind::MountainPass,
                        it, opts.cg_tol);
}

BranchPoint limit_problem(const DiscreteSpace& space, double a, double gamma,
                          const ExtremalEstimate& extremal) {
  const ProblemParams params{a, gamma, 0.0};
  params.validate();
  MountainPassConfig cfg = make_mountain_pass_config(params, extremal, std::nullopt);
  // At lambda = 0 the default zero-energy endpoint has Phi_0 < 0 already, but
  // push a little further out for a comfortable margin.
  scale_field(cfg.endpoint, 1.25);
  BranchPoint bp = mountain_pass(space, params, cfg);
  bp.kind = BranchKind::LimitProblem;
  return bp;
}

ContinuationResult continue_to_lambda_star(const DiscreteSpace& space, double a,
                                           double gamma,
                                           const ExtremalEstimate& extremal,
                                           const std::vector<double>& fractions) {
  if (fractions.empty())
    throw ConfigError("continuation needs at least one lambda fraction");
  for (std::size_t i = 0; i < fractions.size(); ++i) {
    if (!(fractions[i] > 0.0 && fractions[i] < 1.0))
      throw ConfigError("continuation fractions must lie in (0, 1)");
    if (i > 0 && fractions[i] <= fractions[i - 1])
      throw ConfigError("continuation fractions must increase");
  }

  ContinuationResult result;
  BranchSolveOptions opts;
  opts.seed = extremal.maximizer;
  for (const double f : fractions) {
    const ProblemParams params{a, gamma, f * extremal.lambda_star};
    BranchPoint bp = minimize_branch(space, params, opts);
    opts.warm_start = bp.field;
    result.points.push_back(std::move(bp));
  }
  return result;
}

AsymReport asymptotic_study(const DiscreteSpace& space, double a, double gamma,
                            const std::vector<double>& lambdas,
                            const ExtremalEstimate& extremal) {
  if (lambdas.empty()) throw ConfigError("asymptotic study needs lambdas");
  for (std::size_t i = 0; i < lambdas.size(); ++i) {
    if (!(lambdas[i] > 0.0 && lambdas[i] < extremal.lambda0_star))
      throw ConfigError("asymptotic lambdas must lie in (0, lambda0_star)");
    if (i > 0 && lambdas[i] >= lambdas[i - 1])
      throw ConfigError("asymptotic lambdas must decrease");
  }

  AsymReport report;
  const BranchPoint w0 = limit_problem(space, a, gamma, extremal);
  report.c0 = w0.energy;
  report.w0_norm = h1_norm(w0.field);

  BranchSolveOptions min_opts;
  min_opts.seed = extremal.maximizer;
  std::optional<DiscreteField> w_guide = w0.field;
  for (const double lam : lambdas) {
    const ProblemParams params{a, gamma, lam};
    BranchPoint u_pt = minimize_branch(space, params, min_opts);
    min_opts.warm_start = u_pt.field;

    MountainPassConfig cfg = make_mountain_pass_config(params, extremal, std::nullopt);
    cfg.guide = w_guide;
    BranchPoint w_pt = mountain_pass(space, params, cfg);
    w_guide = w_pt.field;

    AsymRow row;
    row.lambda = lam;
    row.energy_min = u_pt.energy;
    row.normsq_min = space.stiffness_quadratic(u_pt.field.values);
    row.energy_mp = w_pt.energy;
    const double wp = space.stiffness_quadratic(w_pt.field.values);
    row.lambda_norm4_mp = lam * wp * wp;
    DiscreteField diff = w_pt.field;
    axpy(-1.0, w0.field, diff);
    row.dist_w0 = h1_norm(diff);
    report.rows.push_back(row);
  }
  return report;
}

Lambda0Bracket refine_lambda0_bisection(const DiscreteSpace& space, double a,
                                        double gamma,
                                        const ExtremalEstimate& extremal,
                                        double rel_tol) {
  if (!(rel_tol > 0.0)) throw ConfigError("bisection tolerance must be positive");
  const double lam0 = extremal.lambda0_star;
  const double lam_star = extremal.lambda_star;

  Lambda0Bracket bracket;
  BranchSolveOptions opts;
  opts.seed = extremal.maximizer;

  const auto energy_at = [&](double lam) {
    const ProblemParams params{a, gamma, lam};
    BranchPoint bp = minimize_branch(space, params, opts);
    opts.warm_start = bp.field;
    ++bracket.solves;
    return bp.energy;
  };

  double lo = 0.9 * lam0;
  double hi = std::min(1.1 * lam0, 0.5 * (lam0 + lam_star));
  if (!(energy_at(lo) < 0.0))
    throw ConvergenceError("minimizer energy is not negative below lambda0_star");
  if (!(energy_at(hi) > 0.0))
    throw ConvergenceError("minimizer energy is not positive above lambda0_star");

  while (hi - lo > rel_tol * lam0) {
    const double mid = 0.5 * (lo + hi);
    if (energy_at(mid) < 0.0)
      lo = mid;
    else
      hi = mid;
  }
  bracket.lo = lo;
  bracket.hi = hi;
  bracket.refined = 0.5 * (lo + hi);
  return bracket;
}

} // namespace kirchbif
