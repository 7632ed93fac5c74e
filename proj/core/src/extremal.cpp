#include "kirchbif/extremal.hpp"

#include <cmath>
#include <utility>

#include "kirchbif/errors.hpp"

namespace kirchbif {

namespace {

// Mass-weighted nonlinearity w |u|^{gamma-2} u.
DiscreteField weighted_power(double gamma, const DiscreteField& u) {
  DiscreteField z = zero_field(*u.space);
  const double w = u.space->node_weight();
  for (std::size_t i = 0; i < u.values.size(); ++i) {
    const double v = u.values[i];
    z.values[i] = w * std::pow(std::abs(v), gamma - 2.0) * v;
  }
  return z;
}

void normalize_h1(DiscreteField& u) {
  const double nrm = h1_norm(u);
  scale_field(u, 1.0 / nrm);
}

double sobolev_ratio_of(double gamma, const FiberScalars& s) {
  return std::pow(s.q, 1.0 / gamma) / std::sqrt(s.p);
}

} // namespace

double ratio_stationarity(const DiscreteSpace& space, double gamma,
                          const DiscreteField& u, double cg_tol) {
  const FiberScalars s = fiber_scalars(gamma, u);
  const double ratio = sobolev_ratio_of(gamma, s);

  DiscreteField grad_r = weighted_power(gamma, u); // (1/gamma) d(Q)/du
  for (std::size_t i = 0; i < grad_r.values.size(); ++i) grad_r.values[i] /= s.q;
  std::vector<double> ku;
  space.apply_stiffness(u.values, ku);
  for (std::size_t i = 0; i < grad_r.values.size(); ++i)
    grad_r.values[i] = ratio * (grad_r.values[i] - ku[i] / s.p);

  const DiscreteField riesz = solve_shifted_laplacian(space, 1.0, grad_r, cg_tol);
  const double full2 = dot(grad_r, riesz);
  // Tangential part on the H^1_0 sphere of radius |u|; the radial component
  // vanishes analytically (0-homogeneity), remove its numerical remnant.
  const double radial = dot(grad_r, u) / std::sqrt(s.p);
  const double tang2 = full2 - radial * radial;
  return std::sqrt(std::max(0.0, tang2));
}

ExtremalEstimate maximize_lambda(const DiscreteSpace& space, double a, double gamma,
                                 const MaximizeOptions& opts) {
  ProblemParams{a, gamma, 0.0}.validate();

  DiscreteField u = opts.init ? *opts.init : half_sine_field(space);
  if (opts.init && u.values.size() != space.size())
    throw ConfigError("maximize_lambda: init field size does not match the space");
  u.space = &space;
  normalize_h1(u);

  FiberScalars s = fiber_scalars(gamma, u);
  double ratio = sobolev_ratio_of(gamma, s);

  ExtremalEstimate est;
  int it = 0;
  bool converged = false;

  for (; it < opts.max_iterations; ++it) {
    DiscreteField next;
    if (!opts.line_search_ascent) {
      next = solve_shifted_laplacian(space, 1.0, weighted_power(gamma, u), opts.cg_tol);
      normalize_h1(next);
    } else {
      // Cross-check scheme: plain ascent along the Riesz gradient of the ratio
      // with a backtracking step.
      DiscreteField grad_r = weighted_power(gamma, u);
      for (std::size_t i = 0; i < grad_r.values.size(); ++i) grad_r.values[i] /= s.q;
      std::vector<double> ku;
      space.apply_stiffness(u.values, ku);
      for (std::size_t i = 0; i < grad_r.values.size(); ++i)
        grad_r.values[i] = ratio * (grad_r.values[i] - ku[i] / s.p);
      const DiscreteField dir = solve_shifted_laplacian(space, 1.0, grad_r, opts.cg_tol);
      double step = 1.0;
      next = u;
      for (int ls = 0; ls < 60; ++ls) {
        DiscreteField trial = u;
        axpy(step, dir, trial);
        normalize_h1(trial);
        const double trial_ratio = sobolev_ratio_of(gamma, fiber_scalars(gamma, trial));
        if (trial_ratio > ratio) {
          next = std::move(trial);
          break;
        }
        step *= 0.5;
      }
    }

    const FiberScalars s_next = fiber_scalars(gamma, next);
    const double ratio_next = sobolev_ratio_of(gamma, s_next);
    u = std::move(next);
    s = s_next;
    const double gain = ratio_next - ratio;
    ratio = ratio_next;
    if (gain < opts.ratio_tol * ratio &&
        ratio_stationarity(space, gamma, u, opts.cg_tol) <= opts.grad_tol) {
      converged = true;
      ++it;
      break;
    }
  }

  est.maximizer = std::move(u);
  est.sobolev_ratio = sobolev_ratio_of(gamma, s);
  est.lambda_star = lambda_of(a, gamma, s);
  est.lambda0_star = DerivedConstants::from(a, gamma).c0_agamma * est.lambda_star;
  est.iterations = it;
  est.converged = converged;
  return est;
}

RefinementReport refine_extremal(const std::vector<SpaceConfig>& configs, double a,
                                 double gamma, const MaximizeOptions& opts) {
  if (configs.empty()) throw ConfigError("refine_extremal needs at least one mesh");
  for (std::size_t i = 1; i < configs.size(); ++i) {
    if (configs[i].dim != configs[0].dim)
      throw ConfigError("refinement meshes must share the dimension");
    for (int ax = 0; ax < configs[0].dim; ++ax)
      if (configs[i].n[ax] <= configs[i - 1].n[ax])
        throw ConfigError("refinement node counts must be strictly increasing");
  }

  RefinementReport report;
  std::vector<DiscreteSpace> spaces;
  spaces.reserve(configs.size());
  for (const auto& cfg : configs) {
    spaces.push_back(build_space(cfg));
    MaximizeOptions local = opts;
    local.init.reset(); // meshes differ; reuse of iterates is not meaningful
    report.estimates.push_back(maximize_lambda(spaces.back(), a, gamma, local));
    // Detach the maximizer from the stack-local space for safe return.
    report.estimates.back().maximizer.space = nullptr;
  }
  for (std::size_t i = 1; i < report.estimates.size(); ++i)
    report.deltas.push_back(report.estimates[i].lambda_star -
                            report.estimates[i - 1].lambda_star);
  if (configs.size() >= 2) {
    const std::size_t k = configs.size() - 1;
    const double h_prev = configs[k - 1].extent[0] / (configs[k - 1].n[0] + 1);
    const double h_last = configs[k].extent[0] / (configs[k].n[0] + 1);
    const double r = h_prev / h_last;
    const double lk = report.estimates[k].lambda_star;
    const double lp = report.estimates[k - 1].lambda_star;
    report.extrapolated = lk + (lk - lp) / (r * r - 1.0);
  }
  return report;
}

} // namespace kirchbif
