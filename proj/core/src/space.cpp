#include "kirchbif/space.hpp"

#include <cmath>
#include <sstream>

#include "kirchbif/errors.hpp"
#include "kirchbif/rng.hpp"

namespace kirchbif {

void SpaceConfig::validate() const {
  if (dim != 1 && dim != 2) throw ConfigError("space dim must be 1 or 2");
  for (int ax = 0; ax < dim; ++ax) {
    if (!(extent[ax] > 0.0)) throw ConfigError("space extent must be positive");
    if (n[ax] < 3) throw ConfigError("at least 3 interior nodes per axis");
  }
}

DiscreteSpace build_space(const SpaceConfig& config) {
  config.validate();
  DiscreteSpace space;
  space.config_ = config;
  space.size_ = 1;
  space.weight_ = 1.0;
  for (int ax = 0; ax < config.dim; ++ax) {
    space.h_[ax] = config.extent[ax] / (config.n[ax] + 1);
    space.size_ *= static_cast<std::size_t>(config.n[ax]);
    space.weight_ *= space.h_[ax];
  }
  if (config.dim == 1) {
    space.h_[1] = 0.0;
    space.config_.n[1] = 1;
    space.config_.extent[1] = 1.0;
  }
  return space;
}

void DiscreteSpace::apply_stiffness(const std::vector<double>& u,
                                    std::vector<double>& out) const {
  out.assign(size_, 0.0);
  if (config_.dim == 1) {
    const int n = config_.n[0];
    const double c = 1.0 / h_[0];
    for (int i = 0; i < n; ++i) {
      double v = 2.0 * u[i];
      if (i > 0) v -= u[i - 1];
      if (i + 1 < n) v -= u[i + 1];
      out[i] = c * v;
    }
    return;
  }
  const int nx = config_.n[0];
  const int ny = config_.n[1];
  const double cx = h_[1] / h_[0]; // weight of x-difference edges
  const double cy = h_[0] / h_[1];
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      const std::size_t k = static_cast<std::size_t>(j) * nx + i;
      double v = 2.0 * (cx + cy) * u[k];
      if (i > 0) v -= cx * u[k - 1];
      if (i + 1 < nx) v -= cx * u[k + 1];
      if (j > 0) v -= cy * u[k - nx];
      if (j + 1 < ny) v -= cy * u[k + nx];
      out[k] = v;
    }
  }
}

double DiscreteSpace::stiffness_quadratic(const std::vector<double>& u) const {
  // Sum of squared edge differences, including the boundary edges (u = 0
  // outside); algebraically identical to u^T (K u) but cheaper and manifestly
  // nonnegative.
  double acc = 0.0;
  if (config_.dim == 1) {
    const int n = config_.n[0];
    double prev = 0.0;
    for (int i = 0; i < n; ++i) {
      const double d = u[i] - prev;
      acc += d * d;
      prev = u[i];
    }
    acc += prev * prev;
    return acc / h_[0];
  }
  const int nx = config_.n[0];
  const int ny = config_.n[1];
  const double cx = h_[1] / h_[0];
  const double cy = h_[0] / h_[1];
  for (int j = 0; j < ny; ++j) {
    double prev = 0.0;
    for (int i = 0; i < nx; ++i) {
      const double ui = u[static_cast<std::size_t>(j) * nx + i];
      const double d = ui - prev;
      acc += cx * d * d;
      prev = ui;
    }
    acc += cx * prev * prev;
  }
  for (int i = 0; i < nx; ++i) {
    double prev = 0.0;
    for (int j = 0; j < ny; ++j) {
      const double ui = u[static_cast<std::size_t>(j) * nx + i];
      const double d = ui - prev;
      acc += cy * d * d;
      prev = ui;
    }
    acc += cy * prev * prev;
  }
  return acc;
}

DiscreteField zero_field(const DiscreteSpace& space) {
  return {std::vector<double>(space.size(), 0.0), &space};
}

DiscreteField random_field(const DiscreteSpace& space, Rng& rng) {
  DiscreteField f = zero_field(space);
  for (auto& v : f.values) v = rng.symmetric();
  return f;
}

DiscreteField half_sine_field(const DiscreteSpace& space) {
  DiscreteField f = zero_field(space);
  const auto& cfg = space.config();
  const double pi = 3.14159265358979323846;
  if (cfg.dim == 1) {
    for (int i = 0; i < cfg.n[0]; ++i)
      f.values[i] = std::sin(pi * space.coord(0, i) / cfg.extent[0]);
    return f;
  }
  for (int j = 0; j < cfg.n[1]; ++j)
    for (int i = 0; i < cfg.n[0]; ++i)
      f.values[static_cast<std::size_t>(j) * cfg.n[0] + i] =
          std::sin(pi * space.coord(0, i) / cfg.extent[0]) *
          std::sin(pi * space.coord(1, j) / cfg.extent[1]);
  return f;
}

double dot(const DiscreteField& x, const DiscreteField& y) {
  double acc = 0.0;
  for (std::size_t i = 0; i < x.values.size(); ++i) acc += x.values[i] * y.values[i];
  return acc;
}

void axpy(double alpha, const DiscreteField& x, DiscreteField& y) {
  for (std::size_t i = 0; i < x.values.size(); ++i) y.values[i] += alpha * x.values[i];
}

void scale_field(DiscreteField& x, double alpha) {
  for (auto& v : x.values) v *= alpha;
}

FiberScalars fiber_scalars(double gamma, const DiscreteField& u) {
  bool nonzero = false;
  for (double v : u.values)
    if (v != 0.0) {
      nonzero = true;
      break;
    }
  if (!nonzero) throw std::domain_error("fiber scalars of the zero field");
  FiberScalars s;
  s.p = u.space->stiffness_quadratic(u.values);
  const double w = u.space->node_weight();
  double q = 0.0;
  for (double v : u.values) q += std::pow(std::abs(v), gamma);
  s.q = w * q;
  return s;
}

double h1_norm(const DiscreteField& u) {
  return std::sqrt(u.space->stiffness_quadratic(u.values));
}

double energy(const ProblemParams& params, const DiscreteField& u) {
  bool nonzero = false;
  for (double v : u.values)
    if (v != 0.0) {
      nonzero = true;
      break;
    }
  if (!nonzero) return 0.0;
  const FiberScalars s = fiber_scalars(params.gamma, u);
  return 0.5 * params.a * s.p + 0.25 * params.lambda * s.p * s.p - s.q / params.gamma;
}

DiscreteField gradient(const ProblemParams& params, const DiscreteField& u) {
  DiscreteField g = zero_field(*u.space);
  u.space->apply_stiffness(u.values, g.values);
  const double p = u.space->stiffness_quadratic(u.values);
  const double coeff = params.a + params.lambda * p;
  const double w = u.space->node_weight();
  for (std::size_t i = 0; i < g.values.size(); ++i) {
    const double v = u.values[i];
    g.values[i] = coeff * g.values[i] -
                  w * std::pow(std::abs(v), params.gamma - 2.0) * v;
  }
  return g;
}

DiscreteField solve_shifted_laplacian(const DiscreteSpace& space, double coefficient,
                                      const DiscreteField& rhs, double tol) {
  if (!(coefficient > 0.0))
    throw std::domain_error("shifted-laplacian coefficient must be positive");
  const std::size_t n = space.size();
  DiscreteField x = zero_field(space);
  std::vector<double> r = rhs.values;
  double rr = 0.0;
  for (double v : r) rr += v * v;
  const double target2 = tol * tol * rr;
  if (rr == 0.0) return x;

  std::vector<double> p = r;
  std::vector<double> kp(n);
  const std::size_t cap = 10 * n;
  for (std::size_t it = 0; it < cap; ++it) {
    space.apply_stiffness(p, kp);
    double pkp = 0.0;
    for (std::size_t i = 0; i < n; ++i) pkp += p[i] * kp[i];
    pkp *= coefficient;
    const double alpha = rr / pkp;
    for (std::size_t i = 0; i < n; ++i) {
      x.values[i] += alpha * p[i];
      r[i] -= alpha * coefficient * kp[i];
    }
    double rr_new = 0.0;
    for (double v : r) rr_new += v * v;
    if (rr_new <= target2) return x;
    const double beta = rr_new / rr;
    rr = rr_new;
    for (std::size_t i = 0; i < n; ++i) p[i] = r[i] + beta * p[i];
  }
  std::ostringstream msg;
  msg << "conjugate gradients did not reach tol " << tol << " within " << cap
      << " iterations";
  throw ConvergenceError(msg.str());
}

double psi_second_at_one(const ProblemParams& params, const DiscreteField& u) {
  const FiberScalars s = fiber_scalars(params.gamma, u);
  return params.a * s.p + 3.0 * params.lambda * s.p * s.p - (params.gamma - 1.0) * s.q;
}

double psi_first_at_one(const ProblemParams& params, const DiscreteField& u) {
  const FiberScalars s = fiber_scalars(params.gamma, u);
  return params.a * s.p + params.lambda * s.p * s.p - s.q;
}

double relative_residual(const ProblemParams& params, const DiscreteField& u,
                         double cg_tol) {
  const DiscreteField g = gradient(params, u);
  const DiscreteField riesz = solve_shifted_laplacian(*u.space, 1.0, g, cg_tol);
  const double dual2 = dot(g, riesz); // g^T K^{-1} g
  const double p = u.space->stiffness_quadratic(u.values);
  const double scale = (params.a + params.lambda * p) * std::sqrt(p);
  return std::sqrt(std::max(0.0, dual2)) / scale;
}

} // namespace kirchbif
