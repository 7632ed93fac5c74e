#ifndef KIRCHBIF_SPACE_HPP
#define KIRCHBIF_SPACE_HPP

#include <array>
#include <cstddef>
#include <vector>

#include "kirchbif/fiber.hpp"

namespace kirchbif {

class Rng;

enum class QuadratureRule { NodeLumped };

/// Mesh description for the discrete H^1_0 space: an interval (dim = 1) or an
/// axis-aligned rectangle (dim = 2), uniform grid, boundary nodes eliminated.
struct SpaceConfig {
  int dim = 1;
  std::array<double, 2> extent{1.0, 1.0}; ///< domain lengths per axis
  std::array<int, 2> n{99, 1};            ///< interior node counts per axis
  QuadratureRule quadrature = QuadratureRule::NodeLumped;

  void validate() const;
};

/// Assembled discrete space. The stiffness operator realizes the H^1_0 inner
/// product (3-point stencil in 1D, 5-point in 2D, edge-difference form), and
/// the node-lumped quadrature weight (the cell volume) integrates pointwise
/// nonlinearities. Immutable after build_space; safe to share across threads.
class DiscreteSpace {
public:
  const SpaceConfig& config() const { return config_; }
  int dim() const { return config_.dim; }
  std::size_t size() const { return size_; }
  double spacing(int axis) const { return h_[axis]; }
  /// Quadrature weight of every interior node (uniform mesh: one value).
  double node_weight() const { return weight_; }

  /// out = K u where <K u, v> approximates the Dirichlet form of grad u . grad v.
  void apply_stiffness(const std::vector<double>& u, std::vector<double>& out) const;
  /// u^T K u.
  double stiffness_quadratic(const std::vector<double>& u) const;

  /// Physical coordinate of interior node (i [, j]), 0-based per axis.
  double coord(int axis, int index) const { return h_[axis] * (index + 1); }

private:
  friend DiscreteSpace build_space(const SpaceConfig& config);
  SpaceConfig config_;
  std::array<double, 2> h_{0.0, 0.0};
  double weight_ = 0.0;
  std::size_t size_ = 0;
};

/// One member of the discrete space: interior node coefficients plus a handle
/// to the space they live in. The space must outlive the field.
struct DiscreteField {
  std::vector<double> values;
  const DiscreteSpace* space = nullptr;

  std::size_t size() const { return values.size(); }
};

DiscreteSpace build_space(const SpaceConfig& config);

/// Zero field on a space.
DiscreteField zero_field(const DiscreteSpace& space);
/// Deterministic random field, entries uniform in [-1, 1).
DiscreteField random_field(const DiscreteSpace& space, Rng& rng);
/// Interpolant of the product of first-mode half sines (positive, max 1).
DiscreteField half_sine_field(const DiscreteSpace& space);

// Vector helpers (euclidean coefficient operations).
double dot(const DiscreteField& x, const DiscreteField& y);
void axpy(double alpha, const DiscreteField& x, DiscreteField& y); // y += alpha x
void scale_field(DiscreteField& x, double alpha);

/// (P, Q) = (u^T K u, sum_i w |u_i|^gamma). Throws on the zero field.
FiberScalars fiber_scalars(double gamma, const DiscreteField& u);

/// Norm induced by the stiffness operator, sqrt(u^T K u).
double h1_norm(const DiscreteField& u);

/// Total energy Phi_lambda(u) = (a/2)P + (lambda/4)P^2 - (1/gamma)Q.
double energy(const ProblemParams& params, const DiscreteField& u);

/// Euclidean representation of Phi'_lambda(u):
///   (a + lambda P) K u - w |u|^{gamma-2} u   (componentwise in the second term),
/// so that <gradient(u), v> is the directional derivative of energy at u along v.
DiscreteField gradient(const ProblemParams& params, const DiscreteField& u);

/// Solve coefficient * K v = rhs by conjugate gradients to relative residual
/// <= tol (default 1e-10), iteration cap 10 * unknowns. Throws ConvergenceError
/// at the cap.
DiscreteField solve_shifted_laplacian(const DiscreteSpace& space, double coefficient,
                                      const DiscreteField& rhs, double tol = 1e-10);

/// psi''_{lambda,u}(1) = aP + 3 lambda P^2 - (gamma-1) Q: the N^+/N^0/N^-
/// classifier for a point already on the Nehari set.
double psi_second_at_one(const ProblemParams& params, const DiscreteField& u);

/// Nehari defect psi'_{lambda,u}(1) = aP + lambda P^2 - Q.
double psi_first_at_one(const ProblemParams& params, const DiscreteField& u);

/// H^1_0 norm of the Riesz representative of Phi'_lambda(u), divided by the
/// natural scale (a + lambda P) * |u|: a mesh- and scaling-robust relative
/// measure of how far u is from solving the discrete equation.
double relative_residual(const ProblemParams& params, const DiscreteField& u,
                         double cg_tol = 1e-10);

} // namespace kirchbif

#endif
