#pragma once

#include <Eigen/Core>

namespace dcboost {

using Vector = Eigen::VectorXd;

/// Output of the linearized convex subproblem argmin g(.) - <grad h(x), .>.
/// Analytic models always report converged with zero residual; iterative
/// inner solvers fill in their own diagnostics.
struct SubproblemSolution {
  Vector point;
  int inner_iterations = 0;
  double residual = 0.0;
  bool converged = true;
};

/// A difference-of-convex problem phi = g - h.
///
/// g is proper, lsc and convex (possibly nonsmooth); h is convex and C^1 with
/// locally Lipschitz gradient. Both must be strongly convex with the common
/// modulus rho(). Implementations must be pure: const evaluators with no
/// shared mutable state, so one model can back many concurrent solves.
class DcModel {
 public:
  virtual ~DcModel() = default;

  virtual Eigen::Index dim() const = 0;
  virtual double eval_g(const Vector& x) const = 0;
  virtual double eval_h(const Vector& x) const = 0;
  virtual Vector grad_h(const Vector& x) const = 0;
  virtual SubproblemSolution solve_subproblem(const Vector& x) const = 0;
  virtual double rho() const = 0;

  // Models where g and h share large cancelling terms override this to
  // evaluate phi directly.
  virtual double eval_phi(const Vector& x) const { return eval_g(x) - eval_h(x); }
};

}  // namespace dcboost
