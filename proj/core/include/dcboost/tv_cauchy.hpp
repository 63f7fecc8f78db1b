#pragma once

#include <cmath>

#include "dcboost/dc_model.hpp"
#include "dcboost/image_grid.hpp"

namespace dcboost {

/// Forward differences; zero on the last column (px) and last row (py).
GradientField grad(const ImageGrid& u);

/// Negative adjoint of grad: <grad u, p> = -<u, div p>.
ImageGrid div(const GradientField& p);

/// Isotropic total variation, sum of sqrt(px^2 + py^2).
double tv(const ImageGrid& u);

/// Settings of the accelerated primal-dual TV-prox solver. The discrete
/// gradient has squared operator norm at most 8, so tau0 * sigma0 * 8 <= 1
/// is required.
struct PdConfig {
  int max_inner_iter = 300;
  double tol_inner = 1e-5;  // relative primal change
  double tau0 = 1.0 / std::sqrt(8.0);
  double sigma0 = 1.0 / std::sqrt(8.0);

  void validate() const;
};

struct TvProxResult {
  ImageGrid u;
  GradientField p;  // final dual iterate
  int iterations = 0;
  double residual = 0.0;  // last relative primal change
  bool converged = false;
};

/// argmin_u TV(u) + (c/2)|u|^2 - <v, u>.
///
/// Solves the saddle problem min_u max_{|p|_{2,inf} <= 1} <grad u, p> +
/// (c/2)|u|^2 - <v, u> with the primal-dual method, using the strong
/// convexity modulus c to shrink tau and grow sigma every iteration. The
/// primal iterate starts from `init` and the dual from zero.
TvProxResult tv_prox(const ImageGrid& v, double c, const PdConfig& cfg, const ImageGrid& init);
TvProxResult tv_prox(const ImageGrid& v, double c, const PdConfig& cfg);

/// TV(u) + (c/2)|u|^2 - <v, u>
double tv_prox_objective(const ImageGrid& u, const ImageGrid& v, double c);

/// Second derivative of t -> -(mu/2) log(gamma^2 + t^2) + (c/2) t^2.
inline double cauchy_h_second_derivative(double t, double mu, double gamma, double c) {
  const double g2 = gamma * gamma;
  const double denom = g2 + t * t;
  return mu * (t * t - g2) / (denom * denom) + c;
}

/// TV-regularized Cauchy-noise restoration as a DC program:
///   E(u) = TV(u) + (mu/2) sum log(gamma^2 + (u - f)^2)
///   G(u) = TV(u) + (c/2)|u|^2
///   H(u) = -(mu/2) sum log(gamma^2 + (u - f)^2) + (c/2)|u|^2
/// H is (c - mu/gamma^2)-strongly convex, so c > mu/gamma^2 is enforced.
/// Points are images flattened row-major.
class CauchyModel final : public DcModel {
 public:
  CauchyModel(ImageGrid f, double mu, double gamma, double c, PdConfig inner = {});

  Eigen::Index dim() const override { return f_.size(); }
  double eval_g(const Vector& x) const override;
  double eval_h(const Vector& x) const override;
  Vector grad_h(const Vector& x) const override;
  SubproblemSolution solve_subproblem(const Vector& x) const override;
  double eval_phi(const Vector& x) const override;
  double rho() const override { return c_ - mu_ / (gamma_ * gamma_); }

  const ImageGrid& observation() const { return f_; }
  double mu() const { return mu_; }
  double gamma() const { return gamma_; }
  double c() const { return c_; }
  const PdConfig& inner() const { return inner_; }

  ImageGrid as_image(const Vector& x) const;

 private:
  ImageGrid f_;
  double mu_;
  double gamma_;
  double c_;
  PdConfig inner_;
};

double energy(const ImageGrid& u, const CauchyModel& model);

/// grad H(u) = -mu (u - f) / (gamma^2 + (u - f)^2) + c u, elementwise.
ImageGrid grad_h_cauchy(const ImageGrid& u, const CauchyModel& model);

CauchyModel make_cauchy_model(ImageGrid f, double mu, double gamma, double c,
                              PdConfig inner = {});

}  // namespace dcboost
