#include "dcboost/tv_cauchy.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace dcboost {

GradientField grad(const ImageGrid& u) {
  const ImageData& a = u.data();
  const Eigen::Index m = a.rows(), n = a.cols();
  GradientField g{ImageData::Zero(m, n), ImageData::Zero(m, n)};
  g.px.leftCols(n - 1) = a.rightCols(n - 1) - a.leftCols(n - 1);
  g.py.topRows(m - 1) = a.bottomRows(m - 1) - a.topRows(m - 1);
  return g;
}

ImageGrid div(const GradientField& p) {
  const Eigen::Index m = p.px.rows(), n = p.px.cols();
  if (p.py.rows() != m || p.py.cols() != n) {
    throw std::invalid_argument("gradient field channels differ in shape");
  }
  ImageData d = ImageData::Zero(m, n);
  d.leftCols(n - 1) += p.px.leftCols(n - 1);
  d.rightCols(n - 1) -= p.px.leftCols(n - 1);
  d.topRows(m - 1) += p.py.topRows(m - 1);
  d.bottomRows(m - 1) -= p.py.topRows(m - 1);
  return ImageGrid(std::move(d));
}

double tv(const ImageGrid& u) {
  const GradientField g = grad(u);
  return (g.px.square() + g.py.square()).sqrt().sum();
}

void PdConfig::validate() const {
  if (max_inner_iter < 1) throw std::invalid_argument("max_inner_iter must be positive");
  if (!(tol_inner > 0.0)) throw std::invalid_argument("tol_inner must be positive");
  if (!(tau0 > 0.0 && sigma0 > 0.0)) throw std::invalid_argument("step sizes must be positive");
  // small slack so tau0 = sigma0 = 1/sqrt(8) passes despite rounding
  if (tau0 * sigma0 * 8.0 > 1.0 + 1e-12) {
    throw std::invalid_argument("step sizes violate tau0 * sigma0 * 8 <= 1");
  }
}

double tv_prox_objective(const ImageGrid& u, const ImageGrid& v, double c) {
  return tv(u) + 0.5 * c * u.data().square().sum() - (u.data() * v.data()).sum();
}

TvProxResult tv_prox(const ImageGrid& v, double c, const PdConfig& cfg) {
  return tv_prox(v, c, cfg, ImageGrid(v.rows(), v.cols(), 0.0));
}

TvProxResult tv_prox(const ImageGrid& v, double c, const PdConfig& cfg, const ImageGrid& init) {
  cfg.validate();
  if (!(c > 0.0)) throw std::invalid_argument("tv_prox requires c > 0");
  if (!v.same_shape(init)) throw std::invalid_argument("warm start shape differs from v");

  const Eigen::Index m = v.rows(), n = v.cols();
  ImageGrid u = init;
  ImageGrid u_bar = init;
  GradientField p{ImageData::Zero(m, n), ImageData::Zero(m, n)};
  double tau = cfg.tau0;
  double sigma = cfg.sigma0;

  TvProxResult out{u, p, 0, 0.0, false};
  for (int it = 1; it <= cfg.max_inner_iter; ++it) {
    // dual ascent, then pointwise projection onto the unit 2-ball
    const GradientField g = grad(u_bar);
    p.px += sigma * g.px;
    p.py += sigma * g.py;
    const ImageData scale = (p.px.square() + p.py.square()).sqrt().max(1.0);
    p.px /= scale;
    p.py /= scale;

    // primal proximal step on (c/2)|u|^2 - <v, u>
    const ImageData u_old = u.data();
    u.data() = (u_old + tau * (div(p).data() + v.data())) / (1.0 + tau * c);

    const double theta = 1.0 / std::sqrt(1.0 + 2.0 * c * tau);
    tau *= theta;
    sigma /= theta;
    u_bar.data() = u.data() + theta * (u.data() - u_old);

    const double change = std::sqrt((u.data() - u_old).square().sum());
    const double norm = std::sqrt(u.data().square().sum());
    out.iterations = it;
    out.residual = change / std::max(norm, 1e-300);
    if (out.residual <= cfg.tol_inner) {
      out.converged = true;
      break;
    }
  }
  out.u = std::move(u);
  out.p = std::move(p);
  return out;
}

// ---------------------------------------------------------------------------
// CauchyModel

CauchyModel::CauchyModel(ImageGrid f, double mu, double gamma, double c, PdConfig inner)
    : f_(std::move(f)), mu_(mu), gamma_(gamma), c_(c), inner_(inner) {
  if (!(mu_ > 0.0)) throw std::invalid_argument("mu must be positive");
  if (!(gamma_ > 0.0)) throw std::invalid_argument("gamma must be positive");
  if (!(c_ > mu_ / (gamma_ * gamma_))) {
    throw std::invalid_argument("c must exceed mu/gamma^2 = " +
                                std::to_string(mu_ / (gamma_ * gamma_)) +
                                " for H to be strongly convex, got c = " + std::to_string(c_));
  }
  inner_.validate();
}

ImageGrid CauchyModel::as_image(const Vector& x) const {
  return ImageGrid::from_vector(x, f_.rows(), f_.cols());
}

double CauchyModel::eval_g(const Vector& x) const {
  return tv(as_image(x)) + 0.5 * c_ * x.squaredNorm();
}

double CauchyModel::eval_h(const Vector& x) const {
  const ImageData r = as_image(x).data() - f_.data();
  return -0.5 * mu_ * (gamma_ * gamma_ + r.square()).log().sum() + 0.5 * c_ * x.squaredNorm();
}

Vector CauchyModel::grad_h(const Vector& x) const {
  return grad_h_cauchy(as_image(x), *this).to_vector();
}

SubproblemSolution CauchyModel::solve_subproblem(const Vector& x) const {
  const ImageGrid u = as_image(x);
  TvProxResult r = tv_prox(grad_h_cauchy(u, *this), c_, inner_, u);
  return {r.u.to_vector(), r.iterations, r.residual, r.converged};
}

double CauchyModel::eval_phi(const Vector& x) const { return energy(as_image(x), *this); }

double energy(const ImageGrid& u, const CauchyModel& model) {
  const ImageGrid& f = model.observation();
  if (!u.same_shape(f)) throw std::invalid_argument("energy: image shape differs from f");
  const double g2 = model.gamma() * model.gamma();
  const ImageData r = u.data() - f.data();
  return tv(u) + 0.5 * model.mu() * (g2 + r.square()).log().sum();
}

ImageGrid grad_h_cauchy(const ImageGrid& u, const CauchyModel& model) {
  const ImageGrid& f = model.observation();
  if (!u.same_shape(f)) throw std::invalid_argument("grad_h: image shape differs from f");
  const double g2 = model.gamma() * model.gamma();
  const ImageData r = u.data() - f.data();
  return ImageGrid(ImageData(-model.mu() * r / (g2 + r.square()) + model.c() * u.data()));
}

CauchyModel make_cauchy_model(ImageGrid f, double mu, double gamma, double c, PdConfig inner) {
  return CauchyModel(std::move(f), mu, gamma, c, inner);
}

}  // namespace dcboost
