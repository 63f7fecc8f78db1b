#include "dcboost/toy_problems.hpp"

#include <array>
#include <cmath>
#include <limits>

namespace dcboost {

double soft_threshold_half(double t) {
  const double shrunk = std::max(std::abs(t) - 1.0, 0.0) / 2.0;
  return t < 0.0 ? -shrunk : shrunk;
}

// ---------------------------------------------------------------------------
// QuadL1Problem

double QuadL1Problem::eval_g(const Vector& x) const {
  const double u = x[0], v = x[1];
  return -2.5 * u + u * u + v * v + std::abs(u) + std::abs(v);
}

double QuadL1Problem::eval_h(const Vector& x) const { return 0.5 * x.squaredNorm(); }

Vector QuadL1Problem::grad_h(const Vector& x) const { return x; }

SubproblemSolution QuadL1Problem::solve_subproblem(const Vector& x) const {
  SubproblemSolution out;
  out.point = quadl1_subproblem(x);
  return out;
}

Vector quadl1_subproblem(const Vector& x) {
  Vector y(2);
  y[0] = soft_threshold_half(2.5 + x[0]);
  y[1] = soft_threshold_half(x[1]);
  return y;
}

// ---------------------------------------------------------------------------
// SCAD pieces

double scad_g_tilde(double u) {
  const double a = std::abs(u);
  const double base = a + u * u / 5.0;
  return a < 2.0 ? base : base + (a - 2.0) * (a - 2.0);
}

// The outer branch is |u| - 3/2 + u^2/5, the continuation that keeps h~ C^1
// across |u| = 2.
double scad_h_tilde(double u) {
  const double a = std::abs(u);
  const double quad = u * u / 5.0;
  if (a <= 1.0) return quad;
  if (a < 2.0) return (a - 1.0) * (a - 1.0) / 2.0 + quad;
  return a - 1.5 + quad;
}

double scad_h_tilde_derivative(double u) {
  const double a = std::abs(u);
  const double sign = u < 0.0 ? -1.0 : 1.0;
  const double quad = 0.4 * u;
  if (a <= 1.0) return quad;
  if (a < 2.0) return sign * (a - 1.0) + quad;
  return sign + quad;
}

double scad_phi_tilde(double u) {
  const double a = std::abs(u);
  if (a <= 1.0) return a;
  if (a < 2.0) return a - (a - 1.0) * (a - 1.0) / 2.0;
  return (a - 2.0) * (a - 2.0) + 1.5;
}

double scad_subproblem_1d(double w) {
  auto objective = [w](double s) { return scad_g_tilde(s) - w * s; };

  // stationary points of each smooth branch, kept only inside their branch
  std::array<double, 7> candidates;
  std::size_t n = 0;
  candidates[n++] = -2.0;
  candidates[n++] = 0.0;
  candidates[n++] = 2.0;
  if (const double s = 2.5 * (w - 1.0); s > 0.0 && s < 2.0) candidates[n++] = s;
  if (const double s = 2.5 * (w + 1.0); s > -2.0 && s < 0.0) candidates[n++] = s;
  if (const double s = (w + 3.0) / 2.4; s >= 2.0) candidates[n++] = s;
  if (const double s = (w - 3.0) / 2.4; s <= -2.0) candidates[n++] = s;

  double best = candidates[0];
  double best_value = objective(best);
  for (std::size_t i = 1; i < n; ++i) {
    const double value = objective(candidates[i]);
    if (value < best_value) {
      best = candidates[i];
      best_value = value;
    }
  }
  return best;
}

// ---------------------------------------------------------------------------
// ScadSeparableProblem

double ScadSeparableProblem::eval_g(const Vector& x) const {
  return scad_g_tilde(x[0]) + scad_g_tilde(x[1]);
}

double ScadSeparableProblem::eval_h(const Vector& x) const {
  return scad_h_tilde(x[0]) + scad_h_tilde(x[1]);
}

Vector ScadSeparableProblem::grad_h(const Vector& x) const {
  Vector g(2);
  g[0] = scad_h_tilde_derivative(x[0]);
  g[1] = scad_h_tilde_derivative(x[1]);
  return g;
}

SubproblemSolution ScadSeparableProblem::solve_subproblem(const Vector& x) const {
  SubproblemSolution out;
  out.point.resize(2);
  out.point[0] = scad_subproblem_1d(scad_h_tilde_derivative(x[0]));
  out.point[1] = scad_subproblem_1d(scad_h_tilde_derivative(x[1]));
  return out;
}

double ScadSeparableProblem::eval_phi(const Vector& x) const {
  return scad_phi_tilde(x[0]) + scad_phi_tilde(x[1]);
}

}  // namespace dcboost
