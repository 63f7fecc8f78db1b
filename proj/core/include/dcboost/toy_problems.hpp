#pragma once

#include <array>
#include <cstdint>
#include <ostream>
#include <span>
#include <string_view>

#include <Eigen/Core>

#include "dcboost/dc_model.hpp"
#include "dcboost/solver.hpp"

namespace dcboost {

/// sign(t) * max(|t| - 1, 0) / 2, the minimizer of s^2 + |s| - t s.
double soft_threshold_half(double t);

/// g(u,v) = -5/2 u + u^2 + v^2 + |u| + |v|,  h(u,v) = (u^2 + v^2) / 2.
///
/// The nonsmooth g makes d = y - x an ascent direction at y from
/// x0 = (1/2, 1), which is where plain BDCA breaks down.
class QuadL1Problem final : public DcModel {
 public:
  Eigen::Index dim() const override { return 2; }
  double eval_g(const Vector& x) const override;
  double eval_h(const Vector& x) const override;
  Vector grad_h(const Vector& x) const override;
  SubproblemSolution solve_subproblem(const Vector& x) const override;
  double rho() const override { return 1.0; }
};

/// argmin g(.) - <x, .> for QuadL1Problem, in closed form.
Vector quadl1_subproblem(const Vector& x);

// One-dimensional pieces of the separable SCAD-shaped problem.
double scad_g_tilde(double u);
double scad_h_tilde(double u);
double scad_h_tilde_derivative(double u);
double scad_phi_tilde(double u);

/// Unique minimizer of scad_g_tilde(s) - w s.
double scad_subproblem_1d(double w);

/// phi(u, v) = phi~(u) + phi~(v) with a SCAD-like phi~: |u| near zero,
/// concave blend on 1 < |u| < 2, quadratic growth past 2. Critical points in
/// the first quadrant are {0, 2}^2; only the origin is a global minimizer.
class ScadSeparableProblem final : public DcModel {
 public:
  Eigen::Index dim() const override { return 2; }
  double eval_g(const Vector& x) const override;
  double eval_h(const Vector& x) const override;
  Vector grad_h(const Vector& x) const override;
  SubproblemSolution solve_subproblem(const Vector& x) const override;
  double eval_phi(const Vector& x) const override;
  double rho() const override { return 0.4; }
};

enum class Attractor { k22, k02, k20, k00, kOther };
inline constexpr std::array<Attractor, 5> kAllAttractors = {Attractor::k22, Attractor::k02,
                                                            Attractor::k20, Attractor::k00,
                                                            Attractor::kOther};

std::string_view to_string(Attractor a);

/// Nearest of (2,2), (0,2), (2,0), (0,0) when within `radius`, else kOther.
Attractor classify_attractor(const Vector& point, double radius = 1e-3);

struct BasinReport {
  std::array<std::int64_t, 5> counts{};  // indexed by Attractor
  std::int64_t n_points = 0;
  Variant variant = Variant::kIbdca;
  double elapsed = 0.0;

  std::int64_t count(Attractor a) const { return counts[static_cast<std::size_t>(a)]; }
  double fraction(Attractor a) const {
    return n_points > 0 ? static_cast<double>(count(a)) / static_cast<double>(n_points) : 0.0;
  }
};

/// Start point number `index` of the experiment: uniform on [0,3]^2, a pure
/// function of (seed, index).
Vector basin_start_point(std::uint64_t seed, std::uint64_t index);

/// Solves the SCAD problem from each start and tallies the limits. The report
/// does not depend on `threads`.
BasinReport basin_experiment_from_points(std::span<const Eigen::Vector2d> starts,
                                         const SolverConfig& cfg, int threads = 1);

BasinReport basin_experiment(std::int64_t n_points, std::uint64_t seed, const SolverConfig& cfg,
                             int threads = 1);

/// CSV with a leading "# seed=..., ..." comment, then attractor,count rows.
void write_basin_csv(std::ostream& out, const BasinReport& report, std::uint64_t seed);

}  // namespace dcboost
