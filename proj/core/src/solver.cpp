#include "dcboost/solver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <string>

namespace dcboost {

namespace {

// Below this many ulps of phi an Armijo comparison is pure rounding noise.
constexpr double kArmijoResolutionUlps = 64.0;

bool armijo_unresolvable(double decrease, double phi_ref) {
  return decrease < kArmijoResolutionUlps * std::numeric_limits<double>::epsilon() *
                        std::max(1.0, std::abs(phi_ref));
}

LineSearchResult armijo_from_y(const DcModel& model, const Vector& y, const Vector& d, double phi_y,
                               double allowance, const SolverConfig& cfg) {
  const double d2 = d.squaredNorm();
  double lambda = cfg.lambda_bar;
  for (int j = 0; j < cfg.max_backtracks; ++j) {
    const double decrease = cfg.alpha * lambda * d2;
    if (armijo_unresolvable(decrease, phi_y) && armijo_unresolvable(allowance, phi_y)) {
      return {0.0, phi_y, j, true};
    }
    const double phi_trial = model.eval_phi(y + lambda * d);
    if (phi_trial <= phi_y - decrease + allowance) {
      return {lambda, phi_trial, j, false};
    }
    lambda *= cfg.beta;
  }
  return {0.0, phi_y, cfg.max_backtracks, true};
}

}  // namespace

std::string_view to_string(Variant variant) {
  switch (variant) {
    case Variant::kDca:
      return "dca";
    case Variant::kBdca:
      return "bdca";
    case Variant::kNmBdca:
      return "nmbdca";
    case Variant::kIbdca:
      return "ibdca";
  }
  return "unknown";
}

std::optional<Variant> parse_variant(std::string_view name) {
  for (Variant v : {Variant::kDca, Variant::kBdca, Variant::kNmBdca, Variant::kIbdca}) {
    if (name == to_string(v)) return v;
  }
  return std::nullopt;
}

std::string_view to_string(SolveStatus status) {
  switch (status) {
    case SolveStatus::kCriticalPoint:
      return "critical_point";
    case SolveStatus::kRelEnergyConverged:
      return "rel_energy_converged";
    case SolveStatus::kMaxIterations:
      return "max_iterations";
  }
  return "unknown";
}

void SolverConfig::validate() const {
  if (!(alpha > 0.0)) throw std::invalid_argument("alpha must be positive");
  if (!(beta > 0.0 && beta < 1.0)) throw std::invalid_argument("beta must lie in (0, 1)");
  if (!(lambda_bar > 1.0)) throw std::invalid_argument("lambda_bar must exceed 1");
  if (max_outer_iter < 1) throw std::invalid_argument("max_outer_iter must be positive");
  if (max_backtracks < 1) throw std::invalid_argument("max_backtracks must be positive");
  if (!(tol_direction >= 0.0)) throw std::invalid_argument("tol_direction must be nonnegative");
  if (!(tol_rel_energy >= 0.0)) throw std::invalid_argument("tol_rel_energy must be nonnegative");
}

DcaStep dca_step(const DcModel& model, const Vector& x) {
  DcaStep step;
  step.diagnostics = model.solve_subproblem(x);
  step.y = step.diagnostics.point;
  step.d = step.y - x;
  return step;
}

LineSearchResult ibdca_line_search(const DcModel& model, const Vector& x, const Vector& d,
                                   double phi_x, double phi_y, const SolverConfig& cfg) {
  const double d2 = d.squaredNorm();
  double lambda = cfg.lambda_bar;
  int backtracks = 0;
  while (lambda > 1.0) {
    const double phi_trial = model.eval_phi(x + lambda * d);
    if (phi_trial <= phi_x - cfg.alpha * lambda * d2 && phi_trial <= phi_y) {
      return {lambda, phi_trial, backtracks, false};
    }
    lambda *= cfg.beta;
    ++backtracks;
  }
  return {1.0, phi_y, backtracks, false};
}

LineSearchResult bdca_line_search(const DcModel& model, const Vector& y, const Vector& d,
                                  double phi_y, const SolverConfig& cfg) {
  return armijo_from_y(model, y, d, phi_y, 0.0, cfg);
}

double nonmonotone_allowance(double d_norm_sq, int k) { return d_norm_sq / (k + 1.0); }

LineSearchResult nmbdca_line_search(const DcModel& model, const Vector& y, const Vector& d,
                                    double phi_y, int k, const SolverConfig& cfg) {
  return armijo_from_y(model, y, d, phi_y, nonmonotone_allowance(d.squaredNorm(), k), cfg);
}

SolveResult solve(const DcModel& model, const Vector& x0, const SolverConfig& cfg,
                  const IterateCallback& on_iterate) {
  cfg.validate();
  if (x0.size() != model.dim()) {
    throw std::invalid_argument("initial point has dimension " + std::to_string(x0.size()) +
                                ", model expects " + std::to_string(model.dim()));
  }

  using Clock = std::chrono::steady_clock;
  const auto start = Clock::now();
  auto elapsed = [&] { return std::chrono::duration<double>(Clock::now() - start).count(); };

  SolveResult result;
  Vector x = x0;
  double phi_x = model.eval_phi(x);
  if (!std::isfinite(phi_x)) throw std::invalid_argument("initial point is outside dom g");

  auto emit = [&](IterateRecord rec) {
    rec.wall_time = elapsed();
    result.trace.push_back(std::move(rec));
    if (on_iterate) on_iterate(result.trace.back());
  };

  for (int k = 0; k < cfg.max_outer_iter; ++k) {
    DcaStep step;
    try {
      step = dca_step(model, x);
    } catch (const std::exception& e) {
      throw SolverError(std::string("subproblem failed: ") + e.what(),
                        std::numeric_limits<double>::quiet_NaN(), std::move(result.trace));
    }
    const SubproblemSolution& diag = step.diagnostics;
    if (step.y.size() != x.size() || !step.y.allFinite()) {
      throw SolverError("subproblem returned a non-finite point", diag.residual,
                        std::move(result.trace));
    }
    if (!diag.converged && cfg.strict_subproblems) {
      throw SolverError("inner solver did not converge at outer iteration " + std::to_string(k),
                        diag.residual, std::move(result.trace));
    }

    IterateRecord rec;
    rec.k = k;
    rec.x = x;
    rec.phi = phi_x;
    rec.d_norm = step.d.norm();
    rec.inner_iterations = diag.inner_iterations;
    rec.inner_residual = diag.residual;
    rec.inner_converged = diag.converged;

    if (rec.d_norm <= cfg.tol_direction) {
      rec.phi_y = phi_x;
      rec.phi_next = phi_x;
      emit(std::move(rec));
      result.final_point = x;
      result.final_phi = phi_x;
      result.status = SolveStatus::kCriticalPoint;
      return result;
    }

    const double phi_y = model.eval_phi(step.y);
    rec.phi_y = phi_y;

    Vector next;
    double phi_next = phi_y;
    switch (cfg.variant) {
      case Variant::kDca:
        next = step.y;
        rec.lambda = 1.0;
        break;
      case Variant::kIbdca: {
        const LineSearchResult ls = ibdca_line_search(model, x, step.d, phi_x, phi_y, cfg);
        next = ls.lambda == 1.0 ? step.y : Vector(x + ls.lambda * step.d);
        phi_next = ls.phi;
        rec.lambda = ls.lambda;
        rec.backtracks = ls.backtracks;
        break;
      }
      case Variant::kBdca:
      case Variant::kNmBdca: {
        const LineSearchResult ls =
            cfg.variant == Variant::kBdca
                ? bdca_line_search(model, step.y, step.d, phi_y, cfg)
                : nmbdca_line_search(model, step.y, step.d, phi_y, k, cfg);
        // a failed search degrades the step to plain DCA
        next = ls.failed ? step.y : Vector(step.y + ls.lambda * step.d);
        phi_next = ls.phi;
        rec.lambda = ls.lambda;
        rec.backtracks = ls.backtracks;
        rec.line_search_failed = ls.failed;
        break;
      }
    }
    rec.phi_next = phi_next;
    emit(std::move(rec));

    const bool energy_stalled = cfg.tol_rel_energy > 0.0 && phi_x != 0.0 &&
                                std::abs(phi_x - phi_next) / std::abs(phi_x) <= cfg.tol_rel_energy;
    x = std::move(next);
    phi_x = phi_next;
    if (energy_stalled) {
      result.final_point = x;
      result.final_phi = phi_x;
      result.status = SolveStatus::kRelEnergyConverged;
      return result;
    }
  }

  result.final_point = x;
  result.final_phi = phi_x;
  result.status = SolveStatus::kMaxIterations;
  return result;
}

}  // namespace dcboost
