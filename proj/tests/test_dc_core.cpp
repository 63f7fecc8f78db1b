#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <stdexcept>
#include <thread>
#include <vector>

#include "dcboost/solver.hpp"
#include "dcboost/toy_problems.hpp"
#include "oracles.hpp"

namespace dcboost {
namespace {

Vector vec2(double a, double b) {
  Vector v(2);
  v << a, b;
  return v;
}

// phi~ of the SCAD example written out independently of the library.
double scad_phi_oracle_1d(double u) {
  const double a = std::abs(u);
  if (a <= 1.0) return a;
  if (a < 2.0) return a - 0.5 * (a - 1.0) * (a - 1.0);
  return (a - 2.0) * (a - 2.0) + 1.5;
}
double scad_phi_oracle(const Vector& x) { return scad_phi_oracle_1d(x[0]) + scad_phi_oracle_1d(x[1]); }

double quadl1_phi_oracle(const Vector& x) {
  const double u = x[0], v = x[1];
  return -2.5 * u + 0.5 * u * u + 0.5 * v * v + std::abs(u) + std::abs(v);
}

// phi = |x|^2 split as g = 1.5|x|^2, h = 0.5|x|^2.
class SmoothQuadratic final : public DcModel {
 public:
  Eigen::Index dim() const override { return 2; }
  double eval_g(const Vector& x) const override { return 1.5 * x.squaredNorm(); }
  double eval_h(const Vector& x) const override { return 0.5 * x.squaredNorm(); }
  Vector grad_h(const Vector& x) const override { return x; }
  SubproblemSolution solve_subproblem(const Vector& x) const override {
    return {x / 3.0, 0, 0.0, true};
  }
  double rho() const override { return 1.0; }
};

SolverConfig ex35_config(Variant v) {
  SolverConfig cfg;
  cfg.variant = v;
  cfg.alpha = 0.2;
  cfg.lambda_bar = 2.0;
  cfg.beta = 0.5;
  return cfg;
}

SolverConfig ex36_config(Variant v) {
  SolverConfig cfg;
  cfg.variant = v;
  cfg.alpha = 0.2;
  cfg.lambda_bar = 3.0;
  cfg.beta = 0.7;
  return cfg;
}

// ---------------------------------------------------------------------------
// dca_step

TEST(DcaStep, QuadL1FromHalfOne) {
  const QuadL1Problem model;
  const DcaStep s = dca_step(model, vec2(0.5, 1.0));
  EXPECT_NEAR(s.y[0], 1.0, 1e-15);
  EXPECT_NEAR(s.y[1], 0.0, 1e-15);
  EXPECT_NEAR(s.d[0], 0.5, 1e-15);
  EXPECT_NEAR(s.d[1], -1.0, 1e-15);
}

TEST(DcaStep, QuadL1FromOneZero) {
  const QuadL1Problem model;
  const DcaStep s = dca_step(model, vec2(1.0, 0.0));
  EXPECT_NEAR(s.y[0], 1.25, 1e-15);
  EXPECT_NEAR(s.y[1], 0.0, 1e-15);
  EXPECT_NEAR(s.d[0], 0.25, 1e-15);
}

TEST(DcaStep, ScadOriginIsFixedPoint) {
  const ScadSeparableProblem model;
  const DcaStep s = dca_step(model, vec2(0.0, 0.0));
  EXPECT_EQ(s.y[0], 0.0);
  EXPECT_EQ(s.y[1], 0.0);
  EXPECT_EQ(s.d.norm(), 0.0);

  // h~'(0) = 0: the minimizer of g~(u) - 0 * u, found by brute force
  const double w = scad_h_tilde_derivative(0.0);
  const double oracle = testing::grid_argmin_1d(
      [w](double u) { return scad_g_tilde(u) - w * u; }, -4.0, 4.0, 1e-4);
  EXPECT_NEAR(oracle, 0.0, 1e-5);
}

TEST(DcaStep, SufficientDecreaseHoldsOnRandomPoints) {
  const QuadL1Problem quad;
  const ScadSeparableProblem scad;
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> unif(-4.0, 4.0);
  for (int i = 0; i < 2000; ++i) {
    const Vector x = vec2(unif(rng), unif(rng));
    for (const DcModel* m : {static_cast<const DcModel*>(&quad), static_cast<const DcModel*>(&scad)}) {
      const DcaStep s = dca_step(*m, x);
      EXPECT_LE(m->eval_phi(s.y), m->eval_phi(x) - m->rho() * s.d.squaredNorm() + 1e-12);
    }
  }
}

// ---------------------------------------------------------------------------
// ibdca_line_search

TEST(IbdcaLineSearch, AcceptsTwoOnSecondQuadL1Iteration) {
  const QuadL1Problem model;
  const SolverConfig cfg = ex35_config(Variant::kIbdca);
  const Vector x = vec2(1.0, 0.0);
  const DcaStep s = dca_step(model, x);
  const LineSearchResult ls =
      ibdca_line_search(model, x, s.d, model.eval_phi(x), model.eval_phi(s.y), cfg);
  EXPECT_EQ(ls.lambda, 2.0);
  EXPECT_EQ(ls.backtracks, 0);
  const Vector next = x + ls.lambda * s.d;
  EXPECT_NEAR(next[0], 1.5, 1e-15);
  EXPECT_NEAR(next[1], 0.0, 1e-15);
  // -9/8 <= -1 - 2 * 0.2 / 16 and -9/8 <= phi(5/4, 0) = -35/32
  EXPECT_NEAR(ls.phi, -9.0 / 8.0, 1e-15);
  EXPECT_LE(ls.phi, -1.0 - 2.0 * 0.2 / 16.0);
  EXPECT_LE(ls.phi, -35.0 / 32.0);
}

TEST(IbdcaLineSearch, FallsBackToUnitStep) {
  // first QuadL1 iteration: lambda = 2 overshoots in v, next rung is 1
  const QuadL1Problem model;
  const SolverConfig cfg = ex35_config(Variant::kIbdca);
  const Vector x = vec2(0.5, 1.0);
  const DcaStep s = dca_step(model, x);
  const double phi_y = model.eval_phi(s.y);
  const LineSearchResult ls = ibdca_line_search(model, x, s.d, model.eval_phi(x), phi_y, cfg);
  EXPECT_EQ(ls.lambda, 1.0);
  EXPECT_EQ(ls.phi, phi_y);
  EXPECT_EQ(x + ls.lambda * s.d, s.y);
}

TEST(IbdcaLineSearch, ScadLadderMatchesBruteForce) {
  const ScadSeparableProblem model;
  const SolverConfig cfg = ex36_config(Variant::kIbdca);

  for (const Vector& x : {vec2(2.2, 0.4), vec2(2.0 + 1.0 / 30.0, 0.0), vec2(2.7, 1.4)}) {
    const DcaStep s = dca_step(model, x);
    const double phi_x = scad_phi_oracle(x), phi_y = scad_phi_oracle(s.y);
    const double d2 = s.d.squaredNorm();

    // ladder 3, 2.1, 1.47, 1.029, then the clamp to 1
    double expected = 1.0;
    for (double lam : {3.0, 2.1, 1.47, 1.029}) {
      const double trial = scad_phi_oracle(x + lam * s.d);
      if (trial <= phi_x - 0.2 * lam * d2 && trial <= phi_y) {
        expected = lam;
        break;
      }
    }
    const LineSearchResult ls = ibdca_line_search(model, x, s.d, phi_x, phi_y, cfg);
    EXPECT_NEAR(ls.lambda, expected, 1e-12) << "x = " << x.transpose();
    EXPECT_LE(ls.backtracks, 4);
  }
}

TEST(IbdcaLineSearch, ScadFirstIterationIsPlainDca) {
  // all four rungs leave phi above phi(y^0); recorded by hand from the
  // brute-force table above
  const ScadSeparableProblem model;
  const Vector x = vec2(2.2, 0.4);
  const DcaStep s = dca_step(model, x);
  const LineSearchResult ls = ibdca_line_search(model, x, s.d, model.eval_phi(x),
                                                model.eval_phi(s.y), ex36_config(Variant::kIbdca));
  EXPECT_EQ(ls.lambda, 1.0);
  EXPECT_EQ(ls.backtracks, 4);
}

// ---------------------------------------------------------------------------
// bdca / nmbdca line searches

TEST(BdcaLineSearch, AcceptsPositiveStepOnSmoothQuadratic) {
  const SmoothQuadratic model;
  SolverConfig cfg = ex35_config(Variant::kBdca);
  cfg.alpha = 0.05;
  const Vector x = vec2(3.0, 0.0);
  const DcaStep s = dca_step(model, x);
  const LineSearchResult ls = bdca_line_search(model, s.y, s.d, model.eval_phi(s.y), cfg);
  EXPECT_FALSE(ls.failed);
  EXPECT_GT(ls.lambda, 0.0);
}

TEST(BdcaLineSearch, FailsOnAscentDirectionForAnyAlpha) {
  const QuadL1Problem model;
  const Vector y = vec2(1.0, 0.0), d = vec2(0.5, -1.0);
  for (double alpha : {1e-8, 1e-3, 0.2, 1.0, 5.0}) {
    SolverConfig cfg = ex35_config(Variant::kBdca);
    cfg.alpha = alpha;
    const LineSearchResult ls = bdca_line_search(model, y, d, model.eval_phi(y), cfg);
    EXPECT_TRUE(ls.failed) << "alpha = " << alpha;
    EXPECT_EQ(ls.lambda, 0.0);
  }
}

TEST(BdcaLineSearch, ScadSmoothPointAdmitsStep) {
  const ScadSeparableProblem model;
  const SolverConfig cfg = ex36_config(Variant::kBdca);
  // y = (1.3, 2.0833..) lies inside smooth branches of both coordinates
  const Vector x = vec2(1.8, 2.5);
  const DcaStep s = dca_step(model, x);
  ASSERT_GT(std::abs(s.y[0]), 1.0);
  ASSERT_LT(std::abs(s.y[0]), 2.0);
  ASSERT_GT(std::abs(s.y[1]), 2.0);

  // finite-difference slope of phi at y along d is below -alpha |d|^2
  const double t = 1e-7;
  const double slope = (scad_phi_oracle(s.y + t * s.d) - scad_phi_oracle(s.y)) / t;
  EXPECT_LT(slope, -cfg.alpha * s.d.squaredNorm());

  const LineSearchResult ls = bdca_line_search(model, s.y, s.d, model.eval_phi(s.y), cfg);
  EXPECT_FALSE(ls.failed);
  EXPECT_GT(ls.lambda, 0.0);
}

TEST(NmbdcaLineSearch, AllowanceSchedule) {
  EXPECT_DOUBLE_EQ(nonmonotone_allowance(1.0, 0), 1.0);
  EXPECT_NEAR(nonmonotone_allowance(0.04, 9), 0.004, 1e-18);
}

TEST(NmbdcaLineSearch, RelaxedSearchSucceedsWhereBdcaFails) {
  const QuadL1Problem model;
  const SolverConfig cfg = ex35_config(Variant::kNmBdca);
  const Vector y = vec2(1.0, 0.0), d = vec2(0.5, -1.0);
  const double phi_y = quadl1_phi_oracle(y), d2 = d.squaredNorm();

  double expected = 0.0;
  for (double lam = 2.0; lam > 1e-12; lam *= 0.5) {
    if (quadl1_phi_oracle(y + lam * d) <= phi_y - 0.2 * lam * d2 + d2) {
      expected = lam;
      break;
    }
  }
  ASSERT_GT(expected, 0.0);

  const LineSearchResult ls = nmbdca_line_search(model, y, d, phi_y, 0, cfg);
  EXPECT_FALSE(ls.failed);
  EXPECT_EQ(ls.lambda, expected);
}

// ---------------------------------------------------------------------------
// solve

TEST(Solve, IbdcaReproducesQuadL1Iterates) {
  const QuadL1Problem model;
  const SolveResult r = solve(model, vec2(0.5, 1.0), ex35_config(Variant::kIbdca));
  ASSERT_EQ(r.trace.size(), 3u);
  EXPECT_EQ(r.trace[0].x, vec2(0.5, 1.0));
  EXPECT_EQ(r.trace[1].x, vec2(1.0, 0.0));
  EXPECT_NEAR((r.trace[2].x - vec2(1.5, 0.0)).norm(), 0.0, 1e-12);
  EXPECT_EQ(r.trace[0].lambda, 1.0);
  EXPECT_EQ(r.trace[1].lambda, 2.0);
  EXPECT_EQ(r.status, SolveStatus::kCriticalPoint);
  EXPECT_NEAR(r.final_phi, -9.0 / 8.0, 1e-12);
}

TEST(Solve, DcaConvergesSlowerOnQuadL1) {
  const QuadL1Problem model;
  const SolveResult dca = solve(model, vec2(0.5, 1.0), ex35_config(Variant::kDca));
  EXPECT_EQ(dca.status, SolveStatus::kCriticalPoint);
  EXPECT_NEAR((dca.final_point - vec2(1.5, 0.0)).norm(), 0.0, 1e-9);
  EXPECT_GT(dca.iterations(), 3);
}

TEST(Solve, BdcaDegradesToDcaWhenSearchFails) {
  const QuadL1Problem model;
  const SolveResult r = solve(model, vec2(0.5, 1.0), ex35_config(Variant::kBdca));
  ASSERT_FALSE(r.trace.empty());
  EXPECT_TRUE(r.trace[0].line_search_failed);
  EXPECT_EQ(r.trace[0].lambda, 0.0);
  ASSERT_GE(r.trace.size(), 2u);
  EXPECT_EQ(r.trace[1].x, vec2(1.0, 0.0));
  EXPECT_EQ(r.status, SolveStatus::kCriticalPoint);
  EXPECT_NEAR((r.final_point - vec2(1.5, 0.0)).norm(), 0.0, 1e-9);
}

TEST(Solve, IbdcaEscapesScadSaddle) {
  const ScadSeparableProblem model;
  const SolveResult r = solve(model, vec2(2.2, 0.4), ex36_config(Variant::kIbdca));
  EXPECT_EQ(r.status, SolveStatus::kCriticalPoint);
  EXPECT_LT(r.final_point.norm(), 1e-6);
}

TEST(Solve, DcaStallsAtScadSaddle) {
  const ScadSeparableProblem model;
  const SolveResult r = solve(model, vec2(2.2, 0.4), ex36_config(Variant::kDca));
  EXPECT_EQ(r.status, SolveStatus::kCriticalPoint);
  EXPECT_LT((r.final_point - vec2(2.0, 0.0)).norm(), 1e-6);
}

TEST(Solve, CriticalStartStopsImmediately) {
  const QuadL1Problem quad;
  const SolveResult r = solve(quad, vec2(1.5, 0.0), ex35_config(Variant::kIbdca));
  EXPECT_EQ(r.status, SolveStatus::kCriticalPoint);
  ASSERT_EQ(r.trace.size(), 1u);
  EXPECT_EQ(r.trace[0].d_norm, 0.0);

  const ScadSeparableProblem scad;
  const SolveResult s = solve(scad, vec2(0.0, 0.0), ex36_config(Variant::kDca));
  EXPECT_EQ(s.trace.size(), 1u);
}

TEST(Solve, RelativeEnergyRuleStops) {
  const QuadL1Problem model;
  SolverConfig cfg = ex35_config(Variant::kDca);
  cfg.tol_rel_energy = 1e-2;
  cfg.tol_direction = 0.0;
  const SolveResult r = solve(model, vec2(0.5, 1.0), cfg);
  EXPECT_EQ(r.status, SolveStatus::kRelEnergyConverged);
  const IterateRecord& last = r.trace.back();
  EXPECT_LE(std::abs(last.phi - last.phi_next) / std::abs(last.phi), 1e-2);
  EXPECT_EQ(r.final_phi, last.phi_next);
}

TEST(Solve, MaxIterationsStatus) {
  const QuadL1Problem model;
  SolverConfig cfg = ex35_config(Variant::kDca);
  cfg.max_outer_iter = 2;
  const SolveResult r = solve(model, vec2(0.5, 1.0), cfg);
  EXPECT_EQ(r.status, SolveStatus::kMaxIterations);
  EXPECT_EQ(r.trace.size(), 2u);
}

TEST(Solve, CallbackSeesEveryRow) {
  const QuadL1Problem model;
  int seen = 0;
  const SolveResult r = solve(model, vec2(0.5, 1.0), ex35_config(Variant::kDca),
                              [&](const IterateRecord& rec) { EXPECT_EQ(rec.k, seen++); });
  EXPECT_EQ(seen, r.iterations());
}

TEST(Solve, RejectsBadInput) {
  const QuadL1Problem model;
  SolverConfig cfg;
  cfg.beta = 1.0;
  EXPECT_THROW(solve(model, vec2(0, 0), cfg), std::invalid_argument);
  cfg = SolverConfig{};
  cfg.lambda_bar = 1.0;
  EXPECT_THROW(solve(model, vec2(0, 0), cfg), std::invalid_argument);
  cfg = SolverConfig{};
  cfg.alpha = 0.0;
  EXPECT_THROW(solve(model, vec2(0, 0), cfg), std::invalid_argument);
  EXPECT_THROW(solve(model, Vector::Zero(3), SolverConfig{}), std::invalid_argument);
}

class FlakyModel final : public DcModel {
 public:
  explicit FlakyModel(bool throw_after_first) : throw_(throw_after_first) {}
  Eigen::Index dim() const override { return 2; }
  double eval_g(const Vector& x) const override { return x.squaredNorm(); }
  double eval_h(const Vector&) const override { return 0.0; }
  Vector grad_h(const Vector& x) const override { return Vector::Zero(x.size()); }
  SubproblemSolution solve_subproblem(const Vector& x) const override {
    if (throw_ && x.norm() < 1.0) throw std::runtime_error("inner blow-up");
    return {x / 2.0, 7, 0.25, false};
  }
  double rho() const override { return 1.0; }

 private:
  bool throw_;
};

TEST(Solve, SubproblemFailureCarriesPartialTrace) {
  const FlakyModel model(true);
  SolverConfig cfg;
  cfg.variant = Variant::kDca;
  try {
    solve(model, vec2(1.5, 0.0), cfg);
    FAIL() << "expected SolverError";
  } catch (const SolverError& e) {
    EXPECT_EQ(e.partial_trace().size(), 1u);
  }
}

TEST(Solve, InnerNonconvergenceIsFlaggedOrFatal) {
  const FlakyModel model(false);
  SolverConfig cfg;
  cfg.variant = Variant::kDca;
  cfg.max_outer_iter = 3;
  const SolveResult r = solve(model, vec2(1.0, 1.0), cfg);
  EXPECT_FALSE(r.trace[0].inner_converged);
  EXPECT_EQ(r.trace[0].inner_iterations, 7);

  cfg.strict_subproblems = true;
  try {
    solve(model, vec2(1.0, 1.0), cfg);
    FAIL() << "expected SolverError";
  } catch (const SolverError& e) {
    EXPECT_EQ(e.residual(), 0.25);
    EXPECT_TRUE(e.partial_trace().empty());
  }
}

TEST(Variant, NamesRoundTrip) {
  for (Variant v : {Variant::kDca, Variant::kBdca, Variant::kNmBdca, Variant::kIbdca}) {
    EXPECT_EQ(parse_variant(to_string(v)), v);
  }
  EXPECT_FALSE(parse_variant("newton").has_value());
}

// ---------------------------------------------------------------------------
// Trace invariants over random starts

struct TraceCase {
  const DcModel* model;
  SolverConfig cfg;
};

// subgradient test for grad h(x*) in dg(x*) on the toy models
bool quadl1_critical(const Vector& x, double tol) {
  auto ok = [tol](double lin, double coord, double smooth) {
    // need lin - smooth in d|.|(coord)
    const double r = lin - smooth;
    if (std::abs(coord) > tol) return std::abs(r - (coord > 0 ? 1.0 : -1.0)) <= tol;
    return std::abs(r) <= 1.0 + tol;
  };
  return ok(x[0], x[0], -2.5 + 2.0 * x[0]) && ok(x[1], x[1], 2.0 * x[1]);
}

bool scad_critical_1d(double u, double tol) {
  const double w = scad_h_tilde_derivative(u);
  const double a = std::abs(u);
  if (a <= tol) return std::abs(w) <= 1.0 + tol;
  const double s = u > 0 ? 1.0 : -1.0;
  const double dg = a < 2.0 ? s + 0.4 * u : s + 2.0 * (a - 2.0) * s + 0.4 * u;
  return std::abs(w - dg) <= tol;
}

TEST(TraceInvariants, RandomStartsAllVariants) {
  const QuadL1Problem quad;
  const ScadSeparableProblem scad;
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> unif(-3.0, 3.0);

  for (Variant v : {Variant::kDca, Variant::kBdca, Variant::kNmBdca, Variant::kIbdca}) {
    for (const DcModel* model : {static_cast<const DcModel*>(&quad), static_cast<const DcModel*>(&scad)}) {
      SolverConfig cfg = model == &quad ? ex35_config(v) : ex36_config(v);
      for (int trial = 0; trial < 200; ++trial) {
        const Vector x0 = vec2(unif(rng), unif(rng));
        const SolveResult r = solve(*model, x0, cfg);
        ASSERT_EQ(r.status, SolveStatus::kCriticalPoint)
            << to_string(v) << (model == &quad ? " quad" : " scad") << " from " << x0.transpose()
            << " ended at " << r.final_point.transpose() << " after " << r.iterations();
        const double rho = model->rho();

        double sum_d2 = 0.0, min_phi = r.trace.front().phi;
        for (const IterateRecord& rec : r.trace) {
          const double d2 = rec.d_norm * rec.d_norm;
          sum_d2 += d2;
          min_phi = std::min(min_phi, rec.phi_next);
          if (rec.d_norm <= cfg.tol_direction) continue;

          EXPECT_LE(rec.phi_y, rec.phi - rho * d2 + 1e-12);
          switch (v) {
            case Variant::kDca:
              EXPECT_LE(rec.phi_next, rec.phi - rho * d2 + 1e-12);
              break;
            case Variant::kIbdca:
              EXPECT_GE(rec.lambda, 1.0);
              EXPECT_LE(rec.lambda, cfg.lambda_bar);
              EXPECT_LE(rec.phi_next, rec.phi - cfg.alpha * rec.lambda * d2 + 1e-12);
              EXPECT_LE(rec.phi_next, rec.phi_y);
              break;
            case Variant::kNmBdca:
              EXPECT_LE(rec.phi_next,
                        rec.phi_y - cfg.alpha * rec.lambda * d2 + nonmonotone_allowance(d2, rec.k) + 1e-12);
              break;
            case Variant::kBdca:
              EXPECT_LE(rec.phi_next, rec.phi_y + 1e-12);
              break;
          }

          // d^k is a descent direction at x^k with slope <= -rho |d|
          // (unit direction; skipped once |d| is below what a difference quotient resolves)
          const DcaStep s = dca_step(*model, rec.x);
          const double dn = s.d.norm();
          if (0.5 * rho * dn > 1e-6) {
            const double t = 1e-7;
            const double slope = (model->eval_phi(rec.x + t * s.d / dn) - rec.phi) / t;
            EXPECT_LE(slope, -0.5 * rho * dn) << to_string(v) << " k=" << rec.k;
          }
        }
        if (v == Variant::kDca || v == Variant::kIbdca) {
          EXPECT_LE(sum_d2, (r.trace.front().phi - min_phi) / rho + 1e-9);
        }
        const bool critical = model == &quad
                                  ? quadl1_critical(r.final_point, 1e-8)
                                  : scad_critical_1d(r.final_point[0], 1e-8) &&
                                        scad_critical_1d(r.final_point[1], 1e-8);
        EXPECT_TRUE(critical) << to_string(v) << " stopped at " << r.final_point.transpose();
      }
    }
  }
}

TEST(TraceInvariants, ConcurrentSolvesMatchSequential) {
  const ScadSeparableProblem model;
  const SolverConfig cfg = ex36_config(Variant::kIbdca);
  std::vector<Vector> starts;
  for (int i = 0; i < 64; ++i) starts.push_back(basin_start_point(3, i));

  std::vector<Vector> sequential;
  for (const Vector& x0 : starts) sequential.push_back(solve(model, x0, cfg).final_point);

  std::vector<Vector> parallel(starts.size());
  {
    std::vector<std::jthread> pool;
    for (int w = 0; w < 4; ++w) {
      pool.emplace_back([&, w] {
        for (std::size_t i = w; i < starts.size(); i += 4) {
          parallel[i] = solve(model, starts[i], cfg).final_point;
        }
      });
    }
  }
  for (std::size_t i = 0; i < starts.size(); ++i) EXPECT_EQ(parallel[i], sequential[i]);
}

}  // namespace
}  // namespace dcboost
