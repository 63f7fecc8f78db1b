#pragma once

#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "dcboost/dc_model.hpp"

namespace dcboost {

enum class Variant { kDca, kBdca, kNmBdca, kIbdca };

std::string_view to_string(Variant variant);
std::optional<Variant> parse_variant(std::string_view name);

struct SolverConfig {
  Variant variant = Variant::kIbdca;
  double alpha = 0.2;        // sufficient-decrease coefficient
  double beta = 0.5;         // backtracking shrink factor, in (0, 1)
  double lambda_bar = 2.0;   // first rung of the step ladder, > 1
  int max_outer_iter = 1000;
  double tol_rel_energy = 0.0;  // <= 0 disables the relative-energy rule
  double tol_direction = 1e-10;
  int max_backtracks = 60;
  // Treat an inner-solver nonconvergence flag as a hard error instead of
  // recording it on the trace.
  bool strict_subproblems = false;

  /// Throws std::invalid_argument when a parameter is outside its domain.
  void validate() const;
};

/// One outer iteration: the iterate x^k, the DCA point y^k, the direction
/// d^k = y^k - x^k and the step taken to reach x^{k+1}.
struct IterateRecord {
  int k = 0;
  Vector x;
  double phi = 0.0;       // phi(x^k)
  double phi_y = 0.0;     // phi(y^k)
  double phi_next = 0.0;  // phi(x^{k+1}); equals phi when the run stops here
  double d_norm = 0.0;
  double lambda = 0.0;
  int backtracks = 0;
  bool line_search_failed = false;
  double wall_time = 0.0;  // seconds since solve() started
  int inner_iterations = 0;
  double inner_residual = 0.0;
  bool inner_converged = true;
};

enum class SolveStatus { kCriticalPoint, kRelEnergyConverged, kMaxIterations };

std::string_view to_string(SolveStatus status);

struct SolveResult {
  Vector final_point;
  double final_phi = 0.0;
  SolveStatus status = SolveStatus::kMaxIterations;
  std::vector<IterateRecord> trace;

  int iterations() const { return static_cast<int>(trace.size()); }
};

/// Raised when a subproblem cannot be solved. Carries the inner residual and
/// the trace recorded up to the failure.
class SolverError : public std::runtime_error {
 public:
  SolverError(const std::string& what, double residual, std::vector<IterateRecord> partial)
      : std::runtime_error(what), residual_(residual), partial_trace_(std::move(partial)) {}

  double residual() const { return residual_; }
  const std::vector<IterateRecord>& partial_trace() const { return partial_trace_; }

 private:
  double residual_;
  std::vector<IterateRecord> partial_trace_;
};

struct DcaStep {
  Vector y;
  Vector d;
  SubproblemSolution diagnostics;
};

/// y = argmin g - <grad h(x), .>, d = y - x.
DcaStep dca_step(const DcModel& model, const Vector& x);

struct LineSearchResult {
  double lambda = 0.0;
  double phi = 0.0;  // phi at the accepted point
  int backtracks = 0;
  bool failed = false;
};

/// Monotone search anchored at x along d = y - x.
///
/// Tries lambda = lambda_bar * beta^j, accepting the first rung with both
///   phi(x + lambda d) <= phi(x) - alpha lambda |d|^2   and
///   phi(x + lambda d) <= phi(y).
/// As soon as a rung falls to <= 1 the step is clamped to exactly 1, which
/// reproduces the plain DCA point y. phi_x and phi_y are the cached values.
LineSearchResult ibdca_line_search(const DcModel& model, const Vector& x, const Vector& d,
                                   double phi_x, double phi_y, const SolverConfig& cfg);

/// Armijo search anchored at y along d. Returns lambda = 0 and failed = true
/// when max_backtracks rungs are exhausted, i.e. d is not a descent
/// direction at y.
LineSearchResult bdca_line_search(const DcModel& model, const Vector& y, const Vector& d,
                                  double phi_y, const SolverConfig& cfg);

/// v_k = |d|^2 / (k + 1)
double nonmonotone_allowance(double d_norm_sq, int k);

/// Armijo search anchored at y with the threshold relaxed by
/// nonmonotone_allowance(|d|^2, k).
LineSearchResult nmbdca_line_search(const DcModel& model, const Vector& y, const Vector& d,
                                    double phi_y, int k, const SolverConfig& cfg);

using IterateCallback = std::function<void(const IterateRecord&)>;

/// Runs the configured variant from x0. on_iterate, when set, sees every
/// trace row as soon as it is produced.
SolveResult solve(const DcModel& model, const Vector& x0, const SolverConfig& cfg,
                  const IterateCallback& on_iterate = {});

}  // namespace dcboost
