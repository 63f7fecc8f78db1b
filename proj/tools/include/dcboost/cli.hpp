#pragma once

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

#include "dcboost/image_grid.hpp"
#include "dcboost/solver.hpp"
#include "dcboost/tv_cauchy.hpp"

namespace dcboost::cli {

enum ExitCode : int { kSuccess = 0, kNumericalFailure = 1, kUsageError = 2 };

/// Parameters of a denoising run with every default resolved.
struct DenoiseParams {
  double gamma = 3.0;
  double mu = 15.0;
  double c = 1.83;
  SolverConfig solver;
  PdConfig inner;
};

/// Defaults from the restoration experiments: mu = 15 at gamma = 3, 20 at
/// gamma = 5; c = 1.83 / 1.10 for those pairs and 1.1 mu / gamma^2 otherwise;
/// alpha = 0.9 rho, beta = 0.5, lambda_bar = 10 (9 for the Armijo variants),
/// 200 outer iterations, relative energy tolerance 5e-4.
/// Negative mu / c / alpha / lambda_bar mean "use the default".
DenoiseParams resolve_denoise_params(double gamma, Variant variant, double mu = -1.0,
                                     double c = -1.0, double alpha = -1.0,
                                     double lambda_bar = -1.0);

/// Cauchy noise on top of `clean`, quantized to 8 bits exactly as it would be
/// stored in a PGM file.
ImageGrid synthesize_observation(const ImageGrid& clean, double gamma, std::uint64_t seed);

/// Entry point shared by the executable and the tests. args excludes the
/// program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace dcboost::cli
