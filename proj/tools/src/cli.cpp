#include "dcboost/cli.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <optional>
#include <sstream>
#include <stdexcept>

#include <CLI11.hpp>
#include <json.hpp>

#include "dcboost/imaging.hpp"
#include "dcboost/toy_problems.hpp"
#include "dcboost/trace_io.hpp"

namespace dcboost::cli {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

Variant variant_from_flag(const std::string& name) {
  const auto v = parse_variant(name);
  if (!v) throw UsageError("unknown variant '" + name + "' (dca, bdca, nmbdca, ibdca)");
  return *v;
}

bool is_armijo_variant(Variant v) { return v == Variant::kBdca || v == Variant::kNmBdca; }

Eigen::Vector2d parse_pair(const std::string& text, const char* flag) {
  const auto comma = text.find(',');
  if (comma == std::string::npos) {
    throw UsageError(std::string(flag) + " expects two comma-separated numbers, got '" + text + "'");
  }
  try {
    std::size_t used0 = 0, used1 = 0;
    const std::string a = text.substr(0, comma), b = text.substr(comma + 1);
    const double x = std::stod(a, &used0), y = std::stod(b, &used1);
    if (used0 != a.size() || used1 != b.size() || !std::isfinite(x) || !std::isfinite(y)) {
      throw std::invalid_argument(text);
    }
    return {x, y};
  } catch (const std::logic_error&) {
    throw UsageError(std::string(flag) + " expects two comma-separated numbers, got '" + text + "'");
  }
}

// JSON has no infinities; non-finite reals go out as strings.
json real_json(double value) {
  if (std::isfinite(value)) return value;
  return format_real(value);
}

json solver_json(const SolverConfig& cfg) {
  return {{"variant", to_string(cfg.variant)},
          {"alpha", cfg.alpha},
          {"beta", cfg.beta},
          {"lambda_bar", cfg.lambda_bar},
          {"max_outer_iter", cfg.max_outer_iter},
          {"tol_rel_energy", cfg.tol_rel_energy},
          {"tol_direction", cfg.tol_direction},
          {"max_backtracks", cfg.max_backtracks}};
}

fs::path prepare_out_dir(const std::string& dir) {
  const fs::path path(dir);
  std::error_code ec;
  fs::create_directories(path, ec);
  if (!fs::is_directory(path)) throw UsageError("cannot create output directory " + dir);
  return path;
}

void write_json(const fs::path& path, const json& doc) {
  std::ofstream out(path);
  out << doc.dump(2) << '\n';
  if (!out) throw std::runtime_error("cannot write " + path.string());
}

std::ofstream open_output(const fs::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  return out;
}

std::string point_text(const Vector& x) {
  std::ostringstream s;
  s << '(';
  for (Eigen::Index i = 0; i < x.size(); ++i) s << (i ? ", " : "") << format_real(x[i]);
  s << ')';
  return s.str();
}

// ---------------------------------------------------------------------------
// toy

struct ToyOptions {
  std::string example = "quadl1";
  std::string variant = "ibdca";
  std::string x0;
  double alpha = -1.0;
  double beta = -1.0;
  double lambda_bar = -1.0;
  int max_iter = 1000;
  double tol = 0.0;
  double tol_direction = 1e-10;
  std::string out = ".";
};

int run_toy(const ToyOptions& opt, const std::vector<std::string>& args, std::ostream& out) {
  const bool quad = opt.example == "quadl1";
  if (!quad && opt.example != "scad") {
    throw UsageError("unknown example '" + opt.example + "' (quadl1, scad)");
  }
  SolverConfig cfg;
  cfg.variant = variant_from_flag(opt.variant);
  cfg.alpha = opt.alpha > 0 ? opt.alpha : 0.2;
  cfg.beta = opt.beta > 0 ? opt.beta : (quad ? 0.5 : 0.7);
  const double lambda_bar = quad ? 2.0 : 3.0;
  cfg.lambda_bar = opt.lambda_bar > 0 ? opt.lambda_bar
                                      : (cfg.variant == Variant::kNmBdca ? lambda_bar - 1.0 : lambda_bar);
  cfg.max_outer_iter = opt.max_iter;
  cfg.tol_rel_energy = opt.tol;
  cfg.tol_direction = opt.tol_direction;
  try {
    cfg.validate();
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  const Eigen::Vector2d start =
      parse_pair(opt.x0.empty() ? (quad ? "0.5,1" : "2.2,0.4") : opt.x0, "--x0");

  const fs::path dir = prepare_out_dir(opt.out);
  const fs::path trace_path = dir / "trace.csv";
  json manifest = {{"command", "toy"},
                   {"args", args},
                   {"example", opt.example},
                   {"x0", {start[0], start[1]}},
                   {"solver", solver_json(cfg)},
                   {"outputs", {{"trace", trace_path.string()}}}};
  write_json(dir / "manifest.json", manifest);

  const QuadL1Problem quadl1;
  const ScadSeparableProblem scad;
  const DcModel& model = quad ? static_cast<const DcModel&>(quadl1) : scad;

  std::ofstream trace_file = open_output(trace_path);
  TraceCsvWriter writer(trace_file);
  const SolveResult r = solve(model, Vector(start), cfg, [&](const IterateRecord& rec) { writer.write(rec); });

  out << "final point: " << point_text(r.final_point) << '\n'
      << "phi: " << format_real(r.final_phi) << '\n'
      << "iterations: " << r.iterations() << '\n'
      << "status: " << to_string(r.status) << '\n';
  return r.status == SolveStatus::kMaxIterations ? kNumericalFailure : kSuccess;
}

// ---------------------------------------------------------------------------
// basin

struct BasinOptions {
  std::int64_t n = 10000;
  std::uint64_t seed = 0;
  std::string variant = "ibdca";
  int threads = 1;
  double alpha = 0.2;
  double beta = 0.7;
  double lambda_bar = -1.0;
  std::vector<std::string> starts;
  std::string out = ".";
};

int run_basin(const BasinOptions& opt, const std::vector<std::string>& args, std::ostream& out) {
  SolverConfig cfg;
  cfg.variant = variant_from_flag(opt.variant);
  cfg.alpha = opt.alpha;
  cfg.beta = opt.beta;
  cfg.lambda_bar = opt.lambda_bar > 0 ? opt.lambda_bar : (cfg.variant == Variant::kNmBdca ? 2.0 : 3.0);
  try {
    cfg.validate();
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  if (opt.threads < 1) throw UsageError("--threads must be at least 1");
  if (opt.starts.empty() && opt.n < 1) throw UsageError("--n must be at least 1");

  std::vector<Eigen::Vector2d> explicit_starts;
  for (const std::string& s : opt.starts) explicit_starts.push_back(parse_pair(s, "--start"));

  const fs::path dir = prepare_out_dir(opt.out);
  const fs::path csv_path = dir / "basin.csv";
  json manifest = {{"command", "basin"},
                   {"args", args},
                   {"n", explicit_starts.empty() ? opt.n : static_cast<std::int64_t>(explicit_starts.size())},
                   {"seed", opt.seed},
                   {"threads", opt.threads},
                   {"solver", solver_json(cfg)},
                   {"outputs", {{"basin", csv_path.string()}}}};
  if (!explicit_starts.empty()) {
    json pts = json::array();
    for (const auto& p : explicit_starts) pts.push_back({p[0], p[1]});
    manifest["starts"] = pts;
  }
  write_json(dir / "manifest.json", manifest);

  const BasinReport report = explicit_starts.empty()
                                 ? basin_experiment(opt.n, opt.seed, cfg, opt.threads)
                                 : basin_experiment_from_points(explicit_starts, cfg, opt.threads);
  std::ofstream csv = open_output(csv_path);
  write_basin_csv(csv, report, opt.seed);

  out << "variant: " << to_string(cfg.variant) << ", points: " << report.n_points << '\n';
  for (Attractor a : kAllAttractors) {
    out << "  " << to_string(a) << ": " << report.count(a) << " (" << format_real(report.fraction(a))
        << ")\n";
  }
  out << "elapsed: " << report.elapsed << " s\n";
  return kSuccess;
}

// ---------------------------------------------------------------------------
// denoise

struct DenoiseOptions {
  std::string input;
  std::string clean;
  bool synthetic = false;
  bool add_noise = false;
  int size = 64;
  double gamma = 3.0;
  double mu = -1.0;
  double c = -1.0;
  std::uint64_t seed = 0;
  std::string variant = "ibdca";
  double alpha = -1.0;
  double beta = 0.5;
  double lambda_bar = -1.0;
  int max_iter = 200;
  double tol = 5e-4;
  double tol_direction = 1e-6;
  int inner_iter = 300;
  double inner_tol = 1e-5;
  std::string out = ".";
};

int run_denoise(const DenoiseOptions& opt, const std::vector<std::string>& args, std::ostream& out,
                std::ostream& err) {
  if (opt.synthetic == !opt.input.empty()) throw UsageError("give exactly one of --input or --synthetic");
  if (opt.add_noise && opt.input.empty()) throw UsageError("--add-noise needs --input");
  if (!opt.clean.empty() && (opt.synthetic || opt.add_noise)) {
    throw UsageError("--clean only applies to an already noisy --input");
  }
  if (!(opt.gamma > 0.0)) throw UsageError("--gamma must be positive");

  DenoiseParams params;
  try {
    params = resolve_denoise_params(opt.gamma, variant_from_flag(opt.variant), opt.mu, opt.c,
                                    opt.alpha, opt.lambda_bar);
    params.solver.beta = opt.beta;
    params.solver.max_outer_iter = opt.max_iter;
    params.solver.tol_rel_energy = opt.tol;
    params.solver.tol_direction = opt.tol_direction;
    params.inner.max_inner_iter = opt.inner_iter;
    params.inner.tol_inner = opt.inner_tol;
    params.solver.validate();
    params.inner.validate();
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }

  std::optional<ImageGrid> clean;
  std::optional<ImageGrid> observed;
  try {
    if (opt.synthetic) {
      clean = make_squares_image(opt.size, opt.size);
    } else if (opt.add_noise) {
      clean = read_pgm(fs::path(opt.input));
    } else {
      observed = read_pgm(fs::path(opt.input));
      if (!opt.clean.empty()) clean = read_pgm(fs::path(opt.clean));
    }
  } catch (const PgmError& e) {
    throw UsageError(e.what());
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  if (!observed) observed = synthesize_observation(*clean, opt.gamma, opt.seed);
  if (clean && !clean->same_shape(*observed)) throw UsageError("--clean image shape differs from --input");

  const CauchyModel model(*observed, params.mu, params.gamma, params.c, params.inner);

  const fs::path dir = prepare_out_dir(opt.out);
  json outputs = {{"restored", (dir / "restored.pgm").string()},
                  {"trace", (dir / "trace.csv").string()},
                  {"metrics", (dir / "metrics.json").string()}};
  if (opt.synthetic || opt.add_noise) {
    outputs["clean"] = (dir / "clean.pgm").string();
    outputs["noisy"] = (dir / "noisy.pgm").string();
  }
  json manifest = {{"command", "denoise"},
                   {"args", args},
                   {"source", opt.synthetic ? "synthetic" : opt.input},
                   {"rows", observed->rows()},
                   {"cols", observed->cols()},
                   {"noise", opt.synthetic || opt.add_noise ? json{{"gamma", opt.gamma}, {"seed", opt.seed}}
                                                            : json(nullptr)},
                   {"model",
                    {{"gamma", params.gamma}, {"mu", params.mu}, {"c", params.c}, {"rho", model.rho()}}},
                   {"solver", solver_json(params.solver)},
                   {"inner", {{"max_inner_iter", params.inner.max_inner_iter},
                              {"tol_inner", params.inner.tol_inner},
                              {"tau0", params.inner.tau0},
                              {"sigma0", params.inner.sigma0}}},
                   {"outputs", outputs}};
  write_json(dir / "manifest.json", manifest);
  if (outputs.contains("clean")) {
    write_pgm(dir / "clean.pgm", *clean);
    write_pgm(dir / "noisy.pgm", *observed);
  }

  const double nan = std::numeric_limits<double>::quiet_NaN();
  std::ofstream trace_file = open_output(dir / "trace.csv");
  TraceCsvWriter writer(trace_file, {"energy", "psnr", "inner_iters", "inner_resid"});
  const auto on_iterate = [&](const IterateRecord& rec) {
    const double q = clean ? psnr(model.as_image(rec.x), *clean) : nan;
    writer.write(rec, {rec.phi, q, static_cast<double>(rec.inner_iterations), rec.inner_residual});
  };

  SolveResult result;
  try {
    result = solve(model, observed->to_vector(), params.solver, on_iterate);
  } catch (const SolverError& e) {
    err << "error: " << e.what() << '\n';
    return kNumericalFailure;
  }

  const ImageGrid restored = model.as_image(result.final_point);
  write_pgm(dir / "restored.pgm", restored);

  const IterateRecord& last = result.trace.back();
  json metrics = {{"status", to_string(result.status)},
                  {"iterations", result.iterations()},
                  {"final_energy", result.final_phi},
                  {"wall_time_s", last.wall_time},
                  {"final_inner_converged", last.inner_converged}};
  out << "variant: " << to_string(params.solver.variant) << ", iterations: " << result.iterations()
      << ", status: " << to_string(result.status) << '\n'
      << "energy: " << format_real(result.final_phi) << '\n';
  if (clean) {
    metrics["psnr_noisy"] = real_json(psnr(*observed, *clean));
    metrics["psnr_restored"] = real_json(psnr(restored, *clean));
    metrics["re_err_noisy"] = re_err(*observed, *clean);
    metrics["re_err_restored"] = re_err(restored, *clean);
    out << "psnr noisy: " << format_real(psnr(*observed, *clean))
        << ", restored: " << format_real(psnr(restored, *clean)) << '\n'
        << "re_err noisy: " << format_real(re_err(*observed, *clean))
        << ", restored: " << format_real(re_err(restored, *clean)) << '\n';
  }
  write_json(dir / "metrics.json", metrics);

  if (!last.inner_converged) {
    err << "error: inner TV solver did not reach its tolerance at the final iterate (residual "
        << format_real(last.inner_residual) << ")\n";
    return kNumericalFailure;
  }
  return kSuccess;
}

// ---------------------------------------------------------------------------
// metrics

struct MetricsOptions {
  std::string a;
  std::string b;
  std::string out = ".";
};

int run_metrics(const MetricsOptions& opt, const std::vector<std::string>& args, std::ostream& out) {
  ImageGrid a(2, 2), b(2, 2);
  try {
    a = read_pgm(fs::path(opt.a));
    b = read_pgm(fs::path(opt.b));
  } catch (const PgmError& e) {
    throw UsageError(e.what());
  }
  if (!a.same_shape(b)) {
    throw UsageError("image shapes differ: " + std::to_string(a.rows()) + "x" + std::to_string(a.cols()) +
                     " vs " + std::to_string(b.rows()) + "x" + std::to_string(b.cols()));
  }
  const double p = psnr(a, b);
  double r = 0.0;
  try {
    r = re_err(a, b);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  const fs::path dir = prepare_out_dir(opt.out);
  write_json(dir / "manifest.json", {{"command", "metrics"},
                                     {"args", args},
                                     {"a", opt.a},
                                     {"b", opt.b},
                                     {"psnr", real_json(p)},
                                     {"re_err", r}});
  out << "psnr: " << format_real(p) << '\n' << "re_err: " << format_real(r) << '\n';
  return kSuccess;
}

}  // namespace

DenoiseParams resolve_denoise_params(double gamma, Variant variant, double mu, double c, double alpha,
                                     double lambda_bar) {
  if (!(gamma > 0.0)) throw std::invalid_argument("gamma must be positive");
  DenoiseParams p;
  p.gamma = gamma;
  p.mu = mu > 0 ? mu : (gamma == 5.0 ? 20.0 : 15.0);
  if (c > 0) {
    p.c = c;
  } else if (gamma == 3.0 && p.mu == 15.0) {
    p.c = 1.83;
  } else if (gamma == 5.0 && p.mu == 20.0) {
    p.c = 1.10;
  } else {
    p.c = 1.1 * p.mu / (gamma * gamma);
  }
  const double rho = p.c - p.mu / (gamma * gamma);
  if (!(rho > 0.0)) {
    throw std::invalid_argument("c must exceed mu/gamma^2 = " + format_real(p.mu / (gamma * gamma)));
  }
  p.solver.variant = variant;
  p.solver.alpha = alpha > 0 ? alpha : 0.9 * rho;
  p.solver.beta = 0.5;
  p.solver.lambda_bar = lambda_bar > 0 ? lambda_bar : (is_armijo_variant(variant) ? 9.0 : 10.0);
  p.solver.max_outer_iter = 200;
  p.solver.tol_rel_energy = 5e-4;
  p.solver.tol_direction = 1e-6;
  return p;
}

ImageGrid synthesize_observation(const ImageGrid& clean, double gamma, std::uint64_t seed) {
  ImageGrid f = add_cauchy_noise(clean, {gamma, seed, true});
  f.data() = f.data().unaryExpr([](double v) { return std::nearbyint(std::clamp(v, 0.0, 255.0)); });
  return f;
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Boosted DC algorithms: toy examples, basin experiment, Cauchy-noise TV denoising"};
  app.require_subcommand(1);

  ToyOptions toy;
  CLI::App* toy_cmd = app.add_subcommand("toy", "Run a solver variant on a two-dimensional example");
  toy_cmd->add_option("--example", toy.example, "quadl1 or scad")->capture_default_str();
  toy_cmd->add_option("--variant", toy.variant, "dca, bdca, nmbdca or ibdca")->capture_default_str();
  toy_cmd->add_option("--x0", toy.x0, "start point a,b (default 0.5,1 for quadl1, 2.2,0.4 for scad)");
  toy_cmd->add_option("--alpha", toy.alpha, "sufficient-decrease coefficient (default 0.2)");
  toy_cmd->add_option("--beta", toy.beta, "backtracking factor (default 0.5 quadl1, 0.7 scad)");
  toy_cmd->add_option("--lambda-bar", toy.lambda_bar,
                      "initial step (default 2 quadl1, 3 scad; one less for nmbdca)");
  toy_cmd->add_option("--max-iter", toy.max_iter)->capture_default_str();
  toy_cmd->add_option("--tol", toy.tol, "relative energy tolerance, 0 disables")->capture_default_str();
  toy_cmd->add_option("--tol-direction", toy.tol_direction)->capture_default_str();
  toy_cmd->add_option("--out", toy.out, "output directory")->capture_default_str();

  BasinOptions basin;
  CLI::App* basin_cmd = app.add_subcommand("basin", "Count SCAD-example limits over random starts in [0,3]^2");
  basin_cmd->add_option("--n", basin.n, "number of start points")->capture_default_str();
  basin_cmd->add_option("--seed", basin.seed)->capture_default_str();
  basin_cmd->add_option("--variant", basin.variant)->capture_default_str();
  basin_cmd->add_option("--threads", basin.threads)->capture_default_str();
  basin_cmd->add_option("--alpha", basin.alpha)->capture_default_str();
  basin_cmd->add_option("--beta", basin.beta)->capture_default_str();
  basin_cmd->add_option("--lambda-bar", basin.lambda_bar, "initial step (default 3, 2 for nmbdca)");
  basin_cmd->add_option("--start", basin.starts, "explicit start point a,b (repeatable; replaces --n)");
  basin_cmd->add_option("--out", basin.out, "output directory")->capture_default_str();

  DenoiseOptions den;
  CLI::App* den_cmd = app.add_subcommand("denoise", "Restore an image degraded by Cauchy noise");
  den_cmd->add_option("--input", den.input, "PGM input (noisy, or clean with --add-noise)");
  den_cmd->add_flag("--synthetic", den.synthetic, "use the synthetic squares image as clean input");
  den_cmd->add_flag("--add-noise", den.add_noise, "treat --input as clean and add noise");
  den_cmd->add_option("--clean", den.clean, "clean reference for PSNR of a noisy --input");
  den_cmd->add_option("--size", den.size, "synthetic image side length")->capture_default_str();
  den_cmd->add_option("--gamma", den.gamma, "noise scale")->capture_default_str();
  den_cmd->add_option("--mu", den.mu, "fidelity weight (default 15, or 20 at gamma 5)");
  den_cmd->add_option("--c", den.c, "DC splitting constant (default from gamma and mu)");
  den_cmd->add_option("--seed", den.seed, "noise seed")->capture_default_str();
  den_cmd->add_option("--variant", den.variant)->capture_default_str();
  den_cmd->add_option("--alpha", den.alpha, "default 0.9 (c - mu/gamma^2)");
  den_cmd->add_option("--beta", den.beta)->capture_default_str();
  den_cmd->add_option("--lambda-bar", den.lambda_bar, "default 10, or 9 for bdca/nmbdca");
  den_cmd->add_option("--max-iter", den.max_iter)->capture_default_str();
  den_cmd->add_option("--tol", den.tol, "relative energy tolerance")->capture_default_str();
  den_cmd->add_option("--tol-direction", den.tol_direction)->capture_default_str();
  den_cmd->add_option("--inner-iter", den.inner_iter)->capture_default_str();
  den_cmd->add_option("--inner-tol", den.inner_tol)->capture_default_str();
  den_cmd->add_option("--out", den.out, "output directory")->capture_default_str();

  MetricsOptions met;
  CLI::App* met_cmd = app.add_subcommand("metrics", "PSNR and ReErr of image a against reference b");
  met_cmd->add_option("a", met.a, "restored or noisy image")->required();
  met_cmd->add_option("b", met.b, "reference image")->required();
  met_cmd->add_option("--out", met.out, "directory for the manifest")->capture_default_str();

  std::vector<const char*> argv{"dcboost"};
  for (const std::string& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kSuccess;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kSuccess;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kUsageError;
  }

  try {
    if (toy_cmd->parsed()) return run_toy(toy, args, out);
    if (basin_cmd->parsed()) return run_basin(basin, args, out);
    if (den_cmd->parsed()) return run_denoise(den, args, out, err);
    return run_metrics(met, args, out);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kUsageError;
  } catch (const SolverError& e) {
    err << "error: " << e.what() << '\n';
    return kNumericalFailure;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kNumericalFailure;
  }
}

}  // namespace dcboost::cli
