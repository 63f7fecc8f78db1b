#include <algorithm>
#include <chrono>
#include <thread>
#include <vector>

#include "dcboost/counter_rng.hpp"
#include "dcboost/toy_problems.hpp"
#include "dcboost/trace_io.hpp"

namespace dcboost {

namespace {

constexpr std::array<std::array<double, 2>, 4> kAttractorPoints = {
    {{2.0, 2.0}, {0.0, 2.0}, {2.0, 0.0}, {0.0, 0.0}}};

}  // namespace

std::string_view to_string(Attractor a) {
  switch (a) {
    case Attractor::k22:
      return "(2,2)";
    case Attractor::k02:
      return "(0,2)";
    case Attractor::k20:
      return "(2,0)";
    case Attractor::k00:
      return "(0,0)";
    case Attractor::kOther:
      return "other";
  }
  return "other";
}

Attractor classify_attractor(const Vector& point, double radius) {
  Attractor nearest = Attractor::kOther;
  double nearest_dist = radius;
  for (std::size_t i = 0; i < kAttractorPoints.size(); ++i) {
    const double du = point[0] - kAttractorPoints[i][0];
    const double dv = point[1] - kAttractorPoints[i][1];
    const double dist = std::hypot(du, dv);
    if (dist <= nearest_dist) {
      nearest = static_cast<Attractor>(i);
      nearest_dist = dist;
    }
  }
  return nearest;
}

Vector basin_start_point(std::uint64_t seed, std::uint64_t index) {
  Vector p(2);
  p[0] = 3.0 * counter_uniform(seed, index, 0);
  p[1] = 3.0 * counter_uniform(seed, index, 1);
  return p;
}

namespace {

template <typename StartFn>
BasinReport run_basin(std::int64_t n_points, StartFn start_of, const SolverConfig& cfg,
                      int threads) {
  cfg.validate();
  const auto t0 = std::chrono::steady_clock::now();
  const ScadSeparableProblem model;

  const int n_workers =
      static_cast<int>(std::clamp<std::int64_t>(threads, 1, std::max<std::int64_t>(n_points, 1)));
  std::vector<std::array<std::int64_t, 5>> partial(n_workers);

  auto work = [&](int w) {
    const std::int64_t begin = n_points * w / n_workers;
    const std::int64_t end = n_points * (w + 1) / n_workers;
    for (std::int64_t i = begin; i < end; ++i) {
      const SolveResult r = solve(model, start_of(i), cfg);
      ++partial[w][static_cast<std::size_t>(classify_attractor(r.final_point))];
    }
  };

  if (n_workers == 1) {
    work(0);
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(n_workers);
    for (int w = 0; w < n_workers; ++w) pool.emplace_back(work, w);
  }

  BasinReport report;
  report.n_points = n_points;
  report.variant = cfg.variant;
  for (const auto& counts : partial) {
    for (std::size_t a = 0; a < counts.size(); ++a) report.counts[a] += counts[a];
  }
  report.elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return report;
}

}  // namespace

BasinReport basin_experiment_from_points(std::span<const Eigen::Vector2d> starts,
                                         const SolverConfig& cfg, int threads) {
  return run_basin(
      static_cast<std::int64_t>(starts.size()),
      [&](std::int64_t i) -> Vector { return starts[static_cast<std::size_t>(i)]; }, cfg, threads);
}

BasinReport basin_experiment(std::int64_t n_points, std::uint64_t seed, const SolverConfig& cfg,
                             int threads) {
  if (n_points < 1) throw std::invalid_argument("basin experiment needs at least one point");
  return run_basin(
      n_points,
      [seed](std::int64_t i) { return basin_start_point(seed, static_cast<std::uint64_t>(i)); },
      cfg, threads);
}

void write_basin_csv(std::ostream& out, const BasinReport& report, std::uint64_t seed) {
  out << "# seed=" << seed << ",n_points=" << report.n_points
      << ",variant=" << to_string(report.variant) << ",elapsed_s=" << format_real(report.elapsed)
      << '\n';
  out << "attractor,count\n";
  for (Attractor a : kAllAttractors) {
    out << '"' << to_string(a) << "\"," << report.count(a) << '\n';
  }
}

}  // namespace dcboost
