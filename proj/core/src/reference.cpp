#include "asdal/reference.hpp"

#include <algorithm>
#include <limits>
#include <string>

#include "asdal/random.hpp"

namespace asdal {
namespace {

using Point = std::vector<double>;

double squared_distance(std::span<const double> a, std::span<const double> b) noexcept {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return s;
}

// D^2-weighted seeding. Already chosen points carry zero weight, so distinct
// points are never picked twice; if every remaining weight is zero the next
// center is drawn uniformly among the unchosen indices.
std::vector<Point> seed_centers(std::span<const Embedding> points, std::size_t k, Rng& rng) {
  const std::size_t n = points.size();
  std::vector<Point> centers;
  centers.reserve(k);
  std::vector<bool> chosen(n, false);
  std::vector<double> nearest(n, std::numeric_limits<double>::infinity());

  auto take = [&](std::size_t idx) {
    chosen[idx] = true;
    const auto c = points[idx].values();
    centers.emplace_back(c.begin(), c.end());
    for (std::size_t i = 0; i < n; ++i) {
      nearest[i] = std::min(nearest[i], squared_distance(points[i].values(), centers.back()));
    }
  };

  take(rng.uniform_index(n));
  while (centers.size() < k) {
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (!chosen[i]) total += nearest[i];
    }
    std::size_t pick = n;
    if (total > 0.0) {
      const double target = rng.uniform01() * total;
      double acc = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        if (chosen[i] || nearest[i] <= 0.0) continue;
        acc += nearest[i];
        pick = i;
        if (acc > target) break;
      }
    } else {
      std::vector<std::size_t> free;
      for (std::size_t i = 0; i < n; ++i) {
        if (!chosen[i]) free.push_back(i);
      }
      pick = free[rng.uniform_index(free.size())];
    }
    take(pick);
  }
  return centers;
}

}  // namespace

KMeansResult kmeans_detailed(std::span<const Embedding> points, const KMeansConfig& cfg) {
  if (points.empty()) throw ConfigError("kmeans: no points");
  if (cfg.k == 0) throw ConfigError("kmeans: k must be positive");
  if (cfg.k > points.size()) {
    throw ConfigError("kmeans: k = " + std::to_string(cfg.k) + " exceeds the " +
                      std::to_string(points.size()) + " available points");
  }
  if (!(cfg.tolerance > 0.0)) throw ConfigError("kmeans: tolerance must be positive");
  if (cfg.max_iterations == 0) throw ConfigError("kmeans: max_iterations must be positive");
  require_uniform_dimension(points);

  const std::size_t n = points.size();
  const std::size_t dim = points.front().dim();
  const std::size_t k = cfg.k;

  Rng rng(cfg.seed);
  std::vector<Point> centers = seed_centers(points, k, rng);

  KMeansResult result;
  result.assignment.assign(n, 0);
  std::vector<double> dist(n, 0.0);

  for (std::size_t iter = 0; iter < cfg.max_iterations; ++iter) {
    // Assignment; ties go to the lowest center index.
    double objective = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      std::size_t best = 0;
      double best_d = squared_distance(points[i].values(), centers[0]);
      for (std::size_t c = 1; c < k; ++c) {
        const double d = squared_distance(points[i].values(), centers[c]);
        if (d < best_d) {
          best_d = d;
          best = c;
        }
      }
      result.assignment[i] = best;
      dist[i] = best_d;
      objective += best_d;
    }
    result.objective_history.push_back(objective);
    result.iterations = iter + 1;

    if (result.objective_history.size() >= 2) {
      const double prev = result.objective_history[result.objective_history.size() - 2];
      if (prev <= 0.0 || (prev - objective) / prev < cfg.tolerance) break;
    } else if (objective <= 0.0) {
      break;
    }
    if (iter + 1 == cfg.max_iterations) break;

    // Update.
    std::vector<Point> sums(k, Point(dim, 0.0));
    std::vector<std::size_t> counts(k, 0);
    for (std::size_t i = 0; i < n; ++i) {
      const auto v = points[i].values();
      auto& s = sums[result.assignment[i]];
      for (std::size_t j = 0; j < dim; ++j) s[j] += v[j];
      ++counts[result.assignment[i]];
    }
    std::vector<bool> donor_used(n, false);
    for (std::size_t c = 0; c < k; ++c) {
      if (counts[c] == 0) continue;
      for (std::size_t j = 0; j < dim; ++j) {
        centers[c][j] = sums[c][j] / static_cast<double>(counts[c]);
      }
    }
    for (std::size_t c = 0; c < k; ++c) {
      if (counts[c] != 0) continue;
      // Empty cluster: move it onto the point farthest from its own center.
      std::size_t far = n;
      double far_d = -1.0;
      for (std::size_t i = 0; i < n; ++i) {
        if (donor_used[i]) continue;
        const double d = squared_distance(points[i].values(), centers[result.assignment[i]]);
        if (d > far_d) {
          far_d = d;
          far = i;
        }
      }
      donor_used[far] = true;
      const auto v = points[far].values();
      centers[c].assign(v.begin(), v.end());
    }
  }

  result.centers.reserve(k);
  for (auto& c : centers) result.centers.emplace_back(std::move(c));
  return result;
}

std::vector<Embedding> kmeans(std::span<const Embedding> points, const KMeansConfig& cfg) {
  return kmeans_detailed(points, cfg).centers;
}

ReferenceSets build_initial_reference(std::span<const Embedding> source_normals,
                                      std::span<const Embedding> target_normals,
                                      const KMeansConfig& cfg) {
  std::vector<Embedding> normal = kmeans(source_normals, cfg);
  normal.insert(normal.end(), target_normals.begin(), target_normals.end());
  return ReferenceSets(std::move(normal));
}

}  // namespace asdal
