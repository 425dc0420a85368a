#include "svae/fpc.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>

#include "svae/errors.hpp"
#include "svae/random.hpp"

namespace svae::fpc {

namespace {

double sq_dist(const geom::Vec2& a, const geom::Vec2& b) { return (a - b).squared_norm(); }

// k-means++ seeding.
std::vector<geom::Vec2> seed_centroids(const std::vector<geom::Vec2>& pts, int k,
                                       RandomEngine& rng) {
  std::vector<geom::Vec2> centroids;
  centroids.reserve(static_cast<std::size_t>(k));
  centroids.push_back(pts[static_cast<std::size_t>(rng.uniform_int(static_cast<int>(pts.size())))]);
  std::vector<double> d2(pts.size());
  while (static_cast<int>(centroids.size()) < k) {
    double total = 0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
      double best = std::numeric_limits<double>::infinity();
      for (const auto& c : centroids) best = std::min(best, sq_dist(pts[i], c));
      d2[i] = best;
      total += best;
    }
    if (total <= 0) {
      // Remaining points all coincide with chosen centroids (fewer distinct
      // points than k); duplicate one and continue.
      centroids.push_back(pts[static_cast<std::size_t>(
          rng.uniform_int(static_cast<int>(pts.size())))]);
      continue;
    }
    double u = rng.uniform() * total;
    std::size_t pick = pts.size() - 1;
    for (std::size_t i = 0; i < pts.size(); ++i) {
      u -= d2[i];
      if (u <= 0) {
        pick = i;
        break;
      }
    }
    centroids.push_back(pts[pick]);
  }
  return centroids;
}

void assign_all(const std::vector<geom::Vec2>& pts, const std::vector<geom::Vec2>& centroids,
                std::vector<int>& assign) {
  for (std::size_t i = 0; i < pts.size(); ++i) {
    int best = 0;
    double best_d = sq_dist(pts[i], centroids[0]);
    for (int c = 1; c < static_cast<int>(centroids.size()); ++c) {
      const double d = sq_dist(pts[i], centroids[static_cast<std::size_t>(c)]);
      if (d < best_d) {
        best_d = d;
        best = c;
      }
    }
    assign[i] = best;
  }
}

// Moves, for every empty cluster, the point farthest from its current
// centroid out of a multi-member cluster. While an empty cluster exists some
// cluster has at least two members, so this always terminates with k
// non-empty clusters.
void repair_empties(const std::vector<geom::Vec2>& pts, std::vector<geom::Vec2>& centroids,
                    std::vector<int>& assign) {
  const int k = static_cast<int>(centroids.size());
  std::vector<int> counts(static_cast<std::size_t>(k), 0);
  for (int a : assign) ++counts[static_cast<std::size_t>(a)];
  for (int c = 0; c < k; ++c) {
    while (counts[static_cast<std::size_t>(c)] == 0) {
      double worst = -1;
      std::size_t farthest = pts.size();
      for (std::size_t i = 0; i < pts.size(); ++i) {
        if (counts[static_cast<std::size_t>(assign[i])] <= 1) continue;
        const double d = sq_dist(pts[i], centroids[static_cast<std::size_t>(assign[i])]);
        if (d > worst) {
          worst = d;
          farthest = i;
        }
      }
      if (farthest == pts.size()) return;  // unreachable for n >= k; guard anyway
      --counts[static_cast<std::size_t>(assign[farthest])];
      assign[farthest] = c;
      counts[static_cast<std::size_t>(c)] = 1;
      centroids[static_cast<std::size_t>(c)] = pts[farthest];
    }
  }
}

}  // namespace

ClusterAssignment kmeans(const std::vector<geom::Vec2>& points, int k, const KMeansOptions& opts) {
  if (k < 1) throw InvalidInputError("kmeans: k must be >= 1");
  if (static_cast<int>(points.size()) < k) {
    throw InvalidInputError("kmeans: need at least k points, got " +
                            std::to_string(points.size()));
  }

  // Canonical order makes the result a function of the point multiset, not of
  // the input order; returned indices refer to the original order.
  std::vector<int> order(points.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&points](int a, int b) {
    const auto& pa = points[static_cast<std::size_t>(a)];
    const auto& pb = points[static_cast<std::size_t>(b)];
    if (pa.x != pb.x) return pa.x < pb.x;
    if (pa.y != pb.y) return pa.y < pb.y;
    return a < b;
  });
  std::vector<geom::Vec2> pts;
  pts.reserve(points.size());
  for (int i : order) pts.push_back(points[static_cast<std::size_t>(i)]);

  std::set<std::pair<double, double>> distinct;
  for (const auto& p : pts) distinct.insert({p.x, p.y});
  const bool degenerate = static_cast<int>(distinct.size()) < k;

  RandomEngine rng(opts.seed);
  auto centroids = seed_centroids(pts, k, rng);
  std::vector<int> assign(pts.size(), 0);

  for (int iter = 0; iter < opts.max_iters; ++iter) {
    assign_all(pts, centroids, assign);
    repair_empties(pts, centroids, assign);

    std::vector<geom::Vec2> sums(static_cast<std::size_t>(k));
    std::vector<int> counts(static_cast<std::size_t>(k), 0);
    for (std::size_t i = 0; i < pts.size(); ++i) {
      sums[static_cast<std::size_t>(assign[i])] += pts[i];
      ++counts[static_cast<std::size_t>(assign[i])];
    }
    double moved = 0;
    for (int c = 0; c < k; ++c) {
      if (counts[static_cast<std::size_t>(c)] == 0) continue;
      const geom::Vec2 mean =
          sums[static_cast<std::size_t>(c)] * (1.0 / counts[static_cast<std::size_t>(c)]);
      moved = std::max(moved, (mean - centroids[static_cast<std::size_t>(c)]).norm());
      centroids[static_cast<std::size_t>(c)] = mean;
    }
    if (moved < opts.tol) break;
  }
  assign_all(pts, centroids, assign);
  repair_empties(pts, centroids, assign);

  ClusterAssignment out;
  out.centroids = centroids;
  out.degenerate = degenerate;
  out.cluster_of.resize(points.size());
  for (std::size_t i = 0; i < pts.size(); ++i) {
    out.cluster_of[static_cast<std::size_t>(order[i])] = assign[i];
  }

  // Representative per cluster: the member closest to the centroid, lowest
  // original index on ties.
  out.representatives.assign(static_cast<std::size_t>(k), -1);
  std::vector<double> best(static_cast<std::size_t>(k),
                           std::numeric_limits<double>::infinity());
  for (std::size_t i = 0; i < points.size(); ++i) {
    const auto c = static_cast<std::size_t>(out.cluster_of[i]);
    const double d = sq_dist(points[i], centroids[c]);
    if (d < best[c]) {
      best[c] = d;
      out.representatives[c] = static_cast<int>(i);
    }
  }
  return out;
}

std::vector<int> fpc_select(const std::vector<geom::Vec2>& final_positions, int k,
                            const KMeansOptions& opts) {
  if (static_cast<int>(final_positions.size()) < k) {
    throw InvalidInputError("fpc_select: need at least k samples, got " +
                            std::to_string(final_positions.size()));
  }
  const auto clusters = kmeans(final_positions, k, opts);
  std::vector<int> picks = clusters.representatives;
  std::sort(picks.begin(), picks.end());
  return picks;
}

}  // namespace svae::fpc
