#ifndef SVAE_FPC_HPP
#define SVAE_FPC_HPP

#include <cstdint>
#include <vector>

#include "svae/geometry.hpp"

namespace svae::fpc {

struct KMeansOptions {
  std::uint64_t seed = 7;
  int max_iters = 100;
  double tol = 1e-6;  // convergence threshold on centroid movement
};

// k-means result over sample final positions. Representatives reference the
// caller's original sample indices. `degenerate` flags inputs with fewer than
// k distinct points, where duplicate representatives are unavoidable.
struct ClusterAssignment {
  std::vector<geom::Vec2> centroids;
  std::vector<int> cluster_of;       // per input point
  std::vector<int> representatives;  // per cluster: index of the point closest to its centroid
  bool degenerate = false;
};

// Lloyd iterations with k-means++ seeding. Internally the points are
// canonicalized (sorted) before seeding so the outcome depends only on the
// multiset of positions and the seed, not on input order; all returned
// indices refer to the original order. Empty clusters are re-seeded at the
// point farthest from its assigned centroid. Ties break toward the lowest
// original index.
ClusterAssignment kmeans(const std::vector<geom::Vec2>& points, int k, const KMeansOptions& opts);

// Final Position Clustering selection: cluster the sample final positions
// into k groups and keep, per group, the sample closest to the group mean.
// Returns the selected original sample indices in ascending order. Throws
// InvalidInputError when fewer than k samples are given.
std::vector<int> fpc_select(const std::vector<geom::Vec2>& final_positions, int k,
                            const KMeansOptions& opts = {});

}  // namespace svae::fpc

#endif
