#ifndef SVAE_WINDOWS_HPP
#define SVAE_WINDOWS_HPP

#include <string>
#include <vector>

#include "svae/geometry.hpp"
#include "svae/random.hpp"
#include "svae/scene.hpp"

namespace svae::data {

struct NeighborObs {
  long long agent_id = 0;
  geom::NeighborState state;
  geom::SocialFeatures features;
};

// One training/evaluation sample: T observed and H future positions of a
// target agent, with per-frame neighbor states.
//
// Frame indexing is window-local and 0-based: frames 0..T-1 are observed,
// T..T+H-1 are future. neighbors[t] lists agents within the configured radius
// of the target at that frame, ascending by id. At frame 0 no displacement
// exists yet; rel_velocity is zero there and the feature entry uses the
// degenerate-bearing convention. A neighbor entering the scene at frame t
// contributes a zero own-displacement to its relative velocity.
struct ObservationWindow {
  std::string scene_id;
  long long target_id = 0;
  int start_frame = 0;  // index into the source scene's frame axis
  double frame_dt = 0.4;
  int T = 8;
  int H = 12;
  std::vector<geom::Position> obs;  // length T
  std::vector<geom::Position> fut;  // length H
  std::vector<std::vector<NeighborObs>> neighbors;  // length T + H

  int total() const { return T + H; }
  const geom::Position& pos(int t) const {
    return t < T ? obs[static_cast<std::size_t>(t)] : fut[static_cast<std::size_t>(t - T)];
  }
  // Per-frame displacement of the target (t >= 1); zero at t = 0.
  geom::Displacement disp(int t) const { return t == 0 ? geom::Displacement{} : pos(t) - pos(t - 1); }
};

struct WindowOptions {
  int T = 8;
  int H = 12;
  int stride = 1;
  double radius = 8.0;       // neighborhood radius; +inf covers the whole scene
  double mpd_horizon = 7.0;  // seconds
};

// One window per target agent per start offset where the target exists for
// T+H consecutive frames. Deterministic: targets ascend by agent id, offsets
// ascend by stride.
std::vector<ObservationWindow> make_windows(const TrajectoryScene& scene,
                                            const WindowOptions& opts);

struct AugmentationConfig {
  bool enable_flip = false;
  bool enable_rotation = false;
};

// Random rigid augmentation: mirror x and/or y (each with probability 1/2)
// and rotate by a uniform angle in [0, 2pi), all about the target's last
// observed position. Draw order: flip x, flip y, angle. Neighbor states are
// transformed consistently; the scalar social features are invariant under
// these maps and are carried over unchanged.
ObservationWindow augment(const ObservationWindow& window, const AugmentationConfig& config,
                          RandomEngine& rng);

struct SplitSpec {
  std::vector<std::string> train;
  std::vector<std::string> test;
};

// Leave-one-out: one split per held-out scene. Throws InvalidInputError for
// fewer than 2 scenes.
std::vector<SplitSpec> leave_one_out_splits(const std::vector<std::string>& scene_ids);

// Fixed split; train and test must be disjoint.
SplitSpec fixed_split(std::vector<std::string> train, std::vector<std::string> test);

// Window cache in the checkpoint record container format.
std::vector<std::uint8_t> serialize_windows(const std::vector<ObservationWindow>& windows);
std::vector<ObservationWindow> deserialize_windows(const std::uint8_t* data, std::size_t size);
void save_windows(const std::string& path, const std::vector<ObservationWindow>& windows);
std::vector<ObservationWindow> load_windows(const std::string& path);

}  // namespace svae::data

#endif
