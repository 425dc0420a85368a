#include "svae/windows.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>

#include "svae/checkpoint.hpp"
#include "svae/errors.hpp"

namespace svae::data {

namespace {

// Neighbor displacement at a frame: the track's own per-frame displacement,
// zero when the previous frame is missing (agent just entered).
geom::Displacement neighbor_disp(const TrajectoryScene::Track& track, int frame) {
  return track.disp_at(frame);
}

}  // namespace

std::vector<ObservationWindow> make_windows(const TrajectoryScene& scene,
                                            const WindowOptions& opts) {
  if (opts.T < 2) throw InvalidInputError("make_windows: T must be >= 2");
  if (opts.H < 1) throw InvalidInputError("make_windows: H must be >= 1");
  if (opts.stride < 1) throw InvalidInputError("make_windows: stride must be >= 1");

  const int span = opts.T + opts.H;
  std::vector<ObservationWindow> out;
  for (const auto& track : scene.tracks) {
    const int len = static_cast<int>(track.points.size());
    for (int off = 0; off + span <= len; off += opts.stride) {
      const int start = track.first_frame + off;
      ObservationWindow w;
      w.scene_id = scene.scene_id;
      w.target_id = track.agent_id;
      w.start_frame = start;
      w.frame_dt = scene.frame_dt;
      w.T = opts.T;
      w.H = opts.H;
      w.obs.reserve(opts.T);
      w.fut.reserve(opts.H);
      for (int t = 0; t < opts.T; ++t) w.obs.push_back(track.at(start + t));
      for (int t = 0; t < opts.H; ++t) w.fut.push_back(track.at(start + opts.T + t));

      w.neighbors.resize(span);
      for (int t = 0; t < span; ++t) {
        const int frame = start + t;
        const geom::Position xi = w.pos(t);
        const geom::Displacement di = w.disp(t);
        for (const auto& nb : scene.tracks) {
          if (nb.agent_id == track.agent_id || !nb.present_at(frame)) continue;
          const geom::Position xj = nb.at(frame);
          if (!((xj - xi).norm() < opts.radius)) continue;
          NeighborObs o;
          o.agent_id = nb.agent_id;
          o.state = geom::neighbor_state(xi, di, xj, neighbor_disp(nb, frame));
          o.features = geom::social_features(o.state.rel_position, o.state.rel_velocity, di,
                                             scene.frame_dt, opts.mpd_horizon);
          w.neighbors[t].push_back(o);
        }
      }
      out.push_back(std::move(w));
    }
  }
  return out;
}

ObservationWindow augment(const ObservationWindow& window, const AugmentationConfig& config,
                          RandomEngine& rng) {
  double sx = 1.0, sy = 1.0, angle = 0.0;
  if (config.enable_flip) {
    if (rng.uniform() < 0.5) sx = -1.0;
    if (rng.uniform() < 0.5) sy = -1.0;
  }
  if (config.enable_rotation) {
    angle = rng.uniform() * 6.283185307179586476925286766559;
  }

  const double c = std::cos(angle), s = std::sin(angle);
  // Rotation composed after the axis flips: M = R(angle) * diag(sx, sy).
  const double m00 = c * sx, m01 = -s * sy;
  const double m10 = s * sx, m11 = c * sy;
  auto lin = [&](const geom::Vec2& v) {
    return geom::Vec2{m00 * v.x + m01 * v.y, m10 * v.x + m11 * v.y};
  };

  const geom::Position pivot = window.obs.back();
  auto point = [&](const geom::Position& p) { return pivot + lin(p - pivot); };

  ObservationWindow out = window;
  for (auto& p : out.obs) p = point(p);
  for (auto& p : out.fut) p = point(p);
  for (auto& frame : out.neighbors) {
    for (auto& nb : frame) {
      nb.state.rel_position = lin(nb.state.rel_position);
      nb.state.rel_velocity = lin(nb.state.rel_velocity);
      // distance, bearing cosine and minimal predicted distance are built
      // from norms and dot products, unchanged under rigid maps
    }
  }
  return out;
}

std::vector<SplitSpec> leave_one_out_splits(const std::vector<std::string>& scene_ids) {
  if (scene_ids.size() < 2) {
    throw InvalidInputError("leave-one-out needs at least 2 scenes, got " +
                            std::to_string(scene_ids.size()));
  }
  std::vector<SplitSpec> out;
  for (std::size_t i = 0; i < scene_ids.size(); ++i) {
    SplitSpec s;
    s.test.push_back(scene_ids[i]);
    for (std::size_t j = 0; j < scene_ids.size(); ++j) {
      if (j != i) s.train.push_back(scene_ids[j]);
    }
    out.push_back(std::move(s));
  }
  return out;
}

SplitSpec fixed_split(std::vector<std::string> train, std::vector<std::string> test) {
  std::set<std::string> train_set(train.begin(), train.end());
  for (const auto& t : test) {
    if (train_set.count(t) != 0) {
      throw InvalidInputError("split: scene '" + t + "' appears in both train and test");
    }
  }
  return SplitSpec{std::move(train), std::move(test)};
}

// Cache layout per window: a meta record (ids and shape), a flat position
// record, and one record per frame of neighbor rows (id, state, features).
std::vector<std::uint8_t> serialize_windows(const std::vector<ObservationWindow>& windows) {
  ckpt::Container c;
  c.add_scalar_i64("windows/count", static_cast<std::int64_t>(windows.size()));
  for (std::size_t i = 0; i < windows.size(); ++i) {
    const auto& w = windows[i];
    const std::string prefix = "windows/" + std::to_string(i) + "/";
    c.add_text(prefix + "scene", w.scene_id);
    ad::Mat<double> meta(4, 1);
    meta << static_cast<double>(w.target_id), static_cast<double>(w.start_frame),
        static_cast<double>(w.T), static_cast<double>(w.H);
    c.add_matrix(prefix + "meta", meta);
    ad::Mat<double> dt(1, 1);
    dt(0, 0) = w.frame_dt;
    c.add_matrix(prefix + "dt", dt);

    ad::Mat<double> pos(w.total(), 2);
    for (int t = 0; t < w.total(); ++t) {
      pos(t, 0) = w.pos(t).x;
      pos(t, 1) = w.pos(t).y;
    }
    c.add_matrix(prefix + "positions", pos);

    for (int t = 0; t < w.total(); ++t) {
      const auto& frame = w.neighbors[static_cast<std::size_t>(t)];
      ad::Mat<double> nb(static_cast<Eigen::Index>(frame.size()), 8);
      for (std::size_t j = 0; j < frame.size(); ++j) {
        const auto& o = frame[j];
        const auto r = static_cast<Eigen::Index>(j);
        nb(r, 0) = static_cast<double>(o.agent_id);
        nb(r, 1) = o.state.rel_position.x;
        nb(r, 2) = o.state.rel_position.y;
        nb(r, 3) = o.state.rel_velocity.x;
        nb(r, 4) = o.state.rel_velocity.y;
        nb(r, 5) = o.features.distance;
        nb(r, 6) = o.features.bearing_cos;
        nb(r, 7) = o.features.mpd;
      }
      c.add_matrix(prefix + "nb" + std::to_string(t), nb);
    }
  }
  return c.to_bytes();
}

std::vector<ObservationWindow> deserialize_windows(const std::uint8_t* data, std::size_t size) {
  const auto c = ckpt::Container::from_bytes(data, size);
  const auto count = c.get_scalar_i64("windows/count");
  std::vector<ObservationWindow> out;
  out.reserve(static_cast<std::size_t>(count));
  for (std::int64_t i = 0; i < count; ++i) {
    const std::string prefix = "windows/" + std::to_string(i) + "/";
    ObservationWindow w;
    w.scene_id = c.get_text(prefix + "scene");
    const auto meta = c.get_matrix<double>(prefix + "meta", 4, 1);
    w.target_id = static_cast<long long>(meta(0, 0));
    w.start_frame = static_cast<int>(meta(1, 0));
    w.T = static_cast<int>(meta(2, 0));
    w.H = static_cast<int>(meta(3, 0));
    w.frame_dt = c.get_matrix<double>(prefix + "dt", 1, 1)(0, 0);

    const auto pos = c.get_matrix<double>(prefix + "positions", w.total(), 2);
    for (int t = 0; t < w.T; ++t) w.obs.push_back({pos(t, 0), pos(t, 1)});
    for (int t = w.T; t < w.total(); ++t) w.fut.push_back({pos(t, 0), pos(t, 1)});

    w.neighbors.resize(static_cast<std::size_t>(w.total()));
    for (int t = 0; t < w.total(); ++t) {
      const auto nb = c.get_matrix<double>(prefix + "nb" + std::to_string(t));
      for (Eigen::Index r = 0; r < nb.rows(); ++r) {
        NeighborObs o;
        o.agent_id = static_cast<long long>(nb(r, 0));
        o.state.rel_position = {nb(r, 1), nb(r, 2)};
        o.state.rel_velocity = {nb(r, 3), nb(r, 4)};
        o.features.distance = nb(r, 5);
        o.features.bearing_cos = nb(r, 6);
        o.features.mpd = nb(r, 7);
        w.neighbors[static_cast<std::size_t>(t)].push_back(o);
      }
    }
    out.push_back(std::move(w));
  }
  return out;
}

void save_windows(const std::string& path, const std::vector<ObservationWindow>& windows) {
  const auto bytes = serialize_windows(windows);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ParseError("cannot open window cache for writing: " + path);
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
}

std::vector<ObservationWindow> load_windows(const std::string& path) {
  std::ifstream in(path, std::ios::binary | std::ios::ate);
  if (!in) throw ParseError("cannot open window cache: " + path);
  const auto size = static_cast<std::size_t>(in.tellg());
  in.seekg(0);
  std::vector<std::uint8_t> bytes(size);
  in.read(reinterpret_cast<char*>(bytes.data()), static_cast<std::streamsize>(size));
  return deserialize_windows(bytes.data(), bytes.size());
}

}  // namespace svae::data
