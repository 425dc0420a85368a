#ifndef SVAE_GEOMETRY_HPP
#define SVAE_GEOMETRY_HPP

#include <cmath>
#include <vector>

namespace svae::geom {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  Vec2() = default;
  Vec2(double x_, double y_) : x(x_), y(y_) {}

  Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
  Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
  Vec2 operator*(double s) const { return {x * s, y * s}; }
  Vec2& operator+=(const Vec2& o) {
    x += o.x;
    y += o.y;
    return *this;
  }

  double dot(const Vec2& o) const { return x * o.x + y * o.y; }
  double norm() const { return std::hypot(x, y); }
  double squared_norm() const { return x * x + y * y; }
  bool finite() const { return std::isfinite(x) && std::isfinite(y); }
};

using Position = Vec2;
using Displacement = Vec2;

// Per-frame velocity and acceleration of the target agent, both expressed as
// position differences.
struct SelfState {
  Displacement velocity;
  Displacement acceleration;
};

// Neighbor position and velocity relative to the target agent.
struct NeighborState {
  Vec2 rel_position;
  Vec2 rel_velocity;  // per-frame displacement difference
};

// The three geometric features that drive attention: Euclidean distance,
// cosine of the bearing angle, and the minimal predicted distance within a
// fixed time horizon under constant velocities.
struct SocialFeatures {
  double distance = 0.0;
  double bearing_cos = 1.0;
  double mpd = 0.0;
};

// Convention for degenerate bearings (stationary observer, or neighbor at the
// exact same point): the bearing cosine is defined as this constant.
inline constexpr double kDegenerateBearingCos = 1.0;

// Consecutive position differences. Output length = input length - 1.
// Throws InvalidInputError for fewer than 2 positions.
std::vector<Displacement> displacements(const std::vector<Position>& positions);

inline SelfState self_state(const Displacement& d_t, const Displacement& d_prev) {
  return SelfState{d_t, d_t - d_prev};
}

inline NeighborState neighbor_state(const Position& target_pos, const Displacement& target_disp,
                                    const Position& nb_pos, const Displacement& nb_disp) {
  return NeighborState{nb_pos - target_pos, nb_disp - target_disp};
}

// Social features for one neighbor. rel_velocity and target_disp are
// per-frame displacements; frame_dt converts to per-second velocities for the
// minimal-predicted-distance term, whose closest-approach time is clamped to
// [0, horizon] seconds. Throws InvalidInputError for non-positive frame_dt or
// horizon.
SocialFeatures social_features(const Vec2& rel_position, const Vec2& rel_velocity,
                               const Displacement& target_disp, double frame_dt, double horizon);

}  // namespace svae::geom

#endif
