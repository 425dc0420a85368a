#include "svae/geometry.hpp"

#include <algorithm>

#include "svae/errors.hpp"

namespace svae::geom {

std::vector<Displacement> displacements(const std::vector<Position>& positions) {
  if (positions.size() < 2) {
    throw InvalidInputError("displacements: need at least 2 positions, got " +
                            std::to_string(positions.size()));
  }
  std::vector<Displacement> out;
  out.reserve(positions.size() - 1);
  for (std::size_t i = 1; i < positions.size(); ++i) {
    out.push_back(positions[i] - positions[i - 1]);
  }
  return out;
}

SocialFeatures social_features(const Vec2& rel_position, const Vec2& rel_velocity,
                               const Displacement& target_disp, double frame_dt, double horizon) {
  if (frame_dt <= 0.0) {
    throw InvalidInputError("social_features: frame_dt must be > 0");
  }
  if (horizon <= 0.0) {
    throw InvalidInputError("social_features: horizon must be > 0");
  }

  SocialFeatures f;
  f.distance = rel_position.norm();

  const double pd = rel_position.norm() * target_disp.norm();
  if (pd == 0.0) {
    f.bearing_cos = kDegenerateBearingCos;
  } else {
    f.bearing_cos = std::clamp(rel_position.dot(target_disp) / pd, -1.0, 1.0);
  }

  const Vec2 v = rel_velocity * (1.0 / frame_dt);
  const double v2 = v.squared_norm();
  if (v2 == 0.0) {
    f.mpd = f.distance;
  } else {
    const double tau = -rel_position.dot(v) / v2;
    const double t = std::clamp(tau, 0.0, horizon);
    f.mpd = (rel_position + v * t).norm();
  }
  return f;
}

}  // namespace svae::geom
