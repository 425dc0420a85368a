#ifndef SVAE_SCENE_HPP
#define SVAE_SCENE_HPP

#include <array>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "svae/geometry.hpp"

namespace svae::data {

// Time-indexed positions of all agents in one recording. The time axis is the
// sorted union of raw frame ids; consecutive union frames are frame_dt
// seconds apart. Every track covers a contiguous range of union frames.
struct TrajectoryScene {
  struct Track {
    long long agent_id = 0;
    int first_frame = 0;  // index into `frames`
    std::vector<geom::Position> points;

    int last_frame() const { return first_frame + static_cast<int>(points.size()) - 1; }
    bool present_at(int frame_index) const {
      return frame_index >= first_frame && frame_index <= last_frame();
    }
    const geom::Position& at(int frame_index) const {
      return points[static_cast<std::size_t>(frame_index - first_frame)];
    }
    // Per-frame displacement at frame_index; zero at the first frame of the
    // track (no earlier observation exists).
    geom::Displacement disp_at(int frame_index) const {
      if (frame_index <= first_frame) return {};
      return at(frame_index) - at(frame_index - 1);
    }
  };

  std::string scene_id;
  double frame_dt = 0.4;
  double unit_scale = 1.0;
  std::vector<long long> frames;  // sorted unique raw frame ids
  std::vector<Track> tracks;      // sorted by agent_id

  int num_frames() const { return static_cast<int>(frames.size()); }
  const Track* find(long long agent_id) const;
};

struct ParseOptions {
  // Position of each field within a row: {frame, id, x, y}.
  std::array<int, 4> columns{0, 1, 2, 3};
  double unit_scale = 1.0;
  double frame_dt = 0.4;
  // Fill interior frames an agent skips by linear interpolation; with this
  // off, a gap is a DataError.
  bool interpolate_gaps = true;
  std::string scene_id;
};

// Parses whitespace-separated "frame_id agent_id x y" rows (column order per
// options). Lines starting with '#' and blank lines are ignored. Positions
// are multiplied by unit_scale. Throws ParseError (with the line number) on
// malformed rows and DataError on duplicate frames or non-interpolated gaps.
TrajectoryScene parse_trajectory_file(const std::string& path, const ParseOptions& opts = {});
TrajectoryScene parse_trajectory_stream(std::istream& in, const ParseOptions& opts,
                                        const std::string& name);

// Agents j != agent_id present at frame_index with ||x_j - x_i|| < radius
// (strict), in ascending id order. Throws InvalidInputError if the agent is
// absent at that frame.
std::vector<long long> neighborhood(const TrajectoryScene& scene, long long agent_id,
                                    int frame_index, double radius);

// Parses "frame,id,x,y"-style column order strings into ParseOptions.columns.
std::array<int, 4> parse_column_order(const std::string& spec);

}  // namespace svae::data

#endif
