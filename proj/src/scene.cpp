#include "svae/scene.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "svae/errors.hpp"

namespace svae::data {

namespace {

struct Row {
  long long frame;
  long long agent;
  double x;
  double y;
};

std::vector<std::string> split_ws(const std::string& line) {
  std::vector<std::string> out;
  std::istringstream ss(line);
  std::string tok;
  while (ss >> tok) out.push_back(tok);
  return out;
}

double parse_double(const std::string& tok, int line_no, const std::string& name) {
  try {
    std::size_t used = 0;
    const double v = std::stod(tok, &used);
    if (used != tok.size()) throw std::invalid_argument(tok);
    return v;
  } catch (const std::exception&) {
    throw ParseError(name + ": line " + std::to_string(line_no) + ": bad numeric field '" + tok +
                     "'");
  }
}

}  // namespace

const TrajectoryScene::Track* TrajectoryScene::find(long long agent_id) const {
  auto it = std::lower_bound(tracks.begin(), tracks.end(), agent_id,
                             [](const Track& t, long long id) { return t.agent_id < id; });
  if (it == tracks.end() || it->agent_id != agent_id) return nullptr;
  return &*it;
}

TrajectoryScene parse_trajectory_stream(std::istream& in, const ParseOptions& opts,
                                        const std::string& name) {
  const int need = 1 + std::max({opts.columns[0], opts.columns[1], opts.columns[2],
                                 opts.columns[3]});
  std::vector<Row> rows;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    const auto fields = split_ws(line);
    if (static_cast<int>(fields.size()) < need || fields.size() < 4) {
      throw ParseError(name + ": line " + std::to_string(line_no) + ": expected at least " +
                       std::to_string(std::max(need, 4)) + " fields, got " +
                       std::to_string(fields.size()));
    }
    Row r;
    r.frame = std::llround(parse_double(fields[opts.columns[0]], line_no, name));
    r.agent = std::llround(parse_double(fields[opts.columns[1]], line_no, name));
    r.x = parse_double(fields[opts.columns[2]], line_no, name) * opts.unit_scale;
    r.y = parse_double(fields[opts.columns[3]], line_no, name) * opts.unit_scale;
    if (!std::isfinite(r.x) || !std::isfinite(r.y)) {
      throw DataError(name + ": line " + std::to_string(line_no) + ": non-finite position");
    }
    rows.push_back(r);
  }

  TrajectoryScene scene;
  scene.scene_id = opts.scene_id.empty() ? name : opts.scene_id;
  scene.frame_dt = opts.frame_dt;
  scene.unit_scale = opts.unit_scale;
  if (rows.empty()) return scene;

  for (const Row& r : rows) scene.frames.push_back(r.frame);
  std::sort(scene.frames.begin(), scene.frames.end());
  scene.frames.erase(std::unique(scene.frames.begin(), scene.frames.end()), scene.frames.end());

  std::map<long long, std::vector<Row>> by_agent;
  for (const Row& r : rows) by_agent[r.agent].push_back(r);

  auto frame_index = [&scene](long long frame) {
    return static_cast<int>(std::lower_bound(scene.frames.begin(), scene.frames.end(), frame) -
                            scene.frames.begin());
  };

  for (auto& [agent, samples] : by_agent) {
    std::sort(samples.begin(), samples.end(),
              [](const Row& a, const Row& b) { return a.frame < b.frame; });
    for (std::size_t i = 1; i < samples.size(); ++i) {
      if (samples[i].frame == samples[i - 1].frame) {
        throw DataError(scene.scene_id + ": agent " + std::to_string(agent) +
                        ": duplicate sample at frame " + std::to_string(samples[i].frame));
      }
    }

    TrajectoryScene::Track track;
    track.agent_id = agent;
    track.first_frame = frame_index(samples.front().frame);
    int prev_index = -1;
    geom::Position prev_pos;
    for (const Row& s : samples) {
      const int idx = frame_index(s.frame);
      if (prev_index >= 0 && idx > prev_index + 1) {
        if (!opts.interpolate_gaps) {
          throw DataError(scene.scene_id + ": agent " + std::to_string(agent) +
                          ": gap between frames " + std::to_string(scene.frames[prev_index]) +
                          " and " + std::to_string(s.frame));
        }
        for (int k = prev_index + 1; k < idx; ++k) {
          const double a = static_cast<double>(k - prev_index) / (idx - prev_index);
          track.points.push_back(prev_pos + (geom::Position{s.x, s.y} - prev_pos) * a);
        }
      }
      track.points.push_back({s.x, s.y});
      prev_index = idx;
      prev_pos = {s.x, s.y};
    }
    scene.tracks.push_back(std::move(track));
  }
  return scene;
}

TrajectoryScene parse_trajectory_file(const std::string& path, const ParseOptions& opts) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open trajectory file: " + path);
  ParseOptions o = opts;
  if (o.scene_id.empty()) o.scene_id = std::filesystem::path(path).stem().string();
  return parse_trajectory_stream(in, o, o.scene_id);
}

std::vector<long long> neighborhood(const TrajectoryScene& scene, long long agent_id,
                                    int frame_index, double radius) {
  const auto* target = scene.find(agent_id);
  if (target == nullptr || !target->present_at(frame_index)) {
    throw InvalidInputError("neighborhood: agent " + std::to_string(agent_id) +
                            " absent at frame index " + std::to_string(frame_index));
  }
  const geom::Position xi = target->at(frame_index);
  std::vector<long long> out;
  for (const auto& track : scene.tracks) {
    if (track.agent_id == agent_id || !track.present_at(frame_index)) continue;
    if ((track.at(frame_index) - xi).norm() < radius) out.push_back(track.agent_id);
  }
  return out;
}

std::array<int, 4> parse_column_order(const std::string& spec) {
  std::array<int, 4> cols{-1, -1, -1, -1};
  std::stringstream ss(spec);
  std::string tok;
  int pos = 0;
  while (std::getline(ss, tok, ',')) {
    tok.erase(std::remove_if(tok.begin(), tok.end(), [](char c) { return std::isspace(c); }),
              tok.end());
    int slot = -1;
    if (tok == "frame") slot = 0;
    else if (tok == "id") slot = 1;
    else if (tok == "x") slot = 2;
    else if (tok == "y") slot = 3;
    else throw ConfigError("unknown column name '" + tok + "' in column order");
    if (cols[slot] != -1) throw ConfigError("duplicate column '" + tok + "' in column order");
    cols[slot] = pos++;
  }
  for (int c : cols) {
    if (c == -1) throw ConfigError("column order must name frame,id,x,y exactly once");
  }
  return cols;
}

}  // namespace svae::data
