#include "rbd/sim/dataset.hpp"

#include "rbd/util/fileio.hpp"

#include <nlohmann/json.hpp>

#include <sstream>
#include <stdexcept>

namespace rbd::sim {

using ordered_json = nlohmann::ordered_json;

namespace {

ordered_json frame_to_json(const RadarFrame& f) {
  ordered_json j;
  j["t"] = f.timestamp;
  j["ego"] = {{"x", f.ego.pose.x},
              {"y", f.ego.pose.y},
              {"yaw", f.ego.pose.yaw},
              {"speed", f.ego.speed},
              {"yaw_rate", f.ego.yaw_rate}};
  auto& pts = j["points"] = ordered_json::array();
  for (const RadarPoint& p : f.points)
    pts.push_back({p.x, p.y, p.z, p.doppler, p.snr, p.range});
  if (f.labels) j["labels"] = *f.labels;
  return j;
}

RadarFrame frame_from_json(const ordered_json& j) {
  RadarFrame f;
  f.timestamp = j.at("t").get<double>();
  const auto& e = j.at("ego");
  f.ego.pose = {e.at("x").get<double>(), e.at("y").get<double>(), e.at("yaw").get<double>()};
  f.ego.speed = e.at("speed").get<double>();
  f.ego.yaw_rate = e.at("yaw_rate").get<double>();
  for (const auto& row : j.at("points")) {
    if (!row.is_array() || row.size() != 6) throw std::runtime_error("point row must have 6 values");
    f.points.push_back({row[0].get<double>(), row[1].get<double>(), row[2].get<double>(),
                        row[3].get<double>(), row[4].get<double>(), row[5].get<double>()});
  }
  if (j.contains("labels")) {
    f.labels = j.at("labels").get<std::vector<int>>();
    if (f.labels->size() != f.points.size())
      throw std::runtime_error("labels length does not match points");
  }
  return f;
}

}  // namespace

void write_dataset(const std::vector<RadarFrame>& frames, const std::filesystem::path& path) {
  std::string out;
  for (const RadarFrame& f : frames) {
    out += frame_to_json(f).dump();
    out += '\n';
  }
  atomic_write(path, out);
}

std::vector<RadarFrame> read_dataset(const std::filesystem::path& path) {
  const std::string content = read_file(path);
  std::vector<RadarFrame> frames;
  std::istringstream in(content);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      frames.push_back(frame_from_json(ordered_json::parse(line)));
    } catch (const std::exception& e) {
      throw std::runtime_error("line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return frames;
}

std::vector<std::vector<RadarFrame>> split_sequences(std::vector<RadarFrame> frames) {
  std::vector<std::vector<RadarFrame>> seqs;
  for (auto& f : frames) {
    if (seqs.empty() || f.timestamp <= seqs.back().back().timestamp) seqs.emplace_back();
    seqs.back().push_back(std::move(f));
  }
  return seqs;
}

}  // namespace rbd::sim
