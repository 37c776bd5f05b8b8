#include "georeshape/io.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cctype>
#include <charconv>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>

#include "georeshape/errors.hpp"

namespace georeshape {

namespace {

std::string lower_extension(const std::filesystem::path& path) {
  std::string ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return ext;
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Splits on commas and whitespace; false if any field is not a number.
bool parse_numbers(const std::string& line, std::vector<double>& out) {
  out.clear();
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ',' || std::isspace(static_cast<unsigned char>(line[i]))))
      ++i;
    if (i >= line.size()) break;
    std::size_t j = i;
    while (j < line.size() && line[j] != ',' && !std::isspace(static_cast<unsigned char>(line[j])))
      ++j;
    double v = 0.0;
    const char* first = line.data() + i;
    const char* last = line.data() + j;
    if (*first == '+') ++first;
    const auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr != last) return false;
    out.push_back(v);
    i = j;
  }
  return true;
}

std::string number(double v) {
  std::array<char, 64> buf{};
  const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), ptr);
}

}  // namespace

Json read_json_file(const std::filesystem::path& path) {
  const std::string text = read_text(path);
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw ParseError(path.filename().string(), e.what());
  }
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << text;
}

bool is_point_cloud_file(const std::filesystem::path& path) {
  const std::string ext = lower_extension(path);
  return ext == ".xyz" || ext == ".txt" || ext == ".csv" || ext == ".bin";
}

std::vector<Vec3> read_point_cloud(const std::filesystem::path& path) {
  const std::string ext = lower_extension(path);
  const std::string data = read_text(path);
  std::vector<Vec3> points;

  if (ext == ".bin") {
    if (data.size() % 12 != 0) {
      throw ParseError(path.filename().string(), "size is not a multiple of 12 bytes");
    }
    points.reserve(data.size() / 12);
    for (std::size_t off = 0; off < data.size(); off += 12) {
      float xyz[3];
      for (int k = 0; k < 3; ++k) {
        std::uint32_t bits = 0;
        for (int b = 0; b < 4; ++b) {
          bits |= static_cast<std::uint32_t>(static_cast<unsigned char>(data[off + 4 * k + b]))
                  << (8 * b);
        }
        xyz[k] = std::bit_cast<float>(bits);
      }
      points.push_back({xyz[0], xyz[1], xyz[2]});
    }
  } else if (ext == ".xyz" || ext == ".txt" || ext == ".csv") {
    std::istringstream in(data);
    std::string line;
    std::vector<double> values;
    std::size_t line_no = 0;
    bool header_allowed = true;
    while (std::getline(in, line)) {
      ++line_no;
      if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
      if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
      if (!parse_numbers(line, values)) {
        if (header_allowed) {
          header_allowed = false;
          continue;
        }
        throw ParseError(path.filename().string() + ":" + std::to_string(line_no),
                         "expected numbers");
      }
      header_allowed = false;
      if (values.size() < 3) {
        throw ParseError(path.filename().string() + ":" + std::to_string(line_no),
                         "expected x y z");
      }
      points.push_back({values[0], values[1], values[2]});
    }
  } else {
    throw Error("unsupported point cloud format '" + ext + "'");
  }

  for (const auto& p : points) {
    if (!p.is_finite()) throw ParseError(path.filename().string(), "non-finite coordinate");
  }
  return points;
}

std::filesystem::path descriptor_path(const std::filesystem::path& cloud) {
  return cloud.parent_path() / (cloud.stem().string() + ".meta.json");
}

PointCloud read_labeled_cloud(const std::filesystem::path& cloud) {
  const auto meta_path = descriptor_path(cloud);
  if (!std::filesystem::exists(meta_path)) {
    throw Error("missing descriptor " + meta_path.filename().string());
  }
  const Json meta = read_json_file(meta_path);
  const std::string where = meta_path.filename().string();
  if (!meta.is_object()) throw ParseError(where, "expected an object");
  for (const auto& [key, value] : meta.items()) {
    if (key != "label" && key != "shape") throw ParseError(where + "." + key, "unknown field");
  }
  if (!meta.contains("shape") || !meta.at("shape").is_string()) {
    throw ParseError(where + ".shape", "expected a string");
  }
  PointCloud pc;
  pc.label = cloud.stem().string();
  if (meta.contains("label")) {
    if (!meta.at("label").is_string()) throw ParseError(where + ".label", "expected a string");
    pc.label = meta.at("label").get<std::string>();
  }
  try {
    pc.shape_hint = shape_hint_from_string(meta.at("shape").get<std::string>());
  } catch (const std::invalid_argument& e) {
    throw ParseError(where + ".shape", e.what());
  }
  pc.points = read_point_cloud(cloud);
  return pc;
}

TrajectoryFormat trajectory_format(const std::filesystem::path& path) {
  return lower_extension(path) == ".json" ? TrajectoryFormat::Json : TrajectoryFormat::Csv;
}

Trajectory read_trajectory_file(const std::filesystem::path& path) {
  const std::string where = path.filename().string();
  if (trajectory_format(path) == TrajectoryFormat::Json) {
    return trajectory_from_json(read_json_file(path), where);
  }
  std::istringstream in(read_text(path));
  std::string line;
  std::vector<double> values;
  std::vector<Waypoint> wps;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    if (!parse_numbers(line, values)) {
      if (wps.empty() && line_no == 1) continue;  // header
      throw ParseError(where + ":" + std::to_string(line_no), "expected x,y,z,v");
    }
    if (values.size() != 4) {
      throw ParseError(where + ":" + std::to_string(line_no), "expected 4 fields");
    }
    wps.push_back({{values[0], values[1], values[2]}, values[3]});
  }
  try {
    return Trajectory(std::move(wps));
  } catch (const std::invalid_argument& e) {
    throw ParseError(where, e.what());
  }
}

std::string format_trajectory(const Trajectory& trajectory, TrajectoryFormat format) {
  if (format == TrajectoryFormat::Json) return trajectory_to_json(trajectory).dump(2) + "\n";
  std::string out = "x,y,z,v\n";
  for (const auto& w : trajectory.waypoints()) {
    out += number(w.position.x) + "," + number(w.position.y) + "," + number(w.position.z) + "," +
           number(w.speed) + "\n";
  }
  return out;
}

Scene read_scene_file(const std::filesystem::path& path) {
  return scene_from_json(read_json_file(path));
}

}  // namespace georeshape
