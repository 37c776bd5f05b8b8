#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "georeshape/registration.hpp"
#include "georeshape/serialization.hpp"
#include "georeshape/trajectory.hpp"

namespace georeshape {

/// Parses a JSON file; ParseError carries the file name on failure.
Json read_json_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& text);

/// Point cloud files: ".xyz", ".txt" or ".csv" text with three numbers per
/// line (whitespace or comma separated, '#' comments and one optional
/// header line allowed), or ".bin" little-endian float32 x, y, z triples.
std::vector<Vec3> read_point_cloud(const std::filesystem::path& path);
bool is_point_cloud_file(const std::filesystem::path& path);

/// Descriptor next to a cloud: "<stem>.meta.json" holding
/// {"label": "...", "shape": "sphere|cylinder|cone|cuboid"}.
std::filesystem::path descriptor_path(const std::filesystem::path& cloud);
PointCloud read_labeled_cloud(const std::filesystem::path& cloud);

enum class TrajectoryFormat { Csv, Json };
TrajectoryFormat trajectory_format(const std::filesystem::path& path);

/// CSV with x,y,z,v per line (an "x,y,z,v" header is optional) or a JSON
/// array of {"x", "y", "z", "v"}.
Trajectory read_trajectory_file(const std::filesystem::path& path);
std::string format_trajectory(const Trajectory& trajectory, TrajectoryFormat format);

Scene read_scene_file(const std::filesystem::path& path);

}  // namespace georeshape
