#pragma once

#include <string>

#include "mpb/types.hpp"

namespace mpb {

enum class CloudFormat { kAuto, kPlyAscii, kXyz };

/// Loads an ascii PLY or whitespace-separated XYZ file. kAuto dispatches on
/// the ".ply" extension. Color/normal attributes are ignored.
/// Throws ParseError (with line number) on malformed input, IoError on
/// missing files.
PointCloud load_point_cloud(const std::string& path, CloudFormat format = CloudFormat::kAuto);

void save_point_cloud_ply(const PointCloud& cloud, const std::string& path);
void save_point_cloud_xyz(const PointCloud& cloud, const std::string& path);

/// Keeps the points inside bounds (half-open) and translates them so that
/// bounds.min maps to the origin.
PointCloud crop(const PointCloud& cloud, const Bounds& bounds);

}  // namespace mpb
