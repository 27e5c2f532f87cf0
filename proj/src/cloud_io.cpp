#include "mpb/cloud_io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <vector>

namespace mpb {

namespace {

bool ends_with(const std::string& s, const std::string& suffix) {
  return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

std::vector<std::string> split_ws(const std::string& line) {
  std::vector<std::string> out;
  std::istringstream ss(line);
  std::string tok;
  while (ss >> tok) out.push_back(tok);
  return out;
}

double parse_double(const std::string& tok, int line_no) {
  double value = 0.0;
  const char* begin = tok.data();
  const char* end = begin + tok.size();
  auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr != end) {
    throw ParseError("non-numeric coordinate '" + tok + "'", line_no);
  }
  return value;
}

struct PlyElement {
  std::string name;
  long count = 0;
  std::vector<std::string> properties;  // scalar property names, in order
  bool has_list = false;
};

PointCloud load_ply(std::istream& in) {
  std::string line;
  int line_no = 0;
  auto next_line = [&](bool required) -> bool {
    while (std::getline(in, line)) {
      ++line_no;
      return true;
    }
    if (required) throw ParseError("unexpected end of file", line_no);
    return false;
  };

  next_line(true);
  if (split_ws(line) != std::vector<std::string>{"ply"}) {
    throw ParseError("missing 'ply' magic", line_no);
  }

  std::vector<PlyElement> elements;
  bool format_seen = false;
  while (true) {
    next_line(true);
    std::vector<std::string> tok = split_ws(line);
    if (tok.empty()) continue;
    if (tok[0] == "comment") continue;
    if (tok[0] == "format") {
      if (tok.size() < 2 || tok[1] != "ascii") {
        throw ParseError("only 'format ascii 1.0' is supported", line_no);
      }
      format_seen = true;
    } else if (tok[0] == "element") {
      if (tok.size() != 3) throw ParseError("malformed element declaration", line_no);
      PlyElement e;
      e.name = tok[1];
      try {
        e.count = std::stol(tok[2]);
      } catch (const std::exception&) {
        throw ParseError("malformed element count '" + tok[2] + "'", line_no);
      }
      if (e.count < 0) throw ParseError("negative element count", line_no);
      elements.push_back(e);
    } else if (tok[0] == "property") {
      if (elements.empty()) throw ParseError("property before any element", line_no);
      if (tok.size() >= 2 && tok[1] == "list") {
        elements.back().has_list = true;
      } else if (tok.size() == 3) {
        elements.back().properties.push_back(tok[2]);
      } else {
        throw ParseError("malformed property declaration", line_no);
      }
    } else if (tok[0] == "end_header") {
      break;
    } else {
      throw ParseError("unknown header keyword '" + tok[0] + "'", line_no);
    }
  }
  if (!format_seen) throw ParseError("missing format declaration", line_no);

  PointCloud cloud;
  for (const PlyElement& e : elements) {
    if (e.name != "vertex") {
      // Elements before the vertex block are skipped line by line; anything
      // after the vertices is irrelevant for point extraction.
      for (long i = 0; i < e.count; ++i) next_line(true);
      continue;
    }
    int ix = -1, iy = -1, iz = -1;
    for (std::size_t p = 0; p < e.properties.size(); ++p) {
      if (e.properties[p] == "x") ix = static_cast<int>(p);
      if (e.properties[p] == "y") iy = static_cast<int>(p);
      if (e.properties[p] == "z") iz = static_cast<int>(p);
    }
    if (ix < 0 || iy < 0 || iz < 0) {
      throw ParseError("vertex element lacks x/y/z properties", line_no);
    }
    if (e.has_list) throw ParseError("list properties on vertex element are unsupported", line_no);
    cloud.points.reserve(static_cast<std::size_t>(e.count));
    for (long i = 0; i < e.count; ++i) {
      next_line(true);
      std::vector<std::string> tok = split_ws(line);
      if (tok.size() < e.properties.size()) {
        throw ParseError("vertex line has too few columns", line_no);
      }
      cloud.points.emplace_back(parse_double(tok[ix], line_no), parse_double(tok[iy], line_no),
                                parse_double(tok[iz], line_no));
    }
    break;
  }
  return cloud;
}

PointCloud load_xyz(std::istream& in) {
  PointCloud cloud;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::vector<std::string> tok = split_ws(line);
    if (tok.empty() || tok[0][0] == '#') continue;
    if (tok.size() < 3) throw ParseError("expected at least 3 columns", line_no);
    cloud.points.emplace_back(parse_double(tok[0], line_no), parse_double(tok[1], line_no),
                              parse_double(tok[2], line_no));
  }
  return cloud;
}

}  // namespace

PointCloud load_point_cloud(const std::string& path, CloudFormat format) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "'");
  if (format == CloudFormat::kAuto) {
    format = ends_with(path, ".ply") ? CloudFormat::kPlyAscii : CloudFormat::kXyz;
  }
  return format == CloudFormat::kPlyAscii ? load_ply(in) : load_xyz(in);
}

void save_point_cloud_ply(const PointCloud& cloud, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write '" + path + "'");
  out << "ply\nformat ascii 1.0\nelement vertex " << cloud.size()
      << "\nproperty float x\nproperty float y\nproperty float z\nend_header\n";
  char buf[96];
  for (const Vec3& p : cloud.points) {
    std::snprintf(buf, sizeof(buf), "%.17g %.17g %.17g\n", p[0], p[1], p[2]);
    out << buf;
  }
  if (!out) throw IoError("write failed for '" + path + "'");
}

void save_point_cloud_xyz(const PointCloud& cloud, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write '" + path + "'");
  char buf[96];
  for (const Vec3& p : cloud.points) {
    std::snprintf(buf, sizeof(buf), "%.17g %.17g %.17g\n", p[0], p[1], p[2]);
    out << buf;
  }
  if (!out) throw IoError("write failed for '" + path + "'");
}

PointCloud crop(const PointCloud& cloud, const Bounds& bounds) {
  PointCloud out;
  for (const Vec3& p : cloud.points) {
    if (bounds.contains(p)) out.points.push_back(p - bounds.min_corner);
  }
  return out;
}

}  // namespace mpb
