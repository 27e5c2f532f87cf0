#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "mpb/cloud_io.hpp"
#include "mpb/rng.hpp"

using namespace mpb;

namespace {

std::string temp_file(const std::string& name) {
  return (std::filesystem::temp_directory_path() / name).string();
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  out << text;
}

}  // namespace

TEST_CASE("xyz parsing") {
  const std::string path = temp_file("io_test.xyz");

  SUBCASE("two plain rows") {
    write_text(path, "0 0 0\n1 2 3\n");
    const PointCloud c = load_point_cloud(path);
    REQUIRE(c.size() == 2);
    CHECK(c.points[1] == Vec3(1, 2, 3));
  }
  SUBCASE("comments and blank lines are skipped") {
    write_text(path, "# header\n\n0.5 0.25 -1\n");
    CHECK(load_point_cloud(path).size() == 1);
  }
  SUBCASE("short row reports its line number") {
    write_text(path, "0 0 0\n1 2\n");
    try {
      load_point_cloud(path);
      FAIL("expected ParseError");
    } catch (const ParseError& e) {
      CHECK(e.line() == 2);
    }
  }
  SUBCASE("non-numeric coordinate reports its line number") {
    write_text(path, "0 0 zero\n");
    try {
      load_point_cloud(path);
      FAIL("expected ParseError");
    } catch (const ParseError& e) {
      CHECK(e.line() == 1);
    }
  }
}

TEST_CASE("ascii ply parsing") {
  const std::string path = temp_file("io_test.ply");

  SUBCASE("empty vertex element") {
    write_text(path,
               "ply\nformat ascii 1.0\nelement vertex 0\nproperty float x\nproperty float y\n"
               "property float z\nend_header\n");
    CHECK(load_point_cloud(path).empty());
  }
  SUBCASE("color attributes are ignored") {
    write_text(path,
               "ply\nformat ascii 1.0\ncomment made by hand\nelement vertex 2\n"
               "property float x\nproperty float y\nproperty float z\n"
               "property uchar red\nproperty uchar green\nproperty uchar blue\n"
               "end_header\n1 2 3 255 0 0\n4 5 6 0 255 0\n");
    const PointCloud c = load_point_cloud(path);
    REQUIRE(c.size() == 2);
    CHECK(c.points[0] == Vec3(1, 2, 3));
    CHECK(c.points[1] == Vec3(4, 5, 6));
  }
  SUBCASE("elements before the vertices are skipped by line") {
    write_text(path,
               "ply\nformat ascii 1.0\nelement junk 2\nproperty float a\nelement vertex 1\n"
               "property float x\nproperty float y\nproperty float z\nend_header\n"
               "9\n9\n7 8 9\n");
    const PointCloud c = load_point_cloud(path);
    REQUIRE(c.size() == 1);
    CHECK(c.points[0] == Vec3(7, 8, 9));
  }
  SUBCASE("binary format is rejected with the offending line") {
    write_text(path, "ply\nformat binary_little_endian 1.0\nend_header\n");
    try {
      load_point_cloud(path);
      FAIL("expected ParseError");
    } catch (const ParseError& e) {
      CHECK(e.line() == 2);
    }
  }
  SUBCASE("truncated vertex data is an error") {
    write_text(path,
               "ply\nformat ascii 1.0\nelement vertex 2\nproperty float x\nproperty float y\n"
               "property float z\nend_header\n1 2 3\n");
    CHECK_THROWS_AS(load_point_cloud(path), ParseError);
  }
  SUBCASE("missing magic is an error") {
    write_text(path, "plyx\nformat ascii 1.0\nend_header\n");
    CHECK_THROWS_AS(load_point_cloud(path), ParseError);
  }
}

TEST_CASE("save/load round trip preserves coordinates") {
  Rng rng(7);
  PointCloud cloud;
  for (int i = 0; i < 200; ++i) {
    cloud.points.emplace_back(rng.uniform(-10, 10), rng.uniform(-10, 10), rng.uniform(-10, 10));
  }
  for (const char* name : {"roundtrip.ply", "roundtrip.xyz"}) {
    const std::string path = temp_file(name);
    if (std::string(name).ends_with(".ply")) {
      save_point_cloud_ply(cloud, path);
    } else {
      save_point_cloud_xyz(cloud, path);
    }
    const PointCloud loaded = load_point_cloud(path);
    REQUIRE(loaded.size() == cloud.size());
    for (std::size_t i = 0; i < cloud.size(); ++i) {
      CHECK((loaded.points[i] - cloud.points[i]).norm() <= 1e-6);
    }
  }
}

TEST_CASE("missing file raises an io error") {
  CHECK_THROWS_AS(load_point_cloud("/nonexistent/nowhere.xyz"), IoError);
}
