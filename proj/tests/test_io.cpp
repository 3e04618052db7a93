#include <doctest.h>

#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>

#include "pfqm/io.hpp"
#include "pfqm/rng.hpp"

using namespace pfqm;

namespace {

std::string tmp_path(const char* name) {
  return (std::filesystem::temp_directory_path() / name).string();
}

}  // namespace

TEST_CASE("snapshot round trip is bit exact") {
  Rng rng(12);

  for (const int dim : {1, 2}) {
    SimState state;
    state.field.grid = dim == 1 ? Grid::make_1d(32, 10.0)
                                : Grid::make_2d(16, 8, 6.0, 3.0);
    state.field.space = Space::real;
    state.field.values.resize(state.field.grid.size());
    for (auto& v : state.field.values) v = rng.cgauss();
    state.time = 3.25;

    const std::string path = tmp_path("pfqm_test_snapshot.pfqm");
    write_snapshot(state, path);
    const SimState back = read_snapshot(path);

    CHECK(back.time == state.time);
    CHECK(back.field.grid.dim == dim);
    CHECK(back.field.grid.nx == state.field.grid.nx);
    CHECK(back.field.grid.ny == state.field.grid.ny);
    CHECK(back.field.grid.lx == state.field.grid.lx);
    REQUIRE(back.field.values.size() == state.field.values.size());
    CHECK(std::memcmp(back.field.values.data(), state.field.values.data(),
                      state.field.values.size() * sizeof(double) * 2) == 0);
    std::remove(path.c_str());
  }
}

TEST_CASE("snapshot header layout") {
  SimState state;
  state.field.grid = Grid::make_1d(8, 4.0);
  state.field.values.assign(8, {1.0, -1.0});
  state.time = 0.5;
  const std::string path = tmp_path("pfqm_test_header.pfqm");
  write_snapshot(state, path);

  std::ifstream f(path, std::ios::binary);
  char magic[4];
  f.read(magic, 4);
  CHECK(std::memcmp(magic, "PFQM", 4) == 0);
  std::uint16_t version, dim;
  std::uint32_t nx, ny;
  f.read(reinterpret_cast<char*>(&version), 2);
  f.read(reinterpret_cast<char*>(&dim), 2);
  f.read(reinterpret_cast<char*>(&nx), 4);
  f.read(reinterpret_cast<char*>(&ny), 4);
  CHECK(version == 1);
  CHECK(dim == 1);
  CHECK(nx == 8);
  CHECK(ny == 1);
  const auto size = std::filesystem::file_size(path);
  CHECK(size == 4 + 2 + 2 + 4 + 4 + 8 * 3 + 8u * 16);
  std::remove(path.c_str());
}

TEST_CASE("snapshot error paths") {
  const std::string path = tmp_path("pfqm_test_bad.pfqm");
  {
    std::ofstream f(path, std::ios::binary);
    f << "NOPE";
  }
  CHECK_THROWS_WITH_AS(read_snapshot(path),
                       doctest::Contains("not a PFQM snapshot"),
                       std::runtime_error);

  // truncated payload
  SimState state;
  state.field.grid = Grid::make_1d(16, 4.0);
  state.field.values.assign(16, {1.0, 0.0});
  write_snapshot(state, path);
  std::filesystem::resize_file(path, std::filesystem::file_size(path) - 8);
  CHECK_THROWS_WITH_AS(read_snapshot(path), doctest::Contains("truncated"),
                       std::runtime_error);
  std::remove(path.c_str());

  CHECK_THROWS_AS(read_snapshot(tmp_path("pfqm_does_not_exist.pfqm")),
                  std::runtime_error);
}

TEST_CASE("field csv shape") {
  SpectralField f = SpectralField::zeros(Grid::make_2d(8, 8, 2.0, 2.0));
  f.values[3] = {1.0, 2.0};
  const std::string path = tmp_path("pfqm_test_field.csv");
  write_field_csv(f, path);
  std::ifstream in(path);
  std::string line;
  std::getline(in, line);
  CHECK(line == "x_um,y_um,re,im,density");
  int rows = 0;
  while (std::getline(in, line)) ++rows;
  CHECK(rows == 64);
  std::remove(path.c_str());
}
