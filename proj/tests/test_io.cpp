#include "localis/io.hpp"

#include "test_util.hpp"

#include <doctest.h>

#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>

using namespace localis;
namespace tu = localis::testutil;
namespace fs = std::filesystem;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

void spew(const std::string& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

}  // namespace

TEST_CASE("LOCF layout and round trip") {
  const std::string dir = tu::scratch_dir("locf");
  const std::string path = dir + "/f.locf";

  Eigen::VectorXd values(5);
  values << 0.1, -2.0, 3.5, 0.0, 1e-300;
  write_locf(path, 3, values);

  const std::string bytes = slurp(path);
  REQUIRE(bytes.size() == 16 + 5 * sizeof(double));
  CHECK(bytes.substr(0, 4) == "LOCF");
  // version = 1, m = 3, N = 5, little-endian u32 each
  CHECK(static_cast<unsigned char>(bytes[4]) == 1);
  CHECK(static_cast<unsigned char>(bytes[8]) == 3);
  CHECK(static_cast<unsigned char>(bytes[12]) == 5);
  for (int i : {5, 6, 7, 9, 10, 11, 13, 14, 15}) {
    CHECK(static_cast<unsigned char>(bytes[static_cast<std::size_t>(i)]) == 0);
  }

  const LocfData back = read_locf(path);
  CHECK(back.m == 3);
  REQUIRE(back.values.size() == 5);
  for (int i = 0; i < 5; ++i) CHECK(back.values[i] == values[i]);  // bit-exact
}

TEST_CASE("LOCF error paths") {
  const std::string dir = tu::scratch_dir("locf-err");
  Eigen::VectorXd values = Eigen::VectorXd::LinSpaced(4, 0.0, 3.0);
  const std::string good = dir + "/good.locf";
  write_locf(good, 1, values);
  const std::string bytes = slurp(good);

  const std::string magic = dir + "/magic.locf";
  spew(magic, "MOCF" + bytes.substr(4));
  CHECK_THROWS_WITH_AS(read_locf(magic), doctest::Contains("bad magic"), std::runtime_error);

  std::string vbytes = bytes;
  vbytes[4] = 9;
  const std::string version = dir + "/version.locf";
  spew(version, vbytes);
  CHECK_THROWS_WITH_AS(read_locf(version), doctest::Contains("unsupported format version"),
                       std::runtime_error);

  const std::string trunc = dir + "/trunc.locf";
  spew(trunc, bytes.substr(0, bytes.size() - 3));
  CHECK_THROWS_WITH_AS(read_locf(trunc), doctest::Contains("truncated payload"),
                       std::runtime_error);

  const std::string header = dir + "/header.locf";
  spew(header, bytes.substr(0, 10));
  CHECK_THROWS_WITH_AS(read_locf(header), doctest::Contains("truncated header"),
                       std::runtime_error);

  CHECK_THROWS_AS(read_locf(dir + "/missing.locf"), std::runtime_error);
}

TEST_CASE("LOCM layout and round trip") {
  const std::string dir = tu::scratch_dir("locm");
  const std::string path = dir + "/m.locm";

  Eigen::MatrixXd m(2, 2);
  m << 1.0, 2.5, -3.0, 0.125;
  write_locm(path, m);

  const std::string bytes = slurp(path);
  REQUIRE(bytes.size() == 12 + 4 * sizeof(double));
  CHECK(bytes.substr(0, 4) == "LOCM");
  CHECK(static_cast<unsigned char>(bytes[4]) == 1);  // version
  CHECK(static_cast<unsigned char>(bytes[8]) == 2);  // side length

  // Row-major payload: m(0,0), m(0,1), m(1,0), m(1,1).
  double payload[4];
  std::memcpy(payload, bytes.data() + 12, sizeof(payload));
  CHECK(payload[0] == 1.0);
  CHECK(payload[1] == 2.5);
  CHECK(payload[2] == -3.0);
  CHECK(payload[3] == 0.125);

  const Eigen::MatrixXd back = read_locm(path);
  CHECK(tu::max_abs(back - m) == 0.0);

  CHECK_THROWS_AS(write_locm(dir + "/bad.locm", Eigen::MatrixXd::Zero(2, 3)),
                  std::invalid_argument);

  std::string vbytes = bytes;
  vbytes[1] = 'X';
  const std::string magic = dir + "/magic.locm";
  spew(magic, vbytes);
  CHECK_THROWS_WITH_AS(read_locm(magic), doctest::Contains("bad magic"), std::runtime_error);
}

TEST_CASE("function and mask binary helpers validate the grid") {
  const std::string dir = tu::scratch_dir("locf-grid");
  const GridSpec grid = make_grid(GroupDescriptor::euclidean(1), 0.25, 1.0);
  const SampledFunction f = sample_function(
      grid, [](const GroupElement& x) { return x[0] * x[0]; }, 3.0);

  const std::string fpath = dir + "/f.locf";
  write_function_locf(fpath, f);
  const SampledFunction back = read_function_locf(grid, fpath, 3.0);
  CHECK(back.p == 3.0);
  CHECK(tu::max_abs(back.values - f.values) == 0.0);

  // Same byte payload against a grid with a different point count.
  const GridSpec other = make_grid(GroupDescriptor::euclidean(1), 0.25, 2.0);
  CHECK_THROWS_WITH_AS(read_function_locf(other, fpath), doctest::Contains("shape"),
                       std::runtime_error);
  // ... and against a grid of different coordinate rank.
  const GridSpec planar = make_grid(GroupDescriptor::euclidean(2), 0.5, 0.5);
  CHECK_THROWS_WITH_AS(read_function_locf(planar, fpath), doctest::Contains("shape"),
                       std::runtime_error);

  const RegionMask mask = make_box_mask(grid, {-0.5}, {0.25});
  const std::string mpath = dir + "/mask.locf";
  write_mask_locf(mpath, mask);
  const RegionMask mback = read_mask_locf(grid, mpath);
  CHECK(mback.member == mask.member);
  CHECK_THROWS_AS(read_mask_locf(other, mpath), std::runtime_error);
}

TEST_CASE("CSV round trips") {
  const std::string dir = tu::scratch_dir("csv");
  const GridSpec grid = make_grid(GroupDescriptor::heisenberg(1), 0.5, 1.0);
  std::mt19937_64 rng(42);
  const SampledFunction f = tu::random_block_constant(grid, rng, 1, -2, 2);

  const std::string fpath = dir + "/f.csv";
  write_function_csv(fpath, f);
  {
    std::ifstream in(fpath);
    std::string header;
    std::getline(in, header);
    CHECK(header == "x0,x1,x2,value");
  }
  const SampledFunction back = read_function_csv(grid, fpath);
  CHECK(tu::max_abs(back.values - f.values) == 0.0);  // %.17g round-trips exactly

  const RegionMask mask = make_box_mask(grid, {-0.5, -0.5, -0.5}, {0.0, 0.5, 0.0});
  const std::string mpath = dir + "/mask.csv";
  write_mask_csv(mpath, mask);
  CHECK(read_mask_csv(grid, mpath).member == mask.member);

  Eigen::MatrixXd m(2, 3);
  m << 0.1, -0.2, 1e-7, 3.0, 4.5, -6.25;
  const std::string matpath = dir + "/m.csv";
  write_matrix_csv(matpath, m);
  const Eigen::MatrixXd mm = read_matrix_csv(matpath);
  REQUIRE(mm.rows() == 2);
  REQUIRE(mm.cols() == 3);
  CHECK(tu::max_abs(mm - m) == 0.0);

  spew(dir + "/ragged.csv", "1,2\n3\n");
  CHECK_THROWS_WITH_AS(read_matrix_csv(dir + "/ragged.csv"), doctest::Contains("ragged"),
                       std::runtime_error);

  // Off-lattice coordinates are rejected on import.
  spew(dir + "/off.csv", "x0,x1,x2,value\n0.3,0,0,1.0\n");
  CHECK_THROWS_WITH_AS(read_function_csv(grid, dir + "/off.csv"),
                       doctest::Contains("lattice"), std::runtime_error);
  spew(dir + "/width.csv", "x0,x1,x2,value\n0.5,0,1.0\n");
  CHECK_THROWS_WITH_AS(read_function_csv(grid, dir + "/width.csv"),
                       doctest::Contains("row width"), std::runtime_error);
}

TEST_CASE("sigma CSV and double formatting") {
  const std::string dir = tu::scratch_dir("sigma");
  const std::string path = dir + "/sigma.csv";
  write_sigma_csv(path, {2.0, 0.5, 1.0 / 3.0});
  std::ifstream in(path);
  std::string line;
  std::getline(in, line);
  CHECK(line == "index,sigma");
  std::getline(in, line);
  CHECK(line == "0,2");
  std::getline(in, line);
  CHECK(line == "1,0.5");
  std::getline(in, line);
  CHECK(line == ("2," + format_double(1.0 / 3.0)));

  for (double v : {0.1, -1.0 / 3.0, 1e-300, 123456.789, 0.0}) {
    CHECK(std::stod(format_double(v)) == v);
  }
}
