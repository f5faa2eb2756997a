#include "localis/io.hpp"

#include "localis/version.hpp"

#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace localis {

namespace {

void write_u32(std::ostream& out, std::uint32_t v) {
  unsigned char b[4] = {static_cast<unsigned char>(v & 0xff),
                        static_cast<unsigned char>((v >> 8) & 0xff),
                        static_cast<unsigned char>((v >> 16) & 0xff),
                        static_cast<unsigned char>((v >> 24) & 0xff)};
  out.write(reinterpret_cast<const char*>(b), 4);
}

std::uint32_t read_u32(std::istream& in, const std::string& path) {
  unsigned char b[4];
  if (!in.read(reinterpret_cast<char*>(b), 4)) {
    throw std::runtime_error(path + ": truncated header");
  }
  return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
         (static_cast<std::uint32_t>(b[2]) << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
}

void write_doubles(std::ostream& out, const double* data, std::size_t count) {
  // Doubles are written in native byte order; the formats target
  // little-endian IEEE-754 hosts.
  out.write(reinterpret_cast<const char*>(data), static_cast<std::streamsize>(count * sizeof(double)));
}

void read_doubles(std::istream& in, double* data, std::size_t count, const std::string& path) {
  if (!in.read(reinterpret_cast<char*>(data), static_cast<std::streamsize>(count * sizeof(double)))) {
    throw std::runtime_error(path + ": truncated payload");
  }
}

std::ofstream open_out(const std::string& path, bool binary) {
  std::ofstream out(path, binary ? std::ios::binary : std::ios::out);
  if (!out) throw std::runtime_error(path + ": cannot open for writing");
  return out;
}

std::ifstream open_in(const std::string& path, bool binary) {
  std::ifstream in(path, binary ? std::ios::binary : std::ios::in);
  if (!in) throw std::runtime_error(path + ": cannot open for reading");
  return in;
}

void check_magic(std::istream& in, const char* magic, const std::string& path) {
  char got[4];
  if (!in.read(got, 4) || std::memcmp(got, magic, 4) != 0) {
    throw std::runtime_error(path + ": bad magic, expected \"" + std::string(magic, 4) + "\"");
  }
}

std::vector<double> parse_csv_row(const std::string& line, const std::string& path) {
  std::vector<double> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    try {
      out.push_back(std::stod(cell));
    } catch (const std::exception&) {
      throw std::runtime_error(path + ": cannot parse numeric cell \"" + cell + "\"");
    }
  }
  return out;
}

}  // namespace

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void write_locf(const std::string& path, std::uint32_t m, const Eigen::VectorXd& values) {
  auto out = open_out(path, true);
  out.write("LOCF", 4);
  write_u32(out, kFunctionFormatVersion);
  write_u32(out, m);
  write_u32(out, static_cast<std::uint32_t>(values.size()));
  write_doubles(out, values.data(), static_cast<std::size_t>(values.size()));
  if (!out) throw std::runtime_error(path + ": write failed");
}

LocfData read_locf(const std::string& path) {
  auto in = open_in(path, true);
  check_magic(in, "LOCF", path);
  const std::uint32_t version = read_u32(in, path);
  if (version != kFunctionFormatVersion) {
    throw std::runtime_error(path + ": unsupported format version " + std::to_string(version));
  }
  LocfData data;
  data.m = read_u32(in, path);
  const std::uint32_t n = read_u32(in, path);
  data.values.resize(n);
  read_doubles(in, data.values.data(), n, path);
  return data;
}

void write_locm(const std::string& path, const Eigen::MatrixXd& matrix) {
  if (matrix.rows() != matrix.cols()) {
    throw std::invalid_argument(path + ": matrix payload must be square");
  }
  auto out = open_out(path, true);
  out.write("LOCM", 4);
  write_u32(out, kMatrixFormatVersion);
  write_u32(out, static_cast<std::uint32_t>(matrix.rows()));
  for (Eigen::Index i = 0; i < matrix.rows(); ++i) {
    const Eigen::VectorXd row = matrix.row(i);
    write_doubles(out, row.data(), static_cast<std::size_t>(row.size()));
  }
  if (!out) throw std::runtime_error(path + ": write failed");
}

Eigen::MatrixXd read_locm(const std::string& path) {
  auto in = open_in(path, true);
  check_magic(in, "LOCM", path);
  const std::uint32_t version = read_u32(in, path);
  if (version != kMatrixFormatVersion) {
    throw std::runtime_error(path + ": unsupported format version " + std::to_string(version));
  }
  const std::uint32_t n = read_u32(in, path);
  Eigen::MatrixXd matrix(n, n);
  std::vector<double> row(n);
  for (std::uint32_t i = 0; i < n; ++i) {
    read_doubles(in, row.data(), n, path);
    for (std::uint32_t j = 0; j < n; ++j) matrix(i, j) = row[j];
  }
  return matrix;
}

namespace {

void write_samples_csv(const std::string& path, const GridSpec& grid, const Eigen::VectorXd& values) {
  auto out = open_out(path, false);
  for (int a = 0; a < grid.dim(); ++a) out << "x" << a << ",";
  out << "value\n";
  for (long i = 0; i < grid.size(); ++i) {
    const GroupElement x = grid.point(i);
    for (double c : x) out << format_double(c) << ",";
    out << format_double(values[i]) << "\n";
  }
  if (!out) throw std::runtime_error(path + ": write failed");
}

Eigen::VectorXd read_samples_csv(const GridSpec& grid, const std::string& path) {
  auto in = open_in(path, false);
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error(path + ": empty file");
  Eigen::VectorXd values = Eigen::VectorXd::Zero(grid.size());
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const std::vector<double> row = parse_csv_row(line, path);
    if (static_cast<int>(row.size()) != grid.dim() + 1) {
      throw std::runtime_error(path + ": row width mismatch, want " +
                               std::to_string(grid.dim() + 1) + " columns");
    }
    GroupElement x(row.begin(), row.end() - 1);
    const auto idx = grid.locate(x);
    if (!idx) throw std::runtime_error(path + ": row coordinates are not a lattice point");
    values[*idx] = row.back();
  }
  return values;
}

}  // namespace

void write_function_csv(const std::string& path, const SampledFunction& f) {
  write_samples_csv(path, f.grid, f.values);
}

SampledFunction read_function_csv(const GridSpec& grid, const std::string& path, double p) {
  return SampledFunction{grid, read_samples_csv(grid, path), p};
}

void write_mask_csv(const std::string& path, const RegionMask& mask) {
  Eigen::VectorXd values(mask.grid.size());
  for (long i = 0; i < mask.grid.size(); ++i) {
    values[i] = mask.member[static_cast<std::size_t>(i)] ? 1.0 : 0.0;
  }
  write_samples_csv(path, mask.grid, values);
}

RegionMask read_mask_csv(const GridSpec& grid, const std::string& path) {
  const Eigen::VectorXd values = read_samples_csv(grid, path);
  RegionMask mask{grid, std::vector<std::uint8_t>(static_cast<std::size_t>(grid.size()), 0)};
  for (long i = 0; i < grid.size(); ++i) {
    mask.member[static_cast<std::size_t>(i)] = values[i] != 0.0 ? 1 : 0;
  }
  return mask;
}

void write_matrix_csv(const std::string& path, const Eigen::MatrixXd& matrix) {
  auto out = open_out(path, false);
  for (Eigen::Index i = 0; i < matrix.rows(); ++i) {
    for (Eigen::Index j = 0; j < matrix.cols(); ++j) {
      if (j) out << ",";
      out << format_double(matrix(i, j));
    }
    out << "\n";
  }
  if (!out) throw std::runtime_error(path + ": write failed");
}

Eigen::MatrixXd read_matrix_csv(const std::string& path) {
  auto in = open_in(path, false);
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    rows.push_back(parse_csv_row(line, path));
    if (rows.back().size() != rows.front().size()) {
      throw std::runtime_error(path + ": ragged rows");
    }
  }
  Eigen::MatrixXd matrix(rows.size(), rows.empty() ? 0 : rows.front().size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < rows[i].size(); ++j) {
      matrix(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
    }
  }
  return matrix;
}

void write_sigma_csv(const std::string& path, const std::vector<double>& sigmas) {
  auto out = open_out(path, false);
  out << "index,sigma\n";
  for (std::size_t i = 0; i < sigmas.size(); ++i) {
    out << i << "," << format_double(sigmas[i]) << "\n";
  }
  if (!out) throw std::runtime_error(path + ": write failed");
}

void write_function_locf(const std::string& path, const SampledFunction& f) {
  write_locf(path, static_cast<std::uint32_t>(f.grid.dim()), f.values);
}

SampledFunction read_function_locf(const GridSpec& grid, const std::string& path, double p) {
  const LocfData data = read_locf(path);
  if (data.m != static_cast<std::uint32_t>(grid.dim()) || data.values.size() != grid.size()) {
    throw std::runtime_error(path + ": payload shape does not match the grid");
  }
  return SampledFunction{grid, data.values, p};
}

void write_mask_locf(const std::string& path, const RegionMask& mask) {
  Eigen::VectorXd values(mask.grid.size());
  for (long i = 0; i < mask.grid.size(); ++i) {
    values[i] = mask.member[static_cast<std::size_t>(i)] ? 1.0 : 0.0;
  }
  write_locf(path, static_cast<std::uint32_t>(mask.grid.dim()), values);
}

RegionMask read_mask_locf(const GridSpec& grid, const std::string& path) {
  const LocfData data = read_locf(path);
  if (data.m != static_cast<std::uint32_t>(grid.dim()) || data.values.size() != grid.size()) {
    throw std::runtime_error(path + ": payload shape does not match the grid");
  }
  RegionMask mask{grid, std::vector<std::uint8_t>(static_cast<std::size_t>(grid.size()), 0)};
  for (long i = 0; i < grid.size(); ++i) {
    mask.member[static_cast<std::size_t>(i)] = data.values[i] != 0.0 ? 1 : 0;
  }
  return mask;
}

}  // namespace localis
