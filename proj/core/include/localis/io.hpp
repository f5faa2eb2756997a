#pragma once

#include "localis/function.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <string>
#include <vector>

namespace localis {

/// Vector payload of a "LOCF" file: 16-byte header (magic, format version,
/// coordinate count m, sample count N), then N little-endian doubles.
struct LocfData {
  std::uint32_t m = 0;
  Eigen::VectorXd values;
};

void write_locf(const std::string& path, std::uint32_t m, const Eigen::VectorXd& values);
LocfData read_locf(const std::string& path);

/// Square-matrix payload of a "LOCM" file: 12-byte header (magic, format
/// version, side length N), then N*N row-major little-endian doubles.
void write_locm(const std::string& path, const Eigen::MatrixXd& matrix);
Eigen::MatrixXd read_locm(const std::string& path);

/// CSV with one header row "x0,...,x{m-1},value" and one row per lattice
/// point.  Import starts from zero samples and fills rows that land on the
/// grid; off-lattice rows are an error.
void write_function_csv(const std::string& path, const SampledFunction& f);
SampledFunction read_function_csv(const GridSpec& grid, const std::string& path, double p = 2.0);
void write_mask_csv(const std::string& path, const RegionMask& mask);
RegionMask read_mask_csv(const GridSpec& grid, const std::string& path);

/// Headerless CSV, one matrix row per line.
void write_matrix_csv(const std::string& path, const Eigen::MatrixXd& matrix);
Eigen::MatrixXd read_matrix_csv(const std::string& path);

/// Singular-value report: header "index,sigma".
void write_sigma_csv(const std::string& path, const std::vector<double>& sigmas);

/// Binary round-trip helpers for SampledFunction / RegionMask (LOCF payload;
/// masks are stored as 0.0/1.0 flags).  Reading validates m and N against
/// the supplied grid.
void write_function_locf(const std::string& path, const SampledFunction& f);
SampledFunction read_function_locf(const GridSpec& grid, const std::string& path, double p = 2.0);
void write_mask_locf(const std::string& path, const RegionMask& mask);
RegionMask read_mask_locf(const GridSpec& grid, const std::string& path);

/// Formats a double with enough digits to round-trip exactly.
std::string format_double(double v);

}  // namespace localis
