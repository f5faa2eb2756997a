#pragma once

#include "localis/function.hpp"

#include <Eigen/Dense>

namespace localis {

/// Dense N x N matrix acting on SampledFunction values over a fixed grid.
/// Application is plain matrix-vector product; quadrature weights (the Haar
/// factor h^m) are baked into constructors that discretize integral kernels.
struct OperatorMatrix {
  GridSpec grid;
  Eigen::MatrixXd entries;
};

/// Dense-matrix side budget; constructors refuse grids whose N x N storage
/// would blow past it (vector-level act() remains available on such grids).
inline constexpr long kMaxDenseSide = 4096;

/// Throws ResourceLimitError when grid.size() > kMaxDenseSide.
void check_dense_budget(const GridSpec& grid, const char* what);

OperatorMatrix make_operator(const GridSpec& grid, Eigen::MatrixXd entries);
OperatorMatrix operator_add(const OperatorMatrix& a, const OperatorMatrix& b);
OperatorMatrix operator_sub(const OperatorMatrix& a, const OperatorMatrix& b);
OperatorMatrix operator_mul(const OperatorMatrix& a, const OperatorMatrix& b);

SampledFunction apply(const OperatorMatrix& A, const SampledFunction& f);

/// Full singular spectrum, descending.
std::vector<double> singular_values(const Eigen::MatrixXd& m);
/// Largest singular value.
double operator_norm(const Eigen::MatrixXd& m);

}  // namespace localis
