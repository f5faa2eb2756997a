#include "localis/operator_matrix.hpp"

#include "localis/errors.hpp"

#include <Eigen/SVD>

#include <stdexcept>
#include <string>

namespace localis {

void check_dense_budget(const GridSpec& grid, const char* what) {
  if (grid.size() > kMaxDenseSide) {
    throw ResourceLimitError(std::string(what) + ": dense matrix on " +
                             std::to_string(grid.size()) + " points exceeds the side budget " +
                             std::to_string(kMaxDenseSide));
  }
}

namespace {

void check_same_grid(const OperatorMatrix& a, const OperatorMatrix& b, const char* what) {
  if (!(a.grid == b.grid)) throw std::invalid_argument(std::string(what) + ": grids differ");
}

}  // namespace

OperatorMatrix make_operator(const GridSpec& grid, Eigen::MatrixXd entries) {
  if (entries.rows() != grid.size() || entries.cols() != grid.size()) {
    throw std::invalid_argument("make_operator: entries must be N x N for the grid");
  }
  return OperatorMatrix{grid, std::move(entries)};
}

OperatorMatrix operator_add(const OperatorMatrix& a, const OperatorMatrix& b) {
  check_same_grid(a, b, "operator_add");
  return OperatorMatrix{a.grid, a.entries + b.entries};
}

OperatorMatrix operator_sub(const OperatorMatrix& a, const OperatorMatrix& b) {
  check_same_grid(a, b, "operator_sub");
  return OperatorMatrix{a.grid, a.entries - b.entries};
}

OperatorMatrix operator_mul(const OperatorMatrix& a, const OperatorMatrix& b) {
  check_same_grid(a, b, "operator_mul");
  return OperatorMatrix{a.grid, a.entries * b.entries};
}

SampledFunction apply(const OperatorMatrix& A, const SampledFunction& f) {
  if (!(A.grid == f.grid)) throw std::invalid_argument("apply: grids differ");
  return SampledFunction{f.grid, A.entries * f.values, f.p};
}

std::vector<double> singular_values(const Eigen::MatrixXd& m) {
  Eigen::BDCSVD<Eigen::MatrixXd> svd(m);
  const auto& s = svd.singularValues();
  return std::vector<double>(s.data(), s.data() + s.size());
}

double operator_norm(const Eigen::MatrixXd& m) {
  if (m.size() == 0) return 0.0;
  Eigen::BDCSVD<Eigen::MatrixXd> svd(m);
  return svd.singularValues()(0);
}

}  // namespace localis
