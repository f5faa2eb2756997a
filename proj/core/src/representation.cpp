#include "localis/representation.hpp"

#include <cmath>
#include <optional>
#include <stdexcept>
#include <vector>

namespace localis {

namespace {

bool is_power_of_two(double t) {
  const double l = std::log2(t);
  return std::abs(l - std::round(l)) <= 1e-9;
}

void check_exact_scale(double t, const char* what) {
  if (!(t > 0.0) || !is_power_of_two(t)) {
    throw std::invalid_argument(std::string(what) +
                                ": ExactAligned mode needs a power-of-two scale, got " +
                                std::to_string(t));
  }
}

/// Up to 2^m lattice reads with weights approximating evaluation at x;
/// empty when x falls outside the extent.  ExactAligned uses the single
/// exact lattice hit.
struct Stencil {
  std::vector<std::pair<long, double>> taps;
};

Stencil interp_stencil(const GridSpec& grid, const GroupElement& x) {
  const int m = grid.dim();
  std::vector<long> base(static_cast<std::size_t>(m));
  std::vector<double> frac(static_cast<std::size_t>(m));
  for (int a = 0; a < m; ++a) {
    const double q = x[static_cast<std::size_t>(a)] / grid.h;
    const double f = std::floor(q);
    base[static_cast<std::size_t>(a)] = static_cast<long>(f);
    frac[static_cast<std::size_t>(a)] = q - f;
  }
  Stencil st;
  const int corners = 1 << m;
  for (int c = 0; c < corners; ++c) {
    double w = 1.0;
    long flat = 0;
    bool in = true;
    for (int a = 0; a < m; ++a) {
      const int hi = (c >> a) & 1;
      w *= hi ? frac[static_cast<std::size_t>(a)] : 1.0 - frac[static_cast<std::size_t>(a)];
      const long idx = base[static_cast<std::size_t>(a)] + hi - grid.min_index;
      if (idx < 0 || idx >= grid.per_axis) {
        in = false;
        break;
      }
      flat = flat * grid.per_axis + idx;
    }
    if (in && w != 0.0) st.taps.emplace_back(flat, w);
  }
  return st;
}

}  // namespace

SampledFunction act(const RepParams& params, const ScaledElement& s, const SampledFunction& f) {
  if (!(f.grid == params.grid)) throw std::invalid_argument("act: function grid mismatch");
  const GridSpec& grid = params.grid;
  const int k = grid.group.homogeneous_dimension();
  const double amp = std::pow(s.t, -static_cast<double>(k) / params.p);
  const ScaledElement sinv = scaled_inverse(grid.group, s);
  const bool strict = params.mode == RepMode::ExactAligned && s.t <= 1.0;
  if (params.mode == RepMode::ExactAligned) check_exact_scale(s.t, "act");

  SampledFunction out{grid, Eigen::VectorXd::Zero(grid.size()), params.p};
  for (long i = 0; i < grid.size(); ++i) {
    const GroupElement xi = grid.point(i);
    const GroupElement pulled = scaled_action(grid.group, sinv, xi);
    if (params.mode == RepMode::Interpolated) {
      double acc = 0.0;
      for (const auto& [j, w] : interp_stencil(grid, pulled).taps) acc += w * f.values[j];
      out.values[i] = amp * acc;
      continue;
    }
    if (const auto j = grid.locate(pulled)) {
      out.values[i] = amp * f.values[*j];
    } else if (strict && grid.inside(pulled)) {
      throw std::invalid_argument(
          "act: pullback of an in-extent point misses the lattice; (t,g) is not grid-aligned");
    }
  }
  return out;
}

OperatorMatrix act_matrix(const RepParams& params, const ScaledElement& s) {
  const GridSpec& grid = params.grid;
  check_dense_budget(grid, "act_matrix");
  const int k = grid.group.homogeneous_dimension();
  const double amp = std::pow(s.t, -static_cast<double>(k) / params.p);
  const ScaledElement sinv = scaled_inverse(grid.group, s);
  const bool strict = params.mode == RepMode::ExactAligned && s.t <= 1.0;
  if (params.mode == RepMode::ExactAligned) check_exact_scale(s.t, "act_matrix");

  Eigen::MatrixXd entries = Eigen::MatrixXd::Zero(grid.size(), grid.size());
  for (long i = 0; i < grid.size(); ++i) {
    const GroupElement pulled = scaled_action(grid.group, sinv, grid.point(i));
    if (params.mode == RepMode::Interpolated) {
      for (const auto& [j, w] : interp_stencil(grid, pulled).taps) entries(i, j) = amp * w;
      continue;
    }
    if (const auto j = grid.locate(pulled)) {
      entries(i, *j) = amp;
    } else if (strict && grid.inside(pulled)) {
      throw std::invalid_argument(
          "act_matrix: pullback of an in-extent point misses the lattice; (t,g) is not "
          "grid-aligned");
    }
  }
  return OperatorMatrix{grid, std::move(entries)};
}

OperatorMatrix double_act(const RepParams& params, const ScaledElement& left,
                          const ScaledElement& right, const OperatorMatrix& A) {
  const GridSpec& grid = params.grid;
  if (!(A.grid == grid)) throw std::invalid_argument("double_act: operator grid mismatch");

  if (params.mode == RepMode::Interpolated) {
    const OperatorMatrix L = act_matrix(params, scaled_inverse(grid.group, left));
    const OperatorMatrix R = act_matrix(params, right);
    return OperatorMatrix{grid, L.entries * A.entries * R.entries};
  }

  check_exact_scale(left.t, "double_act");
  check_exact_scale(right.t, "double_act");
  const int k = grid.group.homogeneous_dimension();
  // One fused scale factor: the left factor act_matrix(left^{-1}) carries
  // (1/t_l)^(-k/p) and the right carries t_r^(-k/p); their product collapses
  // to (t_l/t_r)^(k/p), which is exactly 1.0 at equal scales where the
  // two-pow route can drift by an ulp.
  const double scale = std::pow(left.t / right.t, static_cast<double>(k) / params.p);

  // Row map of the left factor: its pullback at row x is left |> x, strict
  // whenever its own scale 1/t_l is <= 1.
  std::vector<std::optional<long>> lmap(static_cast<std::size_t>(grid.size()));
  const bool left_strict = left.t >= 1.0;
  for (long i = 0; i < grid.size(); ++i) {
    const GroupElement y = scaled_action(grid.group, left, grid.point(i));
    lmap[static_cast<std::size_t>(i)] = grid.locate(y);
    if (!lmap[static_cast<std::size_t>(i)] && left_strict && grid.inside(y)) {
      throw std::invalid_argument("double_act: left map is not grid-aligned");
    }
  }
  // The right factor is strict when t_r <= 1; its rows pull back through
  // right^{-1}, so scan those points for alignment before gathering columns
  // through the forward map.
  if (right.t <= 1.0) {
    const ScaledElement rinv = scaled_inverse(grid.group, right);
    for (long b = 0; b < grid.size(); ++b) {
      const GroupElement pulled = scaled_action(grid.group, rinv, grid.point(b));
      if (!grid.locate(pulled) && grid.inside(pulled)) {
        throw std::invalid_argument("double_act: right map is not grid-aligned");
      }
    }
  }
  std::vector<std::optional<long>> rmap(static_cast<std::size_t>(grid.size()));
  for (long j = 0; j < grid.size(); ++j) {
    rmap[static_cast<std::size_t>(j)] = grid.locate(scaled_action(grid.group, right, grid.point(j)));
  }

  Eigen::MatrixXd entries = Eigen::MatrixXd::Zero(grid.size(), grid.size());
  for (long i = 0; i < grid.size(); ++i) {
    if (!lmap[static_cast<std::size_t>(i)]) continue;
    const long a = *lmap[static_cast<std::size_t>(i)];
    for (long j = 0; j < grid.size(); ++j) {
      if (!rmap[static_cast<std::size_t>(j)]) continue;
      entries(i, j) = scale * A.entries(a, *rmap[static_cast<std::size_t>(j)]);
    }
  }
  return OperatorMatrix{grid, std::move(entries)};
}

}  // namespace localis
