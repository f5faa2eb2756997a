#include "localis/operators.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

namespace localis {

namespace {

constexpr double kRegionTol = 1e-12;

/// Closed coordinate box of a window: declared half-widths when present,
/// otherwise the hull of the support points.
std::pair<GroupElement, GroupElement> window_box(const WindowSpec& W) {
  const GridSpec& grid = W.support.grid;
  if (W.halfwidths) {
    GroupElement lo(W.halfwidths->size()), hi(W.halfwidths->size());
    for (std::size_t a = 0; a < W.halfwidths->size(); ++a) {
      lo[a] = -(*W.halfwidths)[a];
      hi[a] = (*W.halfwidths)[a];
    }
    return {lo, hi};
  }
  GroupElement lo(static_cast<std::size_t>(grid.dim()), 0.0);
  GroupElement hi(static_cast<std::size_t>(grid.dim()), 0.0);
  bool first = true;
  for (long i = 0; i < grid.size(); ++i) {
    if (!W.support.member[static_cast<std::size_t>(i)]) continue;
    const GroupElement x = grid.point(i);
    for (int a = 0; a < grid.dim(); ++a) {
      const auto ia = static_cast<std::size_t>(a);
      lo[ia] = first ? x[ia] : std::min(lo[ia], x[ia]);
      hi[ia] = first ? x[ia] : std::max(hi[ia], x[ia]);
    }
    first = false;
  }
  if (first) throw std::invalid_argument("window_box: empty window support");
  return {lo, hi};
}

bool in_box(const GroupElement& x, const GroupElement& lo, const GroupElement& hi) {
  for (std::size_t a = 0; a < x.size(); ++a) {
    if (x[a] < lo[a] - kRegionTol || x[a] > hi[a] + kRegionTol) return false;
  }
  return true;
}

}  // namespace

OperatorMatrix multiplication_operator(const SampledFunction& a) {
  check_dense_budget(a.grid, "multiplication_operator");
  Eigen::MatrixXd entries = Eigen::MatrixXd::Zero(a.grid.size(), a.grid.size());
  entries.diagonal() = a.values;
  return OperatorMatrix{a.grid, std::move(entries)};
}

OperatorMatrix group_convolution(const SampledFunction& kernel) {
  const GridSpec& grid = kernel.grid;
  check_dense_budget(grid, "group_convolution");
  const double haar = std::pow(grid.h, grid.dim());
  Eigen::MatrixXd entries = Eigen::MatrixXd::Zero(grid.size(), grid.size());
  for (long j = 0; j < grid.size(); ++j) {
    const GroupElement hj_inv = inverse(grid.group, grid.point(j));
    for (long i = 0; i < grid.size(); ++i) {
      const GroupElement arg = compose(grid.group, hj_inv, grid.point(i));
      if (const auto idx = grid.locate(arg)) entries(i, j) = kernel.values[*idx] * haar;
    }
  }
  return OperatorMatrix{grid, std::move(entries)};
}

OperatorMatrix hilbert_transform(const GridSpec& grid) {
  if (grid.group.kind != GroupKind::Euclidean || grid.group.n != 1) {
    throw std::invalid_argument("hilbert_transform: needs a Euclidean(1) grid");
  }
  check_dense_budget(grid, "hilbert_transform");
  const long n = grid.size();
  Eigen::MatrixXd entries = Eigen::MatrixXd::Zero(n, n);
  // h/(pi (x_j - x_k)) with x_j - x_k = h (j - k): the spacing cancels, and
  // computing from the index difference keeps equal diagonals bit-identical.
  for (long i = 0; i < n; ++i) {
    for (long j = 0; j < n; ++j) {
      if (i == j) continue;
      entries(i, j) = 1.0 / (std::numbers::pi * static_cast<double>(i - j));
    }
  }
  return OperatorMatrix{grid, std::move(entries)};
}

OperatorMatrix finite_rank(const GridSpec& grid, const std::vector<SampledFunction>& columns,
                           const std::vector<SampledFunction>& rows) {
  if (columns.size() != rows.size()) {
    throw std::invalid_argument("finite_rank: column and row lists differ in length");
  }
  if (columns.empty()) return zero_operator(grid);
  check_dense_budget(grid, "finite_rank");
  Eigen::MatrixXd entries = Eigen::MatrixXd::Zero(grid.size(), grid.size());
  for (std::size_t i = 0; i < columns.size(); ++i) {
    if (!(columns[i].grid == grid) || !(rows[i].grid == grid)) {
      throw std::invalid_argument("finite_rank: all factors must share one grid");
    }
    entries += columns[i].values * rows[i].values.transpose();
  }
  return OperatorMatrix{grid, std::move(entries)};
}

OperatorMatrix identity_operator(const GridSpec& grid) {
  check_dense_budget(grid, "identity_operator");
  return OperatorMatrix{grid, Eigen::MatrixXd::Identity(grid.size(), grid.size())};
}

OperatorMatrix zero_operator(const GridSpec& grid) {
  check_dense_budget(grid, "zero_operator");
  return OperatorMatrix{grid, Eigen::MatrixXd::Zero(grid.size(), grid.size())};
}

OperatorMatrix projection_matrix(const RegionMask& mask) {
  check_dense_budget(mask.grid, "projection_matrix");
  Eigen::MatrixXd entries = Eigen::MatrixXd::Zero(mask.grid.size(), mask.grid.size());
  for (long i = 0; i < mask.grid.size(); ++i) {
    if (mask.member[static_cast<std::size_t>(i)]) entries(i, i) = 1.0;
  }
  return OperatorMatrix{mask.grid, std::move(entries)};
}

WindowSpec make_box_window(const GridSpec& grid, const GroupElement& halfwidths,
                           std::optional<double> r_cover) {
  if (static_cast<int>(halfwidths.size()) != grid.dim()) {
    throw std::invalid_argument("make_box_window: half-width rank mismatch");
  }
  for (double w : halfwidths) {
    if (!(w >= 0.0)) throw std::invalid_argument("make_box_window: half-widths must be >= 0");
  }
  GroupElement lo(halfwidths.size()), hi(halfwidths.size());
  for (std::size_t a = 0; a < halfwidths.size(); ++a) {
    lo[a] = -halfwidths[a];
    hi[a] = halfwidths[a];
  }
  WindowSpec W{make_box_mask(grid, lo, hi), r_cover, halfwidths};
  const auto id = grid.locate(identity(grid.group));
  if (!id || !W.support.member[static_cast<std::size_t>(*id)]) {
    throw std::invalid_argument("make_box_window: window must contain the identity point");
  }
  return W;
}

std::vector<long> window_indices(const WindowSpec& W) {
  std::vector<long> idx;
  for (long i = 0; i < W.support.grid.size(); ++i) {
    if (W.support.member[static_cast<std::size_t>(i)]) idx.push_back(i);
  }
  return idx;
}

MaskImage transform_mask(const ScaledElement& s, const RegionMask& F) {
  const GridSpec& grid = F.grid;
  MaskImage out{RegionMask{grid, std::vector<std::uint8_t>(F.member.size(), 0)}, 0};
  for (long i = 0; i < grid.size(); ++i) {
    if (!F.member[static_cast<std::size_t>(i)]) continue;
    const GroupElement y = scaled_action(grid.group, s, grid.point(i));
    if (const auto j = grid.locate(y)) {
      out.mask.member[static_cast<std::size_t>(*j)] = 1;
    } else {
      ++out.truncated;
    }
  }
  return out;
}

bool window_region_member(const WindowSpec& W, const ScaledElement& s, const GroupElement& x) {
  const auto [lo, hi] = window_box(W);
  const GroupElement pulled =
      scaled_action(W.support.grid.group, scaled_inverse(W.support.grid.group, s), x);
  return in_box(pulled, lo, hi);
}

double enorm_proxy(const Eigen::MatrixXd& A, int rank) {
  const long n = std::min(A.rows(), A.cols());
  if (rank < 0 || rank >= n) {
    throw std::invalid_argument("enorm_proxy: rank must lie in [0, N)");
  }
  const std::vector<double> s = singular_values(A);
  return s[static_cast<std::size_t>(rank)];
}

double enorm_proxy(const OperatorMatrix& A, int rank) { return enorm_proxy(A.entries, rank); }

double local_type_score(const OperatorMatrix& A, double separation, int rank, int trials,
                        std::uint64_t seed) {
  const GridSpec& grid = A.grid;
  if (!(separation >= 2.0 * grid.h)) {
    throw std::invalid_argument("local_type_score: separation must be at least 2h");
  }
  if (trials < 1) throw std::invalid_argument("local_type_score: need at least one trial");

  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<long> pick_lo(grid.min_index, grid.min_index + grid.per_axis - 1);
  std::uniform_int_distribution<long> pick_width(0, std::max(1, grid.per_axis / 4));

  const int m = grid.dim();
  struct Box {
    std::vector<long> lo, hi;
  };
  auto draw_box = [&] {
    Box b;
    b.lo.resize(static_cast<std::size_t>(m));
    b.hi.resize(static_cast<std::size_t>(m));
    for (int a = 0; a < m; ++a) {
      const long lo = pick_lo(rng);
      b.lo[static_cast<std::size_t>(a)] = lo;
      b.hi[static_cast<std::size_t>(a)] =
          std::min(lo + pick_width(rng), grid.min_index + grid.per_axis - 1);
    }
    return b;
  };
  auto box_gap = [&](const Box& b1, const Box& b2) {
    double acc = 0.0;
    for (int a = 0; a < m; ++a) {
      const auto ia = static_cast<std::size_t>(a);
      const double g = grid.h * static_cast<double>(
                                    std::max({long{0}, b2.lo[ia] - b1.hi[ia], b1.lo[ia] - b2.hi[ia]}));
      acc += g * g;
    }
    return std::sqrt(acc);
  };
  auto box_points = [&](const Box& b) {
    std::vector<long> idx;
    std::vector<long> multi(b.lo.begin(), b.lo.end());
    for (;;) {
      idx.push_back(grid.index_of(multi));
      int a = m - 1;
      for (; a >= 0; --a) {
        if (++multi[static_cast<std::size_t>(a)] <= b.hi[static_cast<std::size_t>(a)]) break;
        multi[static_cast<std::size_t>(a)] = b.lo[static_cast<std::size_t>(a)];
      }
      if (a < 0) break;
    }
    return idx;
  };

  double score = 0.0;
  long accepted = 0;
  for (int trial = 0; trial < trials; ++trial) {
    for (int attempt = 0; attempt < 500; ++attempt) {
      const Box b1 = draw_box();
      const Box b2 = draw_box();
      if (box_gap(b1, b2) < separation - kRegionTol) continue;
      const std::vector<long> r = box_points(b1);
      const std::vector<long> c = box_points(b2);
      Eigen::MatrixXd sub(r.size(), c.size());
      for (std::size_t i = 0; i < r.size(); ++i) {
        for (std::size_t j = 0; j < c.size(); ++j) {
          sub(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
              A.entries(r[i], c[j]);
        }
      }
      // P_{F1} A P_{F2} shares its nonzero singular values with this
      // submatrix; ranks beyond its size see an exact zero.
      const std::vector<double> s = singular_values(sub);
      const double proxy = rank < static_cast<int>(s.size()) ? s[static_cast<std::size_t>(rank)] : 0.0;
      score = std::max(score, proxy);
      ++accepted;
      break;
    }
  }
  if (accepted == 0) {
    throw std::invalid_argument("local_type_score: no box pair at the requested separation fits");
  }
  return score;
}

namespace {

RegionMask placement_mask(const WindowSpec& W, const GroupElement& g) {
  const GridSpec& grid = W.support.grid;
  const auto [lo, hi] = window_box(W);
  RegionMask mask{grid, std::vector<std::uint8_t>(static_cast<std::size_t>(grid.size()), 0)};
  const ScaledElement sinv = scaled_inverse(grid.group, ScaledElement{1.0, g});
  for (long i = 0; i < grid.size(); ++i) {
    if (in_box(scaled_action(grid.group, sinv, grid.point(i)), lo, hi)) {
      mask.member[static_cast<std::size_t>(i)] = 1;
    }
  }
  return mask;
}

}  // namespace

std::optional<GroupElement> covering_witness(const WindowSpec& W, double r,
                                             const GroupElement& g1, const GroupElement& g2) {
  if (!(r > 0.0)) throw std::invalid_argument("covering_witness: r must be positive");
  const GridSpec& grid = W.support.grid;
  const auto [lo, hi] = window_box(W);
  const RegionMask u = mask_or(placement_mask(W, g1), placement_mask(W, g2));
  std::vector<GroupElement> union_points;
  for (long i = 0; i < grid.size(); ++i) {
    if (u.member[static_cast<std::size_t>(i)]) union_points.push_back(grid.point(i));
  }
  if (union_points.empty()) {
    throw std::invalid_argument("covering_witness: placements are not visible on the grid");
  }
  for (long cand = 0; cand < grid.size(); ++cand) {
    const ScaledElement sinv = scaled_inverse(grid.group, ScaledElement{r, grid.point(cand)});
    bool all = true;
    for (const GroupElement& x : union_points) {
      if (!in_box(scaled_action(grid.group, sinv, x), lo, hi)) {
        all = false;
        break;
      }
    }
    if (all) return grid.point(cand);
  }
  return std::nullopt;
}

SelfCoveringReport self_covering_check(const WindowSpec& W, double r, int samples,
                                       std::uint64_t seed) {
  if (!(r > 0.0)) throw std::invalid_argument("self_covering_check: r must be positive");
  const GridSpec& grid = W.support.grid;
  const auto [lo, hi] = window_box(W);

  // Candidate centers g1, g2 keep the placed window inside the extent so the
  // union is fully visible on the lattice.
  std::vector<long> center_range_lo(static_cast<std::size_t>(grid.dim()));
  std::vector<long> center_range_hi(static_cast<std::size_t>(grid.dim()));
  for (int a = 0; a < grid.dim(); ++a) {
    const auto ia = static_cast<std::size_t>(a);
    const long margin = static_cast<long>(std::ceil(std::max(-lo[ia], hi[ia]) / grid.h));
    center_range_lo[ia] = grid.min_index + margin;
    center_range_hi[ia] = grid.min_index + grid.per_axis - 1 - margin;
    if (center_range_lo[ia] > center_range_hi[ia]) {
      throw std::invalid_argument("self_covering_check: window too large for the grid extent");
    }
  }

  std::mt19937_64 rng(seed);
  std::vector<std::pair<GroupElement, GroupElement>> tasks;
  // Deterministic extreme pairs: along each axis, two placements touching at
  // a single point (the worst case for the covering radius).
  for (int a = 0; a < grid.dim(); ++a) {
    const auto ia = static_cast<std::size_t>(a);
    GroupElement g1 = identity(grid.group);
    GroupElement g2 = identity(grid.group);
    const double span = hi[ia] - lo[ia];
    const double snapped = grid.h * std::round(span / grid.h);
    g2[ia] = snapped;
    tasks.emplace_back(g1, g2);
  }
  // Seeded random intersecting pairs.
  for (int srow = 0; srow < samples; ++srow) {
    for (int attempt = 0; attempt < 500; ++attempt) {
      GroupElement g1(static_cast<std::size_t>(grid.dim()));
      GroupElement g2(static_cast<std::size_t>(grid.dim()));
      for (int a = 0; a < grid.dim(); ++a) {
        const auto ia = static_cast<std::size_t>(a);
        std::uniform_int_distribution<long> pick(center_range_lo[ia], center_range_hi[ia]);
        g1[ia] = grid.h * static_cast<double>(pick(rng));
        g2[ia] = grid.h * static_cast<double>(pick(rng));
      }
      if (mask_empty(mask_and(placement_mask(W, g1), placement_mask(W, g2)))) continue;
      tasks.emplace_back(g1, g2);
      break;
    }
  }

  SelfCoveringReport report;
  report.r = r;
  report.covered = true;
  for (const auto& [g1, g2] : tasks) {
    CoveringPair pair{g1, g2, false, identity(grid.group)};
    if (const auto witness = covering_witness(W, r, g1, g2)) {
      pair.found = true;
      pair.witness = *witness;
    } else {
      report.covered = false;
    }
    report.pairs.push_back(std::move(pair));
  }
  return report;
}

InvarianceScores invariance_scores(const RepParams& params, const OperatorMatrix& A,
                                   const WindowSpec& W, const std::vector<double>& t_samples,
                                   const std::vector<GroupElement>& g_samples) {
  if (!(A.grid == params.grid) || !(W.support.grid == params.grid)) {
    throw std::invalid_argument("invariance_scores: grid mismatch");
  }
  const double norm_a = operator_norm(A.entries);
  InvarianceScores scores;
  if (norm_a == 0.0) return scores;

  const Eigen::MatrixXd P = projection_matrix(W.support).entries;
  auto commutator_score = [&](const ScaledElement& s) {
    const Eigen::MatrixXd M = act_matrix(params, s).entries;
    const Eigen::MatrixXd C = P * (M * A.entries - A.entries * M) * P;
    return operator_norm(C) / norm_a;
  };
  const GroupElement e = identity(params.grid.group);
  for (double t : t_samples) scores.homog = std::max(scores.homog, commutator_score({t, e}));
  for (const GroupElement& g : g_samples) {
    scores.shift = std::max(scores.shift, commutator_score({1.0, g}));
  }
  return scores;
}

}  // namespace localis
