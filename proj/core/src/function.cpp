#include "localis/function.hpp"

#include "localis/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace localis {

namespace {

constexpr double kLatticeTol = 1e-9;

void check_same_grid(const GridSpec& a, const GridSpec& b, const char* what) {
  if (!(a == b)) throw std::invalid_argument(std::string(what) + ": grids differ");
}

}  // namespace

long GridSpec::size() const {
  long total = 1;
  for (int a = 0; a < dim(); ++a) total *= per_axis;
  return total;
}

long GridSpec::index_of(const std::vector<long>& multi) const {
  if (static_cast<int>(multi.size()) != dim()) {
    throw std::invalid_argument("index_of: multi-index rank mismatch");
  }
  long flat = 0;
  for (int a = 0; a < dim(); ++a) {
    const long j = multi[a] - min_index;
    if (j < 0 || j >= per_axis) throw std::out_of_range("index_of: multi-index outside grid");
    flat = flat * per_axis + j;
  }
  return flat;
}

std::vector<long> GridSpec::multi_of(long flat) const {
  if (flat < 0 || flat >= size()) throw std::out_of_range("multi_of: flat index outside grid");
  std::vector<long> multi(static_cast<std::size_t>(dim()));
  for (int a = dim() - 1; a >= 0; --a) {
    multi[a] = flat % per_axis + min_index;
    flat /= per_axis;
  }
  return multi;
}

GroupElement GridSpec::point(const std::vector<long>& multi) const {
  if (static_cast<int>(multi.size()) != dim()) {
    throw std::invalid_argument("point: multi-index rank mismatch");
  }
  GroupElement x(multi.size());
  for (std::size_t a = 0; a < multi.size(); ++a) x[a] = h * static_cast<double>(multi[a]);
  return x;
}

GroupElement GridSpec::point(long flat) const { return point(multi_of(flat)); }

bool GridSpec::aligned(const GroupElement& x) const {
  if (static_cast<int>(x.size()) != dim()) {
    throw std::invalid_argument("aligned: element rank mismatch");
  }
  for (double c : x) {
    const double q = c / h;
    if (std::abs(q - std::round(q)) > kLatticeTol) return false;
  }
  return true;
}

bool GridSpec::inside(const GroupElement& x) const {
  if (static_cast<int>(x.size()) != dim()) {
    throw std::invalid_argument("inside: element rank mismatch");
  }
  const double lo = h * static_cast<double>(min_index);
  const double hi = h * static_cast<double>(min_index + per_axis);
  for (double c : x) {
    if (c < lo || c >= hi) return false;
  }
  return true;
}

std::optional<long> GridSpec::locate(const GroupElement& x) const {
  if (static_cast<int>(x.size()) != dim()) {
    throw std::invalid_argument("locate: element rank mismatch");
  }
  long flat = 0;
  for (int a = 0; a < dim(); ++a) {
    const double q = x[static_cast<std::size_t>(a)] / h;
    const double r = std::round(q);
    if (std::abs(q - r) > kLatticeTol) return std::nullopt;
    const long j = static_cast<long>(r) - min_index;
    if (j < 0 || j >= per_axis) return std::nullopt;
    flat = flat * per_axis + j;
  }
  return flat;
}

GridSpec make_grid(const GroupDescriptor& group, double h, double extent) {
  if (!(h > 0.0)) throw std::invalid_argument("make_grid: spacing must be positive");
  if (!(extent > 0.0)) throw std::invalid_argument("make_grid: extent must be positive");
  const double q = 2.0 * extent / h;
  const double r = std::round(q);
  if (std::abs(q - r) > kLatticeTol || r < 1.0) {
    throw std::invalid_argument("make_grid: 2*extent/h must be a positive integer, got " +
                                std::to_string(q));
  }
  GridSpec grid;
  grid.group = group;
  grid.h = h;
  grid.extent = extent;
  grid.per_axis = static_cast<int>(r);
  grid.min_index = -static_cast<long>(std::floor(extent / h + kLatticeTol));

  double total = 1.0;
  for (int a = 0; a < grid.dim(); ++a) total *= static_cast<double>(grid.per_axis);
  if (total > static_cast<double>(kMaxGridPoints)) {
    throw ResourceLimitError("make_grid: lattice would hold " + std::to_string(total) +
                             " points, budget is " + std::to_string(kMaxGridPoints));
  }
  return grid;
}

SampledFunction sample_function(const GridSpec& grid,
                                const std::function<double(const GroupElement&)>& f, double p) {
  SampledFunction out;
  out.grid = grid;
  out.p = p;
  out.values.resize(grid.size());
  for (long i = 0; i < grid.size(); ++i) out.values[i] = f(grid.point(i));
  return out;
}

double lp_norm(const SampledFunction& f) {
  if (!(f.p > 0.0)) throw std::invalid_argument("lp_norm: exponent must be positive");
  const double haar = std::pow(f.grid.h, f.grid.dim());
  double acc = 0.0;
  for (long i = 0; i < f.values.size(); ++i) {
    acc += std::pow(std::abs(f.values[i]), f.p);
  }
  return std::pow(acc * haar, 1.0 / f.p);
}

long RegionMask::count() const {
  return std::count(member.begin(), member.end(), std::uint8_t{1});
}

RegionMask make_box_mask(const GridSpec& grid, const GroupElement& lo, const GroupElement& hi) {
  if (static_cast<int>(lo.size()) != grid.dim() || static_cast<int>(hi.size()) != grid.dim()) {
    throw std::invalid_argument("make_box_mask: corner rank mismatch");
  }
  RegionMask mask{grid, std::vector<std::uint8_t>(static_cast<std::size_t>(grid.size()), 0)};
  for (long i = 0; i < grid.size(); ++i) {
    const GroupElement x = grid.point(i);
    bool in = true;
    for (int a = 0; a < grid.dim(); ++a) {
      if (x[static_cast<std::size_t>(a)] < lo[static_cast<std::size_t>(a)] - 1e-12 ||
          x[static_cast<std::size_t>(a)] > hi[static_cast<std::size_t>(a)] + 1e-12) {
        in = false;
        break;
      }
    }
    mask.member[static_cast<std::size_t>(i)] = in ? 1 : 0;
  }
  return mask;
}

RegionMask mask_and(const RegionMask& a, const RegionMask& b) {
  check_same_grid(a.grid, b.grid, "mask_and");
  RegionMask out = a;
  for (std::size_t i = 0; i < out.member.size(); ++i) out.member[i] = a.member[i] & b.member[i];
  return out;
}

RegionMask mask_or(const RegionMask& a, const RegionMask& b) {
  check_same_grid(a.grid, b.grid, "mask_or");
  RegionMask out = a;
  for (std::size_t i = 0; i < out.member.size(); ++i) out.member[i] = a.member[i] | b.member[i];
  return out;
}

RegionMask mask_minus(const RegionMask& a, const RegionMask& b) {
  check_same_grid(a.grid, b.grid, "mask_minus");
  RegionMask out = a;
  for (std::size_t i = 0; i < out.member.size(); ++i) {
    out.member[i] = static_cast<std::uint8_t>(a.member[i] & (1 - b.member[i]));
  }
  return out;
}

RegionMask mask_complement(const RegionMask& a) {
  RegionMask out = a;
  for (auto& bit : out.member) bit = static_cast<std::uint8_t>(1 - bit);
  return out;
}

bool mask_subset(const RegionMask& a, const RegionMask& b) {
  check_same_grid(a.grid, b.grid, "mask_subset");
  for (std::size_t i = 0; i < a.member.size(); ++i) {
    if (a.member[i] && !b.member[i]) return false;
  }
  return true;
}

bool mask_empty(const RegionMask& a) {
  return std::all_of(a.member.begin(), a.member.end(), [](std::uint8_t b) { return b == 0; });
}

SampledFunction project_region(const SampledFunction& f, const RegionMask& mask) {
  check_same_grid(f.grid, mask.grid, "project_region");
  SampledFunction out = f;
  for (long i = 0; i < out.values.size(); ++i) {
    if (!mask.member[static_cast<std::size_t>(i)]) out.values[i] = 0.0;
  }
  return out;
}

double pairing(const std::vector<SampledFunction>& f1, const std::vector<SampledFunction>& f2,
               const std::vector<double>& t_levels, const PairingOptions& opts) {
  if (f1.size() != f2.size() || f1.size() != t_levels.size()) {
    throw std::invalid_argument("pairing: family sizes and level count must agree");
  }
  if (f1.empty()) throw std::invalid_argument("pairing: at least one level required");
  for (double t : t_levels) {
    if (!(t > 0.0)) throw std::invalid_argument("pairing: scales must be positive");
  }
  for (std::size_t i = 0; i < f1.size(); ++i) {
    check_same_grid(f1[i].grid, f2[i].grid, "pairing");
  }

  // Per-level spatial inner product with the Haar weight h^m.
  std::vector<double> inner(t_levels.size());
  for (std::size_t i = 0; i < f1.size(); ++i) {
    const double haar = std::pow(f1[i].grid.h, f1[i].grid.dim());
    inner[i] = f1[i].values.dot(f2[i].values) * haar;
  }

  // Work on levels sorted by scale, fine end first.
  std::vector<std::size_t> order(t_levels.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return t_levels[a] < t_levels[b]; });
  for (std::size_t i = 1; i < order.size(); ++i) {
    if (t_levels[order[i]] == t_levels[order[i - 1]]) {
      throw std::invalid_argument("pairing: scales must be distinct");
    }
  }

  if (opts.kind == PairingKind::Hardy) {
    const double fine = inner[order[0]];
    if (!opts.richardson || order.size() < 2) return fine;
    // First-order Richardson step off the two finest scales.
    const double ta = t_levels[order[0]];
    const double tb = t_levels[order[1]];
    const double ia = inner[order[0]];
    const double ib = inner[order[1]];
    return (tb * ia - ta * ib) / (tb - ta);
  }

  if (order.size() < 2) {
    throw std::invalid_argument("pairing: scale integration needs at least two levels");
  }
  // Trapezoid rule in t against the scale-invariant weight dt / t^(k+1).
  const int k = f1[0].grid.group.homogeneous_dimension();
  double acc = 0.0;
  for (std::size_t i = 0; i < order.size(); ++i) {
    const double t = t_levels[order[i]];
    double dt = 0.0;
    if (i > 0) dt += 0.5 * (t - t_levels[order[i - 1]]);
    if (i + 1 < order.size()) dt += 0.5 * (t_levels[order[i + 1]] - t);
    acc += inner[order[i]] * dt / std::pow(t, k + 1);
  }
  return acc;
}

}  // namespace localis
