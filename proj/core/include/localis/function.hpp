#pragma once

#include "localis/group.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

namespace localis {

/// Uniform lattice on the coordinate cube [-extent, extent)^m of a group's
/// exponential coordinates.  Every axis carries the same spacing h; points
/// are h * (index + min_index) with integer multi-indices, and functions are
/// extended by zero outside the cube.
struct GridSpec {
  GroupDescriptor group;
  double h = 1.0;
  double extent = 1.0;
  int per_axis = 0;    // points per axis = 2 * extent / h
  long min_index = 0;  // first lattice integer per axis, -per_axis/2

  int dim() const { return group.dim(); }
  long size() const;

  /// Flat index of an in-range multi-index (row-major, axis 0 slowest).
  long index_of(const std::vector<long>& multi) const;
  std::vector<long> multi_of(long flat) const;
  /// Coordinates of the lattice point at a multi-index.
  GroupElement point(const std::vector<long>& multi) const;
  GroupElement point(long flat) const;

  /// True when every coordinate of x sits on the lattice (within 1e-9 of an
  /// integer multiple of h).
  bool aligned(const GroupElement& x) const;
  /// True when x lies inside the cube [-extent, extent)^m.
  bool inside(const GroupElement& x) const;
  /// Flat index of x when x is aligned and inside; nullopt otherwise.
  std::optional<long> locate(const GroupElement& x) const;

  friend bool operator==(const GridSpec&, const GridSpec&) = default;
};

/// Builds a grid, validating that 2*extent/h is a positive integer and that
/// the total point count stays within the dense-storage budget.
GridSpec make_grid(const GroupDescriptor& group, double h, double extent);

/// Hard cap on lattice sizes; larger requests throw ResourceLimitError.
inline constexpr long kMaxGridPoints = 1L << 20;

/// Scalar samples over a grid together with the exponent of the L^p scale
/// the samples are measured in.
struct SampledFunction {
  GridSpec grid;
  Eigen::VectorXd values;
  double p = 2.0;
};

SampledFunction sample_function(const GridSpec& grid,
                                const std::function<double(const GroupElement&)>& f,
                                double p = 2.0);

/// Discrete L^p norm: (sum |f|^p h^m)^(1/p), the Haar weight being h^dim.
double lp_norm(const SampledFunction& f);

/// Subset of lattice points, stored densely as 0/1 flags.
struct RegionMask {
  GridSpec grid;
  std::vector<std::uint8_t> member;

  long count() const;
};

/// Mask of the closed coordinate box [lo, hi] (componentwise).
RegionMask make_box_mask(const GridSpec& grid, const GroupElement& lo, const GroupElement& hi);

RegionMask mask_and(const RegionMask& a, const RegionMask& b);
RegionMask mask_or(const RegionMask& a, const RegionMask& b);
RegionMask mask_minus(const RegionMask& a, const RegionMask& b);
RegionMask mask_complement(const RegionMask& a);
bool mask_subset(const RegionMask& a, const RegionMask& b);
bool mask_empty(const RegionMask& a);

/// Zeroes samples outside the mask.
SampledFunction project_region(const SampledFunction& f, const RegionMask& mask);

/// How two scale-indexed families of samples are paired into one number.
enum class PairingKind {
  Haar,   // integrate over scales against the Haar weight dt / t^(k+1)
  Hardy,  // evaluate the finest-scale pairing (optionally extrapolated)
};

struct PairingOptions {
  PairingKind kind = PairingKind::Haar;
  /// Hardy only: Richardson-extrapolate from the two finest levels,
  /// assuming first-order convergence in t.
  bool richardson = false;
};

/// Pairs two families {f1[i]}, {f2[i]} sampled at scales t_levels[i] (strictly
/// decreasing towards the fine end).  Haar needs at least two levels to carry
/// a quadrature; Hardy reads off the finest level.
double pairing(const std::vector<SampledFunction>& f1, const std::vector<SampledFunction>& f2,
               const std::vector<double>& t_levels, const PairingOptions& opts);

}  // namespace localis
