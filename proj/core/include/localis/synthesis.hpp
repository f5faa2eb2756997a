#pragma once

#include "localis/localization.hpp"

#include <functional>
#include <string>
#include <vector>

namespace localis {

/// Pairwise-disjoint cells with one anchor point inside each.
struct Partition {
  std::vector<RegionMask> cells;
  std::vector<GroupElement> anchors;
};

/// Throws invalid_argument unless cells are pairwise disjoint on the lattice
/// and every anchor lies in its cell.
void validate_partition(const Partition& P);

/// Splits the lattice points of the closed box [lo, hi] into 2^depth
/// index-contiguous slabs per axis; anchors are the central lattice point of
/// each cell.  Cells are exactly disjoint and exactly cover the box.
Partition dyadic_partition(const GridSpec& grid, const GroupElement& lo, const GroupElement& hi,
                           int depth);

/// sum_j P_{cell_j} locals[j] P_{cell_j}: the block-diagonal envelope formed
/// from the local representatives.
OperatorMatrix envelope_sum(const Partition& P, const std::vector<OperatorMatrix>& locals);

/// One refinement row: error of the depth-d envelope against the target,
/// both restricted to the partitioned box.
struct RefineRow {
  int depth = 0;
  double norm = 0.0;
  double proxy = 0.0;
};

/// Builds dyadic partitions of [lo, hi] at the listed depths, assembles the
/// envelope of local_rule(anchor), and reports operator-norm and
/// proxy-at-rank errors against the box-restricted target.
std::vector<RefineRow> envelope_refine(const OperatorMatrix& target,
                                       const std::function<OperatorMatrix(const GroupElement&)>& local_rule,
                                       const GroupElement& lo, const GroupElement& hi,
                                       const std::vector<int>& depths, int proxy_rank);

/// Full-size operator assignment over scales and base points; entry (i, j)
/// belongs to (t_levels[i], g_lattice[j]).
struct OperatorField {
  std::vector<double> t_levels;
  std::vector<GroupElement> g_lattice;
  std::vector<std::vector<OperatorMatrix>> ops;
};

/// Re-embeds each w x w symbol block as the full-size window sandwich
/// P_{F_(t,g)} A P_{F_(t,g)} it came from (exact for grid-aligned data); the
/// resulting field feeds the inverse transform without access to A itself.
OperatorField field_from_symbols(const RepParams& params, const SymbolField& field);

/// Field with the same matrix at every (t, g).
OperatorField constant_field(const std::vector<double>& t_levels,
                             const std::vector<GroupElement>& g_lattice, const OperatorMatrix& A);

/// Left translation of a field by b: base points shift to b . g and values
/// conjugate through the representation, so reconstruction intertwines.
OperatorField translate_field(const RepParams& params, const OperatorField& field,
                              const GroupElement& b);

struct InverseOptions {
  PairingKind kind = PairingKind::Hardy;
  /// Hardy only: first-order extrapolation across the two finest levels.
  bool richardson = false;
};

/// Inverse transform: per level, sum_g D^(1/2) P_(t,g) A(t,g) P_(t,g) D^(1/2)
/// with D the diagonal 1/coverage weight (so an exact tiling has D = I and a
/// constant identity field reconstructs the identity exactly on the covered
/// domain).  Hardy returns the finest level (optionally extrapolated); Haar
/// averages levels with trapezoid dt/t^(k+1) weights normalized to one.
/// Coverage gaps inside the union's bounding box at the finest level are an
/// error, reported with the gap count.
OperatorMatrix inverse_covariant(const RepParams& params, const OperatorField& field,
                                 const WindowSpec& W, const InverseOptions& opts);

/// Directory layout mirrors the symbol-field one with full-size blocks.
void save_operator_field(const OperatorField& field, const GridSpec& grid, const std::string& dir);
OperatorField load_operator_field(const std::string& dir);

/// Convergence table CSV: header "depth,norm,proxy".
void write_refine_csv(const std::string& path, const std::vector<RefineRow>& rows);

}  // namespace localis
