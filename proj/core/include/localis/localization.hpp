#pragma once

#include "localis/operators.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <string>
#include <vector>

namespace localis {

/// Window-restricted presymbol: the w x w block (over the window support, in
/// lattice order) of P_e . double_act(left, right, A) . P_e.  The value at
/// block entry (xi, eta) describes how A couples the left placement of xi to
/// the right placement of eta.
Eigen::MatrixXd presymbol(const RepParams& params, const OperatorMatrix& A,
                          const ScaledElement& left, const ScaledElement& right,
                          const WindowSpec& W);

/// Projection-sandwich form P_{F_left} . A . P_{F_right} with F_s the
/// transformed window mask; full grid size.  Related to presymbol by
/// presymbol(A, l, r) = window block of double_act(l, r, alt_presymbol(A, l, r))
/// on interior windows.
OperatorMatrix alt_presymbol(const RepParams& params, const OperatorMatrix& A,
                             const ScaledElement& left, const ScaledElement& right,
                             const WindowSpec& W);

/// Same-scale diagonal of the presymbol: symbol(A, s) = presymbol(A, s, s).
Eigen::MatrixXd symbol(const RepParams& params, const OperatorMatrix& A, const ScaledElement& s,
                       const WindowSpec& W);

/// Places a w x w window block back into an N x N matrix at the window's
/// support indices (zero elsewhere).
OperatorMatrix embed_window_block(const WindowSpec& W, const Eigen::MatrixXd& block);

/// Symbol blocks of one operator over a scale ladder and a lattice of base
/// points; blocks[i][j] = symbol at (t_levels[i], g_lattice[j]), all w x w.
struct SymbolField {
  WindowSpec window;
  double p = 2.0;
  std::vector<double> t_levels;
  std::vector<GroupElement> g_lattice;
  std::vector<std::vector<Eigen::MatrixXd>> blocks;
};

/// Evaluates the field; the (t,g) tasks are independent and are distributed
/// over thread_budget() workers writing to disjoint slots.
SymbolField symbol_field(const RepParams& params, const OperatorMatrix& A, const WindowSpec& W,
                         const std::vector<double>& t_levels,
                         const std::vector<GroupElement>& g_lattice);

/// Scalewise distance of two operators at one base point: decay[i] is the
/// essential-norm proxy of the symbol of A - B at (t_levels[i], g).
struct EquivalenceReport {
  GroupElement g;
  std::vector<double> t_levels;
  std::vector<double> decay;
  bool verdict = false;
  double tolerance = 0.0;
  int rank = 0;
};

/// Verdict: the finest-level value is below tol AND the decay column is
/// monotone non-increasing up to 10% slack.
EquivalenceReport local_equiv(const RepParams& params, const OperatorMatrix& A,
                              const OperatorMatrix& B, const GroupElement& g, const WindowSpec& W,
                              const std::vector<double>& t_levels, int rank, double tol);

std::string equivalence_report_json(const EquivalenceReport& report);

/// One signed indicator term of an inclusion-exclusion expansion;
/// `container` indexes a cover element the term is contained in.
struct SignedMaskTerm {
  int sign = 1;
  RegionMask mask;
  std::size_t container = 0;
};

/// Signed terms with sum of sign * indicator(mask) equal to the indicator of
/// target, every term contained in target and in cover[container].  Empty
/// intersections are pruned (with their supersets) during the subset walk.
std::vector<SignedMaskTerm> inclusion_exclusion_decomposition(const RegionMask& target,
                                                              const std::vector<RegionMask>& cover);

/// Mixed-scale presymbol rebuilt from single-scale symbol data: covers both
/// transformed windows by cells at one fine scale, expands the projections
/// by inclusion-exclusion, routes every intersecting cell pair through a
/// covering placement at scale `scale` (whose sandwich is recovered from the
/// symbol block there), and drops disjoint-cell terms (exact zeros for
/// diagonal operators, proxy-small for local-type ones).
struct MixedScaleReduction {
  Eigen::MatrixXd block;
  double scale = 0.0;
  long symbol_queries = 0;
  long dropped_disjoint = 0;
};

MixedScaleReduction presymbol_from_symbols(const RepParams& params, const OperatorMatrix& A,
                                           const ScaledElement& u1, const ScaledElement& u2,
                                           const WindowSpec& W);

/// Directory layout: manifest.json (group, grid, p, window, levels, lattice)
/// plus one t<level>_g<index>.locm block per field entry.
void save_symbol_field(const SymbolField& field, const std::string& dir);
SymbolField load_symbol_field(const std::string& dir);

}  // namespace localis
