#pragma once

#include "localis/function.hpp"
#include "localis/operator_matrix.hpp"
#include "localis/representation.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace localis {

/// diag(a(x_j)).
OperatorMatrix multiplication_operator(const SampledFunction& a);

/// Left-invariant convolution (K f)(g) = sum_h k(h^{-1} . g) f(h) h^m; kernel
/// arguments that leave the lattice contribute zero.
OperatorMatrix group_convolution(const SampledFunction& kernel);

/// Midpoint principal-value discretization of the Hilbert transform on a
/// Euclidean(1) grid: H(j,k) = 1/(pi (j-k)) off the diagonal, 0 on it.
/// Entries are computed from the integer index difference, so equal
/// diagonals are bit-identical (exact Toeplitz structure).
OperatorMatrix hilbert_transform(const GridSpec& grid);

/// sum_i columns[i] (x) rows[i]; rank at most the list length.  Empty lists
/// give the zero operator.
OperatorMatrix finite_rank(const GridSpec& grid, const std::vector<SampledFunction>& columns,
                           const std::vector<SampledFunction>& rows);

OperatorMatrix identity_operator(const GridSpec& grid);
OperatorMatrix zero_operator(const GridSpec& grid);

/// Diagonal 0/1 matrix of a mask.
OperatorMatrix projection_matrix(const RegionMask& mask);

/// Reference window F_e: a bounded mask containing the identity point, with
/// the self-covering radius when known and the box half-widths when the
/// window was built as a coordinate box (used for region-level membership
/// tests and manifests).
struct WindowSpec {
  RegionMask support;
  std::optional<double> r_cover;
  std::optional<GroupElement> halfwidths;
};

/// Window over the closed coordinate box [-halfwidths, +halfwidths].
WindowSpec make_box_window(const GridSpec& grid, const GroupElement& halfwidths,
                           std::optional<double> r_cover = std::nullopt);

/// Flat indices of the window support in lattice order; their count w is the
/// side of every symbol block.
std::vector<long> window_indices(const WindowSpec& W);

/// Image mask of F under the affine action of s, with the number of image
/// points dropped because they left the lattice or the extent.
struct MaskImage {
  RegionMask mask;
  long truncated = 0;
};
MaskImage transform_mask(const ScaledElement& s, const RegionMask& F);

/// Continuum membership x in (t,g).box_region: pulls x back through the
/// affine action and tests the closed box in exponential coordinates.  Used
/// where the scale is not lattice-compatible (e.g. self-covering search at
/// fractional r).
bool window_region_member(const WindowSpec& W, const ScaledElement& s, const GroupElement& x);

/// sigma_{rank+1}(A): the operator-norm distance from A to matrices of rank
/// <= rank (Eckart-Young); rank 0 gives the operator norm.
double enorm_proxy(const Eigen::MatrixXd& A, int rank);
double enorm_proxy(const OperatorMatrix& A, int rank);

/// Max over `trials` seeded pairs of axis-aligned box masks with gap >=
/// separation of enorm_proxy of the off-diagonal block P_{F1} A P_{F2}.
/// Small scores certify local type at the chosen proxy rank; large scores
/// falsify it.
double local_type_score(const OperatorMatrix& A, double separation, int rank, int trials,
                        std::uint64_t seed = 0);

/// Witness search outcome for one sampled intersecting pair of unit-scale
/// window placements.
struct CoveringPair {
  GroupElement g1;
  GroupElement g2;
  bool found = false;
  GroupElement witness;
};

struct SelfCoveringReport {
  bool covered = false;
  double r = 0.0;
  std::vector<CoveringPair> pairs;
};

/// First grid-aligned g (lattice order) whose scaled placement (r,g) region
/// contains both unit-scale placements of the window; nullopt when none.
std::optional<GroupElement> covering_witness(const WindowSpec& W, double r,
                                             const GroupElement& g1, const GroupElement& g2);

/// Samples `samples` intersecting pairs (1,g1), (1,g2) of window placements
/// (grid-aligned g) and searches grid-aligned g with (r,g).region containing
/// both; covered iff every sampled pair has a witness.  Membership uses the
/// continuum box region, so fractional r is exact; candidates are restricted
/// to the lattice, which suffices for box windows whose witness interval has
/// lattice endpoints.
SelfCoveringReport self_covering_check(const WindowSpec& W, double r, int samples,
                                       std::uint64_t seed = 0);

/// Commutator sizes against the representation, normalized by ||A||:
/// homog = max over t_samples of the interior-restricted norm of
/// [act(t,e), A]; shift = same over g_samples for [act(1,g), A].  Interior
/// restriction sandwiches the commutator between projections onto W.
struct InvarianceScores {
  double homog = 0.0;
  double shift = 0.0;
};
InvarianceScores invariance_scores(const RepParams& params, const OperatorMatrix& A,
                                   const WindowSpec& W, const std::vector<double>& t_samples,
                                   const std::vector<GroupElement>& g_samples);

}  // namespace localis
