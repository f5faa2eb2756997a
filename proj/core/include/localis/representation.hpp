#pragma once

#include "localis/function.hpp"
#include "localis/operator_matrix.hpp"

namespace localis {

/// ExactAligned restricts (t,g) so that the pullback map permutes lattice
/// points: t a power of two, and every pulled-back point that stays inside
/// the extent must land on the lattice.  Interpolated accepts any (t,g) via
/// multilinear interpolation and carries no exactness guarantees.
enum class RepMode { ExactAligned, Interpolated };

struct RepParams {
  GridSpec grid;
  double p = 2.0;
  RepMode mode = RepMode::ExactAligned;
};

/// [pi(t,g) f](x) = t^(-k/p) * f(tau_{1/t}(g^{-1} . x)), k the homogeneous
/// dimension; zero where the pulled-back point exits the extent.
///
/// ExactAligned with t <= 1: an in-extent pullback that misses the lattice is
/// an alignment violation (invalid_argument).  With t > 1 the pullback
/// contracts below the grid resolution; off-lattice reads return 0 instead
/// (rows of the matrix form are zero), which is what makes
/// act(s) . act(s^{-1}) the identity while act(s^{-1}) . act(s) is only a
/// sublattice projection.
SampledFunction act(const RepParams& params, const ScaledElement& s, const SampledFunction& f);

/// Matrix M with M * vec(f) = vec(act(s, f)); in ExactAligned mode each row
/// has at most one nonzero entry.
OperatorMatrix act_matrix(const RepParams& params, const ScaledElement& s);

/// act_matrix(scaled_inverse(left)) * A * act_matrix(right), computed as a
/// fused kernel in ExactAligned mode:
///   result(x, y) = (t_left / t_right)^(k/p) * A(left |> x, right |> y)
/// with zero where either mapped point leaves the lattice.  Fusing keeps the
/// scale factor exactly 1.0 whenever t_left == t_right, so projections map
/// to projections entrywise; the literal two-product route can differ by one
/// ulp through pow(t, k/p) * pow(1/t, k/p).
OperatorMatrix double_act(const RepParams& params, const ScaledElement& left,
                          const ScaledElement& right, const OperatorMatrix& A);

}  // namespace localis
