#pragma once

#include <string>
#include <vector>

namespace localis {

enum class GroupKind { Euclidean, Heisenberg };

/// A graded nilpotent group in exponential coordinates.
///
/// Euclidean(n): the abelian group (R^n, +), a single layer of dimension n.
/// Heisenberg(n): coordinates (s, x_1..x_n, y_1..y_n) with the polarised
/// product; the centre coordinate s forms the second layer and scales
/// quadratically under dilations.
struct GroupDescriptor {
  GroupKind kind = GroupKind::Euclidean;
  int n = 1;

  static GroupDescriptor euclidean(int n);
  static GroupDescriptor heisenberg(int n);

  /// Number of coordinates of an element.
  int dim() const;
  /// Dimensions of the graded layers V_1, V_2, ...
  std::vector<int> layers() const;
  /// k = sum_j j * dim(V_j); the scaling degree of the Haar measure under
  /// the dilation family tau_t.
  int homogeneous_dimension() const;

  /// JSON form: {"kind": "euclidean"|"heisenberg", "n": <int>}.
  std::string to_json() const;
  static GroupDescriptor from_json(const std::string& text);

  friend bool operator==(const GroupDescriptor&, const GroupDescriptor&) = default;
};

/// Element in exponential coordinates; length must equal descriptor dim().
using GroupElement = std::vector<double>;

/// Element (t, g) of the semidirect extension G x| R_+ by dilations.
struct ScaledElement {
  double t = 1.0;
  GroupElement g;
};

GroupElement identity(const GroupDescriptor& G);
GroupElement compose(const GroupDescriptor& G, const GroupElement& a, const GroupElement& b);
GroupElement inverse(const GroupDescriptor& G, const GroupElement& a);

/// Dilation automorphism tau_t: coordinates in layer j scale by t^j.
GroupElement dilate(const GroupDescriptor& G, double t, const GroupElement& a);

/// (t,g) * (t',g') = (t t', g . tau_t(g')).
ScaledElement scaled_compose(const GroupDescriptor& G, const ScaledElement& a, const ScaledElement& b);
/// (t,g)^{-1} = (1/t, tau_{1/t}(g^{-1})).
ScaledElement scaled_inverse(const GroupDescriptor& G, const ScaledElement& a);

/// Affine action of (t,g) on a point of G:  (t,g) |> x = g . tau_t(x).
/// For the ax+b specialisation this is the familiar x -> a x + b.
GroupElement scaled_action(const GroupDescriptor& G, const ScaledElement& s, const GroupElement& x);

}  // namespace localis
