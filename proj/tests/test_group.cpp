#include "localis/group.hpp"

#include <doctest.h>

#include <cmath>
#include <random>
#include <stdexcept>

using namespace localis;

namespace {

GroupElement random_element(const GroupDescriptor& G, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> coord(-3.0, 3.0);
  GroupElement g(static_cast<std::size_t>(G.dim()));
  for (auto& c : g) c = coord(rng);
  return g;
}

double dist(const GroupElement& a, const GroupElement& b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
  return d;
}

}  // namespace

TEST_CASE("descriptor layers and homogeneous dimension") {
  CHECK(GroupDescriptor::euclidean(1).homogeneous_dimension() == 1);
  CHECK(GroupDescriptor::euclidean(3).homogeneous_dimension() == 3);
  // Two-step grading: the n-dimensional layer counts once, the centre twice.
  CHECK(GroupDescriptor::heisenberg(1).homogeneous_dimension() == 4);
  CHECK(GroupDescriptor::heisenberg(2).homogeneous_dimension() == 6);

  CHECK(GroupDescriptor::euclidean(2).dim() == 2);
  CHECK(GroupDescriptor::heisenberg(1).dim() == 3);
  CHECK(GroupDescriptor::euclidean(4).layers() == std::vector<int>{4});
  CHECK(GroupDescriptor::heisenberg(3).layers() == std::vector<int>{6, 1});

  CHECK_THROWS_AS(GroupDescriptor::euclidean(0), std::invalid_argument);
  CHECK_THROWS_AS(GroupDescriptor::heisenberg(-1), std::invalid_argument);

  // homogeneous_dim == sum_j j * dim(V_j) for every descriptor we ship.
  for (const auto& G : {GroupDescriptor::euclidean(5), GroupDescriptor::heisenberg(4)}) {
    int acc = 0;
    const auto layers = G.layers();
    for (std::size_t j = 0; j < layers.size(); ++j) acc += static_cast<int>(j + 1) * layers[j];
    CHECK(G.homogeneous_dimension() == acc);
  }
}

TEST_CASE("descriptor JSON round trip") {
  const GroupDescriptor h2 = GroupDescriptor::heisenberg(2);
  CHECK(GroupDescriptor::from_json(h2.to_json()) == h2);
  const GroupDescriptor e3 = GroupDescriptor::euclidean(3);
  CHECK(GroupDescriptor::from_json(e3.to_json()) == e3);
  CHECK(GroupDescriptor::from_json(R"({"kind":"euclidean","n":2})") ==
        GroupDescriptor::euclidean(2));
  CHECK_THROWS_AS(GroupDescriptor::from_json(R"({"kind":"solvable","n":1})"),
                  std::invalid_argument);
  CHECK_THROWS_AS(GroupDescriptor::from_json(R"({"n":1})"), std::invalid_argument);
  CHECK_THROWS_AS(GroupDescriptor::from_json(R"({"kind":"euclidean"})"), std::invalid_argument);
}

TEST_CASE("compose on the line and the Heisenberg group") {
  const GroupDescriptor e1 = GroupDescriptor::euclidean(1);
  CHECK(compose(e1, {2.0}, {3.0}) == GroupElement{5.0});

  // Centre coordinate first: (s, x, y).
  const GroupDescriptor h1 = GroupDescriptor::heisenberg(1);
  const GroupElement a = {0.0, 1.0, 0.0};
  const GroupElement b = {0.0, 0.0, 1.0};
  CHECK(dist(compose(h1, a, b), {0.5, 1.0, 1.0}) == 0.0);
  CHECK(dist(compose(h1, b, a), {-0.5, 1.0, 1.0}) == 0.0);  // non-commutative

  CHECK_THROWS_AS(compose(h1, {0.0, 1.0}, b), std::invalid_argument);
}

TEST_CASE("inverse") {
  const GroupDescriptor e1 = GroupDescriptor::euclidean(1);
  CHECK(inverse(e1, {3.0}) == GroupElement{-3.0});

  const GroupDescriptor h1 = GroupDescriptor::heisenberg(1);
  CHECK(inverse(h1, {1.0, 2.0, 3.0}) == GroupElement{-1.0, -2.0, -3.0});
  CHECK(dist(compose(h1, {1.0, 2.0, 3.0}, inverse(h1, {1.0, 2.0, 3.0})), identity(h1)) == 0.0);
  CHECK(inverse(h1, identity(h1)) == identity(h1));
}

TEST_CASE("dilation") {
  const GroupDescriptor h1 = GroupDescriptor::heisenberg(1);
  // Centre scales by t^2, the first layer by t.
  CHECK(dist(dilate(h1, 2.0, {1.0, 1.0, 1.0}), {4.0, 2.0, 2.0}) == 0.0);
  CHECK(dist(dilate(h1, 1.0, {0.3, -0.7, 0.9}), {0.3, -0.7, 0.9}) == 0.0);

  const GroupDescriptor e1 = GroupDescriptor::euclidean(1);
  CHECK(dilate(e1, 0.5, {4.0}) == GroupElement{2.0});

  CHECK_THROWS_AS(dilate(e1, 0.0, {1.0}), std::invalid_argument);
  CHECK_THROWS_AS(dilate(e1, -2.0, {1.0}), std::invalid_argument);
}

TEST_CASE("scaled compose: the ax+b specialization and the Heisenberg centre") {
  const GroupDescriptor e1 = GroupDescriptor::euclidean(1);
  const ScaledElement p = scaled_compose(e1, {2.0, {3.0}}, {4.0, {5.0}});
  CHECK(p.t == 8.0);
  CHECK(p.g == GroupElement{13.0});

  const ScaledElement q = scaled_compose(e1, {1.0, {0.0}}, {0.25, {-1.5}});
  CHECK(q.t == 0.25);
  CHECK(q.g == GroupElement{-1.5});

  const GroupDescriptor h1 = GroupDescriptor::heisenberg(1);
  const ScaledElement r = scaled_compose(h1, {2.0, identity(h1)}, {1.0, {1.0, 0.0, 0.0}});
  CHECK(r.t == 2.0);
  CHECK(dist(r.g, {4.0, 0.0, 0.0}) == 0.0);  // centre picks up t^2

  CHECK_THROWS_AS(scaled_compose(e1, {0.0, {1.0}}, {1.0, {1.0}}), std::invalid_argument);
}

TEST_CASE("scaled inverse") {
  const GroupDescriptor e1 = GroupDescriptor::euclidean(1);
  const ScaledElement inv = scaled_inverse(e1, {2.0, {3.0}});
  CHECK(inv.t == 0.5);
  CHECK(inv.g == GroupElement{-1.5});

  const ScaledElement unit = scaled_inverse(e1, {1.0, {0.0}});
  CHECK(unit.t == 1.0);
  CHECK(unit.g == GroupElement{0.0});

  const GroupDescriptor h1 = GroupDescriptor::heisenberg(1);
  const ScaledElement hinv = scaled_inverse(h1, {2.0, {4.0, 0.0, 0.0}});
  CHECK(hinv.t == 0.5);
  CHECK(dist(hinv.g, {-1.0, 0.0, 0.0}) == 0.0);
}

TEST_CASE("affine action is compatible with the semidirect product") {
  const GroupDescriptor e1 = GroupDescriptor::euclidean(1);
  CHECK(scaled_action(e1, {2.0, {3.0}}, {4.0}) == GroupElement{11.0});  // a x + b

  std::mt19937_64 rng(11);
  for (const auto& G : {GroupDescriptor::euclidean(2), GroupDescriptor::heisenberg(1)}) {
    for (int i = 0; i < 200; ++i) {
      std::uniform_real_distribution<double> scale(0.2, 3.0);
      const ScaledElement u{scale(rng), random_element(G, rng)};
      const ScaledElement v{scale(rng), random_element(G, rng)};
      const GroupElement x = random_element(G, rng);
      CHECK(dist(scaled_action(G, scaled_compose(G, u, v), x),
                 scaled_action(G, u, scaled_action(G, v, x))) < 1e-12);
      // u |> x solves u^{-1} |> (u |> x) = x.
      CHECK(dist(scaled_action(G, scaled_inverse(G, u), scaled_action(G, u, x)), x) < 1e-12);
    }
  }
}

TEST_CASE("group axioms hold on seeded samples") {
  std::mt19937_64 rng(12);
  for (const auto& G : {GroupDescriptor::euclidean(1), GroupDescriptor::euclidean(3),
                        GroupDescriptor::heisenberg(1), GroupDescriptor::heisenberg(2)}) {
    const GroupElement e = identity(G);
    for (int i = 0; i < 250; ++i) {
      const GroupElement a = random_element(G, rng);
      const GroupElement b = random_element(G, rng);
      const GroupElement c = random_element(G, rng);
      CHECK(dist(compose(G, compose(G, a, b), c), compose(G, a, compose(G, b, c))) < 1e-12);
      CHECK(dist(compose(G, a, e), a) == 0.0);
      CHECK(dist(compose(G, e, a), a) == 0.0);
      CHECK(dist(compose(G, a, inverse(G, a)), e) < 1e-12);

      std::uniform_real_distribution<double> scale(0.2, 3.0);
      const double t = scale(rng);
      CHECK(dist(dilate(G, t, compose(G, a, b)), compose(G, dilate(G, t, a), dilate(G, t, b))) <
            1e-12);
    }
  }
}
