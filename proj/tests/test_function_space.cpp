#include "localis/errors.hpp"
#include "localis/function.hpp"

#include "test_util.hpp"

#include <doctest.h>

#include <cmath>
#include <stdexcept>

using namespace localis;
namespace tu = localis::testutil;

TEST_CASE("grid construction") {
  const GridSpec fine = make_grid(GroupDescriptor::euclidean(1), 0.0625, 8.0);
  CHECK(fine.size() == 256);
  CHECK(fine.per_axis == 256);
  CHECK(fine.min_index == -128);

  const GridSpec coarse = make_grid(GroupDescriptor::euclidean(1), 0.5, 1.0);
  REQUIRE(coarse.size() == 4);
  CHECK(coarse.point(0) == GroupElement{-1.0});
  CHECK(coarse.point(1) == GroupElement{-0.5});
  CHECK(coarse.point(2) == GroupElement{0.0});
  CHECK(coarse.point(3) == GroupElement{0.5});

  CHECK(make_grid(GroupDescriptor::heisenberg(1), 0.5, 2.0).size() == 512);

  CHECK_THROWS_AS(make_grid(GroupDescriptor::euclidean(1), 0.3, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(make_grid(GroupDescriptor::euclidean(1), -0.5, 1.0), std::invalid_argument);
  // 2R/h = 4 * 2^20 exceeds the point budget.
  CHECK_THROWS_AS(make_grid(GroupDescriptor::euclidean(1), 1.0 / (1 << 20), 2.0),
                  ResourceLimitError);
}

TEST_CASE("index round trips, alignment, extent membership") {
  const GridSpec grid = make_grid(GroupDescriptor::heisenberg(1), 0.5, 2.0);
  for (long i : {0L, 17L, 300L, grid.size() - 1}) {
    const auto multi = grid.multi_of(i);
    CHECK(grid.index_of(multi) == i);
    const GroupElement x = grid.point(i);
    REQUIRE(grid.locate(x).has_value());
    CHECK(*grid.locate(x) == i);
  }
  CHECK(grid.aligned({0.5, -1.0, 1.5}));
  CHECK_FALSE(grid.aligned({0.25, 0.0, 0.0}));
  CHECK(grid.inside({0.0, 0.0, 0.0}));
  CHECK(grid.inside({-2.0, -2.0, -2.0}));
  CHECK_FALSE(grid.inside({2.0, 0.0, 0.0}));  // the cube is half-open
  CHECK_FALSE(grid.locate({0.25, 0.0, 0.0}).has_value());
  CHECK_FALSE(grid.locate({2.0, 0.0, 0.0}).has_value());
}

TEST_CASE("discrete Lp norms") {
  const GridSpec grid = make_grid(GroupDescriptor::euclidean(1), 0.25, 1.0);
  const SampledFunction ind = sample_function(
      grid, [](const GroupElement& x) { return x[0] >= 0.0 && x[0] < 1.0 ? 1.0 : 0.0; }, 2.0);
  CHECK(lp_norm(ind) == doctest::Approx(1.0).epsilon(1e-14));  // 4 cells x 0.25

  const SampledFunction zero = sample_function(grid, [](const GroupElement&) { return 0.0; });
  CHECK(lp_norm(zero) == 0.0);

  const SampledFunction constant = sample_function(
      grid, [](const GroupElement&) { return -2.5; }, 1.0);
  CHECK(lp_norm(constant) == doctest::Approx(2.5 * 2.0).epsilon(1e-14));  // |c| * 2R

  CHECK_THROWS_AS(lp_norm(SampledFunction{grid, Eigen::VectorXd::Ones(grid.size()), -1.0}),
                  std::invalid_argument);
}

TEST_CASE("region masks and projections") {
  const GridSpec grid = make_grid(GroupDescriptor::euclidean(1), 0.25, 1.0);

  const RegionMask box = make_box_mask(grid, {0.0}, {0.5});  // closed box
  CHECK(box.count() == 3);

  SampledFunction ones = sample_function(grid, [](const GroupElement&) { return 1.0; });
  const SampledFunction cut = project_region(ones, box);
  for (long i = 0; i < grid.size(); ++i) {
    const double x = grid.point(i)[0];
    CHECK(cut.values[i] == (x >= 0.0 && x <= 0.5 ? 1.0 : 0.0));
  }

  RegionMask full = box;
  for (auto& m : full.member) m = 1;
  CHECK((project_region(ones, full).values - ones.values).cwiseAbs().maxCoeff() == 0.0);

  RegionMask empty = box;
  for (auto& m : empty.member) m = 0;
  CHECK(tu::max_abs(project_region(ones, empty).values) == 0.0);

  const RegionMask left = make_box_mask(grid, {-1.0}, {0.0});
  CHECK(mask_and(box, left).count() == 1);
  CHECK(mask_or(box, left).count() == box.count() + left.count() - 1);
  CHECK(mask_minus(box, left).count() == 2);
  CHECK(mask_complement(box).count() == grid.size() - box.count());
  CHECK(mask_subset(mask_and(box, left), box));
  CHECK_FALSE(mask_subset(left, box));
  CHECK(mask_empty(mask_minus(box, box)));

  // Projections onto intersections compose multiplicatively.
  const SampledFunction via_and = project_region(ones, mask_and(box, left));
  const SampledFunction via_chain = project_region(project_region(ones, box), left);
  CHECK((via_and.values - via_chain.values).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("Hardy pairing reads the finest level") {
  const GridSpec grid = make_grid(GroupDescriptor::euclidean(1), 0.25, 1.0);
  const SampledFunction ind = sample_function(
      grid, [](const GroupElement& x) { return x[0] >= 0.0 && x[0] < 1.0 ? 1.0 : 0.0; });
  const std::vector<double> levels = {0.5, 0.25, 0.125};
  const std::vector<SampledFunction> fam(levels.size(), ind);

  PairingOptions hardy{PairingKind::Hardy, false};
  CHECK(pairing(fam, fam, levels, hardy) == doctest::Approx(1.0).epsilon(1e-14));

  hardy.richardson = true;  // constant in t, extrapolation changes nothing
  CHECK(pairing(fam, fam, levels, hardy) == doctest::Approx(1.0).epsilon(1e-12));

  const SampledFunction other = sample_function(
      grid, [](const GroupElement& x) { return x[0] < 0.0 ? 1.0 : 0.0; });
  const std::vector<SampledFunction> fam2(levels.size(), other);
  CHECK(pairing(fam, fam2, levels, {PairingKind::Hardy, false}) == 0.0);
}

TEST_CASE("Haar pairing quadrature matches the closed-form scale integral") {
  // Constant-in-scale families over b in [0,1): the scale integral collapses
  // to int_1^2 t^-2 dt = 1/2 on a one-dimensional group.
  const GridSpec grid = make_grid(GroupDescriptor::euclidean(1), 0.25, 2.0);
  const SampledFunction ind = sample_function(
      grid, [](const GroupElement& x) { return x[0] >= 0.0 && x[0] < 1.0 ? 1.0 : 0.0; });

  std::vector<double> levels;
  for (int i = 0; i <= 40; ++i) levels.push_back(2.0 - 0.025 * i);  // descending to fine
  const std::vector<SampledFunction> fam(levels.size(), ind);

  const double approx = pairing(fam, fam, levels, {PairingKind::Haar, false});
  const double exact = 0.5;
  CHECK(std::abs(approx - exact) / exact < 0.02);

  // Haar with a single level carries no quadrature.
  CHECK_THROWS_AS(pairing({ind}, {ind}, {1.0}, PairingOptions{PairingKind::Haar, false}),
                  std::invalid_argument);
  // Scales must be positive and distinct.
  CHECK_THROWS_AS(pairing(fam, fam, std::vector<double>(levels.size(), 1.0),
                          PairingOptions{PairingKind::Haar, false}),
                  std::invalid_argument);
}
