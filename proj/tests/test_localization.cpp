#include "localis/localization.hpp"

#include "localis/io.hpp"

#include "test_util.hpp"

#include <doctest.h>

#include <nlohmann/json.hpp>

#include <cmath>
#include <cstdlib>
#include <random>
#include <stdexcept>

using namespace localis;
namespace tu = localis::testutil;

namespace {

Eigen::MatrixXd window_block_of(const WindowSpec& W, const Eigen::MatrixXd& full) {
  const std::vector<long> idx = window_indices(W);
  Eigen::MatrixXd block(idx.size(), idx.size());
  for (std::size_t i = 0; i < idx.size(); ++i) {
    for (std::size_t j = 0; j < idx.size(); ++j) {
      block(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = full(idx[i], idx[j]);
    }
  }
  return block;
}

}  // namespace

TEST_CASE("presymbol of the identity on an interior placement") {
  const RepParams params = tu::lab_params();
  const WindowSpec W = tu::lab_window(params.grid);
  const long w = static_cast<long>(window_indices(W).size());
  REQUIRE(w == 33);

  const Eigen::MatrixXd block =
      presymbol(params, identity_operator(params.grid), {1.0, {0.5}}, {1.0, {0.5}}, W);
  CHECK(tu::max_abs(block - Eigen::MatrixXd::Identity(w, w)) == 0.0);

  const Eigen::MatrixXd none =
      presymbol(params, zero_operator(params.grid), {0.5, {0.25}}, {1.0, {-0.5}}, W);
  CHECK(tu::max_abs(none) == 0.0);
}

TEST_CASE("presymbol of a multiplication operator reads the shifted diagonal") {
  const RepParams params = tu::lab_params();
  const GridSpec& grid = params.grid;
  const WindowSpec W = tu::lab_window(grid);
  const OperatorMatrix A = tu::sin_multiplier(grid);
  const ScaledElement s{1.0, {0.5}};

  const Eigen::MatrixXd block = presymbol(params, A, s, s, W);
  const std::vector<long> idx = window_indices(W);
  for (std::size_t i = 0; i < idx.size(); ++i) {
    for (std::size_t j = 0; j < idx.size(); ++j) {
      const double expect =
          i == j ? std::sin(grid.point(idx[i])[0] + 0.5) : 0.0;  // diag(a(g . xi))
      CHECK(block(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) == expect);
    }
  }

  // Dual route: extract the same block from the literal conjugated product.
  const Eigen::MatrixXd L = act_matrix(params, scaled_inverse(grid.group, s)).entries;
  const Eigen::MatrixXd R = act_matrix(params, s).entries;
  const Eigen::MatrixXd literal = window_block_of(W, L * A.entries * R);
  CHECK(tu::max_abs(block - literal) <= 1e-12);

  CHECK_THROWS_AS(presymbol(params, A, {2.0, {0.0}}, {1.0, {0.0}}, W), std::invalid_argument);
}

TEST_CASE("alt_presymbol sandwiches between transformed window projections") {
  const RepParams params = tu::lab_params();
  const GridSpec& grid = params.grid;
  const WindowSpec W = tu::lab_window(grid);
  const OperatorMatrix A = hilbert_transform(grid);

  // At the identity placement both masks are the window support itself.
  const OperatorMatrix rest = alt_presymbol(params, A, {1.0, {0.0}}, {1.0, {0.0}}, W);
  const Eigen::MatrixXd P = projection_matrix(W.support).entries;
  CHECK(tu::max_abs(rest.entries - P * A.entries * P) == 0.0);

  // With the identity operator the sandwich is the intersection projection.
  const OperatorMatrix cap =
      alt_presymbol(params, identity_operator(grid), {1.0, {0.5}}, {1.0, {-0.5}}, W);
  const RegionMask expect = make_box_mask(grid, {-0.5}, {0.5});
  CHECK(tu::max_abs(cap.entries - projection_matrix(expect).entries) == 0.0);

  // Window-block relation between the two presymbol forms.
  const ScaledElement l{0.5, {0.25}};
  const ScaledElement r{1.0, {-0.5}};
  const OperatorMatrix sandwich = alt_presymbol(params, A, l, r, W);
  const Eigen::MatrixXd via_sandwich =
      window_block_of(W, double_act(params, l, r, sandwich).entries);
  CHECK(tu::max_abs(presymbol(params, A, l, r, W) - via_sandwich) <= 1e-10);
}

TEST_CASE("embed_window_block inverts window extraction") {
  const RepParams params = tu::lab_params();
  const WindowSpec W = tu::lab_window(params.grid);
  const long w = static_cast<long>(window_indices(W).size());

  Eigen::MatrixXd block(w, w);
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> val(-1.0, 1.0);
  for (long i = 0; i < w; ++i) {
    for (long j = 0; j < w; ++j) block(i, j) = val(rng);
  }
  const OperatorMatrix embedded = embed_window_block(W, block);
  CHECK(tu::max_abs(window_block_of(W, embedded.entries) - block) == 0.0);
  // Mass outside the window stays zero.
  CHECK(embedded.entries.cwiseAbs().sum() == doctest::Approx(block.cwiseAbs().sum()));

  CHECK_THROWS_AS(embed_window_block(W, Eigen::MatrixXd::Zero(w + 1, w + 1)),
                  std::invalid_argument);
}

TEST_CASE("symbol blocks: survival mask, sampled diagonal, vanishing coupling") {
  const RepParams params = tu::lab_params();
  const GridSpec& grid = params.grid;
  const WindowSpec W = tu::lab_window(grid);
  const std::vector<long> idx = window_indices(W);

  // Identity at t = 1/2: the diagonal flags which window points survive the
  // half-scale placement (even lattice indices here).
  const Eigen::MatrixXd mask = symbol(params, identity_operator(grid), {0.5, {0.25}}, W);
  long ones = 0;
  for (std::size_t i = 0; i < idx.size(); ++i) {
    for (std::size_t j = 0; j < idx.size(); ++j) {
      const double v = mask(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
      if (i != j) {
        CHECK(v == 0.0);
        continue;
      }
      const bool even = grid.multi_of(idx[i])[0] % 2 == 0;
      CHECK(v == (even ? 1.0 : 0.0));
      if (v == 1.0) ++ones;
    }
  }
  CHECK(ones == 17);

  // Multiplication by sin at (1/4, 0): diag(sin(xi / 4)) on the survivors
  // (every fourth lattice index).
  const Eigen::MatrixXd ms = symbol(params, tu::sin_multiplier(grid), {0.25, {0.0}}, W);
  for (std::size_t i = 0; i < idx.size(); ++i) {
    const long n = grid.multi_of(idx[i])[0];
    const double expect = n % 4 == 0 ? std::sin(grid.point(idx[i])[0] / 4.0) : 0.0;
    CHECK(ms(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) == expect);
  }
  const double top = enorm_proxy(ms, 0);
  CHECK(top == doctest::Approx(0.24740395925452294).epsilon(1e-12));  // sin(1/4)

  // A translation by 4 couples nothing within a width-2 window.
  SampledFunction d4{grid, Eigen::VectorXd::Zero(grid.size()), 2.0};
  d4.values[*grid.locate({4.0})] = 1.0 / grid.h;
  const Eigen::MatrixXd far = symbol(params, group_convolution(d4), {1.0, {0.0}}, W);
  CHECK(tu::max_abs(far) == 0.0);
}

TEST_CASE("symbol fields over a scale ladder and a base lattice") {
  const RepParams params = tu::lab_params();
  const GridSpec& grid = params.grid;
  const WindowSpec W = tu::lab_window(grid);
  const std::vector<double> levels = {1.0, 0.5, 0.25};
  const std::vector<GroupElement> lattice = {{-1.0}, {-0.5}, {0.0}, {0.5}, {1.0}};

  // Identity: the block depends only on the level, never the base point.
  const SymbolField id_field = symbol_field(params, identity_operator(grid), W, levels, lattice);
  REQUIRE(id_field.blocks.size() == levels.size());
  for (std::size_t li = 0; li < levels.size(); ++li) {
    REQUIRE(id_field.blocks[li].size() == lattice.size());
    for (std::size_t gi = 1; gi < lattice.size(); ++gi) {
      CHECK(tu::max_abs(id_field.blocks[li][gi] - id_field.blocks[li][0]) == 0.0);
    }
  }

  // Left-invariant operators keep that base-point independence.
  const SampledFunction kernel = sample_function(
      grid, [](const GroupElement& x) { return std::exp(-4.0 * x[0] * x[0]); });
  const SymbolField conv_field =
      symbol_field(params, group_convolution(kernel), W, levels, lattice);
  for (std::size_t li = 0; li < levels.size(); ++li) {
    for (std::size_t gi = 1; gi < lattice.size(); ++gi) {
      CHECK(tu::max_abs(conv_field.blocks[li][gi] - conv_field.blocks[li][0]) <= 1e-10);
    }
  }

  // Multiplication operators read the sampled diagonal at g . tau_t(xi).
  const SymbolField mul_field = symbol_field(params, tu::sin_multiplier(grid), W, levels, lattice);
  const std::vector<long> idx = window_indices(W);
  for (std::size_t li = 0; li < levels.size(); ++li) {
    for (std::size_t gi = 0; gi < lattice.size(); ++gi) {
      const Eigen::MatrixXd& block = mul_field.blocks[li][gi];
      for (std::size_t i = 0; i < idx.size(); ++i) {
        const GroupElement target = {lattice[gi][0] + levels[li] * grid.point(idx[i])[0]};
        const auto at = grid.locate(target);
        const double expect = at ? std::sin(grid.point(*at)[0]) : 0.0;
        CHECK(block(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) == expect);
      }
    }
  }

  CHECK_THROWS_AS(symbol_field(params, identity_operator(grid), W, {0.5, 0.5}, lattice),
                  std::invalid_argument);
  CHECK_THROWS_AS(symbol_field(params, identity_operator(grid), W, levels, {{0.3}}),
                  std::invalid_argument);
  CHECK_THROWS_AS(symbol_field(params, identity_operator(grid), W, levels, {}),
                  std::invalid_argument);
}

TEST_CASE("symbol fields are bit-identical under different thread budgets") {
  const RepParams params = tu::lab_params();
  const WindowSpec W = tu::lab_window(params.grid);
  const OperatorMatrix A = hilbert_transform(params.grid);
  const std::vector<double> levels = {1.0, 0.5, 0.25, 0.125};
  const std::vector<GroupElement> lattice = {{-0.5}, {0.0}, {0.5}};

  const char* old = std::getenv("LOCALIS_THREADS");
  const std::string saved = old ? old : "";

  setenv("LOCALIS_THREADS", "1", 1);
  const SymbolField serial = symbol_field(params, A, W, levels, lattice);
  setenv("LOCALIS_THREADS", "4", 1);
  const SymbolField threaded = symbol_field(params, A, W, levels, lattice);
  if (old) {
    setenv("LOCALIS_THREADS", saved.c_str(), 1);
  } else {
    unsetenv("LOCALIS_THREADS");
  }

  for (std::size_t li = 0; li < levels.size(); ++li) {
    for (std::size_t gi = 0; gi < lattice.size(); ++gi) {
      CHECK(tu::max_abs(serial.blocks[li][gi] - threaded.blocks[li][gi]) == 0.0);
    }
  }
}

TEST_CASE("scalewise equivalence verdicts") {
  const RepParams params = tu::lab_params();
  const GridSpec& grid = params.grid;
  const WindowSpec W = tu::lab_window(grid);
  const std::vector<double> levels = {0.5, 0.25, 0.125};
  const OperatorMatrix A = tu::sin_multiplier(grid);

  const EquivalenceReport same =
      local_equiv(params, A, A, {0.0}, W, levels, 0, 1e-12);
  CHECK(same.verdict);
  for (double d : same.decay) CHECK(d == 0.0);

  // Against the zero operator the decay column is sin(t): the largest
  // surviving diagonal entry of the shrinking window.
  const EquivalenceReport vs_zero =
      local_equiv(params, A, zero_operator(grid), {0.0}, W, levels, 0, 0.2);
  REQUIRE(vs_zero.decay.size() == 3);
  CHECK(vs_zero.decay[0] == doctest::Approx(0.479425538604203).epsilon(1e-12));
  CHECK(vs_zero.decay[1] == doctest::Approx(0.24740395925452294).epsilon(1e-12));
  CHECK(vs_zero.decay[2] == doctest::Approx(0.12467473338522769).epsilon(1e-12));
  CHECK(vs_zero.verdict);

  // Against the identity the distance settles near |sin(0) - 1| = 1 instead
  // of decaying, so the finest level stays far above the tolerance.
  const EquivalenceReport vs_id =
      local_equiv(params, A, identity_operator(grid), {0.0}, W, levels, 0, 0.1);
  CHECK_FALSE(vs_id.verdict);
  CHECK(vs_id.decay.back() > 1.0);

  CHECK_THROWS_AS(local_equiv(params, A, A, {0.0}, W, levels, 0, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(local_equiv(params, A, A, {0.0}, W, {0.5, 0.6}, 0, 0.1),
                  std::invalid_argument);

  const nlohmann::json j = nlohmann::json::parse(equivalence_report_json(vs_zero));
  CHECK(j.at("verdict").get<bool>());
  CHECK(j.at("tolerance").get<double>() == 0.2);
  CHECK(j.at("rank").get<int>() == 0);
  CHECK(j.at("g").get<std::vector<double>>() == GroupElement{0.0});
  CHECK(j.at("t_levels").get<std::vector<double>>() == levels);
  CHECK(j.at("decay").get<std::vector<double>>() == vs_zero.decay);
}

TEST_CASE("inclusion-exclusion expansions sum to the target indicator") {
  const GridSpec grid = tu::lab_params().grid;

  auto check_terms = [&](const RegionMask& target, const std::vector<RegionMask>& cover) {
    const std::vector<SignedMaskTerm> terms = inclusion_exclusion_decomposition(target, cover);
    std::vector<int> acc(static_cast<std::size_t>(grid.size()), 0);
    for (const SignedMaskTerm& term : terms) {
      CHECK((term.sign == 1 || term.sign == -1));
      CHECK(term.container < cover.size());
      CHECK(mask_subset(term.mask, target));
      CHECK(mask_subset(term.mask, cover[term.container]));
      CHECK_FALSE(mask_empty(term.mask));
      for (std::size_t i = 0; i < acc.size(); ++i) {
        acc[i] += term.sign * static_cast<int>(term.mask.member[i]);
      }
    }
    for (std::size_t i = 0; i < acc.size(); ++i) {
      CHECK(acc[i] == static_cast<int>(target.member[i]));
    }
    return terms;
  };

  const RegionMask target = make_box_mask(grid, {0.0}, {2.0});
  check_terms(target, {make_box_mask(grid, {-1.0}, {3.0})});

  const auto two = check_terms(
      target, {make_box_mask(grid, {-0.2}, {1.2}), make_box_mask(grid, {0.8}, {2.2})});
  CHECK(two.size() == 3);  // two cover terms and one overlap correction

  // Randomized covers (a trailing full box guarantees coverage).
  std::mt19937_64 rng(17);
  std::uniform_int_distribution<long> pick(-120, 119);
  for (int trial = 0; trial < 10; ++trial) {
    auto random_box = [&] {
      long a = pick(rng), b = pick(rng);
      if (a > b) std::swap(a, b);
      return make_box_mask(grid, {grid.h * static_cast<double>(a)},
                           {grid.h * static_cast<double>(b)});
    };
    const RegionMask t = random_box();
    std::vector<RegionMask> cover = {random_box(), random_box(), random_box(),
                                     make_box_mask(grid, {-8.0}, {8.0})};
    check_terms(t, cover);
  }

  CHECK_THROWS_AS(inclusion_exclusion_decomposition(target, {}), std::invalid_argument);
  CHECK_THROWS_AS(
      inclusion_exclusion_decomposition(target, {make_box_mask(grid, {0.0}, {1.0})}),
      std::invalid_argument);
}

TEST_CASE("mixed-scale blocks rebuilt from single-scale symbol data") {
  const RepParams params = tu::lab_params();
  const GridSpec& grid = params.grid;
  const WindowSpec W = tu::lab_window(grid);
  const OperatorMatrix A = tu::sin_multiplier(grid);
  const ScaledElement u1{0.5, {-0.25}};
  const ScaledElement u2{0.25, {0.5}};

  const MixedScaleReduction red = presymbol_from_symbols(params, A, u1, u2, W);
  const Eigen::MatrixXd direct = presymbol(params, A, u1, u2, W);
  CHECK(tu::max_abs(red.block - direct) <= 1e-12);
  CHECK(red.scale == 0.125);  // cell scale 1/16 widened by the covering radius 2
  CHECK(red.symbol_queries > 0);
  CHECK(red.dropped_disjoint > 0);  // diagonal operators drop every disjoint pair

  const RepParams hp{make_grid(GroupDescriptor::heisenberg(1), 0.5, 2.0), 2.0,
                     RepMode::ExactAligned};
  const WindowSpec hw = make_box_window(hp.grid, {0.5, 0.5, 0.5}, 2.0);
  CHECK_THROWS_AS(
      presymbol_from_symbols(hp, identity_operator(hp.grid), {1.0, {0.0, 0.0, 0.0}},
                             {1.0, {0.0, 0.0, 0.0}}, hw),
      std::invalid_argument);

  WindowSpec no_box = W;
  no_box.halfwidths.reset();
  CHECK_THROWS_AS(presymbol_from_symbols(params, A, u1, u2, no_box), std::invalid_argument);
}

TEST_CASE("symbol fields round-trip through their directory layout") {
  const RepParams params = tu::lab_params(3.0);
  const WindowSpec W = tu::lab_window(params.grid);
  const SymbolField field =
      symbol_field(params, tu::sin_multiplier(params.grid), W, {1.0, 0.5}, {{-0.5}, {0.0}, {0.5}});

  const std::string dir = tu::scratch_dir("symbol-field");
  save_symbol_field(field, dir);
  const SymbolField back = load_symbol_field(dir);

  CHECK(back.p == field.p);
  CHECK(back.t_levels == field.t_levels);
  CHECK(back.g_lattice == field.g_lattice);
  CHECK(back.window.support.member == field.window.support.member);
  CHECK(back.window.support.grid == field.window.support.grid);
  REQUIRE(back.blocks.size() == field.blocks.size());
  for (std::size_t li = 0; li < field.blocks.size(); ++li) {
    REQUIRE(back.blocks[li].size() == field.blocks[li].size());
    for (std::size_t gi = 0; gi < field.blocks[li].size(); ++gi) {
      CHECK(tu::max_abs(back.blocks[li][gi] - field.blocks[li][gi]) == 0.0);
    }
  }

  CHECK_THROWS_AS(load_symbol_field(dir + "-nonexistent"), std::runtime_error);
}
