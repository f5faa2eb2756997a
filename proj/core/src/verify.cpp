#include "localis/verify.hpp"

#include "localis/function.hpp"
#include "localis/group.hpp"
#include "localis/localization.hpp"
#include "localis/operators.hpp"
#include "localis/representation.hpp"
#include "localis/synthesis.hpp"
#include "localis/version.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

namespace localis {
namespace {

PropertyResult make_result(const std::string& suite, const std::string& name, double residual,
                           double threshold) {
  PropertyResult r;
  r.suite = suite;
  r.name = name;
  r.residual = residual;
  r.threshold = threshold;
  r.passed = residual < threshold;
  return r;
}

double max_abs(const Eigen::MatrixXd& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

double elem_dist(const GroupElement& a, const GroupElement& b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
  return d;
}

std::vector<GroupDescriptor> axiom_groups() {
  return {GroupDescriptor::euclidean(1), GroupDescriptor::euclidean(2),
          GroupDescriptor::heisenberg(1), GroupDescriptor::heisenberg(2)};
}

GroupElement random_element(const GroupDescriptor& G, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> coord(-3.0, 3.0);
  GroupElement g(static_cast<std::size_t>(G.dim()));
  for (auto& c : g) c = coord(rng);
  return g;
}

double random_scale(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(std::log(0.2), std::log(3.0));
  return std::exp(u(rng));
}

// ---- group suite ----------------------------------------------------------

PropertyResult group_associativity() {
  std::mt19937_64 rng(101);
  double residual = 0.0;
  for (const auto& G : axiom_groups()) {
    for (int i = 0; i < 1000; ++i) {
      const GroupElement a = random_element(G, rng);
      const GroupElement b = random_element(G, rng);
      const GroupElement c = random_element(G, rng);
      residual = std::max(
          residual, elem_dist(compose(G, compose(G, a, b), c), compose(G, a, compose(G, b, c))));
    }
  }
  return make_result("group", "associativity", residual, 1e-12);
}

PropertyResult group_dilation_automorphism() {
  std::mt19937_64 rng(102);
  double residual = 0.0;
  for (const auto& G : axiom_groups()) {
    for (int i = 0; i < 1000; ++i) {
      const GroupElement a = random_element(G, rng);
      const GroupElement b = random_element(G, rng);
      const double t1 = random_scale(rng);
      const double t2 = random_scale(rng);
      residual = std::max(residual, elem_dist(dilate(G, t1, compose(G, a, b)),
                                              compose(G, dilate(G, t1, a), dilate(G, t1, b))));
      residual = std::max(
          residual, elem_dist(dilate(G, t1, dilate(G, t2, a)), dilate(G, t1 * t2, a)));
      residual = std::max(residual, elem_dist(dilate(G, 1.0, a), a));
    }
  }
  return make_result("group", "dilation-automorphism", residual, 1e-12);
}

PropertyResult group_semidirect_axioms() {
  std::mt19937_64 rng(103);
  double residual = 0.0;
  for (const auto& G : axiom_groups()) {
    const GroupElement e = identity(G);
    for (int i = 0; i < 1000; ++i) {
      const ScaledElement u{random_scale(rng), random_element(G, rng)};
      const ScaledElement v{random_scale(rng), random_element(G, rng)};
      const ScaledElement w{random_scale(rng), random_element(G, rng)};
      const ScaledElement lhs = scaled_compose(G, scaled_compose(G, u, v), w);
      const ScaledElement rhs = scaled_compose(G, u, scaled_compose(G, v, w));
      residual = std::max(residual, std::abs(lhs.t - rhs.t));
      residual = std::max(residual, elem_dist(lhs.g, rhs.g));

      for (const ScaledElement& prod :
           {scaled_compose(G, u, scaled_inverse(G, u)), scaled_compose(G, scaled_inverse(G, u), u)}) {
        residual = std::max(residual, std::abs(prod.t - 1.0));
        residual = std::max(residual, elem_dist(prod.g, e));
      }

      const GroupElement x = random_element(G, rng);
      residual = std::max(residual, elem_dist(scaled_action(G, scaled_compose(G, u, v), x),
                                              scaled_action(G, u, scaled_action(G, v, x))));
    }
  }
  return make_result("group", "semidirect-axioms", residual, 1e-12);
}

PropertyResult group_axb_specialization() {
  const GroupDescriptor G = GroupDescriptor::euclidean(1);
  std::mt19937_64 rng(104);
  std::uniform_real_distribution<double> coord(-3.0, 3.0);
  double residual = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const double a = random_scale(rng);
    const double b = coord(rng);
    const double a2 = random_scale(rng);
    const double b2 = coord(rng);
    const ScaledElement prod = scaled_compose(G, {a, {b}}, {a2, {b2}});
    residual = std::max(residual, std::abs(prod.t - a * a2));
    residual = std::max(residual, std::abs(prod.g[0] - (b + a * b2)));
    const ScaledElement inv = scaled_inverse(G, {a, {b}});
    residual = std::max(residual, std::abs(inv.t - 1.0 / a));
    residual = std::max(residual, std::abs(inv.g[0] - (-b / a)));
    const double x = coord(rng);
    residual = std::max(residual, std::abs(scaled_action(G, {a, {b}}, {x})[0] - (a * x + b)));
  }
  const ScaledElement frozen = scaled_compose(G, {2.0, {3.0}}, {4.0, {5.0}});
  residual = std::max(residual, std::abs(frozen.t - 8.0));
  residual = std::max(residual, std::abs(frozen.g[0] - 13.0));
  const ScaledElement frozen_inv = scaled_inverse(G, {2.0, {3.0}});
  residual = std::max(residual, std::abs(frozen_inv.t - 0.5));
  residual = std::max(residual, std::abs(frozen_inv.g[0] - (-1.5)));
  return make_result("group", "axb-specialization", residual, 1e-12);
}

// ---- shared fixtures for the lattice suites -------------------------------

RepParams lab_params() {
  RepParams params;
  params.grid = make_grid(GroupDescriptor::euclidean(1), 1.0 / 16, 8.0);
  return params;
}

WindowSpec lab_window(const GridSpec& grid) { return make_box_window(grid, {1.0}, 2.0); }

OperatorMatrix sin_multiplier(const GridSpec& grid) {
  return multiplication_operator(
      sample_function(grid, [](const GroupElement& x) { return std::sin(x[0]); }));
}

/// Random function constant on aligned blocks of 8 cells, supported on
/// [-4, 4).  Block alignment makes every dyadic pullback down to t = 1/8 read
/// a sub-lattice that represents each block by its own value, so act() is an
/// exact isometry on these samples.
SampledFunction random_block_constant(const GridSpec& grid, std::mt19937_64& rng, double p) {
  std::uniform_real_distribution<double> val(-1.0, 1.0);
  std::vector<double> block_values(16);
  for (auto& v : block_values) v = val(rng);
  SampledFunction f{grid, Eigen::VectorXd::Zero(grid.size()), p};
  for (long i = 0; i < grid.size(); ++i) {
    const long m = grid.min_index + i;
    if (m < -64 || m > 63) continue;
    f.values[i] = block_values[static_cast<std::size_t>((m + 64) / 8)];
  }
  return f;
}

GroupElement aligned_shift(const GridSpec& grid, std::mt19937_64& rng, long max_steps) {
  std::uniform_int_distribution<long> step(-max_steps, max_steps);
  return {grid.h * static_cast<double>(step(rng))};
}

// ---- representation suite --------------------------------------------------

PropertyResult rep_homomorphism() {
  RepParams params = lab_params();
  const GroupDescriptor G = params.grid.group;
  std::mt19937_64 rng(201);
  const std::vector<double> scales = {1.0, 0.5, 0.25};
  std::uniform_int_distribution<int> pick(0, 2);
  double residual = 0.0;
  for (int trial = 0; trial < 24; ++trial) {
    params.p = (trial % 2 == 0) ? 2.0 : 3.0;
    const ScaledElement s1{scales[static_cast<std::size_t>(pick(rng))],
                           aligned_shift(params.grid, rng, 24)};
    const ScaledElement s2{scales[static_cast<std::size_t>(pick(rng))],
                           aligned_shift(params.grid, rng, 24)};
    const SampledFunction f = random_block_constant(params.grid, rng, params.p);
    const SampledFunction staged = act(params, s1, act(params, s2, f));
    const SampledFunction direct = act(params, scaled_compose(G, s1, s2), f);
    residual = std::max(residual, (staged.values - direct.values).cwiseAbs().maxCoeff());
  }
  return make_result("representation", "homomorphism", residual, 1e-12);
}

PropertyResult rep_isometry() {
  RepParams params = lab_params();
  std::mt19937_64 rng(202);
  const std::vector<double> scales = {1.0, 0.5, 0.25, 0.125};
  const std::vector<double> exponents = {1.5, 2.0, 3.0};
  std::uniform_int_distribution<int> pick_t(0, 3);
  double residual = 0.0;
  for (int trial = 0; trial < 30; ++trial) {
    params.p = exponents[static_cast<std::size_t>(trial % 3)];
    const ScaledElement s{scales[static_cast<std::size_t>(pick_t(rng))],
                          aligned_shift(params.grid, rng, 24)};
    const SampledFunction f = random_block_constant(params.grid, rng, params.p);
    residual = std::max(residual, std::abs(lp_norm(act(params, s, f)) - lp_norm(f)));
  }
  return make_result("representation", "isometry", residual, 1e-12);
}

PropertyResult rep_projection_covariance() {
  const RepParams params = lab_params();
  const GroupDescriptor G = params.grid.group;
  const WindowSpec W = lab_window(params.grid);
  const OperatorMatrix Pe = projection_matrix(W.support);
  double residual = 0.0;
  for (const double t : {0.125, 0.25, 0.5, 1.0, 2.0}) {
    for (const double gv : {0.0, 0.5, -1.25, 3.0}) {
      const ScaledElement s{t, {gv}};
      const OperatorMatrix moved =
          double_act(params, scaled_inverse(G, s), scaled_inverse(G, s), Pe);
      const OperatorMatrix direct = projection_matrix(transform_mask(s, W.support).mask);
      residual = std::max(residual, max_abs(moved.entries - direct.entries));
    }
  }
  return make_result("representation", "projection-covariance", residual, 1e-14);
}

PropertyResult rep_presymbol_intertwining() {
  const RepParams params = lab_params();
  const GroupDescriptor G = params.grid.group;
  const WindowSpec W = lab_window(params.grid);
  std::mt19937_64 rng(204);
  const std::vector<double> outer_scales = {1.0, 0.5};
  const std::vector<double> inner_scales = {1.0, 0.5, 0.25};
  std::uniform_int_distribution<int> pick2(0, 1);
  std::uniform_int_distribution<int> pick3(0, 2);
  double residual = 0.0;
  for (const OperatorMatrix& A : {sin_multiplier(params.grid), hilbert_transform(params.grid)}) {
    for (int trial = 0; trial < 6; ++trial) {
      const ScaledElement Ul{outer_scales[static_cast<std::size_t>(pick2(rng))],
                             aligned_shift(params.grid, rng, 8)};
      const ScaledElement Ur{outer_scales[static_cast<std::size_t>(pick2(rng))],
                             aligned_shift(params.grid, rng, 8)};
      const ScaledElement l{inner_scales[static_cast<std::size_t>(pick3(rng))],
                            aligned_shift(params.grid, rng, 8)};
      const ScaledElement r{inner_scales[static_cast<std::size_t>(pick3(rng))],
                            aligned_shift(params.grid, rng, 8)};
      const OperatorMatrix moved = double_act(params, Ul, Ur, A);
      const Eigen::MatrixXd lhs = presymbol(params, moved, l, r, W);
      const Eigen::MatrixXd rhs =
          presymbol(params, A, scaled_compose(G, Ul, l), scaled_compose(G, Ur, r), W);
      residual = std::max(residual, max_abs(lhs - rhs));
    }
  }
  return make_result("representation", "presymbol-intertwining", residual, 1e-10);
}

// ---- localization suite -----------------------------------------------------

PropertyResult loc_symbol_covariance() {
  const RepParams params = lab_params();
  const GroupDescriptor G = params.grid.group;
  const WindowSpec W = lab_window(params.grid);
  const OperatorMatrix A = sin_multiplier(params.grid);
  std::mt19937_64 rng(301);
  const std::vector<double> scales = {1.0, 0.5, 0.25};
  std::uniform_int_distribution<int> pick3(0, 2);
  double residual = 0.0;
  for (int trial = 0; trial < 10; ++trial) {
    const ScaledElement u{scales[static_cast<std::size_t>(pick3(rng))],
                          aligned_shift(params.grid, rng, 8)};
    const ScaledElement s{scales[static_cast<std::size_t>(pick3(rng))],
                          aligned_shift(params.grid, rng, 8)};
    const Eigen::MatrixXd lhs = symbol(params, double_act(params, u, u, A), s, W);
    const Eigen::MatrixXd rhs = symbol(params, A, scaled_compose(G, u, s), W);
    residual = std::max(residual, max_abs(lhs - rhs));
  }
  return make_result("localization", "symbol-covariance", residual, 1e-10);
}

PropertyResult loc_rigidity() {
  const RepParams params = lab_params();
  const GridSpec& grid = params.grid;
  const WindowSpec W = lab_window(grid);
  const std::vector<long> support = window_indices(W);
  std::mt19937_64 rng(302);
  std::uniform_real_distribution<double> val(-1.0, 1.0);

  const auto band_kernel = [&]() {
    SampledFunction k{grid, Eigen::VectorXd::Zero(grid.size()), 2.0};
    for (long m = -32; m <= 32; ++m) k.values[m - grid.min_index] = val(rng);
    return k;
  };
  const SampledFunction k1 = band_kernel();
  const SampledFunction k2 = band_kernel();

  const ScaledElement s{1.0, {0.5}};
  double residual = 0.0;
  std::vector<Eigen::MatrixXd> blocks;
  for (const SampledFunction& k : {k1, k2}) {
    const Eigen::MatrixXd block = symbol(params, group_convolution(k), s, W);
    blocks.push_back(block);
    for (std::size_t i = 0; i < support.size(); ++i) {
      const long mi = grid.multi_of(support[i])[0];
      for (std::size_t j = 0; j < support.size(); ++j) {
        const long mj = grid.multi_of(support[j])[0];
        const double expected = k.values[(mi - mj) - grid.min_index] * grid.h;
        residual = std::max(residual,
                            std::abs(block(static_cast<long>(i), static_cast<long>(j)) - expected));
      }
    }
  }
  // Distinct kernels must stay distinguishable through the symbol block.
  if (max_abs(blocks[0] - blocks[1]) == 0.0) residual = 1e9;
  return make_result("localization", "rigidity", residual, 1e-12);
}

PropertyResult loc_determination() {
  const RepParams params = lab_params();
  const WindowSpec W = lab_window(params.grid);
  const OperatorMatrix A = sin_multiplier(params.grid);
  const ScaledElement u1{0.5, {-0.25}};
  const ScaledElement u2{0.25, {0.5}};
  const Eigen::MatrixXd direct = presymbol(params, A, u1, u2, W);
  const MixedScaleReduction recon = presymbol_from_symbols(params, A, u1, u2, W);
  double residual = max_abs(direct - recon.block);
  if (recon.symbol_queries == 0) residual = 1e9;
  return make_result("localization", "determination", residual, 1e-10);
}

PropertyResult loc_multiplication_localization() {
  const RepParams params = lab_params();
  const GridSpec& grid = params.grid;
  const WindowSpec W = lab_window(grid);
  const OperatorMatrix A = sin_multiplier(grid);
  const Eigen::MatrixXd eye =
      Eigen::MatrixXd::Identity(grid.size(), grid.size());
  double residual = 0.0;  // max over samples of proxy / (L t rho), L = rho = 1
  for (const double t : {0.5, 0.25, 0.125, 0.0625}) {
    for (const double gv : {0.0, 1.0, -2.0}) {
      const GroupElement g = {gv};
      const double c = std::sin(gv);
      const OperatorMatrix shifted = make_operator(grid, A.entries - c * eye);
      const Eigen::MatrixXd block = symbol(params, shifted, {t, g}, W);
      residual = std::max(residual, enorm_proxy(block, 0) / t);
    }
  }
  return make_result("localization", "multiplication-localization", residual, 1.0);
}

// ---- synthesis suite --------------------------------------------------------

struct TilingFixture {
  RepParams params;
  WindowSpec W;
  std::vector<double> levels;
  std::vector<GroupElement> lattice;
};

/// Placements (1/8, c) of the unit box window cover [c - 2h, c + 2h]; centers
/// 5h apart tile a segment with coverage exactly one.
TilingFixture make_tiling() {
  TilingFixture fx{lab_params(), {}, {0.125}, {}};
  fx.W = lab_window(fx.params.grid);
  for (long k = -20; k <= 20; k += 5) fx.lattice.push_back({fx.params.grid.h * static_cast<double>(k)});
  return fx;
}

PropertyResult syn_reconstruction_intertwining() {
  const TilingFixture fx = make_tiling();
  const GroupDescriptor G = fx.params.grid.group;
  const OperatorMatrix A = sin_multiplier(fx.params.grid);
  const OperatorField field =
      field_from_symbols(fx.params, symbol_field(fx.params, A, fx.W, fx.levels, fx.lattice));
  const InverseOptions opts{PairingKind::Hardy, false};
  const OperatorMatrix R = inverse_covariant(fx.params, field, fx.W, opts);

  const GroupElement b = {0.5};
  const OperatorMatrix shifted_R =
      inverse_covariant(fx.params, translate_field(fx.params, field, b), fx.W, opts);
  const ScaledElement u{1.0, b};
  const OperatorMatrix expected =
      double_act(fx.params, scaled_inverse(G, u), scaled_inverse(G, u), R);
  const double residual = max_abs(shifted_R.entries - expected.entries);
  return make_result("synthesis", "reconstruction-intertwining", residual, 1e-10);
}

PropertyResult syn_envelope_consistency() {
  const RepParams params = lab_params();
  const GridSpec& grid = params.grid;
  const WindowSpec W = lab_window(grid);
  const Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(grid.size(), grid.size());

  const Partition part = dyadic_partition(grid, {-2.0}, {2.0}, 3);
  std::vector<OperatorMatrix> locals;
  for (const GroupElement& anchor : part.anchors)
    locals.push_back(make_operator(grid, std::sin(anchor[0]) * eye));
  const OperatorMatrix envelope = envelope_sum(part, locals);

  const std::vector<double> levels = {0.5, 0.25, 0.125};
  double residual = 0.0;  // finest-level symbol distance at each anchor
  for (std::size_t j = 0; j < part.anchors.size(); ++j) {
    const EquivalenceReport rep =
        local_equiv(params, envelope, locals[j], part.anchors[j], W, levels, 0, 1e-9);
    residual = rep.verdict ? std::max(residual, rep.decay.back()) : 1e9;
    if (!rep.verdict) break;
  }
  return make_result("synthesis", "envelope-consistency", residual, 1e-12);
}

PropertyResult syn_round_trip() {
  const TilingFixture fx = make_tiling();
  const GridSpec& grid = fx.params.grid;
  const OperatorMatrix A = sin_multiplier(grid);
  const InverseOptions opts{PairingKind::Hardy, false};

  const OperatorField field =
      field_from_symbols(fx.params, symbol_field(fx.params, A, fx.W, fx.levels, fx.lattice));
  const OperatorMatrix R = inverse_covariant(fx.params, field, fx.W, opts);

  RegionMask covered = transform_mask({fx.levels[0], fx.lattice[0]}, fx.W.support).mask;
  for (std::size_t j = 1; j < fx.lattice.size(); ++j)
    covered = mask_or(covered, transform_mask({fx.levels[0], fx.lattice[j]}, fx.W.support).mask);
  const OperatorMatrix PU = projection_matrix(covered);
  const OperatorMatrix boxed = operator_mul(operator_mul(PU, A), PU);
  const double norm_error = operator_norm(R.entries - boxed.entries);

  const OperatorMatrix Rc = inverse_covariant(
      fx.params, constant_field(fx.levels, fx.lattice, identity_operator(grid)), fx.W, opts);
  const double tiling_error = max_abs(Rc.entries - PU.entries);

  // Threshold is the localization budget L t* rho of the sin multiplier at
  // the placement scale; the diagonal case lands far below it.
  return make_result("synthesis", "round-trip", std::max(norm_error, tiling_error), 0.125);
}

}  // namespace

std::vector<PropertyResult> run_suite(const std::string& suite) {
  std::vector<PropertyResult> out;
  const bool all = suite == "all";
  if (all || suite == "group") {
    out.push_back(group_associativity());
    out.push_back(group_dilation_automorphism());
    out.push_back(group_semidirect_axioms());
    out.push_back(group_axb_specialization());
  }
  if (all || suite == "representation") {
    out.push_back(rep_homomorphism());
    out.push_back(rep_isometry());
    out.push_back(rep_projection_covariance());
    out.push_back(rep_presymbol_intertwining());
  }
  if (all || suite == "localization") {
    out.push_back(loc_symbol_covariance());
    out.push_back(loc_rigidity());
    out.push_back(loc_determination());
    out.push_back(loc_multiplication_localization());
  }
  if (all || suite == "synthesis") {
    out.push_back(syn_reconstruction_intertwining());
    out.push_back(syn_envelope_consistency());
    out.push_back(syn_round_trip());
  }
  if (out.empty())
    throw std::invalid_argument("unknown verify suite: " + suite +
                                " (expected group|representation|localization|synthesis|all)");
  return out;
}

std::string verify_report_json(const std::vector<PropertyResult>& results) {
  nlohmann::json props = nlohmann::json::array();
  bool all_passed = true;
  for (const PropertyResult& r : results) {
    props.push_back({{"suite", r.suite},
                     {"name", r.name},
                     {"residual", r.residual},
                     {"threshold", r.threshold},
                     {"passed", r.passed}});
    all_passed = all_passed && r.passed;
  }
  nlohmann::json report{{"version", kVersion}, {"passed", all_passed}, {"properties", props}};
  return report.dump(2);
}

}  // namespace localis
