#include "localis/synthesis.hpp"

#include "localis/io.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <stdexcept>

namespace localis {

void validate_partition(const Partition& P) {
  if (P.cells.size() != P.anchors.size()) {
    throw std::invalid_argument("partition: one anchor per cell required");
  }
  if (P.cells.empty()) throw std::invalid_argument("partition: no cells");
  const GridSpec& grid = P.cells.front().grid;
  std::vector<int> coverage(static_cast<std::size_t>(grid.size()), 0);
  for (std::size_t c = 0; c < P.cells.size(); ++c) {
    if (!(P.cells[c].grid == grid)) throw std::invalid_argument("partition: cell grid mismatch");
    for (long i = 0; i < grid.size(); ++i) {
      if (P.cells[c].member[static_cast<std::size_t>(i)]) {
        if (++coverage[static_cast<std::size_t>(i)] > 1) {
          throw std::invalid_argument("partition: cells overlap");
        }
      }
    }
    const auto anchor = grid.locate(P.anchors[c]);
    if (!anchor || !P.cells[c].member[static_cast<std::size_t>(*anchor)]) {
      throw std::invalid_argument("partition: anchor outside its cell");
    }
  }
}

Partition dyadic_partition(const GridSpec& grid, const GroupElement& lo, const GroupElement& hi,
                           int depth) {
  if (depth < 0) throw std::invalid_argument("dyadic_partition: depth must be >= 0");
  const int m = grid.dim();
  if (static_cast<int>(lo.size()) != m || static_cast<int>(hi.size()) != m) {
    throw std::invalid_argument("dyadic_partition: corner rank mismatch");
  }
  // Per-axis index ranges of the box, cut into 2^depth near-equal slabs.
  const long slabs = 1L << depth;
  std::vector<long> i0(static_cast<std::size_t>(m)), i1(static_cast<std::size_t>(m));
  std::vector<std::vector<long>> bounds(static_cast<std::size_t>(m));
  for (int a = 0; a < m; ++a) {
    const auto ia = static_cast<std::size_t>(a);
    const double q0 = lo[ia] / grid.h;
    const double q1 = hi[ia] / grid.h;
    if (std::abs(q0 - std::round(q0)) > 1e-9 || std::abs(q1 - std::round(q1)) > 1e-9) {
      throw std::invalid_argument("dyadic_partition: box corners must be lattice points");
    }
    i0[ia] = static_cast<long>(std::round(q0));
    i1[ia] = static_cast<long>(std::round(q1));
    const long len = i1[ia] - i0[ia] + 1;
    if (len < slabs) {
      throw std::invalid_argument("dyadic_partition: box too small for the requested depth");
    }
    bounds[ia].resize(static_cast<std::size_t>(slabs) + 1);
    for (long k = 0; k <= slabs; ++k) {
      bounds[ia][static_cast<std::size_t>(k)] =
          i0[ia] + static_cast<long>(std::llround(static_cast<double>(len) *
                                                  static_cast<double>(k) / static_cast<double>(slabs)));
    }
  }

  const long cell_count = static_cast<long>(std::pow(static_cast<double>(slabs), m));
  Partition P;
  P.cells.assign(static_cast<std::size_t>(cell_count),
                 RegionMask{grid, std::vector<std::uint8_t>(static_cast<std::size_t>(grid.size()), 0)});
  P.anchors.resize(static_cast<std::size_t>(cell_count));

  // Anchor of each cell: the central lattice index along every axis.
  for (long c = 0; c < cell_count; ++c) {
    long rest = c;
    GroupElement anchor(static_cast<std::size_t>(m));
    for (int a = m - 1; a >= 0; --a) {
      const auto ia = static_cast<std::size_t>(a);
      const long slab = rest % slabs;
      rest /= slabs;
      const long lo_idx = bounds[ia][static_cast<std::size_t>(slab)];
      const long hi_idx = bounds[ia][static_cast<std::size_t>(slab) + 1] - 1;
      anchor[ia] = grid.h * static_cast<double>((lo_idx + hi_idx) / 2);
    }
    P.anchors[static_cast<std::size_t>(c)] = anchor;
  }

  // Membership: locate the slab of each box point along every axis.
  std::vector<long> multi(i0.begin(), i0.end());
  for (;;) {
    long cell = 0;
    for (int a = 0; a < m; ++a) {
      const auto ia = static_cast<std::size_t>(a);
      const auto it = std::upper_bound(bounds[ia].begin(), bounds[ia].end(), multi[ia]);
      const long slab = std::min<long>(slabs - 1, (it - bounds[ia].begin()) - 1);
      cell = cell * slabs + slab;
    }
    P.cells[static_cast<std::size_t>(cell)].member.at(
        static_cast<std::size_t>(grid.index_of(multi))) = 1;
    int a = m - 1;
    for (; a >= 0; --a) {
      if (++multi[static_cast<std::size_t>(a)] <= i1[static_cast<std::size_t>(a)]) break;
      multi[static_cast<std::size_t>(a)] = i0[static_cast<std::size_t>(a)];
    }
    if (a < 0) break;
  }
  return P;
}

OperatorMatrix envelope_sum(const Partition& P, const std::vector<OperatorMatrix>& locals) {
  validate_partition(P);
  if (locals.size() != P.cells.size()) {
    throw std::invalid_argument("envelope_sum: one local operator per cell required");
  }
  const GridSpec& grid = P.cells.front().grid;
  check_dense_budget(grid, "envelope_sum");
  Eigen::MatrixXd entries = Eigen::MatrixXd::Zero(grid.size(), grid.size());
  for (std::size_t c = 0; c < P.cells.size(); ++c) {
    if (!(locals[c].grid == grid)) throw std::invalid_argument("envelope_sum: local grid mismatch");
    std::vector<long> pts;
    for (long i = 0; i < grid.size(); ++i) {
      if (P.cells[c].member[static_cast<std::size_t>(i)]) pts.push_back(i);
    }
    for (long i : pts) {
      for (long j : pts) entries(i, j) += locals[c].entries(i, j);
    }
  }
  return OperatorMatrix{grid, std::move(entries)};
}

std::vector<RefineRow> envelope_refine(
    const OperatorMatrix& target,
    const std::function<OperatorMatrix(const GroupElement&)>& local_rule, const GroupElement& lo,
    const GroupElement& hi, const std::vector<int>& depths, int proxy_rank) {
  if (depths.empty()) throw std::invalid_argument("envelope_refine: no depths");
  const GridSpec& grid = target.grid;
  const RegionMask box = make_box_mask(grid, lo, hi);
  const Eigen::MatrixXd P = projection_matrix(box).entries;
  const Eigen::MatrixXd boxed_target = P * target.entries * P;

  std::vector<RefineRow> rows;
  for (int depth : depths) {
    const Partition part = dyadic_partition(grid, lo, hi, depth);
    std::vector<OperatorMatrix> locals;
    locals.reserve(part.anchors.size());
    for (const GroupElement& anchor : part.anchors) locals.push_back(local_rule(anchor));
    const OperatorMatrix envelope = envelope_sum(part, locals);
    const Eigen::MatrixXd diff = envelope.entries - boxed_target;
    RefineRow row;
    row.depth = depth;
    row.norm = operator_norm(diff);
    row.proxy = enorm_proxy(diff, proxy_rank);
    rows.push_back(row);
  }
  return rows;
}

OperatorField field_from_symbols(const RepParams& params, const SymbolField& field) {
  OperatorField out;
  out.t_levels = field.t_levels;
  out.g_lattice = field.g_lattice;
  out.ops.assign(field.t_levels.size(), {});
  for (std::size_t level = 0; level < field.t_levels.size(); ++level) {
    out.ops[level].reserve(field.g_lattice.size());
    for (std::size_t point = 0; point < field.g_lattice.size(); ++point) {
      const ScaledElement s{field.t_levels[level], field.g_lattice[point]};
      const ScaledElement sinv = scaled_inverse(params.grid.group, s);
      out.ops[level].push_back(double_act(
          params, sinv, sinv, embed_window_block(field.window, field.blocks[level][point])));
    }
  }
  return out;
}

OperatorField constant_field(const std::vector<double>& t_levels,
                             const std::vector<GroupElement>& g_lattice, const OperatorMatrix& A) {
  if (t_levels.empty() || g_lattice.empty()) {
    throw std::invalid_argument("constant_field: need at least one level and one point");
  }
  OperatorField out;
  out.t_levels = t_levels;
  out.g_lattice = g_lattice;
  out.ops.assign(t_levels.size(), std::vector<OperatorMatrix>(g_lattice.size(), A));
  return out;
}

OperatorField translate_field(const RepParams& params, const OperatorField& field,
                              const GroupElement& b) {
  const GroupDescriptor& G = params.grid.group;
  const ScaledElement u{1.0, b};
  const ScaledElement uinv = scaled_inverse(G, u);
  OperatorField out;
  out.t_levels = field.t_levels;
  out.g_lattice.reserve(field.g_lattice.size());
  for (const GroupElement& g : field.g_lattice) out.g_lattice.push_back(compose(G, b, g));
  out.ops.assign(field.t_levels.size(), {});
  for (std::size_t level = 0; level < field.t_levels.size(); ++level) {
    out.ops[level].reserve(field.g_lattice.size());
    for (const OperatorMatrix& A : field.ops[level]) {
      out.ops[level].push_back(double_act(params, uinv, uinv, A));
    }
  }
  return out;
}

namespace {

/// Per-level windowed sum with 1/coverage weights; coverage gaps inside the
/// union bounding box are reported through `gaps` when requested.
OperatorMatrix level_reconstruction(const RepParams& params,
                                    const std::vector<OperatorMatrix>& ops,
                                    const std::vector<GroupElement>& lattice, double t,
                                    const WindowSpec& W, long* gaps) {
  const GridSpec& grid = params.grid;
  std::vector<RegionMask> placements;
  placements.reserve(lattice.size());
  std::vector<long> coverage(static_cast<std::size_t>(grid.size()), 0);
  for (const GroupElement& g : lattice) {
    placements.push_back(transform_mask(ScaledElement{t, g}, W.support).mask);
    for (long i = 0; i < grid.size(); ++i) {
      coverage[static_cast<std::size_t>(i)] += placements.back().member[static_cast<std::size_t>(i)];
    }
  }

  if (gaps) {
    // Bounding box of the union, in lattice indices.
    std::vector<long> blo(static_cast<std::size_t>(grid.dim()), 0);
    std::vector<long> bhi(static_cast<std::size_t>(grid.dim()), 0);
    bool any = false;
    for (long i = 0; i < grid.size(); ++i) {
      if (!coverage[static_cast<std::size_t>(i)]) continue;
      const std::vector<long> multi = grid.multi_of(i);
      for (int a = 0; a < grid.dim(); ++a) {
        const auto ia = static_cast<std::size_t>(a);
        blo[ia] = any ? std::min(blo[ia], multi[ia]) : multi[ia];
        bhi[ia] = any ? std::max(bhi[ia], multi[ia]) : multi[ia];
      }
      any = true;
    }
    if (!any) throw std::invalid_argument("inverse_covariant: no window placement hits the grid");
    *gaps = 0;
    for (long i = 0; i < grid.size(); ++i) {
      if (coverage[static_cast<std::size_t>(i)]) continue;
      const std::vector<long> multi = grid.multi_of(i);
      bool in_bbox = true;
      for (int a = 0; a < grid.dim(); ++a) {
        const auto ia = static_cast<std::size_t>(a);
        if (multi[ia] < blo[ia] || multi[ia] > bhi[ia]) {
          in_bbox = false;
          break;
        }
      }
      if (in_bbox) ++*gaps;
    }
  }

  Eigen::VectorXd half_weight(grid.size());
  for (long i = 0; i < grid.size(); ++i) {
    const long c = coverage[static_cast<std::size_t>(i)];
    half_weight[i] = c > 0 ? std::sqrt(1.0 / static_cast<double>(c)) : 0.0;
  }

  Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(grid.size(), grid.size());
  for (std::size_t k = 0; k < lattice.size(); ++k) {
    std::vector<long> pts;
    for (long i = 0; i < grid.size(); ++i) {
      if (placements[k].member[static_cast<std::size_t>(i)]) pts.push_back(i);
    }
    for (long i : pts) {
      for (long j : pts) acc(i, j) += half_weight[i] * ops[k].entries(i, j) * half_weight[j];
    }
  }
  return OperatorMatrix{grid, std::move(acc)};
}

}  // namespace

OperatorMatrix inverse_covariant(const RepParams& params, const OperatorField& field,
                                 const WindowSpec& W, const InverseOptions& opts) {
  if (field.t_levels.empty() || field.g_lattice.empty()) {
    throw std::invalid_argument("inverse_covariant: empty field");
  }
  for (const auto& level_ops : field.ops) {
    if (level_ops.size() != field.g_lattice.size()) {
      throw std::invalid_argument("inverse_covariant: ragged field");
    }
  }
  // Fine end: the smallest scale in the ladder.
  std::vector<std::size_t> order(field.t_levels.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return field.t_levels[a] < field.t_levels[b];
  });

  long gaps = 0;
  const OperatorMatrix fine = level_reconstruction(
      params, field.ops[order[0]], field.g_lattice, field.t_levels[order[0]], W, &gaps);
  if (gaps > 0) {
    throw std::invalid_argument(
        "inverse_covariant: finest-level windows leave " + std::to_string(gaps) +
        " uncovered lattice points inside the union bounding box");
  }

  if (opts.kind == PairingKind::Hardy) {
    if (!opts.richardson || field.t_levels.size() < 2) return fine;
    const double ta = field.t_levels[order[0]];
    const double tb = field.t_levels[order[1]];
    const OperatorMatrix next = level_reconstruction(params, field.ops[order[1]],
                                                     field.g_lattice, tb, W, nullptr);
    return OperatorMatrix{params.grid,
                          (tb * fine.entries - ta * next.entries) / (tb - ta)};
  }

  if (field.t_levels.size() < 2) {
    throw std::invalid_argument("inverse_covariant: scale averaging needs at least two levels");
  }
  // Trapezoid weights against dt/t^(k+1), normalized to sum 1 so a constant
  // identity field still reconstructs the identity.
  const int k = params.grid.group.homogeneous_dimension();
  std::vector<double> weight(order.size());
  double total = 0.0;
  for (std::size_t i = 0; i < order.size(); ++i) {
    const double t = field.t_levels[order[i]];
    double dt = 0.0;
    if (i > 0) dt += 0.5 * (t - field.t_levels[order[i - 1]]);
    if (i + 1 < order.size()) dt += 0.5 * (field.t_levels[order[i + 1]] - t);
    weight[i] = dt / std::pow(t, k + 1);
    total += weight[i];
  }
  Eigen::MatrixXd acc = (weight[0] / total) * fine.entries;
  for (std::size_t i = 1; i < order.size(); ++i) {
    const OperatorMatrix level = level_reconstruction(
        params, field.ops[order[i]], field.g_lattice, field.t_levels[order[i]], W, nullptr);
    acc += (weight[i] / total) * level.entries;
  }
  return OperatorMatrix{params.grid, std::move(acc)};
}

void save_operator_field(const OperatorField& field, const GridSpec& grid, const std::string& dir) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  nlohmann::json j;
  j["format"] = "localis-operator-field";
  j["version"] = 1;
  j["group"] = nlohmann::json::parse(grid.group.to_json());
  j["grid"] = {{"h", grid.h}, {"extent", grid.extent}};
  j["t_levels"] = field.t_levels;
  j["lattice"] = field.g_lattice;
  std::ofstream manifest(fs::path(dir) / "manifest.json");
  if (!manifest) throw std::runtime_error(dir + ": cannot write manifest.json");
  manifest << j.dump(2) << "\n";
  for (std::size_t level = 0; level < field.t_levels.size(); ++level) {
    for (std::size_t point = 0; point < field.g_lattice.size(); ++point) {
      const std::string name = "t" + std::to_string(level) + "_g" + std::to_string(point) + ".locm";
      write_locm((fs::path(dir) / name).string(), field.ops[level][point].entries);
    }
  }
}

OperatorField load_operator_field(const std::string& dir) {
  namespace fs = std::filesystem;
  std::ifstream manifest(fs::path(dir) / "manifest.json");
  if (!manifest) throw std::runtime_error(dir + ": cannot read manifest.json");
  nlohmann::json j = nlohmann::json::parse(manifest);
  if (j.value("format", "") != "localis-operator-field") {
    throw std::runtime_error(dir + ": not an operator-field directory");
  }
  const GroupDescriptor group = GroupDescriptor::from_json(j.at("group").dump());
  const GridSpec grid =
      make_grid(group, j.at("grid").at("h").get<double>(), j.at("grid").at("extent").get<double>());
  OperatorField field;
  field.t_levels = j.at("t_levels").get<std::vector<double>>();
  field.g_lattice = j.at("lattice").get<std::vector<GroupElement>>();
  field.ops.assign(field.t_levels.size(), {});
  for (std::size_t level = 0; level < field.t_levels.size(); ++level) {
    field.ops[level].reserve(field.g_lattice.size());
    for (std::size_t point = 0; point < field.g_lattice.size(); ++point) {
      const std::string name = "t" + std::to_string(level) + "_g" + std::to_string(point) + ".locm";
      field.ops[level].push_back(
          OperatorMatrix{grid, read_locm((fs::path(dir) / name).string())});
    }
  }
  return field;
}

void write_refine_csv(const std::string& path, const std::vector<RefineRow>& rows) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error(path + ": cannot open for writing");
  out << "depth,norm,proxy\n";
  for (const RefineRow& row : rows) {
    out << row.depth << "," << format_double(row.norm) << "," << format_double(row.proxy) << "\n";
  }
  if (!out) throw std::runtime_error(path + ": write failed");
}

}  // namespace localis
