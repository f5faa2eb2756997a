#include "localis/localization.hpp"

#include "localis/io.hpp"
#include "localis/threads.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <stdexcept>
#include <thread>

namespace localis {

namespace {

bool is_power_of_two(double t) {
  const double l = std::log2(t);
  return t > 0.0 && std::abs(l - std::round(l)) <= 1e-9;
}

void check_presymbol_scale(const RepParams& params, const ScaledElement& s, const char* what) {
  if (params.mode == RepMode::ExactAligned && !(s.t <= 1.0 && is_power_of_two(s.t))) {
    throw std::invalid_argument(std::string(what) +
                                ": ExactAligned placements need dyadic t <= 1, got t = " +
                                std::to_string(s.t));
  }
}

void check_levels(const std::vector<double>& t_levels, const char* what) {
  if (t_levels.empty()) throw std::invalid_argument(std::string(what) + ": no scale levels");
  for (double t : t_levels) {
    if (!(t <= 1.0 && is_power_of_two(t))) {
      throw std::invalid_argument(std::string(what) + ": levels must be dyadic and <= 1");
    }
  }
  for (std::size_t i = 1; i < t_levels.size(); ++i) {
    if (!(t_levels[i] < t_levels[i - 1])) {
      throw std::invalid_argument(std::string(what) + ": levels must be strictly descending");
    }
  }
}

}  // namespace

Eigen::MatrixXd presymbol(const RepParams& params, const OperatorMatrix& A,
                          const ScaledElement& left, const ScaledElement& right,
                          const WindowSpec& W) {
  if (!(A.grid == params.grid) || !(W.support.grid == params.grid)) {
    throw std::invalid_argument("presymbol: grid mismatch");
  }
  check_presymbol_scale(params, left, "presymbol");
  check_presymbol_scale(params, right, "presymbol");
  const OperatorMatrix D = double_act(params, left, right, A);
  const std::vector<long> idx = window_indices(W);
  Eigen::MatrixXd block(idx.size(), idx.size());
  for (std::size_t i = 0; i < idx.size(); ++i) {
    for (std::size_t j = 0; j < idx.size(); ++j) {
      block(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          D.entries(idx[i], idx[j]);
    }
  }
  return block;
}

OperatorMatrix alt_presymbol(const RepParams& params, const OperatorMatrix& A,
                             const ScaledElement& left, const ScaledElement& right,
                             const WindowSpec& W) {
  if (!(A.grid == params.grid) || !(W.support.grid == params.grid)) {
    throw std::invalid_argument("alt_presymbol: grid mismatch");
  }
  check_presymbol_scale(params, left, "alt_presymbol");
  check_presymbol_scale(params, right, "alt_presymbol");
  const RegionMask Fl = transform_mask(left, W.support).mask;
  const RegionMask Fr = transform_mask(right, W.support).mask;
  Eigen::MatrixXd entries = Eigen::MatrixXd::Zero(A.grid.size(), A.grid.size());
  for (long i = 0; i < A.grid.size(); ++i) {
    if (!Fl.member[static_cast<std::size_t>(i)]) continue;
    for (long j = 0; j < A.grid.size(); ++j) {
      if (Fr.member[static_cast<std::size_t>(j)]) entries(i, j) = A.entries(i, j);
    }
  }
  return OperatorMatrix{A.grid, std::move(entries)};
}

Eigen::MatrixXd symbol(const RepParams& params, const OperatorMatrix& A, const ScaledElement& s,
                       const WindowSpec& W) {
  return presymbol(params, A, s, s, W);
}

OperatorMatrix embed_window_block(const WindowSpec& W, const Eigen::MatrixXd& block) {
  const GridSpec& grid = W.support.grid;
  check_dense_budget(grid, "embed_window_block");
  const std::vector<long> idx = window_indices(W);
  if (block.rows() != static_cast<Eigen::Index>(idx.size()) || block.rows() != block.cols()) {
    throw std::invalid_argument("embed_window_block: block side must equal the window size");
  }
  Eigen::MatrixXd entries = Eigen::MatrixXd::Zero(grid.size(), grid.size());
  for (std::size_t i = 0; i < idx.size(); ++i) {
    for (std::size_t j = 0; j < idx.size(); ++j) {
      entries(idx[i], idx[j]) = block(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
    }
  }
  return OperatorMatrix{grid, std::move(entries)};
}

SymbolField symbol_field(const RepParams& params, const OperatorMatrix& A, const WindowSpec& W,
                         const std::vector<double>& t_levels,
                         const std::vector<GroupElement>& g_lattice) {
  check_levels(t_levels, "symbol_field");
  if (g_lattice.empty()) throw std::invalid_argument("symbol_field: empty lattice");
  for (const GroupElement& g : g_lattice) {
    if (!params.grid.locate(g)) {
      throw std::invalid_argument("symbol_field: lattice point is not on the grid");
    }
  }

  SymbolField field{W, params.p, t_levels, g_lattice, {}};
  field.blocks.assign(t_levels.size(), std::vector<Eigen::MatrixXd>(g_lattice.size()));

  const long tasks = static_cast<long>(t_levels.size() * g_lattice.size());
  const int workers = thread_budget(tasks);
  std::exception_ptr first_error;
  std::mutex error_mutex;
  auto work = [&](int worker) {
    try {
      for (long task = worker; task < tasks; task += workers) {
        const std::size_t level = static_cast<std::size_t>(task) / g_lattice.size();
        const std::size_t point = static_cast<std::size_t>(task) % g_lattice.size();
        field.blocks[level][point] =
            symbol(params, A, ScaledElement{t_levels[level], g_lattice[point]}, W);
      }
    } catch (...) {
      const std::lock_guard<std::mutex> lock(error_mutex);
      if (!first_error) first_error = std::current_exception();
    }
  };
  if (workers == 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) pool.emplace_back(work, w);
    for (auto& th : pool) th.join();
  }
  if (first_error) std::rethrow_exception(first_error);
  return field;
}

EquivalenceReport local_equiv(const RepParams& params, const OperatorMatrix& A,
                              const OperatorMatrix& B, const GroupElement& g, const WindowSpec& W,
                              const std::vector<double>& t_levels, int rank, double tol) {
  check_levels(t_levels, "local_equiv");
  if (!(tol > 0.0)) throw std::invalid_argument("local_equiv: tolerance must be positive");
  const OperatorMatrix D = operator_sub(A, B);
  EquivalenceReport report{g, t_levels, {}, false, tol, rank};
  for (double t : t_levels) {
    report.decay.push_back(enorm_proxy(symbol(params, D, ScaledElement{t, g}, W), rank));
  }
  bool monotone = true;
  for (std::size_t i = 1; i < report.decay.size(); ++i) {
    if (report.decay[i] > 1.1 * report.decay[i - 1]) monotone = false;
  }
  report.verdict = monotone && report.decay.back() < tol;
  return report;
}

std::string equivalence_report_json(const EquivalenceReport& report) {
  nlohmann::json j;
  j["g"] = report.g;
  j["t_levels"] = report.t_levels;
  j["decay"] = report.decay;
  j["verdict"] = report.verdict;
  j["tolerance"] = report.tolerance;
  j["rank"] = report.rank;
  return j.dump(2);
}

std::vector<SignedMaskTerm> inclusion_exclusion_decomposition(
    const RegionMask& target, const std::vector<RegionMask>& cover) {
  if (cover.empty()) throw std::invalid_argument("inclusion_exclusion_decomposition: empty cover");
  RegionMask uncovered = target;
  for (const RegionMask& u : cover) uncovered = mask_minus(uncovered, u);
  if (!mask_empty(uncovered)) {
    throw std::invalid_argument(
        "inclusion_exclusion_decomposition: cover does not cover the target");
  }

  std::vector<SignedMaskTerm> terms;
  // Depth-first walk over subsets S of the cover in increasing-index order;
  // the carried mask is target intersected with all chosen elements, so an
  // empty mask prunes every superset above it.
  auto descend = [&](auto&& self, std::size_t next, const RegionMask& carried, int sign,
                     std::size_t container) -> void {
    for (std::size_t k = next; k < cover.size(); ++k) {
      const RegionMask refined = mask_and(carried, cover[k]);
      if (mask_empty(refined)) continue;
      const std::size_t keep = container == cover.size() ? k : container;
      terms.push_back(SignedMaskTerm{sign, refined, keep});
      self(self, k + 1, refined, -sign, keep);
    }
  };
  descend(descend, 0, target, 1, cover.size());
  return terms;
}

MixedScaleReduction presymbol_from_symbols(const RepParams& params, const OperatorMatrix& A,
                                           const ScaledElement& u1, const ScaledElement& u2,
                                           const WindowSpec& W) {
  const GridSpec& grid = params.grid;
  if (grid.group.kind != GroupKind::Euclidean) {
    throw std::invalid_argument(
        "presymbol_from_symbols: cell covers are implemented for Euclidean groups only");
  }
  if (!W.halfwidths) {
    throw std::invalid_argument("presymbol_from_symbols: needs a box window");
  }
  check_presymbol_scale(params, u1, "presymbol_from_symbols");
  check_presymbol_scale(params, u2, "presymbol_from_symbols");
  const GroupElement& hw = *W.halfwidths;
  const int m = grid.dim();

  // One cell scale for both sides: cells are window placements at t'' chosen
  // so the smallest cell half-width is the grid spacing (3-point cells in
  // each axis at the reference half-width), stepping twice the half-width so
  // neighbouring cells share exactly their boundary points.
  const double hw_max = *std::max_element(hw.begin(), hw.end());
  if (!(hw_max > 0.0)) throw std::invalid_argument("presymbol_from_symbols: degenerate window");
  const double t_cell = std::exp2(std::floor(std::log2(grid.h / hw_max) + 1e-9));
  const double r = W.r_cover.value_or(2.0);
  const double t_witness = t_cell * std::exp2(std::ceil(std::log2(r) - 1e-9));
  if (!(t_witness <= 1.0)) {
    throw std::invalid_argument("presymbol_from_symbols: witness scale exceeds 1");
  }

  struct Cell {
    GroupElement center;
    GroupElement lo, hi;
    RegionMask mask;
  };
  auto build_cover = [&](const RegionMask& F) {
    std::vector<Cell> cells;
    if (mask_empty(F)) return cells;
    GroupElement flo(static_cast<std::size_t>(m)), fhi(static_cast<std::size_t>(m));
    bool first = true;
    for (long i = 0; i < grid.size(); ++i) {
      if (!F.member[static_cast<std::size_t>(i)]) continue;
      const GroupElement x = grid.point(i);
      for (int a = 0; a < m; ++a) {
        const auto ia = static_cast<std::size_t>(a);
        flo[ia] = first ? x[ia] : std::min(flo[ia], x[ia]);
        fhi[ia] = first ? x[ia] : std::max(fhi[ia], x[ia]);
      }
      first = false;
    }
    // Cell centers walk a per-axis lattice of pitch 2 * t'' * hw_a covering
    // the bounding box of F.
    std::vector<std::vector<double>> axis_centers(static_cast<std::size_t>(m));
    for (int a = 0; a < m; ++a) {
      const auto ia = static_cast<std::size_t>(a);
      const double chw = t_cell * hw[ia];
      const double step = std::max(grid.h, 2.0 * chw);
      const long k0 = static_cast<long>(std::floor(flo[ia] / step));
      const long k1 = static_cast<long>(std::ceil(fhi[ia] / step));
      for (long k = k0; k <= k1; ++k) axis_centers[ia].push_back(step * static_cast<double>(k));
    }
    std::vector<std::size_t> pick(static_cast<std::size_t>(m), 0);
    for (;;) {
      Cell cell;
      cell.center.resize(static_cast<std::size_t>(m));
      cell.lo.resize(static_cast<std::size_t>(m));
      cell.hi.resize(static_cast<std::size_t>(m));
      for (int a = 0; a < m; ++a) {
        const auto ia = static_cast<std::size_t>(a);
        cell.center[ia] = axis_centers[ia][pick[ia]];
        cell.lo[ia] = cell.center[ia] - t_cell * hw[ia];
        cell.hi[ia] = cell.center[ia] + t_cell * hw[ia];
      }
      cell.mask = make_box_mask(grid, cell.lo, cell.hi);
      if (!mask_empty(mask_and(cell.mask, F))) cells.push_back(std::move(cell));
      int a = m - 1;
      for (; a >= 0; --a) {
        if (++pick[static_cast<std::size_t>(a)] < axis_centers[static_cast<std::size_t>(a)].size())
          break;
        pick[static_cast<std::size_t>(a)] = 0;
      }
      if (a < 0) break;
    }
    return cells;
  };

  const RegionMask F1 = transform_mask(u1, W.support).mask;
  const RegionMask F2 = transform_mask(u2, W.support).mask;
  const std::vector<long> widx = window_indices(W);
  MixedScaleReduction out;
  out.scale = t_witness;
  out.block = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(widx.size()),
                                    static_cast<Eigen::Index>(widx.size()));
  if (mask_empty(F1) || mask_empty(F2)) return out;

  const std::vector<Cell> cells1 = build_cover(F1);
  const std::vector<Cell> cells2 = build_cover(F2);
  std::vector<RegionMask> cover1, cover2;
  for (const Cell& c : cells1) cover1.push_back(c.mask);
  for (const Cell& c : cells2) cover2.push_back(c.mask);
  const std::vector<SignedMaskTerm> terms1 = inclusion_exclusion_decomposition(F1, cover1);
  const std::vector<SignedMaskTerm> terms2 = inclusion_exclusion_decomposition(F2, cover2);

  // Cache the reconstructed sandwich P_w A P_w per witness placement; its
  // entries are recovered from the same-scale symbol block at (t', g_m).
  std::map<long, Eigen::MatrixXd> witness_cache;
  auto witness_sandwich = [&](const GroupElement& g_m) -> const Eigen::MatrixXd& {
    const auto key = grid.locate(g_m);
    if (!key) throw std::invalid_argument("presymbol_from_symbols: witness center off the grid");
    auto it = witness_cache.find(*key);
    if (it == witness_cache.end()) {
      const ScaledElement s{t_witness, g_m};
      const Eigen::MatrixXd block = symbol(params, A, s, W);
      const OperatorMatrix sandwich =
          double_act(params, scaled_inverse(grid.group, s), scaled_inverse(grid.group, s),
                     embed_window_block(W, block));
      it = witness_cache.emplace(*key, sandwich.entries).first;
      ++out.symbol_queries;
    }
    return it->second;
  };

  auto mask_points = [&](const RegionMask& mask) {
    std::vector<long> pts;
    for (long i = 0; i < grid.size(); ++i) {
      if (mask.member[static_cast<std::size_t>(i)]) pts.push_back(i);
    }
    return pts;
  };

  Eigen::MatrixXd sigma = Eigen::MatrixXd::Zero(grid.size(), grid.size());
  for (const SignedMaskTerm& ta : terms1) {
    const Cell& ca = cells1[ta.container];
    const std::vector<long> rows = mask_points(ta.mask);
    for (const SignedMaskTerm& tb : terms2) {
      const Cell& cb = cells2[tb.container];
      if (mask_empty(mask_and(ca.mask, cb.mask))) {
        ++out.dropped_disjoint;
        continue;
      }
      // Witness placement at the snapped midpoint of the two cell centers;
      // its box must contain both cells for the exact substitution below.
      GroupElement g_m(static_cast<std::size_t>(m));
      bool contained = true;
      for (int a = 0; a < m; ++a) {
        const auto ia = static_cast<std::size_t>(a);
        g_m[ia] = grid.h * std::round(0.5 * (ca.center[ia] + cb.center[ia]) / grid.h);
        const double wlo = g_m[ia] - t_witness * hw[ia];
        const double whi = g_m[ia] + t_witness * hw[ia];
        if (std::min(ca.lo[ia], cb.lo[ia]) < wlo - 1e-12 ||
            std::max(ca.hi[ia], cb.hi[ia]) > whi + 1e-12) {
          contained = false;
        }
      }
      if (!contained) {
        throw std::invalid_argument(
            "presymbol_from_symbols: witness placement cannot contain an intersecting cell pair");
      }
      const Eigen::MatrixXd& sandwich = witness_sandwich(g_m);
      const double sign = static_cast<double>(ta.sign * tb.sign);
      for (const long i : rows) {
        for (long j = 0; j < grid.size(); ++j) {
          if (tb.mask.member[static_cast<std::size_t>(j)]) sigma(i, j) += sign * sandwich(i, j);
        }
      }
    }
  }

  const OperatorMatrix assembled = double_act(params, u1, u2, OperatorMatrix{grid, sigma});
  for (std::size_t i = 0; i < widx.size(); ++i) {
    for (std::size_t j = 0; j < widx.size(); ++j) {
      out.block(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          assembled.entries(widx[i], widx[j]);
    }
  }
  return out;
}

void save_symbol_field(const SymbolField& field, const std::string& dir) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  const GridSpec& grid = field.window.support.grid;

  nlohmann::json j;
  j["format"] = "localis-symbol-field";
  j["version"] = 1;
  j["group"] = nlohmann::json::parse(grid.group.to_json());
  j["grid"] = {{"h", grid.h}, {"extent", grid.extent}};
  j["p"] = field.p;
  nlohmann::json win;
  win["support"] = window_indices(field.window);
  if (field.window.halfwidths) win["halfwidths"] = *field.window.halfwidths;
  if (field.window.r_cover) win["r_cover"] = *field.window.r_cover;
  j["window"] = win;
  j["t_levels"] = field.t_levels;
  j["lattice"] = field.g_lattice;

  std::ofstream manifest(fs::path(dir) / "manifest.json");
  if (!manifest) throw std::runtime_error(dir + ": cannot write manifest.json");
  manifest << j.dump(2) << "\n";

  for (std::size_t level = 0; level < field.t_levels.size(); ++level) {
    for (std::size_t point = 0; point < field.g_lattice.size(); ++point) {
      const std::string name = "t" + std::to_string(level) + "_g" + std::to_string(point) + ".locm";
      write_locm((fs::path(dir) / name).string(), field.blocks[level][point]);
    }
  }
}

SymbolField load_symbol_field(const std::string& dir) {
  namespace fs = std::filesystem;
  std::ifstream manifest(fs::path(dir) / "manifest.json");
  if (!manifest) throw std::runtime_error(dir + ": cannot read manifest.json");
  nlohmann::json j = nlohmann::json::parse(manifest);
  if (j.value("format", "") != "localis-symbol-field") {
    throw std::runtime_error(dir + ": not a symbol-field directory");
  }

  const GroupDescriptor group = GroupDescriptor::from_json(j.at("group").dump());
  const GridSpec grid =
      make_grid(group, j.at("grid").at("h").get<double>(), j.at("grid").at("extent").get<double>());

  RegionMask support{grid, std::vector<std::uint8_t>(static_cast<std::size_t>(grid.size()), 0)};
  for (const auto& idx : j.at("window").at("support")) {
    support.member.at(idx.get<std::size_t>()) = 1;
  }
  WindowSpec window{support, std::nullopt, std::nullopt};
  if (j.at("window").contains("halfwidths")) {
    window.halfwidths = j.at("window").at("halfwidths").get<GroupElement>();
  }
  if (j.at("window").contains("r_cover")) {
    window.r_cover = j.at("window").at("r_cover").get<double>();
  }

  SymbolField field{window, j.at("p").get<double>(), j.at("t_levels").get<std::vector<double>>(),
                    j.at("lattice").get<std::vector<GroupElement>>(), {}};
  field.blocks.assign(field.t_levels.size(),
                      std::vector<Eigen::MatrixXd>(field.g_lattice.size()));
  for (std::size_t level = 0; level < field.t_levels.size(); ++level) {
    for (std::size_t point = 0; point < field.g_lattice.size(); ++point) {
      const std::string name = "t" + std::to_string(level) + "_g" + std::to_string(point) + ".locm";
      field.blocks[level][point] = read_locm((fs::path(dir) / name).string());
    }
  }
  return field;
}

}  // namespace localis
