#include "localis/experiment.hpp"

#include "localis/errors.hpp"
#include "localis/io.hpp"
#include "localis/localization.hpp"
#include "localis/operators.hpp"
#include "localis/synthesis.hpp"
#include "localis/verify.hpp"
#include "localis/version.hpp"

#include <nlohmann/json.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <stdexcept>

namespace fs = std::filesystem;
using nlohmann::json;

namespace localis {
namespace {

const json& require(const json& j, const char* key) {
  if (!j.contains(key))
    throw std::invalid_argument(std::string("config missing required key \"") + key + "\"");
  return j.at(key);
}

GroupElement read_element(const json& j, int dim, const char* what) {
  if (!j.is_array() || static_cast<int>(j.size()) != dim)
    throw std::invalid_argument(std::string(what) + ": expected an array of " +
                                std::to_string(dim) + " coordinates");
  GroupElement g;
  for (const auto& v : j) g.push_back(v.get<double>());
  return g;
}

OperatorSpec read_operator(const json& j, const char* what) {
  OperatorSpec spec;
  if (!j.is_object())
    throw std::invalid_argument(std::string(what) + ": expected an object with a \"kind\"");
  spec.kind = require(j, "kind").get<std::string>();
  spec.value = j.value("value", 0.0);
  return spec;
}

OperatorMatrix build_operator(const OperatorSpec& spec, const GridSpec& grid) {
  if (spec.kind == "sin-multiplier")
    return multiplication_operator(
        sample_function(grid, [](const GroupElement& x) { return std::sin(x[0]); }));
  if (spec.kind == "identity") return identity_operator(grid);
  if (spec.kind == "hilbert") return hilbert_transform(grid);
  if (spec.kind == "constant-multiplier") {
    OperatorMatrix eye = identity_operator(grid);
    eye.entries *= spec.value;
    return eye;
  }
  throw std::invalid_argument("unknown operator kind \"" + spec.kind +
                              "\" (expected sin-multiplier|identity|hilbert|constant-multiplier)");
}

RepParams make_params(const ExperimentConfig& cfg) {
  RepParams params;
  params.grid = make_grid(cfg.group, cfg.grid_h, cfg.grid_extent);
  params.p = cfg.p;
  return params;
}

WindowSpec make_window(const ExperimentConfig& cfg, const GridSpec& grid) {
  return make_box_window(grid, cfg.window_halfwidths, cfg.window_r_cover);
}

/// Axis-product base points lo + step * index, axis 0 slowest (grid order).
std::vector<GroupElement> lattice_points(const ExperimentConfig& cfg) {
  const int dim = cfg.group.dim();
  std::vector<long> counts(static_cast<std::size_t>(dim));
  for (int a = 0; a < dim; ++a) {
    const double span = cfg.lattice_hi[static_cast<std::size_t>(a)] -
                        cfg.lattice_lo[static_cast<std::size_t>(a)];
    if (span < 0 || cfg.lattice_step <= 0)
      throw std::invalid_argument("lattice: step must be positive and hi >= lo");
    counts[static_cast<std::size_t>(a)] = static_cast<long>(span / cfg.lattice_step + 1e-9) + 1;
  }
  std::vector<GroupElement> points;
  std::vector<long> idx(static_cast<std::size_t>(dim), 0);
  while (true) {
    GroupElement g(static_cast<std::size_t>(dim));
    for (int a = 0; a < dim; ++a)
      g[static_cast<std::size_t>(a)] = cfg.lattice_lo[static_cast<std::size_t>(a)] +
                                       cfg.lattice_step * static_cast<double>(idx[static_cast<std::size_t>(a)]);
    points.push_back(std::move(g));
    int a = dim - 1;
    while (a >= 0 && ++idx[static_cast<std::size_t>(a)] == counts[static_cast<std::size_t>(a)]) {
      idx[static_cast<std::size_t>(a)] = 0;
      --a;
    }
    if (a < 0) break;
  }
  return points;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error(path.string() + ": cannot open for writing");
  out << text;
  if (text.empty() || text.back() != '\n') out << "\n";
}

void write_manifest(const ExperimentConfig& cfg) {
  json m;
  m["config"] = json::parse(cfg.raw);
  m["kind"] = cfg.kind;
  m["seed"] = cfg.seed;
  m["versions"] = {{"localis", kVersion},
                   {"function_format", kFunctionFormatVersion},
                   {"matrix_format", kMatrixFormatVersion}};
  write_text(fs::path(cfg.output) / "manifest.json", m.dump(2));
}

/// Position of the identity point inside the window support ordering.
long window_center_slot(const WindowSpec& W) {
  const auto center = W.support.grid.locate(identity(W.support.grid.group));
  if (!center) throw std::invalid_argument("window does not contain the identity point");
  const std::vector<long> support = window_indices(W);
  for (std::size_t i = 0; i < support.size(); ++i)
    if (support[i] == *center) return static_cast<long>(i);
  throw std::invalid_argument("window does not contain the identity point");
}

int run_symbol_field(const ExperimentConfig& cfg) {
  const RepParams params = make_params(cfg);
  const WindowSpec W = make_window(cfg, params.grid);
  const OperatorMatrix A = build_operator(cfg.op_a, params.grid);
  const std::vector<GroupElement> lattice = lattice_points(cfg);

  const SymbolField field = symbol_field(params, A, W, cfg.t_levels, lattice);
  save_symbol_field(field, (fs::path(cfg.output) / "field").string());

  // Plot data: per level, the worst-case proxy distance of a block from the
  // scalar pinned at its central diagonal entry (the localization decay
  // curve for multiplication-class operators).  The scalar is carried by the
  // symbol of the identity rather than I_w so that window slots whose image
  // left the lattice are zero on both sides.
  const long center = window_center_slot(W);
  const OperatorMatrix eye = identity_operator(params.grid);
  std::vector<double> decay;
  for (std::size_t i = 0; i < field.t_levels.size(); ++i) {
    double worst = 0.0;
    for (std::size_t k = 0; k < field.blocks[i].size(); ++k) {
      const Eigen::MatrixXd& block = field.blocks[i][k];
      const Eigen::MatrixXd mask =
          symbol(params, eye, {field.t_levels[i], field.g_lattice[k]}, W);
      const Eigen::MatrixXd centered = block - block(center, center) * mask;
      worst = std::max(worst, enorm_proxy(centered, cfg.proxy_rank));
    }
    decay.push_back(worst);
  }
  const long w = static_cast<long>(window_indices(W).size());

  std::string csv = "t,proxy\n";
  for (std::size_t i = 0; i < decay.size(); ++i)
    csv += format_double(field.t_levels[i]) + "," + format_double(decay[i]) + "\n";
  write_text(fs::path(cfg.output) / "decay.csv", csv);

  json results{{"kind", cfg.kind},
               {"levels", field.t_levels},
               {"lattice_points", field.g_lattice.size()},
               {"window_size", w},
               {"max_center_distance", decay}};
  write_text(fs::path(cfg.output) / "results.json", results.dump(2));
  return 0;
}

int run_local_equiv(const ExperimentConfig& cfg) {
  const RepParams params = make_params(cfg);
  const WindowSpec W = make_window(cfg, params.grid);
  const OperatorMatrix A = build_operator(cfg.op_a, params.grid);
  const OperatorMatrix B = build_operator(cfg.op_b, params.grid);

  double tol = cfg.tolerance;
  if (tol <= 0) {
    double t_min = cfg.t_levels.front();
    for (double t : cfg.t_levels) t_min = std::min(t_min, t);
    tol = 10.0 * t_min;
  }
  const EquivalenceReport report =
      local_equiv(params, A, B, cfg.base_point, W, cfg.t_levels, cfg.proxy_rank, tol);

  write_text(fs::path(cfg.output) / "results.json", equivalence_report_json(report));
  std::string csv = "t,decay\n";
  for (std::size_t i = 0; i < report.t_levels.size(); ++i)
    csv += format_double(report.t_levels[i]) + "," + format_double(report.decay[i]) + "\n";
  write_text(fs::path(cfg.output) / "decay.csv", csv);

  return report.verdict == cfg.expect ? 0 : 2;
}

int run_envelope(const ExperimentConfig& cfg) {
  const RepParams params = make_params(cfg);
  const GridSpec& grid = params.grid;
  const OperatorMatrix target = build_operator(cfg.op_a, grid);

  // Local rule: freeze the target's diagonal value at the anchor.
  const auto rule = [&](const GroupElement& anchor) {
    const auto idx = grid.locate(anchor);
    if (!idx) throw std::invalid_argument("envelope anchor left the lattice");
    OperatorMatrix local = identity_operator(grid);
    local.entries *= target.entries(*idx, *idx);
    return local;
  };
  const std::vector<RefineRow> rows =
      envelope_refine(target, rule, cfg.box_lo, cfg.box_hi, cfg.depths, cfg.proxy_rank);

  write_refine_csv((fs::path(cfg.output) / "refine.csv").string(), rows);
  json jrows = json::array();
  for (const RefineRow& r : rows)
    jrows.push_back({{"depth", r.depth}, {"norm", r.norm}, {"proxy", r.proxy}});
  json results{{"kind", cfg.kind}, {"rows", jrows}};
  write_text(fs::path(cfg.output) / "results.json", results.dump(2));

  if (cfg.max_final_norm && rows.back().norm > *cfg.max_final_norm) return 2;
  return 0;
}

int run_invariance(const ExperimentConfig& cfg) {
  const RepParams params = make_params(cfg);
  const WindowSpec W = make_window(cfg, params.grid);
  const OperatorMatrix A = build_operator(cfg.op_a, params.grid);
  const InvarianceScores scores = invariance_scores(params, A, W, cfg.t_samples, cfg.g_samples);

  json results{{"kind", cfg.kind}, {"homog", scores.homog}, {"shift", scores.shift}};
  write_text(fs::path(cfg.output) / "results.json", results.dump(2));
  write_text(fs::path(cfg.output) / "scores.csv",
             "name,value\nhomog," + format_double(scores.homog) + "\nshift," +
                 format_double(scores.shift) + "\n");

  const bool homog_ok = !cfg.max_homog || scores.homog <= *cfg.max_homog;
  const bool shift_ok = !cfg.max_shift || scores.shift <= *cfg.max_shift;
  return homog_ok && shift_ok ? 0 : 2;
}

int run_verify(const ExperimentConfig& cfg) {
  const std::vector<PropertyResult> results = run_suite(cfg.suite);
  write_text(fs::path(cfg.output) / "report.json", verify_report_json(results));
  for (const PropertyResult& r : results)
    if (!r.passed) return 2;
  return 0;
}

}  // namespace

ExperimentConfig parse_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument(path + ": cannot open config");
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  const json j = json::parse(text);

  ExperimentConfig cfg;
  cfg.raw = text;
  cfg.kind = require(j, "kind").get<std::string>();
  cfg.output = require(j, "output").get<std::string>();
  cfg.seed = j.value("seed", std::uint64_t{0});

  if (cfg.kind == "verify") {
    cfg.suite = require(j, "suite").get<std::string>();
    return cfg;
  }

  cfg.group = GroupDescriptor::from_json(require(j, "group").dump());
  const json& grid = require(j, "grid");
  cfg.grid_h = require(grid, "h").get<double>();
  cfg.grid_extent = require(grid, "extent").get<double>();
  cfg.p = j.value("p", 2.0);

  const json& window = require(j, "window");
  cfg.window_halfwidths = read_element(require(window, "halfwidths"), cfg.group.dim(), "window.halfwidths");
  if (window.contains("r_cover")) cfg.window_r_cover = window.at("r_cover").get<double>();

  cfg.op_a = read_operator(require(j, "operator"), "operator");
  cfg.proxy_rank = j.value("proxy_rank", 0);

  if (cfg.kind == "symbol-field") {
    cfg.t_levels = require(j, "t_levels").get<std::vector<double>>();
    const json& lattice = require(j, "lattice");
    cfg.lattice_lo = read_element(require(lattice, "lo"), cfg.group.dim(), "lattice.lo");
    cfg.lattice_hi = read_element(require(lattice, "hi"), cfg.group.dim(), "lattice.hi");
    cfg.lattice_step = require(lattice, "step").get<double>();
  } else if (cfg.kind == "local-equiv") {
    cfg.op_b = read_operator(require(j, "operator_b"), "operator_b");
    cfg.base_point = read_element(require(j, "base_point"), cfg.group.dim(), "base_point");
    cfg.t_levels = require(j, "t_levels").get<std::vector<double>>();
    cfg.tolerance = j.value("tolerance", 0.0);
    cfg.expect = j.value("expect", true);
  } else if (cfg.kind == "envelope") {
    const json& box = require(j, "box");
    cfg.box_lo = read_element(require(box, "lo"), cfg.group.dim(), "box.lo");
    cfg.box_hi = read_element(require(box, "hi"), cfg.group.dim(), "box.hi");
    cfg.depths = require(j, "depths").get<std::vector<int>>();
    if (j.contains("max_final_norm")) cfg.max_final_norm = j.at("max_final_norm").get<double>();
  } else if (cfg.kind == "invariance") {
    cfg.t_samples = require(j, "t_samples").get<std::vector<double>>();
    for (const auto& g : require(j, "g_samples"))
      cfg.g_samples.push_back(read_element(g, cfg.group.dim(), "g_samples"));
    if (j.contains("max_homog")) cfg.max_homog = j.at("max_homog").get<double>();
    if (j.contains("max_shift")) cfg.max_shift = j.at("max_shift").get<double>();
  } else {
    throw std::invalid_argument(
        "unknown experiment kind \"" + cfg.kind +
        "\" (expected symbol-field|local-equiv|envelope|invariance|verify)");
  }
  return cfg;
}

int run_experiment(const ExperimentConfig& cfg) {
  fs::create_directories(cfg.output);
  write_manifest(cfg);
  if (cfg.kind == "symbol-field") return run_symbol_field(cfg);
  if (cfg.kind == "local-equiv") return run_local_equiv(cfg);
  if (cfg.kind == "envelope") return run_envelope(cfg);
  if (cfg.kind == "invariance") return run_invariance(cfg);
  if (cfg.kind == "verify") return run_verify(cfg);
  throw std::invalid_argument("unknown experiment kind \"" + cfg.kind + "\"");
}

void export_field_csv(const std::string& dir) {
  std::ifstream manifest(fs::path(dir) / "manifest.json");
  if (!manifest) throw std::runtime_error(dir + ": cannot read manifest.json");
  const json j = json::parse(manifest);
  const std::string format = j.value("format", "");

  const auto block_name = [](std::size_t level, std::size_t point) {
    return "t" + std::to_string(level) + "_g" + std::to_string(point);
  };
  std::string index = "level,t,point,file\n";

  if (format == "localis-symbol-field") {
    const SymbolField field = load_symbol_field(dir);
    for (std::size_t i = 0; i < field.t_levels.size(); ++i)
      for (std::size_t k = 0; k < field.g_lattice.size(); ++k) {
        const std::string name = block_name(i, k) + ".csv";
        write_matrix_csv((fs::path(dir) / name).string(), field.blocks[i][k]);
        index += std::to_string(i) + "," + format_double(field.t_levels[i]) + "," +
                 std::to_string(k) + "," + name + "\n";
      }
  } else if (format == "localis-operator-field") {
    const OperatorField field = load_operator_field(dir);
    for (std::size_t i = 0; i < field.t_levels.size(); ++i)
      for (std::size_t k = 0; k < field.g_lattice.size(); ++k) {
        const std::string name = block_name(i, k) + ".csv";
        write_matrix_csv((fs::path(dir) / name).string(), field.ops[i][k].entries);
        index += std::to_string(i) + "," + format_double(field.t_levels[i]) + "," +
                 std::to_string(k) + "," + name + "\n";
      }
  } else {
    throw std::runtime_error(dir + ": manifest.json does not describe a saved field");
  }
  write_text(fs::path(dir) / "index.csv", index);
}

}  // namespace localis
