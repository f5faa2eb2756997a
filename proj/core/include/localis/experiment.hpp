#pragma once

#include "localis/group.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace localis {

/// Named operator constructions available to configs.
struct OperatorSpec {
  std::string kind;    // sin-multiplier | identity | hilbert | constant-multiplier
  double value = 0.0;  // constant-multiplier only
};

/// Parsed experiment description.  Which fields are meaningful depends on
/// `kind`; parse_config() enforces the per-kind required keys and leaves the
/// rest defaulted.
struct ExperimentConfig {
  std::string kind;  // symbol-field | local-equiv | envelope | invariance | verify
  std::string output;
  std::uint64_t seed = 0;

  GroupDescriptor group;
  double grid_h = 1.0;
  double grid_extent = 1.0;
  double p = 2.0;
  GroupElement window_halfwidths;
  std::optional<double> window_r_cover;

  OperatorSpec op_a;
  OperatorSpec op_b;

  std::vector<double> t_levels;                 // symbol-field, local-equiv
  GroupElement lattice_lo, lattice_hi;          // symbol-field base points
  double lattice_step = 0.0;

  GroupElement base_point;                      // local-equiv
  double tolerance = 0.0;                       // 0 -> default 10 * t_min
  int proxy_rank = 0;
  bool expect = true;                           // expected local-equiv verdict

  GroupElement box_lo, box_hi;                  // envelope
  std::vector<int> depths;
  std::optional<double> max_final_norm;         // envelope verdict bound

  std::vector<double> t_samples;                // invariance
  std::vector<GroupElement> g_samples;
  std::optional<double> max_homog, max_shift;   // invariance verdict bounds

  std::string suite;                            // verify

  std::string raw;                              // original JSON text, echoed into manifests
};

/// Reads and validates a JSON config; missing required keys raise
/// invalid_argument naming the key.
ExperimentConfig parse_config(const std::string& path);

/// Executes the experiment, writing manifest.json, results, and plot data
/// into the output directory.  Returns 0 on success and 2 on verdict failure
/// (an expectation stated in the config did not hold); hard failures throw.
int run_experiment(const ExperimentConfig& cfg);

/// Converts a saved field directory (symbol field or operator field) to CSV:
/// one t<i>_g<j>.csv per block plus an index.csv locating each block.
void export_field_csv(const std::string& dir);

}  // namespace localis
