#pragma once

#include <cstdint>
#include <string>

#include "trajlab/control/controller.hpp"
#include "trajlab/grid/policy.hpp"
#include "trajlab/hier/model.hpp"
#include "trajlab/hier/train.hpp"
#include "trajlab/metrics/epr_pac.hpp"

namespace trajlab::io {

/// Every tunable in one place, with built-in defaults. Precedence:
/// defaults < config file (TRAJLAB_CONFIG or --config) < command-line flags.
struct RunConfig {
  std::uint64_t seed = 7;
  int threads = 1;

  hier::HierConfig hier;  // vocab filled from the domain at load time
  hier::TrainOptions train;
  ctrl::ControllerConfig controller;
  grid::NoiseSpec noise;
  grid::LabelMode label_mode = grid::LabelMode::deviation;

  metrics::EprOptions epr;
  metrics::PacOptions pac;
};

RunConfig default_config();

/// Overlay values from a JSON config file; unknown keys raise DataError.
void apply_config_file(RunConfig& cfg, const std::string& path);

/// Resolve the file layer: explicit path if nonempty, else $TRAJLAB_CONFIG.
void load_config_layer(RunConfig& cfg, const std::string& explicit_path);

}  // namespace trajlab::io
