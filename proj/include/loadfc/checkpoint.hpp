// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <memory>
#include <string>
#include <string_view>

#include "loadfc/features.hpp"
#include "loadfc/models.hpp"
#include "loadfc/pipeline.hpp"

namespace loadfc {

// Text checkpoint. A key=value header (model config, scaler, autocorrelation
// scalars, training step, which FC values were written) ends at a line
// holding "---". Each parameter follows as two lines:
//
//   param name=fc.weight shape=64x1 initializer=zero seed=3
//   0,0.125,-1.5e-05,...
//
// Values use the shortest decimal form that round-trips, so a save/load
// cycle is exact.

struct CheckpointMeta {
  Scaler scaler;
  AutocorrPair autocorr;
  std::size_t step = 0;
};

/// With `use_averages`, FC parameters that have an ASGD average are written
/// with the average (the values used for prediction).
std::string write_checkpoint(Model& model, const CheckpointMeta& meta,
                             bool use_averages);

struct LoadedCheckpoint {
  std::unique_ptr<Model> model;
  CheckpointMeta meta;
};

/// Throws SchemaMismatch on a malformed file, an unknown or missing
/// parameter, or a shape that disagrees with the stored config.
LoadedCheckpoint read_checkpoint(std::string_view text);

}  // namespace loadfc
