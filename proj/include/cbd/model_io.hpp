#pragma once

#include <string>

#include "cbd/pipeline.hpp"

namespace cbd {

// Binary model artifact, format version 1 (see docs/model_format.md):
//   magic "CBDM" | u32 version | u64 header length | JSON header |
//   u32 tensor count | tensors (u16 name length, name, u8 rank,
//   u64 dims[rank], f64 data, little-endian throughout).
// The JSON header carries the model/feature kinds, preprocessing settings
// (stopword list included) and the vocabulary in index order.
void save_model(const TrainedModel& model, const std::string& path);

TrainedModel load_model(const std::string& path);

}  // namespace cbd
