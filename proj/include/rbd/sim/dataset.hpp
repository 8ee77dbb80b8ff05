#pragma once

#include "rbd/core/types.hpp"

#include <filesystem>
#include <vector>

namespace rbd::sim {

/// JSON Lines dataset, one frame per line:
///   {"t":..., "ego":{"x","y","yaw","speed","yaw_rate"},
///    "points":[[x,y,z,doppler,snr,range],...], "labels":[0|1,...]}
/// A ".jsonl.gz" suffix selects the gzip-compressed variant. Writes are
/// atomic (temp file + rename).
void write_dataset(const std::vector<RadarFrame>& frames, const std::filesystem::path& path);

/// Inverse of write_dataset; a malformed line raises an error naming it.
std::vector<RadarFrame> read_dataset(const std::filesystem::path& path);

/// Split a concatenated dataset into sequences: a new sequence starts
/// wherever the timestamp fails to strictly increase.
std::vector<std::vector<RadarFrame>> split_sequences(std::vector<RadarFrame> frames);

}  // namespace rbd::sim
