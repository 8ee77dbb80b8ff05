#pragma once

#include "rbd/seg/network.hpp"

#include <filesystem>

namespace rbd::seg {

/// Versioned binary checkpoint: architecture header + named parameter
/// tensors with shapes, raw little-endian doubles. load(save(m)) == m
/// bitwise on the numeric payload. Writes are atomic.
void save_model(SegModel& model, const std::filesystem::path& path);
SegModel load_model(const std::filesystem::path& path);

}  // namespace rbd::seg
