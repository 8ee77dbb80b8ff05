#pragma once

#include <cstdint>
#include <random>

namespace rbd {

/// Named RNG substreams: all randomness in the pipeline flows from a single
/// root seed so component-level reruns are reproducible in isolation.
enum class Stream : std::uint32_t {
  sim = 1,
  train_init = 2,
  train_shuffle = 3,
  train_subsample = 4,
  fit_subsample = 5,
};

inline std::mt19937_64 substream(std::uint64_t root_seed, Stream stream, std::uint64_t index = 0) {
  std::seed_seq seq{static_cast<std::uint32_t>(root_seed), static_cast<std::uint32_t>(root_seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(index),
                    static_cast<std::uint32_t>(index >> 32)};
  return std::mt19937_64(seq);
}

/// Deterministic partial Fisher-Yates: first k of a random permutation of 0..n-1.
/// Hand-rolled (std::sample's selection is implementation-defined).
template <class Rng>
std::vector<int> sample_indices(int n, int k, Rng& rng) {
  std::vector<int> idx(n);
  for (int i = 0; i < n; ++i) idx[i] = i;
  k = std::min(k, n);
  for (int i = 0; i < k; ++i) {
    std::uniform_int_distribution<int> pick(i, n - 1);
    std::swap(idx[i], idx[pick(rng)]);
  }
  idx.resize(k);
  return idx;
}

}  // namespace rbd
