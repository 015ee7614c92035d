// Copyright 2025 The ginlab Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>

namespace ginlab {

[[nodiscard]] constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

/// Streams a sample draws from.
enum class Stream : std::uint64_t { noise = 1, deformation = 2 };

/// Seed of stream `s` for sample `index` under `master`.  Depends only on the
/// triple, so samples can be evaluated in any order or on any worker.
[[nodiscard]] constexpr std::uint64_t stream_seed(std::uint64_t master, std::uint64_t index,
                                                  Stream s = Stream::noise) noexcept {
  return splitmix64(splitmix64(splitmix64(master) ^ index) + static_cast<std::uint64_t>(s));
}

}  // namespace ginlab
