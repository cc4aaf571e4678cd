#pragma once

#include <cstdint>
#include <random>

namespace peerreview {

using Rng = std::mt19937_64;

/// SplitMix64 finalizer.
std::uint64_t mix64(std::uint64_t x) noexcept;

/// Independent stream seed for `stream` under `master`. Used to give each
/// Monte Carlo trial, chunk or bootstrap resample its own generator so that
/// results do not depend on scheduling.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) noexcept;

inline Rng make_rng(std::uint64_t master, std::uint64_t stream) { return Rng(derive_seed(master, stream)); }

/// Laplace(0, scale) by inverse CDF. scale == 0 returns 0.
double sample_laplace(Rng& rng, double scale);

}  // namespace peerreview
