#include "peerreview/random.hpp"

#include <cmath>

#include "peerreview/parallel.hpp"

namespace peerreview {

std::uint64_t mix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) noexcept {
  return mix64(mix64(master) ^ (stream * 0xD1B54A32D192ED03ULL + 0x8CB92BA72F3D8DD7ULL));
}

double sample_laplace(Rng& rng, double scale) {
  if (scale == 0.0) return 0.0;
  // u in (-1/2, 1/2), excluding the endpoints so log() stays finite.
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  double u;
  do {
    u = unif(rng);
  } while (u == 0.0);
  u -= 0.5;
  return -scale * std::copysign(1.0, u) * std::log1p(-2.0 * std::abs(u));
}

namespace {
unsigned g_max_threads = 0;
}

unsigned max_threads() {
  if (g_max_threads) return g_max_threads;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw ? hw : 1;
}

void set_max_threads(unsigned n) { g_max_threads = n; }

}  // namespace peerreview
