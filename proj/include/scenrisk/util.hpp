#ifndef SCENRISK_UTIL_HPP
#define SCENRISK_UTIL_HPP

#include <cstddef>
#include <cstdio>
#include <functional>
#include <string>
#include <thread>
#include <vector>

namespace scenrisk {

inline constexpr const char* kToolkitVersion = "0.1.0";

// Round to `digits` significant digits, shortest form ("%.3g" style).
inline std::string format_significant(double x, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*g", digits, x);
  return buf;
}

// Runs fn(i) for i in [0, n). Results must go into per-index slots so the
// outcome is independent of the thread count.
inline void parallel_for(std::size_t n, int threads,
                         const std::function<void(std::size_t)>& fn) {
  if (threads <= 1 || n < 2) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  const std::size_t nt = std::min<std::size_t>(static_cast<std::size_t>(threads), n);
  std::vector<std::thread> pool;
  pool.reserve(nt);
  for (std::size_t t = 0; t < nt; ++t) {
    pool.emplace_back([&, t]() {
      // Contiguous blocks; remainder spread over the first blocks.
      const std::size_t base = n / nt, rem = n % nt;
      const std::size_t begin = t * base + std::min(t, rem);
      const std::size_t len = base + (t < rem ? 1 : 0);
      for (std::size_t i = begin; i < begin + len; ++i) fn(i);
    });
  }
  for (auto& th : pool) th.join();
}

// FNV-1a, used to digest configuration bytes into report headers.
inline std::uint64_t fnv1a64(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

}  // namespace scenrisk

#endif  // SCENRISK_UTIL_HPP
