#pragma once

#include <algorithm>
#include <cstdlib>
#include <functional>
#include <optional>
#include <string>
#include <thread>
#include <vector>

namespace unimodal {

inline constexpr double kBisectTol = 1e-12;
inline constexpr int kBisectMaxIter = 200;

/// Bisection for a sign change of `g` on [lo, hi]. Returns nullopt when the
/// endpoint values do not bracket a root.
template <class F>
std::optional<double> bisect(F&& g, double lo, double hi, double tol = kBisectTol,
                             int max_iter = kBisectMaxIter) {
  double glo = g(lo);
  double ghi = g(hi);
  if (glo == 0.0) return lo;
  if (ghi == 0.0) return hi;
  if ((glo > 0) == (ghi > 0)) return std::nullopt;
  for (int it = 0; it < max_iter && hi - lo > tol; ++it) {
    double mid = 0.5 * (lo + hi);
    double gm = g(mid);
    if (gm == 0.0) return mid;
    if ((gm > 0) == (glo > 0)) {
      lo = mid;
      glo = gm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

/// Worker count: hardware concurrency, capped by UNIMODAL_THREADS when set.
inline unsigned thread_count() {
  unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("UNIMODAL_THREADS")) {
    try {
      long cap = std::stol(env);
      if (cap >= 1) hw = std::min<unsigned>(hw, static_cast<unsigned>(cap));
    } catch (...) {
    }
  }
  return hw;
}

/// Runs body(begin, end) over contiguous chunks of [0, n). Chunks never share
/// output indices, so callers write into preallocated slots without locking.
template <class Body>
void parallel_for(std::size_t n, Body&& body) {
  unsigned workers = std::min<std::size_t>(thread_count(), std::max<std::size_t>(n, 1));
  if (workers <= 1 || n < 2) {
    body(std::size_t{0}, n);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(workers);
  std::size_t chunk = (n + workers - 1) / workers;
  for (unsigned w = 0; w < workers; ++w) {
    std::size_t b = w * chunk;
    std::size_t e = std::min(n, b + chunk);
    if (b >= e) break;
    pool.emplace_back([&body, b, e] { body(b, e); });
  }
  for (auto& t : pool) t.join();
}

}  // namespace unimodal
