// SPDX-License-Identifier: Apache-2.0
// Copyright Contributors to the rgbw-remosaic project.

#pragma once

#include <algorithm>
#include <exception>
#include <thread>
#include <vector>

namespace rgbw {

/// Number of workers to use when the caller passes 0.
int default_threads();

/// Splits [0, count) into contiguous bands and runs fn(begin, end) on up to
/// `threads` workers. Bands write disjoint outputs, so results do not depend
/// on the worker count. The first exception thrown by a band is rethrown.
template <typename Fn>
void parallel_for(int count, int threads, Fn&& fn) {
  if (count <= 0) return;
  if (threads <= 0) threads = default_threads();
  threads = std::min(threads, count);
  if (threads == 1) {
    fn(0, count);
    return;
  }
  std::vector<std::thread> workers;
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(threads));
  workers.reserve(static_cast<std::size_t>(threads));
  for (int t = 0; t < threads; ++t) {
    const int begin = static_cast<int>(static_cast<long long>(count) * t / threads);
    const int end = static_cast<int>(static_cast<long long>(count) * (t + 1) / threads);
    workers.emplace_back([&, t, begin, end] {
      try {
        fn(begin, end);
      } catch (...) {
        errors[static_cast<std::size_t>(t)] = std::current_exception();
      }
    });
  }
  for (auto& w : workers) w.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

}  // namespace rgbw
