#include "dimkit/combinatorics.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <thread>

namespace dimkit {

bool for_each_k_subset(std::size_t n, std::size_t k,
                       const std::function<bool(std::span<const std::size_t>)>& visit) {
  if (k > n) return true;
  std::vector<std::size_t> idx(k);
  for (std::size_t i = 0; i < k; ++i) idx[i] = i;
  while (true) {
    if (!visit(idx)) return false;
    std::size_t i = k;
    while (i > 0 && idx[i - 1] == n - k + (i - 1)) --i;
    if (i == 0) return true;
    ++idx[i - 1];
    for (std::size_t j = i; j < k; ++j) idx[j] = idx[j - 1] + 1;
  }
}

std::vector<std::vector<std::size_t>> k_subsets(std::size_t n, std::size_t k) {
  std::vector<std::vector<std::size_t>> out;
  for_each_k_subset(n, k, [&](std::span<const std::size_t> s) {
    out.emplace_back(s.begin(), s.end());
    return true;
  });
  return out;
}

bool for_each_tuple(std::span<const std::size_t> radices,
                    const std::function<bool(std::span<const std::size_t>)>& visit) {
  for (std::size_t r : radices)
    if (r == 0) return true;
  std::vector<std::size_t> t(radices.size(), 0);
  while (true) {
    if (!visit(t)) return false;
    std::size_t i = t.size();
    while (i > 0) {
      --i;
      if (++t[i] < radices[i]) break;
      t[i] = 0;
      if (i == 0) return true;
    }
    if (t.empty()) return true;
  }
}

namespace {

template <class Fn>
void run_workers(unsigned threads, Fn&& fn) {
  std::vector<std::thread> pool;
  std::exception_ptr failure;
  std::mutex failure_mutex;
  for (unsigned t = 0; t < threads; ++t) {
    pool.emplace_back([&] {
      try {
        fn();
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);
}

}  // namespace

std::optional<std::size_t> parallel_find_first(std::size_t n, unsigned threads,
                                               const std::function<bool(std::size_t)>& pred) {
  if (threads <= 1 || n < 2) {
    for (std::size_t i = 0; i < n; ++i)
      if (pred(i)) return i;
    return std::nullopt;
  }
  std::atomic<std::size_t> next{0};
  std::atomic<std::size_t> best{n};
  // An exception only counts if it precedes the first success, as in a sequential scan.
  std::mutex failure_mutex;
  std::size_t failure_index = n;
  std::exception_ptr failure;
  run_workers(static_cast<unsigned>(std::min<std::size_t>(threads, n)), [&] {
    while (true) {
      const std::size_t i = next.fetch_add(1);
      if (i >= n || i >= best.load()) return;
      bool hit = false;
      try {
        hit = pred(i);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (i < failure_index) {
          failure_index = i;
          failure = std::current_exception();
        }
        hit = true;
      }
      if (hit) {
        std::size_t cur = best.load();
        while (i < cur && !best.compare_exchange_weak(cur, i)) {
        }
      }
    }
  });
  if (failure && failure_index == best.load()) std::rethrow_exception(failure);
  if (best.load() == n) return std::nullopt;
  return best.load();
}

void parallel_for(std::size_t n, unsigned threads, const std::function<void(std::size_t)>& body) {
  if (threads <= 1 || n < 2) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  run_workers(static_cast<unsigned>(std::min<std::size_t>(threads, n)), [&] {
    for (std::size_t i = next.fetch_add(1); i < n; i = next.fetch_add(1)) body(i);
  });
}

}  // namespace dimkit
