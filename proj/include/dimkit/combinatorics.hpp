#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <vector>

namespace dimkit {

/// Internal search parallelism. Results never depend on `threads`.
struct SearchOptions {
  unsigned threads = 1;
};

/// All k-subsets of {0, ..., n-1} as ascending index vectors, in lexicographic order.
std::vector<std::vector<std::size_t>> k_subsets(std::size_t n, std::size_t k);

/// Calls `visit` on every k-subset in lexicographic order until it returns false.
/// Returns false iff stopped early.
bool for_each_k_subset(std::size_t n, std::size_t k,
                       const std::function<bool(std::span<const std::size_t>)>& visit);

/// Mixed-radix odometer: every tuple t with t[i] < radices[i], last coordinate
/// fastest (lexicographic order). Stops when `visit` returns false.
bool for_each_tuple(std::span<const std::size_t> radices,
                    const std::function<bool(std::span<const std::size_t>)>& visit);

/// Smallest i < n with pred(i), evaluated across `threads` workers.
/// Equivalent to a sequential scan for any schedule.
std::optional<std::size_t> parallel_find_first(std::size_t n, unsigned threads,
                                               const std::function<bool(std::size_t)>& pred);

/// Runs body(i) for all i < n across `threads` workers.
void parallel_for(std::size_t n, unsigned threads, const std::function<void(std::size_t)>& body);

}  // namespace dimkit
