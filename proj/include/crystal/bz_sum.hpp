#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <span>
#include <vector>

#include "crystal/summation.hpp"

namespace crystal {

inline constexpr std::size_t kDefaultBlock = 64;

/// Σ_idx per_k(idx) for vector-valued per_k, evaluated in parallel over
/// fixed-size k-blocks. Each block is summed in index order and the block
/// partials are folded in block order, so the result does not depend on the
/// number of threads. per_k(idx, out) must write nvals values into out.
/// An exception from any k is rethrown (the one from the lowest block wins).
template <class PerK>
std::vector<double> bz_block_sum(std::size_t npts, std::size_t nvals, PerK&& per_k,
                                 std::size_t block = kDefaultBlock) {
  block = std::max<std::size_t>(block, 1);
  const std::size_t nblocks = (npts + block - 1) / block;
  std::vector<std::vector<CompensatedSum>> partial(nblocks, std::vector<CompensatedSum>(nvals));
  std::vector<std::exception_ptr> errors(nblocks);
#pragma omp parallel
  {
    std::vector<double> buf(nvals);
#pragma omp for schedule(dynamic, 1)
    for (std::ptrdiff_t b = 0; b < static_cast<std::ptrdiff_t>(nblocks); ++b) {
      try {
        const std::size_t lo = static_cast<std::size_t>(b) * block;
        const std::size_t hi = std::min(npts, lo + block);
        for (std::size_t idx = lo; idx < hi; ++idx) {
          per_k(idx, std::span<double>(buf));
          for (std::size_t v = 0; v < nvals; ++v) partial[b][v].add(buf[v]);
        }
      } catch (...) {
        errors[b] = std::current_exception();
      }
    }
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
  std::vector<double> out(nvals);
  for (std::size_t v = 0; v < nvals; ++v) {
    CompensatedSum s;
    for (std::size_t b = 0; b < nblocks; ++b) s.merge(partial[b][v]);
    out[v] = s.value();
  }
  return out;
}

/// Serial reference: one compensated sum per value in k order.
template <class PerK>
std::vector<double> bz_serial_sum(std::size_t npts, std::size_t nvals, PerK&& per_k) {
  std::vector<CompensatedSum> acc(nvals);
  std::vector<double> buf(nvals);
  for (std::size_t idx = 0; idx < npts; ++idx) {
    per_k(idx, std::span<double>(buf));
    for (std::size_t v = 0; v < nvals; ++v) acc[v].add(buf[v]);
  }
  std::vector<double> out(nvals);
  for (std::size_t v = 0; v < nvals; ++v) out[v] = acc[v].value();
  return out;
}

}  // namespace crystal
