#pragma once

#include <cstddef>

namespace smoothnet {

/// Caps the number of worker threads used by the numeric kernels.
/// 0 restores the hardware default. Results are bit-identical for any
/// setting: work splits place whole output entries in exactly one chunk.
void set_max_threads(std::size_t n);

std::size_t max_threads();

namespace detail {

/// Runs fn(begin, end) over [0, n) split into contiguous chunks.
/// Chunks never share output entries, so scheduling cannot change results.
template <typename Fn>
void parallel_chunks(std::size_t n, std::size_t grain, Fn&& fn);

void run_chunks(std::size_t n, std::size_t grain, void (*trampoline)(void*, std::size_t, std::size_t), void* ctx);

template <typename Fn>
void parallel_chunks(std::size_t n, std::size_t grain, Fn&& fn) {
  auto trampoline = [](void* ctx, std::size_t b, std::size_t e) {
    (*static_cast<Fn*>(ctx))(b, e);
  };
  run_chunks(n, grain, trampoline, &fn);
}

}  // namespace detail
}  // namespace smoothnet
