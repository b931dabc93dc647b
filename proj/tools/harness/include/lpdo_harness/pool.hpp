#pragma once

#include <cstddef>
#include <functional>

namespace lpdo::harness {

/// min(requested or LPDO_THREADS or hardware, n_cells), at least 1.
/// `requested` > 0 takes precedence over the environment.
std::size_t worker_count(std::size_t n_cells, int requested = 0);

/// Runs fn(cell) for every cell on `workers` threads. The exception of the
/// lowest failing cell is rethrown after all workers join.
void run_cells(std::size_t n_cells, std::size_t workers,
               const std::function<void(std::size_t)>& fn);

}  // namespace lpdo::harness
