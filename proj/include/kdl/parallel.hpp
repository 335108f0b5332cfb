#pragma once

#include <cstddef>
#include <functional>

namespace kdl {

/// Number of worker threads used by data-parallel loops. Defaults to the
/// KDL_WORKERS environment variable, else 1.
int workers();
void set_workers(int n);

/// Runs body(i) for i in [0, n). Items are handed out one at a time, and
/// each item must only write state owned by that item. Results therefore do not
/// depend on the worker count.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace kdl
