#pragma once

namespace mirt {

/// Sets the worker count for parallel kernels; n <= 0 leaves the runtime default.
void set_thread_count(int n);
int thread_count();

}  // namespace mirt
