#pragma once

namespace wgimg {

/// Caps the number of worker threads used by parallel loops (<= 0 restores
/// the runtime default). No-op when built without OpenMP.
void set_thread_count(int n);
int thread_count();

}  // namespace wgimg
