#include "wgimg/parallel.hpp"

#ifdef WGIMG_HAVE_OPENMP
#include <omp.h>
#endif

namespace wgimg {

namespace {
#ifdef WGIMG_HAVE_OPENMP
const int kDefaultThreads = omp_get_max_threads();
#endif
}  // namespace

void set_thread_count(int n) {
#ifdef WGIMG_HAVE_OPENMP
  omp_set_num_threads(n > 0 ? n : kDefaultThreads);
#else
  (void)n;
#endif
}

int thread_count() {
#ifdef WGIMG_HAVE_OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

}  // namespace wgimg
