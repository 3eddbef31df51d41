#include "bridgesim/parallel.hpp"

#include <cstdlib>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace bridgesim {

int worker_count() {
#ifdef _OPENMP
  int n = omp_get_max_threads();
  if (const char* env = std::getenv("BRIDGESIM_THREADS")) {
    try {
      const int cap = std::stoi(env);
      if (cap >= 1 && cap < n) n = cap;
    } catch (...) {
    }
  }
  return n;
#else
  return 1;
#endif
}

}  // namespace bridgesim
