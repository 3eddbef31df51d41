#pragma once

namespace bridgesim {

// worker count for OpenMP regions: min(omp_get_max_threads, BRIDGESIM_THREADS
// if set); 1 when built without OpenMP
int worker_count();

}  // namespace bridgesim
