#pragma once

#ifdef _OPENMP
#include <omp.h>
#endif

namespace dfmr {

// Execution path for the data-parallel kernels. `serial` is the plain-loop
// reference; `parallel` uses OpenMP over independent windows/cells/maps and
// must produce bit-identical results (per-slot writes, serial final reduce).
enum class Exec { serial, parallel };

inline const char * exec_name(Exec e) { return e == Exec::serial ? "serial" : "parallel"; }

inline int max_threads() {
#ifdef _OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

inline void set_threads(int n) {
#ifdef _OPENMP
    if (n > 0) {
        omp_set_num_threads(n);
    }
#else
    (void) n;
#endif
}

} // namespace dfmr
