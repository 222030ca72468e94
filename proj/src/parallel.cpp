#include "vlft/parallel.hpp"

#include <cstdlib>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace vlft {

int effective_threads(int requested) {
    int t = requested;
    if (t <= 0) {
        if (const char* env = std::getenv("VLFT_THREADS")) {
            try {
                t = std::stoi(env);
            } catch (...) {
                t = 0;
            }
        }
    }
#ifdef _OPENMP
    if (t <= 0) t = omp_get_max_threads();
#endif
    return t > 0 ? t : 1;
}

}  // namespace vlft
