#include "growthlab/parallel.hpp"

#include <cstdlib>
#include <string>

namespace growthlab {

int effective_threads(int requested) {
    int threads = requested > 0 ? requested
                                : static_cast<int>(std::thread::hardware_concurrency());
    if (threads < 1) threads = 1;
    if (const char* env = std::getenv("GROWTHLAB_THREADS")) {
        try {
            const int cap = std::stoi(env);
            if (cap >= 1 && cap < threads) threads = cap;
        } catch (...) {
            // Unparseable env var: ignore the cap.
        }
    }
    return threads;
}

} // namespace growthlab
