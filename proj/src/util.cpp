#include "pacs/util.hpp"

#include <algorithm>
#include <cstdlib>
#include <thread>
#include <vector>

namespace pacs {

int worker_count() {
    if (const char* env = std::getenv("PACS_THREADS")) {
        const int n = std::atoi(env);
        if (n >= 1) return std::min(n, 64);
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(std::min(hw, 16u));
}

void parallel_for(int n, const std::function<void(int)>& body) {
    const int workers = std::min(worker_count(), std::max(1, n));
    if (workers == 1 || n < 64) {
        for (int i = 0; i < n; ++i) body(i);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(static_cast<size_t>(workers));
    const int chunk = (n + workers - 1) / workers;
    for (int t = 0; t < workers; ++t) {
        const int lo = t * chunk;
        const int hi = std::min(n, lo + chunk);
        if (lo >= hi) break;
        pool.emplace_back([lo, hi, &body] {
            for (int i = lo; i < hi; ++i) body(i);
        });
    }
    for (auto& th : pool) th.join();
}

}  // namespace pacs
