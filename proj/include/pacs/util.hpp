#pragma once

#include <charconv>
#include <cstdint>
#include <functional>
#include <string>

namespace pacs {

/// Shortest decimal representation that round-trips to the same double.
inline std::string format_double(double x) {
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), x);
    (void)ec;
    return std::string(buf, ptr);
}

/// Thread count for parallel sections: PACS_THREADS if set, else hardware.
int worker_count();

/// Deterministic parallel loop: [0, n) split into contiguous blocks, results
/// written by index so the outcome is independent of scheduling.
void parallel_for(int n, const std::function<void(int)>& body);

/// FNV-1a, used to fingerprint the model section of a config.
inline std::uint64_t fnv1a64(const std::string& bytes) {
    std::uint64_t h = 0xCBF29CE484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001B3ULL;
    }
    return h;
}

}  // namespace pacs
