// Copyright 2026 The peri authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <cstdio>
#include <functional>
#include <string>
#include <thread>
#include <vector>

namespace peri {

/// FNV-1a 64-bit over a byte string; stable across platforms/compilers
/// (unlike std::hash), so safe to persist in artifacts.
inline uint64_t fnv1a64(const std::string& s) {
    uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

inline std::string to_hex(uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

/// Shortest round-trippable decimal form of a double (for canonical strings).
inline std::string canonical_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

/// Static-partition parallel loop. Results must be written to disjoint,
/// index-keyed slots so the output is identical for any worker count.
inline void parallel_for(size_t n, unsigned workers,
                         const std::function<void(size_t, size_t)>& body) {
    if (n == 0) return;
    if (workers <= 1 || n == 1) {
        body(0, n);
        return;
    }
    const size_t nw = std::min<size_t>(workers, n);
    std::vector<std::thread> threads;
    threads.reserve(nw);
    const size_t chunk = (n + nw - 1) / nw;
    for (size_t w = 0; w < nw; ++w) {
        const size_t begin = w * chunk;
        const size_t end = std::min(n, begin + chunk);
        if (begin >= end) break;
        threads.emplace_back([&body, begin, end] { body(begin, end); });
    }
    for (auto& t : threads) t.join();
}

}  // namespace peri
