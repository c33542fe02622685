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

#include "peri/simd/kernels.hpp"

#include <cstdlib>
#include <cstring>

namespace peri::simd {
namespace {

bool cpu_has_avx2_fma() {
#if defined(PERI_HAVE_AVX2_TU) && defined(__GNUC__)
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
    return false;
#endif
}

std::vector<const KernelTable*> build_available() {
    std::vector<const KernelTable*> tables;
    tables.push_back(&detail::scalar_table);
#if defined(PERI_HAVE_AVX2_TU)
    if (cpu_has_avx2_fma()) tables.push_back(&detail::avx2_table);
#endif
#if defined(PERI_HAVE_NEON_TU)
    tables.push_back(&detail::neon_table);
#endif
    return tables;
}

const KernelTable* select_active() {
    const auto tables = build_available();
    if (const char* force = std::getenv("PERI_KERNELS")) {
        for (const auto* t : tables) {
            if (std::strcmp(t->name, force) == 0) return t;
        }
        // Unknown/unavailable name: fall back to scalar rather than abort.
        return tables.front();
    }
    return tables.back();  // best available; scalar if nothing else
}

}  // namespace

const KernelTable& active() {
    static const KernelTable* table = select_active();
    return *table;
}

std::vector<const KernelTable*> available() { return build_available(); }

}  // namespace peri::simd
