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

#include <cstddef>
#include <string>
#include <vector>

namespace peri::simd {

struct Dot2 {
    double a = 0.0;
    double b = 0.0;
};

struct CDot {
    double re = 0.0;
    double im = 0.0;
};

/// The arithmetic inner loops of the library. Every entry has a scalar
/// reference implementation plus per-ISA variants; all variants of one
/// entry agree within floating-point reassociation error (see
/// tests/test_kernels.cpp for the equivalence harness).
struct KernelTable {
    // sum_i a[i] * b[i]
    double (*dot)(const double* a, const double* b, size_t n);
    // two dot products sharing the x operand: (sum x*k0, sum x*k1)
    Dot2 (*dot2)(const double* x, const double* k0, const double* k1, size_t n);
    // y[i] += a * x[i]
    void (*axpy)(double a, const double* x, double* y, size_t n);
    // sum_i (a[i] - b[i])^2
    double (*l2sq)(const double* a, const double* b, size_t n);
    // sum_i (a[i]-b[i])^2 / (a[i]+b[i]), terms with a+b < eps skipped
    double (*chi2)(const double* a, const double* b, size_t n, double eps);
    // conjugated complex dot product over interleaved (re,im) arrays of
    // n complex elements: sum_i conj(a[i]) * b[i]
    CDot (*cdot)(const double* a, const double* b, size_t n);

    const char* name;
};

/// Kernel table selected for this process (best ISA the CPU supports,
/// overridable with PERI_KERNELS=scalar|avx2|neon).
const KernelTable& active();

/// All tables compiled into this binary that the running CPU can execute.
/// Index 0 is always the scalar reference.
std::vector<const KernelTable*> available();

/// Convenience forwarders through the active table.
inline double dot(const double* a, const double* b, size_t n) {
    return active().dot(a, b, n);
}
inline Dot2 dot2(const double* x, const double* k0, const double* k1, size_t n) {
    return active().dot2(x, k0, k1, n);
}
inline void axpy(double a, const double* x, double* y, size_t n) {
    active().axpy(a, x, y, n);
}
inline double l2sq(const double* a, const double* b, size_t n) {
    return active().l2sq(a, b, n);
}
inline double chi2(const double* a, const double* b, size_t n, double eps) {
    return active().chi2(a, b, n, eps);
}
inline CDot cdot(const double* a, const double* b, size_t n) {
    return active().cdot(a, b, n);
}

namespace detail {
extern const KernelTable scalar_table;
#if defined(PERI_HAVE_AVX2_TU)
extern const KernelTable avx2_table;
#endif
#if defined(PERI_HAVE_NEON_TU)
extern const KernelTable neon_table;
#endif
}  // namespace detail

}  // namespace peri::simd
