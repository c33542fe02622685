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

// AVX2+FMA variants. This TU is compiled with -mavx2 -mfma; dispatch.cpp
// only exposes the table when the CPU reports both features.

#include "peri/simd/kernels.hpp"

#include <immintrin.h>

namespace peri::simd {
namespace {

inline double hsum(__m256d v) {
    __m128d lo = _mm256_castpd256_pd128(v);
    __m128d hi = _mm256_extractf128_pd(v, 1);
    lo = _mm_add_pd(lo, hi);
    return _mm_cvtsd_f64(_mm_add_sd(lo, _mm_unpackhi_pd(lo, lo)));
}

double dot_avx2(const double* a, const double* b, size_t n) {
    __m256d acc0 = _mm256_setzero_pd();
    __m256d acc1 = _mm256_setzero_pd();
    size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
        acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4), acc1);
    }
    for (; i + 4 <= n; i += 4) {
        acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
    }
    double s = hsum(_mm256_add_pd(acc0, acc1));
    for (; i < n; ++i) s += a[i] * b[i];
    return s;
}

Dot2 dot2_avx2(const double* x, const double* k0, const double* k1, size_t n) {
    __m256d acc0 = _mm256_setzero_pd();
    __m256d acc1 = _mm256_setzero_pd();
    size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d vx = _mm256_loadu_pd(x + i);
        acc0 = _mm256_fmadd_pd(vx, _mm256_loadu_pd(k0 + i), acc0);
        acc1 = _mm256_fmadd_pd(vx, _mm256_loadu_pd(k1 + i), acc1);
    }
    Dot2 r{hsum(acc0), hsum(acc1)};
    for (; i < n; ++i) {
        r.a += x[i] * k0[i];
        r.b += x[i] * k1[i];
    }
    return r;
}

void axpy_avx2(double a, const double* x, double* y, size_t n) {
    const __m256d va = _mm256_set1_pd(a);
    size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d vy = _mm256_loadu_pd(y + i);
        vy = _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i), vy);
        _mm256_storeu_pd(y + i, vy);
    }
    for (; i < n; ++i) y[i] += a * x[i];
}

double l2sq_avx2(const double* a, const double* b, size_t n) {
    __m256d acc = _mm256_setzero_pd();
    size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d d = _mm256_sub_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i));
        acc = _mm256_fmadd_pd(d, d, acc);
    }
    double s = hsum(acc);
    for (; i < n; ++i) {
        const double d = a[i] - b[i];
        s += d * d;
    }
    return s;
}

double chi2_avx2(const double* a, const double* b, size_t n, double eps) {
    const __m256d veps = _mm256_set1_pd(eps);
    const __m256d vone = _mm256_set1_pd(1.0);
    __m256d acc = _mm256_setzero_pd();
    size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d va = _mm256_loadu_pd(a + i);
        const __m256d vb = _mm256_loadu_pd(b + i);
        const __m256d t = _mm256_add_pd(va, vb);
        const __m256d d = _mm256_sub_pd(va, vb);
        const __m256d keep = _mm256_cmp_pd(t, veps, _CMP_GE_OQ);
        // Divide by 1.0 in skipped lanes so no spurious inf/nan is formed.
        const __m256d denom = _mm256_blendv_pd(vone, t, keep);
        const __m256d q = _mm256_div_pd(_mm256_mul_pd(d, d), denom);
        acc = _mm256_add_pd(acc, _mm256_and_pd(q, keep));
    }
    double s = hsum(acc);
    for (; i < n; ++i) {
        const double t = a[i] + b[i];
        if (t < eps) continue;
        const double d = a[i] - b[i];
        s += d * d / t;
    }
    return s;
}

CDot cdot_avx2(const double* a, const double* b, size_t n) {
    // Interleaved (re,im); 4 doubles = 2 complex per vector.
    const __m256d signs = _mm256_set_pd(1.0, -1.0, 1.0, -1.0);  // [-,+,-,+] low->high
    __m256d acc_re = _mm256_setzero_pd();
    __m256d acc_im = _mm256_setzero_pd();
    size_t i = 0;
    const size_t m = 2 * n;
    for (; i + 4 <= m; i += 4) {
        const __m256d va = _mm256_loadu_pd(a + i);
        const __m256d vb = _mm256_loadu_pd(b + i);
        acc_re = _mm256_fmadd_pd(va, vb, acc_re);
        // swap (re,im) pairs, negate the im->re lane: [-ai, ar, ...]
        const __m256d sw = _mm256_mul_pd(_mm256_permute_pd(va, 0x5), signs);
        acc_im = _mm256_fmadd_pd(sw, vb, acc_im);
    }
    CDot r{hsum(acc_re), hsum(acc_im)};
    for (; i + 2 <= m; i += 2) {
        const double ar = a[i], ai = a[i + 1];
        const double br = b[i], bi = b[i + 1];
        r.re += ar * br + ai * bi;
        r.im += ar * bi - ai * br;
    }
    return r;
}

}  // namespace

namespace detail {
const KernelTable avx2_table = {
    dot_avx2, dot2_avx2, axpy_avx2, l2sq_avx2, chi2_avx2, cdot_avx2, "avx2",
};
}  // namespace detail

}  // namespace peri::simd
