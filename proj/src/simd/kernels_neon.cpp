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

// NEON (aarch64) variants; f64x2 lanes are baseline on aarch64 so no
// runtime feature probe is needed beyond being on the architecture.

#include "peri/simd/kernels.hpp"

#include <arm_neon.h>

namespace peri::simd {
namespace {

double dot_neon(const double* a, const double* b, size_t n) {
    float64x2_t acc0 = vdupq_n_f64(0.0);
    float64x2_t acc1 = vdupq_n_f64(0.0);
    size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        acc0 = vfmaq_f64(acc0, vld1q_f64(a + i), vld1q_f64(b + i));
        acc1 = vfmaq_f64(acc1, vld1q_f64(a + i + 2), vld1q_f64(b + i + 2));
    }
    for (; i + 2 <= n; i += 2) {
        acc0 = vfmaq_f64(acc0, vld1q_f64(a + i), vld1q_f64(b + i));
    }
    double s = vaddvq_f64(acc0) + vaddvq_f64(acc1);
    for (; i < n; ++i) s += a[i] * b[i];
    return s;
}

Dot2 dot2_neon(const double* x, const double* k0, const double* k1, size_t n) {
    float64x2_t acc0 = vdupq_n_f64(0.0);
    float64x2_t acc1 = vdupq_n_f64(0.0);
    size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        const float64x2_t vx = vld1q_f64(x + i);
        acc0 = vfmaq_f64(acc0, vx, vld1q_f64(k0 + i));
        acc1 = vfmaq_f64(acc1, vx, vld1q_f64(k1 + i));
    }
    Dot2 r{vaddvq_f64(acc0), vaddvq_f64(acc1)};
    for (; i < n; ++i) {
        r.a += x[i] * k0[i];
        r.b += x[i] * k1[i];
    }
    return r;
}

void axpy_neon(double a, const double* x, double* y, size_t n) {
    const float64x2_t va = vdupq_n_f64(a);
    size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        vst1q_f64(y + i, vfmaq_f64(vld1q_f64(y + i), va, vld1q_f64(x + i)));
    }
    for (; i < n; ++i) y[i] += a * x[i];
}

double l2sq_neon(const double* a, const double* b, size_t n) {
    float64x2_t acc = vdupq_n_f64(0.0);
    size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        const float64x2_t d = vsubq_f64(vld1q_f64(a + i), vld1q_f64(b + i));
        acc = vfmaq_f64(acc, d, d);
    }
    double s = vaddvq_f64(acc);
    for (; i < n; ++i) {
        const double d = a[i] - b[i];
        s += d * d;
    }
    return s;
}

double chi2_neon(const double* a, const double* b, size_t n, double eps) {
    const float64x2_t veps = vdupq_n_f64(eps);
    const float64x2_t vone = vdupq_n_f64(1.0);
    float64x2_t acc = vdupq_n_f64(0.0);
    size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        const float64x2_t va = vld1q_f64(a + i);
        const float64x2_t vb = vld1q_f64(b + i);
        const float64x2_t t = vaddq_f64(va, vb);
        const float64x2_t d = vsubq_f64(va, vb);
        const uint64x2_t keep = vcgeq_f64(t, veps);
        const float64x2_t denom = vbslq_f64(keep, t, vone);
        const float64x2_t q = vdivq_f64(vmulq_f64(d, d), denom);
        acc = vaddq_f64(acc, vreinterpretq_f64_u64(
                                 vandq_u64(vreinterpretq_u64_f64(q), keep)));
    }
    double s = vaddvq_f64(acc);
    for (; i < n; ++i) {
        const double t = a[i] + b[i];
        if (t < eps) continue;
        const double d = a[i] - b[i];
        s += d * d / t;
    }
    return s;
}

CDot cdot_neon(const double* a, const double* b, size_t n) {
    // One complex per 128-bit vector: lanes (re, im).
    const float64x2_t signs = {-1.0, 1.0};
    float64x2_t acc_re = vdupq_n_f64(0.0);
    float64x2_t acc_im = vdupq_n_f64(0.0);
    size_t i = 0;
    const size_t m = 2 * n;
    for (; i + 2 <= m; i += 2) {
        const float64x2_t va = vld1q_f64(a + i);
        const float64x2_t vb = vld1q_f64(b + i);
        acc_re = vfmaq_f64(acc_re, va, vb);
        const float64x2_t sw = vmulq_f64(vextq_f64(va, va, 1), signs);
        acc_im = vfmaq_f64(acc_im, sw, vb);
    }
    return CDot{vaddvq_f64(acc_re), vaddvq_f64(acc_im)};
}

}  // namespace

namespace detail {
const KernelTable neon_table = {
    dot_neon, dot2_neon, axpy_neon, l2sq_neon, chi2_neon, cdot_neon, "neon",
};
}  // namespace detail

}  // namespace peri::simd
