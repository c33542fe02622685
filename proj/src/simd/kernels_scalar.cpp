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

// Reference kernels. Plain loops, no pragmas: these define the semantics
// the vector variants are tested against.

#include "peri/simd/kernels.hpp"

namespace peri::simd {
namespace {

double dot_scalar(const double* a, const double* b, size_t n) {
    double s = 0.0;
    for (size_t i = 0; i < n; ++i) s += a[i] * b[i];
    return s;
}

Dot2 dot2_scalar(const double* x, const double* k0, const double* k1, size_t n) {
    Dot2 r;
    for (size_t i = 0; i < n; ++i) {
        r.a += x[i] * k0[i];
        r.b += x[i] * k1[i];
    }
    return r;
}

void axpy_scalar(double a, const double* x, double* y, size_t n) {
    for (size_t i = 0; i < n; ++i) y[i] += a * x[i];
}

double l2sq_scalar(const double* a, const double* b, size_t n) {
    double s = 0.0;
    for (size_t i = 0; i < n; ++i) {
        const double d = a[i] - b[i];
        s += d * d;
    }
    return s;
}

double chi2_scalar(const double* a, const double* b, size_t n, double eps) {
    double s = 0.0;
    for (size_t i = 0; i < n; ++i) {
        const double t = a[i] + b[i];
        if (t < eps) continue;
        const double d = a[i] - b[i];
        s += d * d / t;
    }
    return s;
}

CDot cdot_scalar(const double* a, const double* b, size_t n) {
    CDot r;
    for (size_t i = 0; i < n; ++i) {
        const double ar = a[2 * i], ai = a[2 * i + 1];
        const double br = b[2 * i], bi = b[2 * i + 1];
        r.re += ar * br + ai * bi;
        r.im += ar * bi - ai * br;
    }
    return r;
}

}  // namespace

namespace detail {
const KernelTable scalar_table = {
    dot_scalar, dot2_scalar, axpy_scalar, l2sq_scalar, chi2_scalar,
    cdot_scalar, "scalar",
};
}  // namespace detail

}  // namespace peri::simd
