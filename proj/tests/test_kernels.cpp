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

// Equivalence harness: every compiled kernel variant the CPU can run must
// agree with the scalar reference within floating-point reassociation
// error on random inputs of awkward lengths (vector remainders included).

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include "peri/simd/kernels.hpp"

using peri::simd::KernelTable;

namespace {

struct Inputs {
    std::vector<double> a, b, c;
};

Inputs random_inputs(size_t n, uint64_t seed, bool nonnegative = false) {
    std::mt19937_64 eng(seed);
    std::uniform_real_distribution<double> dist(nonnegative ? 0.0 : -10.0, 10.0);
    Inputs in;
    in.a.resize(n);
    in.b.resize(n);
    in.c.resize(n);
    for (size_t i = 0; i < n; ++i) {
        in.a[i] = dist(eng);
        in.b[i] = dist(eng);
        in.c[i] = dist(eng);
    }
    return in;
}

double abs_scale(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 1.0;
    for (size_t i = 0; i < a.size(); ++i) s += std::fabs(a[i] * b[i]);
    return s;
}

const std::vector<size_t> kLengths = {0, 1, 2, 3, 4, 5, 7, 8, 9, 15, 16,
                                      17, 31, 33, 100, 255, 1000, 1023};

}  // namespace

TEST_CASE("at least the scalar table is available") {
    const auto tables = peri::simd::available();
    REQUIRE(!tables.empty());
    CHECK(std::string(tables[0]->name) == "scalar");
    MESSAGE("active kernel table: ", peri::simd::active().name);
}

TEST_CASE("dot variants match scalar") {
    const auto& ref = *peri::simd::available()[0];
    for (const auto* t : peri::simd::available()) {
        for (size_t n : kLengths) {
            const auto in = random_inputs(n, 42 + n);
            const double expected = ref.dot(in.a.data(), in.b.data(), n);
            const double got = t->dot(in.a.data(), in.b.data(), n);
            CHECK(std::fabs(expected - got) <= 1e-12 * abs_scale(in.a, in.b));
        }
    }
}

TEST_CASE("dot2 variants match scalar") {
    const auto& ref = *peri::simd::available()[0];
    for (const auto* t : peri::simd::available()) {
        for (size_t n : kLengths) {
            const auto in = random_inputs(n, 43 + n);
            const auto e = ref.dot2(in.a.data(), in.b.data(), in.c.data(), n);
            const auto g = t->dot2(in.a.data(), in.b.data(), in.c.data(), n);
            CHECK(std::fabs(e.a - g.a) <= 1e-12 * abs_scale(in.a, in.b));
            CHECK(std::fabs(e.b - g.b) <= 1e-12 * abs_scale(in.a, in.c));
        }
    }
}

TEST_CASE("axpy variants match scalar") {
    const auto& ref = *peri::simd::available()[0];
    for (const auto* t : peri::simd::available()) {
        for (size_t n : kLengths) {
            const auto in = random_inputs(n, 44 + n);
            std::vector<double> ye = in.b, yg = in.b;
            ref.axpy(1.7, in.a.data(), ye.data(), n);
            t->axpy(1.7, in.a.data(), yg.data(), n);
            for (size_t i = 0; i < n; ++i)
                CHECK(std::fabs(ye[i] - yg[i]) <= 1e-12 * (1.0 + std::fabs(ye[i])));
        }
    }
}

TEST_CASE("l2sq variants match scalar") {
    const auto& ref = *peri::simd::available()[0];
    for (const auto* t : peri::simd::available()) {
        for (size_t n : kLengths) {
            const auto in = random_inputs(n, 45 + n);
            const double e = ref.l2sq(in.a.data(), in.b.data(), n);
            const double g = t->l2sq(in.a.data(), in.b.data(), n);
            CHECK(std::fabs(e - g) <= 1e-12 * (1.0 + e));
        }
    }
}

TEST_CASE("chi2 variants match scalar, including skipped terms") {
    const auto& ref = *peri::simd::available()[0];
    for (const auto* t : peri::simd::available()) {
        for (size_t n : kLengths) {
            auto in = random_inputs(n, 46 + n, /*nonnegative=*/true);
            // Force exact-zero sums into the mix so the skip path is hit.
            for (size_t i = 0; i + 3 < n; i += 4) {
                in.a[i] = 0.0;
                in.b[i] = 0.0;
            }
            const double e = ref.chi2(in.a.data(), in.b.data(), n, 1e-12);
            const double g = t->chi2(in.a.data(), in.b.data(), n, 1e-12);
            CHECK(std::fabs(e - g) <= 1e-12 * (1.0 + e));
        }
    }
}

TEST_CASE("cdot variants match scalar") {
    const auto& ref = *peri::simd::available()[0];
    for (const auto* t : peri::simd::available()) {
        for (size_t n : kLengths) {
            const auto in = random_inputs(2 * n, 47 + n);
            const auto e = ref.cdot(in.a.data(), in.b.data(), n);
            const auto g = t->cdot(in.a.data(), in.b.data(), n);
            const double scale = abs_scale(in.a, in.b);
            CHECK(std::fabs(e.re - g.re) <= 1e-12 * scale);
            CHECK(std::fabs(e.im - g.im) <= 1e-12 * scale);
        }
    }
}

TEST_CASE("cdot equals the complex-arithmetic definition") {
    const size_t n = 257;
    const auto in = random_inputs(2 * n, 99);
    std::complex<double> expected{0.0, 0.0};
    for (size_t i = 0; i < n; ++i) {
        const std::complex<double> a{in.a[2 * i], in.a[2 * i + 1]};
        const std::complex<double> b{in.b[2 * i], in.b[2 * i + 1]};
        expected += std::conj(a) * b;
    }
    const auto got = peri::simd::cdot(in.a.data(), in.b.data(), n);
    CHECK(std::fabs(expected.real() - got.re) <= 1e-10);
    CHECK(std::fabs(expected.imag() - got.im) <= 1e-10);
}
