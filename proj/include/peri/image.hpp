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

#include <complex>
#include <cstdint>
#include <vector>

#include "peri/errors.hpp"

namespace peri {

/// Single-channel intensity image, values in [0,1], row-major.
/// Pixel coordinates are (x = column, rightwards; y = row, downwards).
struct GrayImage {
    int width = 0;
    int height = 0;
    std::vector<double> pixels;

    GrayImage() = default;
    GrayImage(int w, int h, double fill = 0.0);

    double& at(int x, int y) { return pixels[static_cast<size_t>(y) * width + x]; }
    double at(int x, int y) const { return pixels[static_cast<size_t>(y) * width + x]; }
    const double* row(int y) const { return pixels.data() + static_cast<size_t>(y) * width; }
    double* row(int y) { return pixels.data() + static_cast<size_t>(y) * width; }

    /// Clamped access; realizes replicate-border semantics.
    double at_clamped(int x, int y) const;

    bool empty() const { return width == 0 || height == 0; }

    /// Throws InputError unless all pixels are finite and in [0,1].
    void validate() const;
};

/// Complex-valued grid with the same geometry conventions as GrayImage.
struct ComplexField {
    int width = 0;
    int height = 0;
    std::vector<std::complex<double>> values;

    ComplexField() = default;
    ComplexField(int w, int h);

    std::complex<double>& at(int x, int y) {
        return values[static_cast<size_t>(y) * width + x];
    }
    std::complex<double> at(int x, int y) const {
        return values[static_cast<size_t>(y) * width + x];
    }
    const std::complex<double>* row(int y) const {
        return values.data() + static_cast<size_t>(y) * width;
    }
    bool empty() const { return width == 0 || height == 0; }
};

/// Square complex filter sampled on an odd grid centered at the middle tap.
/// Tap (x, y) offsets run in [-radius(), radius()] with y downwards.
struct ComplexKernel {
    int side = 0;
    std::vector<std::complex<double>> taps;

    // Construction metadata.
    int order = 0;            // symmetry order n
    double sigma = 0.0;       // Gaussian scale (derivative kernels) or radial scale (rings)
    double mu = 0.0;          // ring width exponent, 0 for derivative kernels
    double r_peak = 0.0;      // ring peak radius, 0 for derivative kernels
    double kappa = 1.0;       // ring normalization constant

    ComplexKernel() = default;
    explicit ComplexKernel(int side_);

    int radius() const { return (side - 1) / 2; }
    std::complex<double>& at(int x, int y) {
        return taps[static_cast<size_t>(y + radius()) * side + (x + radius())];
    }
    std::complex<double> at(int x, int y) const {
        return taps[static_cast<size_t>(y + radius()) * side + (x + radius())];
    }

    double l1_norm() const;
    double l2_norm() const;
    std::complex<double> sum() const;
};

/// Interleaved multi-channel raster as decoded from PNG/PGM, before
/// grayscale conversion. Samples are left at their native bit depth.
struct Raster {
    int width = 0;
    int height = 0;
    int channels = 0;   // 1 gray, 2 gray+alpha, 3 rgb, 4 rgba
    int bit_depth = 0;  // 8 or 16
    std::vector<uint16_t> samples;  // row-major, channel-interleaved

    bool empty() const { return width == 0 || height == 0 || channels == 0; }
};

}  // namespace peri
