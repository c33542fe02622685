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

#include "peri/image.hpp"

#include <algorithm>
#include <cmath>

namespace peri {

GrayImage::GrayImage(int w, int h, double fill) : width(w), height(h) {
    if (w <= 0 || h <= 0) throw ParamError("image dimensions must be positive");
    pixels.assign(static_cast<size_t>(w) * h, fill);
}

double GrayImage::at_clamped(int x, int y) const {
    x = std::clamp(x, 0, width - 1);
    y = std::clamp(y, 0, height - 1);
    return at(x, y);
}

void GrayImage::validate() const {
    if (empty()) throw InputError("empty image");
    if (pixels.size() != static_cast<size_t>(width) * height)
        throw InputError("pixel count does not match dimensions");
    for (double v : pixels) {
        if (!std::isfinite(v) || v < 0.0 || v > 1.0)
            throw InputError("pixel outside [0,1]");
    }
}

ComplexField::ComplexField(int w, int h) : width(w), height(h) {
    if (w <= 0 || h <= 0) throw ParamError("field dimensions must be positive");
    values.assign(static_cast<size_t>(w) * h, {0.0, 0.0});
}

ComplexKernel::ComplexKernel(int side_) : side(side_) {
    if (side <= 0 || side % 2 == 0) throw ParamError("kernel side must be odd and positive");
    taps.assign(static_cast<size_t>(side) * side, {0.0, 0.0});
}

double ComplexKernel::l1_norm() const {
    double s = 0.0;
    for (const auto& t : taps) s += std::abs(t);
    return s;
}

double ComplexKernel::l2_norm() const {
    double s = 0.0;
    for (const auto& t : taps) s += std::norm(t);
    return std::sqrt(s);
}

std::complex<double> ComplexKernel::sum() const {
    std::complex<double> s{0.0, 0.0};
    for (const auto& t : taps) s += t;
    return s;
}

}  // namespace peri
