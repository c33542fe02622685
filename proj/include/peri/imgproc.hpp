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

#include "peri/image.hpp"

namespace peri {

/// Luminance conversion (Rec. 601 weights), output scaled to [0,1].
/// Alpha channels are ignored. Throws InputError on an empty raster.
GrayImage to_grayscale(const Raster& raster);

/// Contrast-limited adaptive histogram equalization.
///
/// clip_limit is a fraction of the tile pixel count (histogram counts above
/// clip_limit * tile_pixels are clipped and redistributed uniformly over all
/// bins). Tile mappings are inclusive-CDF lookups blended bilinearly between
/// neighboring tile centers. Images whose sides are not multiples of the
/// tile grid are replicate-padded internally and cropped back.
GrayImage clahe(const GrayImage& img, double clip_limit = 0.01,
                int tiles_x = 8, int tiles_y = 8);

/// Cubic-convolution resampling (kernel parameter a = -0.5), pixel-center
/// coordinate mapping, output dims = round(scale * input dims), clamped to
/// [0,1]. Throws ParamError if an output side would be < 4.
GrayImage bicubic_resize(const GrayImage& img, double scale);

/// Resample img rotated by angle phi (radians) about (cx, cy), bicubic with
/// replicate borders. Positive phi turns image content from the +x axis
/// toward the +y axis (y points down). Matched by SafeDescriptor rotation:
/// rotating a descriptor by phi tracks rotate_image(img, phi, center).
GrayImage rotate_image(const GrayImage& img, double phi, double cx, double cy);

/// Symmetry-derivative-of-Gaussian filter of order n and scale sigma:
/// closed-form taps (-1)^|n| * ((x + i*sign(n)*y)/sigma^2)^|n| * g_sigma(x,y)
/// sampled at integer offsets, g the unit-mass 2D Gaussian. n = 0 is the
/// plain Gaussian. side = 0 selects the default 2*ceil(4*sigma)+1; an
/// explicit side must be odd and at least the default.
ComplexKernel gamma_kernel(int n, double sigma, int side = 0);

/// Correlation with the conjugated kernel under replicate borders:
///   out(p) = sum_u conj(K(u)) * in(p + u)
/// so the value at a tap-aligned center is the plain scalar product of the
/// kernel with the covered patch. Output has the input's dimensions.
ComplexField convolve_complex(const GrayImage& img, const ComplexKernel& kernel);
ComplexField convolve_complex(const ComplexField& field, const ComplexKernel& kernel);

/// Complex orientation field: the squared response of the order-1
/// symmetry-derivative filter at scale sigma. arg(h) is twice the local
/// gradient direction, |h| the squared smoothed gradient energy. Computed
/// with separable passes; agrees with the convolve_complex route to 1e-10.
ComplexField orientation_field(const GrayImage& img, double sigma);

/// Separable Gaussian blur, discrete sum-normalized taps (DC preserved),
/// replicate borders, radius ceil(4*sigma). sigma = 0 returns a copy.
GrayImage gaussian_blur(const GrayImage& img, double sigma);

}  // namespace peri
