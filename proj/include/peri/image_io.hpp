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

#include <string>

#include "peri/image.hpp"

namespace peri {

/// Decode a PNG (8/16-bit gray/rgb/palette) or PGM (P2/P5) file.
Raster load_raster(const std::string& path);

/// load_raster + to_grayscale.
GrayImage load_gray(const std::string& path);

/// Write an 8-bit grayscale PNG (values quantized from [0,1]).
void save_png_gray8(const GrayImage& img, const std::string& path);

/// Write a binary PGM (P5), 8- or 16-bit.
void save_pgm(const GrayImage& img, const std::string& path, int bit_depth = 8);

}  // namespace peri
