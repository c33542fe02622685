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
#include <vector>

#include "peri/image.hpp"

namespace peri::texture {

inline constexpr int kGridSide = 8;
inline constexpr int kBinsPerBlock = 8;

/// 8x8 equal block partition with remainder pixels absorbed by the last
/// row/column; the four corner blocks (outside the circular ROI) are
/// inactive, leaving 60 active blocks.
struct BlockGrid {
    int roi_side = 0;
    int block_side = 0;              // nominal size; last row/col may be larger
    std::vector<int> active_blocks;  // row-major indices, ordered

    int block_of(int x, int y) const;             // row-major block index
    bool is_active(int block_index) const;
    int x_begin(int bx) const;                     // block column pixel range
    int x_end(int bx) const;
    int y_begin(int by) const { return x_begin(by); }
    int y_end(int by) const { return x_end(by); }
};

BlockGrid block_grid(int roi_side);

enum class TextureKind { lbp, hog };

/// Concatenated per-block 8-bin histograms, L1-normalized per block.
/// Blocks with no mass (zero gradient for HOG) are left all-zero and
/// flagged.
struct BlockDescriptor {
    TextureKind kind = TextureKind::lbp;
    int roi_side = 0;
    std::vector<int> active_blocks;
    std::vector<double> histograms;  // active-block-major, 8 values each
    std::vector<bool> empty_blocks;  // parallel to active_blocks

    size_t length() const { return histograms.size(); }
};

/// LBP: each interior pixel gets an 8-bit label, bit b set when
/// neighbor_b >= center, neighbor order (E, NE, N, NW, W, SW, S, SE) for
/// bits 0..7; labels quantized to 8 bins by integer division by 32.
BlockDescriptor extract_lbp(const GrayImage& img, const BlockGrid& grid);

/// HOG: central-difference gradients on interior pixels, unsigned
/// orientation in [0, 180) split into 8 equal bins, hard assignment
/// weighted by gradient magnitude.
BlockDescriptor extract_hog(const GrayImage& img, const BlockGrid& grid);

enum class TextureMetric { euclidean, chi2 };

/// Distance over the concatenated histograms (480 values for the default
/// grid). chi2 skips terms with a_i + b_i < 1e-12. Throws
/// IncompatibleError when kind/layout differ.
double distance(const BlockDescriptor& a, const BlockDescriptor& b, TextureMetric metric);

void save_block_descriptor(const BlockDescriptor& d, const std::string& path);
BlockDescriptor load_block_descriptor(const std::string& path);

}  // namespace peri::texture
