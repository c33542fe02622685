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

#include "peri/texture.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>

#include "json.hpp"
#include "peri/simd/kernels.hpp"

namespace peri::texture {

namespace {

constexpr double kChi2Eps = 1e-12;

bool is_corner(int block_index) {
    const int by = block_index / kGridSide;
    const int bx = block_index % kGridSide;
    return (by == 0 || by == kGridSide - 1) && (bx == 0 || bx == kGridSide - 1);
}

// Shared accumulation scaffold: collects per-block 8-bin mass, then
// L1-normalizes each active block.
struct Accumulator {
    explicit Accumulator(const BlockGrid& grid)
        : grid_(grid),
          block_slot_(kGridSide * kGridSide, -1),
          mass_(grid.active_blocks.size() * kBinsPerBlock, 0.0) {
        for (size_t i = 0; i < grid.active_blocks.size(); ++i)
            block_slot_[grid.active_blocks[i]] = static_cast<int>(i);
    }

    void add(int x, int y, int bin, double weight) {
        const int slot = block_slot_[grid_.block_of(x, y)];
        if (slot < 0) return;  // inactive corner block
        mass_[static_cast<size_t>(slot) * kBinsPerBlock + bin] += weight;
    }

    BlockDescriptor finish(TextureKind kind) {
        BlockDescriptor d;
        d.kind = kind;
        d.roi_side = grid_.roi_side;
        d.active_blocks = grid_.active_blocks;
        d.histograms = std::move(mass_);
        d.empty_blocks.assign(d.active_blocks.size(), false);
        for (size_t i = 0; i < d.active_blocks.size(); ++i) {
            double* h = d.histograms.data() + i * kBinsPerBlock;
            double total = 0.0;
            for (int b = 0; b < kBinsPerBlock; ++b) total += h[b];
            if (total > 0.0) {
                for (int b = 0; b < kBinsPerBlock; ++b) h[b] /= total;
            } else {
                d.empty_blocks[i] = true;
            }
        }
        return d;
    }

    const BlockGrid& grid_;
    std::vector<int> block_slot_;
    std::vector<double> mass_;
};

const char* kind_name(TextureKind k) { return k == TextureKind::lbp ? "lbp" : "hog"; }

}  // namespace

int BlockGrid::block_of(int x, int y) const {
    const int bx = std::min(x / block_side, kGridSide - 1);
    const int by = std::min(y / block_side, kGridSide - 1);
    return by * kGridSide + bx;
}

bool BlockGrid::is_active(int block_index) const {
    return std::find(active_blocks.begin(), active_blocks.end(), block_index) !=
           active_blocks.end();
}

int BlockGrid::x_begin(int bx) const { return bx * block_side; }

int BlockGrid::x_end(int bx) const {
    return bx == kGridSide - 1 ? roi_side : (bx + 1) * block_side;
}

BlockGrid block_grid(int roi_side) {
    if (roi_side < kGridSide) throw ParamError("ROI too small for the 8x8 block grid");
    BlockGrid g;
    g.roi_side = roi_side;
    g.block_side = roi_side / kGridSide;
    for (int i = 0; i < kGridSide * kGridSide; ++i)
        if (!is_corner(i)) g.active_blocks.push_back(i);
    return g;
}

BlockDescriptor extract_lbp(const GrayImage& img, const BlockGrid& grid) {
    if (img.width != grid.roi_side || img.height != grid.roi_side)
        throw IncompatibleError("image does not match block grid");
    // Neighbor offsets for bits 0..7: E, NE, N, NW, W, SW, S, SE (y down).
    static constexpr int dx[8] = {1, 1, 0, -1, -1, -1, 0, 1};
    static constexpr int dy[8] = {0, -1, -1, -1, 0, 1, 1, 1};

    Accumulator acc(grid);
    for (int y = 1; y < img.height - 1; ++y) {
        for (int x = 1; x < img.width - 1; ++x) {
            const double c = img.at(x, y);
            int label = 0;
            for (int b = 0; b < 8; ++b) {
                if (img.at(x + dx[b], y + dy[b]) >= c) label |= 1 << b;
            }
            acc.add(x, y, label / 32, 1.0);
        }
    }
    return acc.finish(TextureKind::lbp);
}

BlockDescriptor extract_hog(const GrayImage& img, const BlockGrid& grid) {
    if (img.width != grid.roi_side || img.height != grid.roi_side)
        throw IncompatibleError("image does not match block grid");
    Accumulator acc(grid);
    for (int y = 1; y < img.height - 1; ++y) {
        for (int x = 1; x < img.width - 1; ++x) {
            const double gx = img.at(x + 1, y) - img.at(x - 1, y);
            const double gy = img.at(x, y + 1) - img.at(x, y - 1);
            const double mag = std::sqrt(gx * gx + gy * gy);
            if (mag == 0.0) continue;
            // Unsigned orientation in [0, pi).
            double theta = std::atan2(gy, gx);
            if (theta < 0.0) theta += std::numbers::pi;
            if (theta >= std::numbers::pi) theta -= std::numbers::pi;
            const int bin =
                std::min(kBinsPerBlock - 1,
                         static_cast<int>(theta / std::numbers::pi * kBinsPerBlock));
            acc.add(x, y, bin, mag);
        }
    }
    return acc.finish(TextureKind::hog);
}

double distance(const BlockDescriptor& a, const BlockDescriptor& b, TextureMetric metric) {
    if (a.kind != b.kind || a.roi_side != b.roi_side ||
        a.active_blocks != b.active_blocks || a.histograms.size() != b.histograms.size())
        throw IncompatibleError("block descriptors have different layouts");
    const size_t n = a.histograms.size();
    if (metric == TextureMetric::euclidean)
        return std::sqrt(simd::l2sq(a.histograms.data(), b.histograms.data(), n));
    return simd::chi2(a.histograms.data(), b.histograms.data(), n, kChi2Eps);
}

void save_block_descriptor(const BlockDescriptor& d, const std::string& path) {
    nlohmann::json j{{"matcher", kind_name(d.kind)},
                     {"roi_side", d.roi_side},
                     {"active_blocks", d.active_blocks},
                     {"histograms", d.histograms},
                     {"empty_blocks", std::vector<int>(d.empty_blocks.begin(),
                                                       d.empty_blocks.end())}};
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path);
    out << j.dump() << "\n";
    if (!out) throw IoError("short write to " + path);
}

BlockDescriptor load_block_descriptor(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path);
    nlohmann::json j;
    try {
        in >> j;
        BlockDescriptor d;
        const std::string kind = j.at("matcher").get<std::string>();
        if (kind == "lbp")
            d.kind = TextureKind::lbp;
        else if (kind == "hog")
            d.kind = TextureKind::hog;
        else
            throw InputError("not a block descriptor: " + path);
        d.roi_side = j.at("roi_side").get<int>();
        d.active_blocks = j.at("active_blocks").get<std::vector<int>>();
        d.histograms = j.at("histograms").get<std::vector<double>>();
        const auto flags = j.at("empty_blocks").get<std::vector<int>>();
        d.empty_blocks.assign(flags.begin(), flags.end());
        if (d.histograms.size() != d.active_blocks.size() * kBinsPerBlock ||
            d.empty_blocks.size() != d.active_blocks.size())
            throw InputError("block descriptor layout mismatch in " + path);
        return d;
    } catch (const nlohmann::json::exception& e) {
        throw InputError("malformed block descriptor JSON " + path + ": " + e.what());
    }
}

}  // namespace peri::texture
