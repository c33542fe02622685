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

namespace peri::sift {

inline constexpr int kDescriptorSize = 128;  // 4 x 4 cells x 8 bins

struct SiftKeypoint {
    double x = 0.0, y = 0.0;     // input-image coordinates, subpixel
    double scale = 0.0;          // absolute sigma
    double orientation = 0.0;    // radians
    std::vector<double> descriptor;  // 128 values once described

    // Pyramid bookkeeping used by compute_descriptors.
    int octave = 0;
    int layer = 0;
    double layer_scale = 0.0;  // sigma in octave coordinates
};

struct SiftConfig {
    int layers_per_octave = 3;
    double sigma0 = 1.6;
    double assumed_input_blur = 0.5;
    double contrast_threshold = 0.03;
    double edge_ratio = 10.0;
    double orientation_peak_ratio = 0.8;
    double lowe_ratio = 0.8;
    double descriptor_clamp = 0.2;
    int min_octave_side = 16;
    // Geometric outlier gates (stand-ins; thresholds are configuration).
    double angle_gate_deg = 20.0;
    double length_gate_frac = 0.15;
};

struct DetectResult {
    std::vector<SiftKeypoint> keypoints;
    bool image_too_small = false;  // <32x32 input: empty list, flagged
};

/// DoG scale-space extrema (3 layers/octave, subpixel refinement,
/// contrast and edge-ratio gates) with dominant gradient orientations;
/// histogram peaks >= 0.8*max spawn duplicate keypoints.
DetectResult detect_keypoints(const GrayImage& img, const SiftConfig& cfg = {});

/// 4x4x8 gradient-orientation descriptors from a 16x16 sample window at
/// the keypoint's scale, rotated to its orientation; trilinear binning,
/// Gaussian weighting (sigma = half window), L2-normalize / clamp 0.2 /
/// renormalize. Keypoints whose window leaves the image are dropped;
/// their count is reported through dropped (optional).
std::vector<SiftKeypoint> compute_descriptors(const GrayImage& img,
                                              std::vector<SiftKeypoint> keypoints,
                                              const SiftConfig& cfg = {},
                                              size_t* dropped = nullptr);

/// detect + describe sharing one pyramid.
std::vector<SiftKeypoint> extract(const GrayImage& img, const SiftConfig& cfg = {},
                                  bool* too_small = nullptr);

struct MatchPair {
    int a = 0;
    int b = 0;
    double distance = 0.0;
};

/// Nearest-neighbor matching with the Lowe ratio test; candidates at
/// the nearest neighbor's location are exempt from serving as the
/// second-nearest (multi-orientation duplicates). One-to-one greedy by
/// ascending distance.
std::vector<MatchPair> match_keypoints(const std::vector<SiftKeypoint>& a,
                                       const std::vector<SiftKeypoint>& b,
                                       double lowe_ratio = 0.8);

/// Keep pairs whose displacement stays within angle_gate_deg of the median
/// displacement angle and within length_gate_frac * mean image diagonal of
/// the median displacement length; iterated to a fixpoint so the filter is
/// idempotent. A single pair passes trivially.
std::vector<MatchPair> geometric_filter(const std::vector<MatchPair>& pairs,
                                        const std::vector<SiftKeypoint>& a,
                                        const std::vector<SiftKeypoint>& b,
                                        int width_a, int height_a, int width_b,
                                        int height_b, double angle_gate_deg = 20.0,
                                        double length_gate_frac = 0.15);

enum class SiftNorm { min, avg };

struct SiftScore {
    double value = 0.0;
    bool degenerate = false;  // an image had zero keypoints
};

/// Matched-pair count normalized by min or average keypoint count.
SiftScore sift_score(size_t n_pairs, size_t n_a, size_t n_b, SiftNorm norm);

/// Keypoint file round-trip (JSON).
void save_keypoints(const std::vector<SiftKeypoint>& kps, int width, int height,
                    const std::string& path);
std::vector<SiftKeypoint> load_keypoints(const std::string& path, int* width = nullptr,
                                         int* height = nullptr);

}  // namespace peri::sift
