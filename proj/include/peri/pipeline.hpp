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

#include <cstdint>
#include <string>
#include <vector>

#include "peri/dataset.hpp"
#include "peri/eval.hpp"

namespace peri::pipeline {

/// Full experiment configuration. Serialized verbatim into every report;
/// deliberately excludes execution-environment knobs (worker count) so
/// reports are bit-identical across machines/parallelism.
struct RunConfig {
    std::vector<std::string> matchers = {"safe", "lbp", "hog", "sift"};

    // SAFE
    int nf = 4;
    std::vector<double> sigmas = {1.0, 2.0, 3.0, 4.0};  // at the base distance
    double rot_range_deg = 0.0;  // rotation compensation off by default
    double rot_step_deg = 1.0;
    double clahe_clip = 0.01;
    int clahe_tiles = 8;

    // LBP/HOG
    std::string texture_metric = "chi2";  // or "euclidean"

    // SIFT
    std::string sift_norm = "min";  // or "avg"
    double lowe_ratio = 0.8;
    double geo_angle_gate_deg = 20.0;
    double geo_length_gate_frac = 0.15;

    uint64_t seed = 1;

    std::string to_json() const;
    /// Fields present in the JSON override the current values.
    void merge_json(const std::string& json_text);
};

/// normalize: per-distance-group mean sclera radius as target, ROI PNGs +
/// rewritten annotation CSV (out_dir/normalized.csv, out_dir/roi/*.png).
std::vector<EyeAnnotation> run_normalize(const std::string& annotations_csv,
                                         const std::string& out_dir, unsigned workers);

/// extract: descriptor files for the selected matchers under
/// out_dir/<matcher>/..., skipping files that already exist.
void run_extract(const std::vector<EyeAnnotation>& normalized,
                 const std::vector<std::string>& matchers, const RunConfig& config,
                 const std::string& desc_dir, unsigned workers);

struct EvalOutput {
    std::vector<EyeAnnotation> annotations;
    eval::Protocol protocol;
    std::vector<eval::ScoreSet> scoresets;
    eval::Report report;
};

/// eval: protocol + per-matcher scores (descriptors extracted on demand)
/// + EER/DET/cross-distance report. Writes report.json, per-matcher
/// scores_<matcher>.csv and det_<matcher>.csv under out_dir.
EvalOutput run_eval(const std::string& normalized_csv, const std::string& desc_dir,
                    const RunConfig& config, const std::string& out_dir,
                    unsigned workers);

/// fuse: cross-validated fusion of previously scored matchers; combos are
/// lists of matcher ids. Reads scores_<matcher>.csv from scores_dir,
/// writes report.json (fusion section populated) under out_dir.
eval::Report run_fuse(const std::string& normalized_csv, const std::string& scores_dir,
                      const std::vector<std::vector<std::string>>& combos,
                      const RunConfig& config, const std::string& out_dir);

/// Single-pair score from descriptor files (the `match` subcommand).
/// Returns (score, degenerate).
std::pair<double, bool> match_descriptor_files(const std::string& matcher,
                                               const std::string& enrol_path,
                                               const std::string& test_path,
                                               const RunConfig& config);

/// Descriptor file path for one annotation/matcher (stable naming).
std::string descriptor_path(const std::string& desc_dir, const std::string& matcher,
                            const EyeAnnotation& ann);

/// All size >= 2 subsets of the configured matchers (fusion default).
std::vector<std::vector<std::string>> all_combos(const std::vector<std::string>& matchers);

}  // namespace peri::pipeline
