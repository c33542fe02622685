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
#include <optional>
#include <string>
#include <vector>

#include "peri/image.hpp"

namespace peri {

/// Ground-truth circles and identity metadata for one eye image.
struct EyeAnnotation {
    std::string image_path;
    std::string subject_id;
    std::string eye;           // "L" or "R"
    int session = 0;
    std::string distance_tag;  // "D1".."D5"
    double sclera_x = 0.0, sclera_y = 0.0, sclera_r = 0.0;
    double pupil_x = 0.0, pupil_y = 0.0, pupil_r = 0.0;

    /// (subject, eye) pair; each such pair is a distinct verification user.
    std::string user_id() const { return subject_id + "/" + eye; }

    /// Throws InputError when radii/centers violate the field invariants.
    /// Image bounds are checked only when width/height are supplied.
    void validate(int img_width = 0, int img_height = 0) const;
};

/// Normative CSV header for annotation files.
extern const char* const kAnnotationCsvHeader;

/// Parse an annotation CSV. Rows that fail validation are rejected and
/// reported in `diagnostics` ("line N: reason"); throws InputError when the
/// file is missing/empty or the header does not match.
std::vector<EyeAnnotation> load_annotations(const std::string& path,
                                            std::vector<std::string>* diagnostics = nullptr);

void save_annotations(const std::vector<EyeAnnotation>& annotations,
                      const std::string& path);

struct NormalizedRoi {
    GrayImage roi;
    EyeAnnotation annotation;  // coordinates rewritten into the ROI frame
    bool padded = false;       // crop exceeded the source bounds
};

/// Rescale so the sclera radius becomes target_rs (bicubic), then crop an
/// odd-sided square of side 2*floor(3.8*target_rs)+1 with the sclera center
/// at the exact central pixel. Replicate-pads (and flags) crops that
/// exceed the image bounds.
NormalizedRoi normalize_image(const GrayImage& img, const EyeAnnotation& ann,
                              double target_rs);

/// Mean sclera radius of the annotations carrying distance_tag.
double group_target_radius(const std::vector<EyeAnnotation>& annotations,
                           const std::string& distance_tag);

struct SynthConfig {
    uint64_t seed = 1;
    int n_subjects = 10;
    int sessions = 2;
    std::vector<double> distance_scales = {1.0};
    double base_sclera_radius = 28.0;  // px at scale 1.0
    std::string out_dir;
};

/// Deterministic procedural eye-image generator. Each identity is a fixed
/// continuous scene (sclera/pupil discs, lids, brow, skin texture) rendered
/// at every requested scale with small per-session photometric and center
/// jitter. Returns the annotations; images are written as 8-bit PNGs under
/// out_dir and the annotation CSV as out_dir/annotations.csv.
std::vector<EyeAnnotation> synth_dataset(const SynthConfig& config);

}  // namespace peri
