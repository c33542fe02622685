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

#include "peri/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <numbers>
#include <random>
#include <sstream>

#include "peri/image_io.hpp"
#include "peri/imgproc.hpp"
#include "peri/util.hpp"

namespace peri {

const char* const kAnnotationCsvHeader =
    "image_path,subject_id,eye,session,distance_tag,"
    "sclera_x,sclera_y,sclera_r,pupil_x,pupil_y,pupil_r";

void EyeAnnotation::validate(int img_width, int img_height) const {
    if (image_path.empty()) throw InputError("annotation missing image_path");
    if (subject_id.empty()) throw InputError("annotation missing subject_id");
    if (eye != "L" && eye != "R") throw InputError("annotation eye must be L or R");
    if (!(sclera_r > 0.0) || !(pupil_r > 0.0))
        throw InputError("annotation radii must be > 0");
    if (!(pupil_r < sclera_r))
        throw InputError("pupil radius must be smaller than sclera radius");
    for (double v : {sclera_x, sclera_y, sclera_r, pupil_x, pupil_y, pupil_r})
        if (!std::isfinite(v)) throw InputError("annotation field not finite");
    if (img_width > 0 && img_height > 0) {
        if (sclera_x < 0 || sclera_x >= img_width || sclera_y < 0 || sclera_y >= img_height)
            throw InputError("sclera center outside image bounds");
        if (pupil_x < 0 || pupil_x >= img_width || pupil_y < 0 || pupil_y >= img_height)
            throw InputError("pupil center outside image bounds");
    }
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            fields.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    fields.push_back(cur);
    return fields;
}

double parse_double(const std::string& s, const char* what) {
    try {
        size_t pos = 0;
        const double v = std::stod(s, &pos);
        if (pos != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw InputError(std::string("non-numeric ") + what + ": '" + s + "'");
    }
}

int parse_int(const std::string& s, const char* what) {
    try {
        size_t pos = 0;
        const int v = std::stoi(s, &pos);
        if (pos != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw InputError(std::string("non-numeric ") + what + ": '" + s + "'");
    }
}

// --- synthetic eye scene ------------------------------------------------

uint64_t splitmix64(uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

struct Rng {
    std::mt19937_64 eng;
    explicit Rng(uint64_t seed) : eng(seed) {}
    double uniform(double a, double b) {
        return std::uniform_real_distribution<double>(a, b)(eng);
    }
    double normal(double sigma) {
        return std::normal_distribution<double>(0.0, sigma)(eng);
    }
    int integer(int a, int b) { return std::uniform_int_distribution<int>(a, b)(eng); }
};

double sstep(double t) {
    t = std::clamp(t, 0.0, 1.0);
    return t * t * (3.0 - 2.0 * t);
}

constexpr int kSkinWaves = 8;
constexpr int kWrinkles = 3;

// One identity = one continuous scene, evaluated in units of the sclera
// radius (u right, v down, origin at the sclera center). Rendering at any
// scale samples the same scene, so acquisition distances are true rescales.
struct IdentityScene {
    double rs;  // sclera radius at scale 1, px

    double brow_height, brow_curve, brow_tilt, brow_width, brow_depth;
    double brow_hair_freq, brow_hair_angle, brow_hair_amp;
    double upper_drop, upper_curve, upper_depth, upper_width;
    double crease_offset, crease_depth;
    double lower_drop, lower_curve, lower_depth;
    double iris_radius, pupil_radius, pupil_dx, pupil_dy;
    double iris_tex_amp;
    int iris_tex_freq;
    double skin_amp[kSkinWaves], skin_kx[kSkinWaves], skin_ky[kSkinWaves],
        skin_ph[kSkinWaves];
    double wr_angle[kWrinkles], wr_depth[kWrinkles];
    double wr_width;
    int corner_side;  // +1 or -1: which eye corner carries wrinkles

    static IdentityScene make(uint64_t seed, double base_rs) {
        Rng rng(seed);
        IdentityScene s{};
        s.rs = base_rs * rng.uniform(0.94, 1.06);
        s.brow_height = rng.uniform(1.55, 2.1);
        s.brow_curve = rng.uniform(0.05, 0.35);
        s.brow_tilt = rng.uniform(-0.15, 0.15);
        s.brow_width = rng.uniform(0.22, 0.42);
        s.brow_depth = rng.uniform(0.18, 0.3);
        s.brow_hair_freq = 2.0 * std::numbers::pi / rng.uniform(3.0, 6.0);  // rad/px
        s.brow_hair_angle = rng.uniform(-0.4, 0.4);
        s.brow_hair_amp = rng.uniform(0.05, 0.09);
        s.upper_drop = rng.uniform(0.55, 0.8);
        s.upper_curve = rng.uniform(0.2, 0.45);
        s.upper_depth = rng.uniform(0.12, 0.2);
        s.upper_width = rng.uniform(0.06, 0.12);
        s.crease_offset = rng.uniform(0.25, 0.45);
        s.crease_depth = rng.uniform(0.06, 0.12);
        s.lower_drop = rng.uniform(0.55, 0.75);
        s.lower_curve = rng.uniform(0.1, 0.3);
        s.lower_depth = rng.uniform(0.05, 0.12);
        s.iris_radius = rng.uniform(0.58, 0.7);
        s.pupil_radius = rng.uniform(0.3, 0.42);
        s.pupil_dx = rng.uniform(-0.05, 0.05);
        s.pupil_dy = rng.uniform(-0.05, 0.05);
        s.iris_tex_amp = rng.uniform(0.02, 0.05);
        s.iris_tex_freq = rng.integer(8, 16);
        for (int i = 0; i < kSkinWaves; ++i) {
            s.skin_amp[i] = rng.uniform(0.015, 0.05);
            const double wavelength = rng.uniform(8.0, 60.0);  // px at scale 1
            const double ang = rng.uniform(0.0, std::numbers::pi);
            s.skin_kx[i] = 2.0 * std::numbers::pi / wavelength * std::cos(ang);
            s.skin_ky[i] = 2.0 * std::numbers::pi / wavelength * std::sin(ang);
            s.skin_ph[i] = rng.uniform(0.0, 2.0 * std::numbers::pi);
        }
        s.corner_side = rng.uniform(0.0, 1.0) < 0.5 ? -1 : 1;
        for (int i = 0; i < kWrinkles; ++i) {
            s.wr_angle[i] = rng.uniform(-0.5, 0.5);
            s.wr_depth[i] = rng.uniform(0.04, 0.1);
        }
        s.wr_width = rng.uniform(0.04, 0.08);
        return s;
    }

    // u, v in sclera-radius units; returns intensity in [0,1].
    double value(double u, double v) const {
        const double ub = u * rs, vb = v * rs;  // base-pixel coordinates

        double skin = 0.58;
        for (int i = 0; i < kSkinWaves; ++i)
            skin += skin_amp[i] *
                    std::cos(skin_kx[i] * ub + skin_ky[i] * vb + skin_ph[i]);

        // Brow band with hair-like stripes.
        {
            const double line = -brow_height + brow_curve * u * u + brow_tilt * u;
            const double d = v - line;
            const double mask = std::exp(-0.5 * d * d / (brow_width * brow_width));
            skin -= brow_depth * mask;
            const double stripe = std::sin(
                brow_hair_freq * (ub * std::cos(brow_hair_angle) +
                                  vb * std::sin(brow_hair_angle)));
            skin += brow_hair_amp * stripe * mask;
        }

        // Lid lines and crease.
        const double upper = -upper_drop - upper_curve * (1.0 - u * u);
        const double lower = lower_drop + lower_curve * (1.0 - u * u);
        {
            double d = v - upper;
            skin -= upper_depth * std::exp(-0.5 * d * d / (upper_width * upper_width));
            d = v - (upper - crease_offset);
            skin -= crease_depth * std::exp(-0.5 * d * d / (upper_width * upper_width));
            d = v - lower;
            skin -= lower_depth * std::exp(-0.5 * d * d / (upper_width * upper_width));
        }

        // Corner wrinkles radiating from the outer corner.
        {
            const double cx = corner_side * 1.15, cy = 0.1;
            const double px = u - cx, py = v - cy;
            const double dist = std::hypot(px, py);
            for (int i = 0; i < kWrinkles; ++i) {
                const double ang = wr_angle[i];
                const double dirx = corner_side * std::cos(ang);
                const double diry = std::sin(ang);
                const double along = px * dirx + py * diry;
                if (along <= 0.0) continue;
                const double across = px * diry - py * dirx;
                const double falloff = std::exp(-0.5 * dist * dist / (1.2 * 1.2));
                skin -= wr_depth[i] * falloff *
                        std::exp(-0.5 * across * across / (wr_width * wr_width));
            }
        }

        // Eye opening: sclera disc between the lids, iris and pupil inside.
        const double r = std::hypot(u, v);
        const double open_mask = sstep((v - upper) / 0.08) * sstep((lower - v) / 0.08) *
                                 sstep((1.0 - r) / 0.05);
        if (open_mask <= 0.0) return std::clamp(skin, 0.0, 1.0);

        double eye = 0.93;
        const double ri = std::hypot(u - pupil_dx, v - pupil_dy);
        const double iris_mask = sstep((iris_radius - ri) / 0.03);
        if (iris_mask > 0.0) {
            const double theta = std::atan2(v - pupil_dy, u - pupil_dx);
            const double iris_val = 0.38 + iris_tex_amp * std::cos(iris_tex_freq * theta);
            eye = eye * (1.0 - iris_mask) + iris_val * iris_mask;
        }
        const double pupil_mask = sstep((pupil_radius - ri) / 0.02);
        eye = eye * (1.0 - pupil_mask) + 0.08 * pupil_mask;

        return std::clamp(skin * (1.0 - open_mask) + eye * open_mask, 0.0, 1.0);
    }
};

}  // namespace

std::vector<EyeAnnotation> load_annotations(const std::string& path,
                                            std::vector<std::string>* diagnostics) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path);
    std::string line;
    if (!std::getline(in, line)) throw InputError("empty annotation file: " + path);
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != kAnnotationCsvHeader)
        throw InputError("unexpected annotation header in " + path);

    std::vector<EyeAnnotation> out;
    size_t line_no = 1;
    bool any_row = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        any_row = true;
        try {
            const auto f = split_csv_line(line);
            if (f.size() != 11) throw InputError("expected 11 fields");
            EyeAnnotation a;
            a.image_path = f[0];
            a.subject_id = f[1];
            a.eye = f[2];
            a.session = parse_int(f[3], "session");
            a.distance_tag = f[4];
            a.sclera_x = parse_double(f[5], "sclera_x");
            a.sclera_y = parse_double(f[6], "sclera_y");
            a.sclera_r = parse_double(f[7], "sclera_r");
            a.pupil_x = parse_double(f[8], "pupil_x");
            a.pupil_y = parse_double(f[9], "pupil_y");
            a.pupil_r = parse_double(f[10], "pupil_r");
            a.validate();
            out.push_back(std::move(a));
        } catch (const Error& e) {
            if (diagnostics)
                diagnostics->push_back("line " + std::to_string(line_no) + ": " + e.what());
        }
    }
    if (!any_row) throw InputError("annotation file has no data rows: " + path);
    return out;
}

void save_annotations(const std::vector<EyeAnnotation>& annotations,
                      const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path);
    out << kAnnotationCsvHeader << "\n";
    for (const auto& a : annotations) {
        out << a.image_path << "," << a.subject_id << "," << a.eye << "," << a.session
            << "," << a.distance_tag << "," << canonical_double(a.sclera_x) << ","
            << canonical_double(a.sclera_y) << "," << canonical_double(a.sclera_r) << ","
            << canonical_double(a.pupil_x) << "," << canonical_double(a.pupil_y) << ","
            << canonical_double(a.pupil_r) << "\n";
    }
    if (!out) throw IoError("short write to " + path);
}

NormalizedRoi normalize_image(const GrayImage& img, const EyeAnnotation& ann,
                              double target_rs) {
    if (!(target_rs > 0.0)) throw ParamError("target sclera radius must be > 0");
    ann.validate(img.width, img.height);
    const double scale = target_rs / ann.sclera_r;
    if (!std::isfinite(scale) || scale <= 0.0) throw ParamError("degenerate resize scale");

    const GrayImage resized = scale == 1.0 ? img : bicubic_resize(img, scale);
    // Pixel-center mapping of source coordinates into the resized frame.
    auto map = [scale](double v) { return scale * (v + 0.5) - 0.5; };
    const int cx = static_cast<int>(std::lround(map(ann.sclera_x)));
    const int cy = static_cast<int>(std::lround(map(ann.sclera_y)));

    const int half = static_cast<int>(std::floor(3.8 * target_rs));
    const int side = 2 * half + 1;

    NormalizedRoi out;
    out.roi = GrayImage(side, side);
    out.padded = cx - half < 0 || cy - half < 0 || cx + half >= resized.width ||
                 cy + half >= resized.height;
    for (int y = 0; y < side; ++y)
        for (int x = 0; x < side; ++x)
            out.roi.at(x, y) = resized.at_clamped(cx - half + x, cy - half + y);

    out.annotation = ann;
    out.annotation.sclera_x = half;
    out.annotation.sclera_y = half;
    out.annotation.sclera_r = target_rs;
    out.annotation.pupil_x = map(ann.pupil_x) - (cx - half);
    out.annotation.pupil_y = map(ann.pupil_y) - (cy - half);
    out.annotation.pupil_r = ann.pupil_r * scale;
    return out;
}

double group_target_radius(const std::vector<EyeAnnotation>& annotations,
                           const std::string& distance_tag) {
    double sum = 0.0;
    size_t n = 0;
    for (const auto& a : annotations) {
        if (a.distance_tag != distance_tag) continue;
        sum += a.sclera_r;
        ++n;
    }
    if (n == 0) throw InputError("no annotations with distance tag " + distance_tag);
    return sum / static_cast<double>(n);
}

std::vector<EyeAnnotation> synth_dataset(const SynthConfig& config) {
    if (config.n_subjects < 2) throw ParamError("synthesis needs at least 2 subjects");
    if (config.sessions < 1) throw ParamError("synthesis needs at least 1 session");
    if (config.distance_scales.empty()) throw ParamError("no distance scales given");
    if (config.out_dir.empty()) throw ParamError("no output directory given");

    namespace fs = std::filesystem;
    const fs::path images_dir = fs::path(config.out_dir) / "images";
    std::error_code ec;
    fs::create_directories(images_dir, ec);
    if (ec) throw IoError("cannot create " + images_dir.string());

    // Base canvas leaves margin around the 7.6*Rs ROI plus jitter.
    const double base_side_units = 8.6;

    std::vector<EyeAnnotation> annotations;
    for (int subject = 0; subject < config.n_subjects; ++subject) {
        const IdentityScene scene = IdentityScene::make(
            splitmix64(config.seed ^ (0x1000 + static_cast<uint64_t>(subject))),
            config.base_sclera_radius);
        for (int session = 1; session <= config.sessions; ++session) {
            Rng srng(splitmix64(config.seed ^ (static_cast<uint64_t>(subject) << 20) ^
                                (static_cast<uint64_t>(session) << 8)));
            const double contrast = srng.uniform(0.96, 1.04);
            const double brightness = srng.uniform(-0.03, 0.03);
            const double jx = srng.uniform(-3.0, 3.0);  // px at base scale
            const double jy = srng.uniform(-3.0, 3.0);

            for (size_t d = 0; d < config.distance_scales.size(); ++d) {
                const double s = config.distance_scales[d];
                if (!(s > 0.0)) throw ParamError("distance scales must be > 0");
                const int dim = static_cast<int>(
                    std::lround(base_side_units * config.base_sclera_radius * s));
                const double center = (dim - 1) / 2.0;
                const double cx = center + jx * s;
                const double cy = center + jy * s;
                const double rs = scene.rs * s;

                GrayImage img(dim, dim);
                for (int y = 0; y < dim; ++y)
                    for (int x = 0; x < dim; ++x) {
                        const double u = (x - cx) / rs;
                        const double v = (y - cy) / rs;
                        const double val = scene.value(u, v);
                        img.at(x, y) =
                            std::clamp(0.5 + contrast * (val - 0.5) + brightness, 0.0, 1.0);
                    }
                // Per-image sensor noise.
                Rng nrng(splitmix64(config.seed ^
                                    (static_cast<uint64_t>(subject) << 32) ^
                                    (static_cast<uint64_t>(session) << 16) ^
                                    static_cast<uint64_t>(d + 1)));
                for (double& p : img.pixels)
                    p = std::clamp(p + nrng.normal(0.008), 0.0, 1.0);

                std::ostringstream name;
                name << "s" << std::setw(3) << std::setfill('0') << subject << "_L_se"
                     << session << "_D" << (d + 1) << ".png";
                const std::string path = (images_dir / name.str()).string();
                save_png_gray8(img, path);

                EyeAnnotation ann;
                ann.image_path = path;
                ann.subject_id = "s" + std::to_string(subject);
                ann.eye = "L";
                ann.session = session;
                ann.distance_tag = "D" + std::to_string(d + 1);
                ann.sclera_x = cx;
                ann.sclera_y = cy;
                ann.sclera_r = rs;
                ann.pupil_x = cx + scene.pupil_dx * rs;
                ann.pupil_y = cy + scene.pupil_dy * rs;
                ann.pupil_r = scene.pupil_radius * rs;
                ann.validate(dim, dim);
                annotations.push_back(std::move(ann));
            }
        }
    }
    save_annotations(annotations, (fs::path(config.out_dir) / "annotations.csv").string());
    return annotations;
}

}  // namespace peri
