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

#include "peri/sift.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>

#include "json.hpp"
#include "peri/imgproc.hpp"
#include "peri/simd/kernels.hpp"

namespace peri::sift {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr int kOriBins = 36;
constexpr int kDescWidth = 4;   // 4x4 cells
constexpr int kDescBins = 8;    // orientation bins per cell
constexpr int kSamples = 16;    // 16x16 sample window
constexpr double kSampleSpacing = 0.75;  // in units of the keypoint scale

struct Octave {
    std::vector<GrayImage> gauss;  // layers_per_octave + 3
    std::vector<GrayImage> dog;    // layers_per_octave + 2
};

struct Pyramid {
    std::vector<Octave> octaves;
    std::vector<double> layer_sigma;  // octave-relative sigma per gauss layer
};

GrayImage downsample2(const GrayImage& img) {
    GrayImage out(img.width / 2, img.height / 2);
    for (int y = 0; y < out.height; ++y)
        for (int x = 0; x < out.width; ++x) out.at(x, y) = img.at(2 * x, 2 * y);
    return out;
}

Pyramid build_pyramid(const GrayImage& img, const SiftConfig& cfg) {
    const int s = cfg.layers_per_octave;
    const double k = std::pow(2.0, 1.0 / s);

    Pyramid pyr;
    pyr.layer_sigma.resize(s + 3);
    for (int l = 0; l < s + 3; ++l) pyr.layer_sigma[l] = cfg.sigma0 * std::pow(k, l);

    // Incremental blur amounts between consecutive layers.
    std::vector<double> inc(s + 3, 0.0);
    const double base = std::sqrt(std::max(
        0.0, cfg.sigma0 * cfg.sigma0 - cfg.assumed_input_blur * cfg.assumed_input_blur));
    for (int l = 1; l < s + 3; ++l) {
        const double prev = pyr.layer_sigma[l - 1];
        const double cur = pyr.layer_sigma[l];
        inc[l] = std::sqrt(cur * cur - prev * prev);
    }

    GrayImage current = gaussian_blur(img, base);
    while (std::min(current.width, current.height) >= cfg.min_octave_side) {
        Octave oct;
        oct.gauss.reserve(s + 3);
        oct.gauss.push_back(std::move(current));
        for (int l = 1; l < s + 3; ++l)
            oct.gauss.push_back(gaussian_blur(oct.gauss[l - 1], inc[l]));
        oct.dog.reserve(s + 2);
        for (int l = 0; l < s + 2; ++l) {
            GrayImage d(oct.gauss[l].width, oct.gauss[l].height);
            for (size_t i = 0; i < d.pixels.size(); ++i)
                d.pixels[i] = oct.gauss[l + 1].pixels[i] - oct.gauss[l].pixels[i];
            oct.dog.push_back(std::move(d));
        }
        // Next octave starts from the layer at 2*sigma0.
        current = downsample2(oct.gauss[s]);
        pyr.octaves.push_back(std::move(oct));
    }
    return pyr;
}

bool is_extremum(const Octave& oct, int l, int x, int y) {
    const double v = oct.dog[l].at(x, y);
    bool is_max = true, is_min = true;
    for (int dl = -1; dl <= 1; ++dl) {
        for (int dy = -1; dy <= 1; ++dy) {
            for (int dx = -1; dx <= 1; ++dx) {
                if (dl == 0 && dy == 0 && dx == 0) continue;
                const double n = oct.dog[l + dl].at(x + dx, y + dy);
                if (n >= v) is_max = false;
                if (n <= v) is_min = false;
                if (!is_max && !is_min) return false;
            }
        }
    }
    return is_max || is_min;
}

// One Newton step on the 3D quadratic fit around (x, y, l).
bool refine_step(const Octave& oct, int l, int x, int y, std::array<double, 3>& offset,
                 double& refined_value) {
    const auto& d0 = oct.dog[l - 1];
    const auto& d1 = oct.dog[l];
    const auto& d2 = oct.dog[l + 1];
    const double v = d1.at(x, y);

    const double gx = 0.5 * (d1.at(x + 1, y) - d1.at(x - 1, y));
    const double gy = 0.5 * (d1.at(x, y + 1) - d1.at(x, y - 1));
    const double gs = 0.5 * (d2.at(x, y) - d0.at(x, y));

    const double dxx = d1.at(x + 1, y) + d1.at(x - 1, y) - 2.0 * v;
    const double dyy = d1.at(x, y + 1) + d1.at(x, y - 1) - 2.0 * v;
    const double dss = d2.at(x, y) + d0.at(x, y) - 2.0 * v;
    const double dxy = 0.25 * (d1.at(x + 1, y + 1) - d1.at(x - 1, y + 1) -
                               d1.at(x + 1, y - 1) + d1.at(x - 1, y - 1));
    const double dxs = 0.25 * (d2.at(x + 1, y) - d2.at(x - 1, y) - d0.at(x + 1, y) +
                               d0.at(x - 1, y));
    const double dys = 0.25 * (d2.at(x, y + 1) - d2.at(x, y - 1) - d0.at(x, y + 1) +
                               d0.at(x, y - 1));

    // Solve H * offset = -g by Cramer's rule.
    const double det = dxx * (dyy * dss - dys * dys) - dxy * (dxy * dss - dys * dxs) +
                       dxs * (dxy * dys - dyy * dxs);
    if (std::fabs(det) < 1e-30) return false;
    const double bx = -gx, by = -gy, bs = -gs;
    offset[0] = (bx * (dyy * dss - dys * dys) - dxy * (by * dss - dys * bs) +
                 dxs * (by * dys - dyy * bs)) /
                det;
    offset[1] = (dxx * (by * dss - dys * bs) - bx * (dxy * dss - dys * dxs) +
                 dxs * (dxy * bs - by * dxs)) /
                det;
    offset[2] = (dxx * (dyy * bs - by * dys) - dxy * (dxy * bs - by * dxs) +
                 bx * (dxy * dys - dyy * dxs)) /
                det;
    refined_value = v + 0.5 * (gx * offset[0] + gy * offset[1] + gs * offset[2]);
    return true;
}

bool passes_edge_test(const GrayImage& dog, int x, int y, double edge_ratio) {
    const double v = dog.at(x, y);
    const double dxx = dog.at(x + 1, y) + dog.at(x - 1, y) - 2.0 * v;
    const double dyy = dog.at(x, y + 1) + dog.at(x, y - 1) - 2.0 * v;
    const double dxy = 0.25 * (dog.at(x + 1, y + 1) - dog.at(x - 1, y + 1) -
                               dog.at(x + 1, y - 1) + dog.at(x - 1, y - 1));
    const double tr = dxx + dyy;
    const double det = dxx * dyy - dxy * dxy;
    if (det <= 0.0) return false;
    const double r = edge_ratio;
    return tr * tr / det < (r + 1.0) * (r + 1.0) / r;
}

// Dominant gradient orientations around (x, y) on one gaussian layer.
std::vector<double> dominant_orientations(const GrayImage& g, double x, double y,
                                          double sigma_oct, double peak_ratio) {
    const double weight_sigma = 1.5 * sigma_oct;
    const int radius = std::max(1, static_cast<int>(std::lround(3.0 * weight_sigma)));
    std::array<double, kOriBins> hist{};

    const int cx = static_cast<int>(std::lround(x));
    const int cy = static_cast<int>(std::lround(y));
    for (int dy = -radius; dy <= radius; ++dy) {
        const int py = cy + dy;
        if (py < 1 || py >= g.height - 1) continue;
        for (int dx = -radius; dx <= radius; ++dx) {
            const int px = cx + dx;
            if (px < 1 || px >= g.width - 1) continue;
            const double gx = g.at(px + 1, py) - g.at(px - 1, py);
            const double gy = g.at(px, py + 1) - g.at(px, py - 1);
            const double mag = std::sqrt(gx * gx + gy * gy);
            if (mag == 0.0) continue;
            const double w =
                std::exp(-0.5 * (dx * dx + dy * dy) / (weight_sigma * weight_sigma));
            double ang = std::atan2(gy, gx);
            if (ang < 0.0) ang += kTwoPi;
            int bin = static_cast<int>(ang / kTwoPi * kOriBins);
            if (bin >= kOriBins) bin = kOriBins - 1;
            hist[bin] += w * mag;
        }
    }

    // Two circular box-smoothing passes.
    for (int pass = 0; pass < 2; ++pass) {
        std::array<double, kOriBins> sm{};
        for (int b = 0; b < kOriBins; ++b) {
            sm[b] = (hist[(b + kOriBins - 1) % kOriBins] + hist[b] +
                     hist[(b + 1) % kOriBins]) /
                    3.0;
        }
        hist = sm;
    }

    const double maxv = *std::max_element(hist.begin(), hist.end());
    std::vector<double> result;
    if (maxv <= 0.0) return result;
    for (int b = 0; b < kOriBins; ++b) {
        const double l = hist[(b + kOriBins - 1) % kOriBins];
        const double c = hist[b];
        const double r = hist[(b + 1) % kOriBins];
        if (c >= peak_ratio * maxv && c > l && c > r) {
            // Parabolic peak interpolation.
            const double shift = 0.5 * (l - r) / (l - 2.0 * c + r);
            double ang = (b + 0.5 + shift) / kOriBins * kTwoPi;
            if (ang < 0.0) ang += kTwoPi;
            if (ang >= kTwoPi) ang -= kTwoPi;
            result.push_back(ang);
        }
    }
    return result;
}

// Bilinear gradient sample; returns false next to the border.
bool sample_gradient(const GrayImage& g, double x, double y, double& gx, double& gy) {
    const int x0 = static_cast<int>(std::floor(x));
    const int y0 = static_cast<int>(std::floor(y));
    if (x0 < 1 || y0 < 1 || x0 + 1 >= g.width - 1 || y0 + 1 >= g.height - 1) return false;
    const double fx = x - x0;
    const double fy = y - y0;
    auto grad = [&](int px, int py, double& ox, double& oy) {
        ox = 0.5 * (g.at(px + 1, py) - g.at(px - 1, py));
        oy = 0.5 * (g.at(px, py + 1) - g.at(px, py - 1));
    };
    double g00x, g00y, g10x, g10y, g01x, g01y, g11x, g11y;
    grad(x0, y0, g00x, g00y);
    grad(x0 + 1, y0, g10x, g10y);
    grad(x0, y0 + 1, g01x, g01y);
    grad(x0 + 1, y0 + 1, g11x, g11y);
    gx = (1 - fy) * ((1 - fx) * g00x + fx * g10x) + fy * ((1 - fx) * g01x + fx * g11x);
    gy = (1 - fy) * ((1 - fx) * g00y + fx * g10y) + fy * ((1 - fx) * g01y + fx * g11y);
    return true;
}

// 4x4x8 descriptor from a 16x16 rotated sample grid. Returns false when
// the window leaves the usable image area.
bool describe_keypoint(const GrayImage& g, const SiftKeypoint& kp, double x_oct,
                       double y_oct, const SiftConfig& cfg, std::vector<double>& desc) {
    const double spacing = kSampleSpacing * kp.layer_scale;
    const double ct = std::cos(kp.orientation);
    const double st = std::sin(kp.orientation);
    const double half_window = kSamples / 2.0;  // Gaussian sigma, sample units

    // Reject windows whose rotated extent leaves the image interior.
    const double extent = spacing * half_window * std::numbers::sqrt2 + 1.0;
    if (x_oct - extent < 1.0 || y_oct - extent < 1.0 || x_oct + extent >= g.width - 2.0 ||
        y_oct + extent >= g.height - 2.0)
        return false;

    std::array<double, kDescWidth * kDescWidth * kDescBins> acc{};
    for (int i = 0; i < kSamples; ++i) {
        for (int j = 0; j < kSamples; ++j) {
            const double u = j - (kSamples - 1) / 2.0;  // sample units
            const double v = i - (kSamples - 1) / 2.0;
            const double px = x_oct + spacing * (ct * u - st * v);
            const double py = y_oct + spacing * (st * u + ct * v);
            double gx, gy;
            if (!sample_gradient(g, px, py, gx, gy)) return false;
            const double mag = std::sqrt(gx * gx + gy * gy);
            if (mag == 0.0) continue;
            const double w = std::exp(-0.5 * (u * u + v * v) / (half_window * half_window));

            // Gradient angle relative to the keypoint orientation.
            double ang = std::atan2(gy, gx) - kp.orientation;
            while (ang < 0.0) ang += kTwoPi;
            while (ang >= kTwoPi) ang -= kTwoPi;

            // Continuous cell coordinates and orientation bin.
            const double cu = (u + half_window) / kSamples * kDescWidth - 0.5;
            const double cv = (v + half_window) / kSamples * kDescWidth - 0.5;
            const double co = ang / kTwoPi * kDescBins;
            const int u0 = static_cast<int>(std::floor(cu));
            const int v0 = static_cast<int>(std::floor(cv));
            const int o0 = static_cast<int>(std::floor(co)) % kDescBins;
            const double fu = cu - std::floor(cu);
            const double fv = cv - std::floor(cv);
            const double fo = co - std::floor(co);

            for (int du = 0; du < 2; ++du) {
                const int cu_i = u0 + du;
                if (cu_i < 0 || cu_i >= kDescWidth) continue;
                const double wu = du ? fu : 1.0 - fu;
                for (int dv = 0; dv < 2; ++dv) {
                    const int cv_i = v0 + dv;
                    if (cv_i < 0 || cv_i >= kDescWidth) continue;
                    const double wv = dv ? fv : 1.0 - fv;
                    for (int dk = 0; dk < 2; ++dk) {
                        const int o_i = (o0 + dk) % kDescBins;
                        const double wo = dk ? fo : 1.0 - fo;
                        acc[(static_cast<size_t>(cv_i) * kDescWidth + cu_i) * kDescBins +
                            o_i] += w * mag * wu * wv * wo;
                    }
                }
            }
        }
    }

    // L2 normalize, clamp, renormalize.
    desc.assign(acc.begin(), acc.end());
    double norm = std::sqrt(simd::dot(desc.data(), desc.data(), desc.size()));
    if (norm == 0.0) return false;
    for (double& d : desc) d = std::min(d / norm, cfg.descriptor_clamp);
    norm = std::sqrt(simd::dot(desc.data(), desc.data(), desc.size()));
    if (norm == 0.0) return false;
    for (double& d : desc) d /= norm;
    return true;
}

std::vector<SiftKeypoint> detect_on_pyramid(const Pyramid& pyr, const SiftConfig& cfg) {
    const int s = cfg.layers_per_octave;
    std::vector<SiftKeypoint> keypoints;
    const double prelim = 0.5 * cfg.contrast_threshold;

    for (size_t o = 0; o < pyr.octaves.size(); ++o) {
        const Octave& oct = pyr.octaves[o];
        const double octave_scale = static_cast<double>(1 << o);
        const int w = oct.dog[0].width;
        const int h = oct.dog[0].height;
        for (int l = 1; l <= s; ++l) {
            for (int y = 1; y < h - 1; ++y) {
                for (int x = 1; x < w - 1; ++x) {
                    if (std::fabs(oct.dog[l].at(x, y)) < prelim) continue;
                    if (!is_extremum(oct, l, x, y)) continue;

                    // Iterative subpixel refinement.
                    int cl = l, cx = x, cy = y;
                    std::array<double, 3> off{};
                    double refined = 0.0;
                    bool ok = false;
                    for (int it = 0; it < 5; ++it) {
                        if (!refine_step(oct, cl, cx, cy, off, refined)) break;
                        if (std::fabs(off[0]) < 0.5 && std::fabs(off[1]) < 0.5 &&
                            std::fabs(off[2]) < 0.5) {
                            ok = true;
                            break;
                        }
                        cx += static_cast<int>(std::lround(off[0]));
                        cy += static_cast<int>(std::lround(off[1]));
                        cl += static_cast<int>(std::lround(off[2]));
                        if (cl < 1 || cl > s || cx < 1 || cx >= w - 1 || cy < 1 ||
                            cy >= h - 1) {
                            break;
                        }
                    }
                    if (!ok) continue;
                    if (std::fabs(refined) < cfg.contrast_threshold) continue;
                    if (!passes_edge_test(oct.dog[cl], cx, cy, cfg.edge_ratio)) continue;

                    const double x_oct = cx + off[0];
                    const double y_oct = cy + off[1];
                    const double layer_scale =
                        cfg.sigma0 * std::pow(2.0, (cl + off[2]) / s);

                    // Orientation from the gaussian layer closest in scale.
                    const int gl = std::clamp(
                        static_cast<int>(std::lround(cl + off[2])), 0, s + 2);
                    const auto angles = dominant_orientations(
                        oct.gauss[gl], x_oct, y_oct, layer_scale,
                        cfg.orientation_peak_ratio);
                    for (double ang : angles) {
                        SiftKeypoint kp;
                        kp.x = x_oct * octave_scale;
                        kp.y = y_oct * octave_scale;
                        kp.scale = layer_scale * octave_scale;
                        kp.orientation = ang;
                        kp.octave = static_cast<int>(o);
                        kp.layer = gl;
                        kp.layer_scale = layer_scale;
                        keypoints.push_back(std::move(kp));
                    }
                }
            }
        }
    }
    return keypoints;
}

std::vector<SiftKeypoint> describe_on_pyramid(const Pyramid& pyr,
                                              std::vector<SiftKeypoint> kps,
                                              const SiftConfig& cfg, size_t* dropped) {
    std::vector<SiftKeypoint> out;
    out.reserve(kps.size());
    size_t n_dropped = 0;
    for (auto& kp : kps) {
        if (kp.octave < 0 || kp.octave >= static_cast<int>(pyr.octaves.size())) {
            ++n_dropped;
            continue;
        }
        const Octave& oct = pyr.octaves[kp.octave];
        const int gl = std::clamp(kp.layer, 0, static_cast<int>(oct.gauss.size()) - 1);
        const double octave_scale = static_cast<double>(1 << kp.octave);
        const double x_oct = kp.x / octave_scale;
        const double y_oct = kp.y / octave_scale;
        std::vector<double> desc;
        if (describe_keypoint(oct.gauss[gl], kp, x_oct, y_oct, cfg, desc)) {
            kp.descriptor = std::move(desc);
            out.push_back(std::move(kp));
        } else {
            ++n_dropped;
        }
    }
    if (dropped) *dropped = n_dropped;
    return out;
}

double wrap_angle(double a) {
    while (a > kPi) a -= kTwoPi;
    while (a < -kPi) a += kTwoPi;
    return a;
}

// Lower-middle element; deterministic for even counts.
double median_of(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    return v[(v.size() - 1) / 2];
}

}  // namespace

DetectResult detect_keypoints(const GrayImage& img, const SiftConfig& cfg) {
    DetectResult result;
    if (img.width < 32 || img.height < 32) {
        result.image_too_small = true;
        return result;
    }
    const Pyramid pyr = build_pyramid(img, cfg);
    result.keypoints = detect_on_pyramid(pyr, cfg);
    return result;
}

std::vector<SiftKeypoint> compute_descriptors(const GrayImage& img,
                                              std::vector<SiftKeypoint> keypoints,
                                              const SiftConfig& cfg, size_t* dropped) {
    if (keypoints.empty()) {
        if (dropped) *dropped = 0;
        return {};
    }
    const Pyramid pyr = build_pyramid(img, cfg);
    return describe_on_pyramid(pyr, std::move(keypoints), cfg, dropped);
}

std::vector<SiftKeypoint> extract(const GrayImage& img, const SiftConfig& cfg,
                                  bool* too_small) {
    if (too_small) *too_small = false;
    if (img.width < 32 || img.height < 32) {
        if (too_small) *too_small = true;
        return {};
    }
    const Pyramid pyr = build_pyramid(img, cfg);
    auto kps = detect_on_pyramid(pyr, cfg);
    return describe_on_pyramid(pyr, std::move(kps), cfg, nullptr);
}

std::vector<MatchPair> match_keypoints(const std::vector<SiftKeypoint>& a,
                                       const std::vector<SiftKeypoint>& b,
                                       double lowe_ratio) {
    std::vector<MatchPair> candidates;
    if (a.empty() || b.empty()) return candidates;

    for (int i = 0; i < static_cast<int>(a.size()); ++i) {
        const auto& da = a[i].descriptor;
        if (da.size() != kDescriptorSize) continue;
        int best = -1;
        double d1 = std::numeric_limits<double>::infinity();
        std::vector<double> dists(b.size(), std::numeric_limits<double>::infinity());
        for (int j = 0; j < static_cast<int>(b.size()); ++j) {
            const auto& db = b[j].descriptor;
            if (db.size() != kDescriptorSize) continue;
            dists[j] = simd::l2sq(da.data(), db.data(), kDescriptorSize);
            if (dists[j] < d1) {
                d1 = dists[j];
                best = j;
            }
        }
        if (best < 0) continue;
        // Second-nearest among candidates at a different location than the
        // winner (duplicate-orientation keypoints must not veto the match).
        double d2 = std::numeric_limits<double>::infinity();
        for (int j = 0; j < static_cast<int>(b.size()); ++j) {
            if (j == best) continue;
            if (std::fabs(b[j].x - b[best].x) < 1e-9 &&
                std::fabs(b[j].y - b[best].y) < 1e-9)
                continue;
            d2 = std::min(d2, dists[j]);
        }
        // Ratio test on squared distances; d2 = inf (no rival) passes.
        if (std::isfinite(d2) && !(d1 < lowe_ratio * lowe_ratio * d2)) continue;
        candidates.push_back({i, best, std::sqrt(d1)});
    }

    // One-to-one greedy assignment by ascending distance.
    std::sort(candidates.begin(), candidates.end(), [](const MatchPair& l, const MatchPair& r) {
        if (l.distance != r.distance) return l.distance < r.distance;
        if (l.a != r.a) return l.a < r.a;
        return l.b < r.b;
    });
    std::vector<bool> used_a(a.size(), false), used_b(b.size(), false);
    std::vector<MatchPair> out;
    for (const auto& c : candidates) {
        if (used_a[c.a] || used_b[c.b]) continue;
        used_a[c.a] = used_b[c.b] = true;
        out.push_back(c);
    }
    return out;
}

std::vector<MatchPair> geometric_filter(const std::vector<MatchPair>& pairs,
                                        const std::vector<SiftKeypoint>& a,
                                        const std::vector<SiftKeypoint>& b,
                                        int width_a, int height_a, int width_b,
                                        int height_b, double angle_gate_deg,
                                        double length_gate_frac) {
    if (pairs.empty()) return {};
    const double diag_a = std::hypot(width_a, height_a);
    const double diag_b = std::hypot(width_b, height_b);
    const double length_gate = length_gate_frac * 0.5 * (diag_a + diag_b);
    const double angle_gate = angle_gate_deg * kPi / 180.0;

    std::vector<MatchPair> current = pairs;
    // Iterate to a fixpoint so the filter is idempotent on its own output.
    while (current.size() > 1) {
        std::vector<double> angles, lengths;
        angles.reserve(current.size());
        lengths.reserve(current.size());
        for (const auto& p : current) {
            const double dx = b[p.b].x - a[p.a].x;
            const double dy = b[p.b].y - a[p.a].y;
            angles.push_back(std::atan2(dy, dx));
            lengths.push_back(std::hypot(dx, dy));
        }
        const double med_angle = median_of(angles);
        const double med_length = median_of(lengths);

        std::vector<MatchPair> kept;
        kept.reserve(current.size());
        for (size_t i = 0; i < current.size(); ++i) {
            if (std::fabs(wrap_angle(angles[i] - med_angle)) <= angle_gate &&
                std::fabs(lengths[i] - med_length) <= length_gate)
                kept.push_back(current[i]);
        }
        if (kept.size() == current.size()) break;
        current = std::move(kept);
    }
    return current;
}

SiftScore sift_score(size_t n_pairs, size_t n_a, size_t n_b, SiftNorm norm) {
    if (n_a == 0 || n_b == 0) return {0.0, true};
    const double denom = norm == SiftNorm::min
                             ? static_cast<double>(std::min(n_a, n_b))
                             : 0.5 * static_cast<double>(n_a + n_b);
    return {static_cast<double>(n_pairs) / denom, false};
}

void save_keypoints(const std::vector<SiftKeypoint>& kps, int width, int height,
                    const std::string& path) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& kp : kps) {
        arr.push_back({{"x", kp.x},
                       {"y", kp.y},
                       {"scale", kp.scale},
                       {"orientation", kp.orientation},
                       {"desc", kp.descriptor}});
    }
    nlohmann::json j{{"matcher", "sift"},
                     {"count", kps.size()},
                     {"image_width", width},
                     {"image_height", height},
                     {"keypoints", std::move(arr)}};
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path);
    out << j.dump() << "\n";
    if (!out) throw IoError("short write to " + path);
}

std::vector<SiftKeypoint> load_keypoints(const std::string& path, int* width, int* height) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path);
    try {
        nlohmann::json j;
        in >> j;
        if (j.at("matcher") != "sift") throw InputError("not a sift keypoint file: " + path);
        if (width) *width = j.value("image_width", 0);
        if (height) *height = j.value("image_height", 0);
        std::vector<SiftKeypoint> kps;
        for (const auto& e : j.at("keypoints")) {
            SiftKeypoint kp;
            kp.x = e.at("x").get<double>();
            kp.y = e.at("y").get<double>();
            kp.scale = e.at("scale").get<double>();
            kp.orientation = e.at("orientation").get<double>();
            kp.descriptor = e.at("desc").get<std::vector<double>>();
            if (kp.descriptor.size() != kDescriptorSize)
                throw InputError("descriptor length mismatch in " + path);
            kps.push_back(std::move(kp));
        }
        if (j.at("count").get<size_t>() != kps.size())
            throw InputError("keypoint count mismatch in " + path);
        return kps;
    } catch (const nlohmann::json::exception& e) {
        throw InputError("malformed keypoint JSON " + path + ": " + e.what());
    }
}

}  // namespace peri::sift
