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

#include "peri/imgproc.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

#include "peri/simd/kernels.hpp"

namespace peri {

namespace {

constexpr int kHistBins = 256;

inline int intensity_bin(double v) {
    int b = static_cast<int>(v * kHistBins);
    return std::clamp(b, 0, kHistBins - 1);
}

// Keys cubic-convolution kernel, a = -0.5 (linear signals reproduced exactly).
inline double cubic_weight(double t) {
    constexpr double a = -0.5;
    t = std::fabs(t);
    if (t <= 1.0) return ((a + 2.0) * t - (a + 3.0)) * t * t + 1.0;
    if (t < 2.0) return ((a * t - 5.0 * a) * t + 8.0 * a) * t - 4.0 * a;
    return 0.0;
}

inline double bicubic_sample(const GrayImage& img, double sx, double sy) {
    const int bx = static_cast<int>(std::floor(sx));
    const int by = static_cast<int>(std::floor(sy));
    const double fx = sx - bx;
    const double fy = sy - by;
    std::array<double, 4> wx{cubic_weight(fx + 1.0), cubic_weight(fx),
                             cubic_weight(fx - 1.0), cubic_weight(fx - 2.0)};
    std::array<double, 4> wy{cubic_weight(fy + 1.0), cubic_weight(fy),
                             cubic_weight(fy - 1.0), cubic_weight(fy - 2.0)};
    double v = 0.0;
    for (int j = 0; j < 4; ++j) {
        double rowv = 0.0;
        for (int i = 0; i < 4; ++i) {
            rowv += wx[i] * img.at_clamped(bx - 1 + i, by - 1 + j);
        }
        v += wy[j] * rowv;
    }
    return v;
}

// Replicate-padded copy with margin r on every side.
GrayImage padded_replicate(const GrayImage& img, int r) {
    GrayImage out(img.width + 2 * r, img.height + 2 * r);
    for (int y = 0; y < out.height; ++y) {
        for (int x = 0; x < out.width; ++x) {
            out.at(x, y) = img.at_clamped(x - r, y - r);
        }
    }
    return out;
}

std::vector<double> padded_interleaved(const ComplexField& f, int r) {
    const int pw = f.width + 2 * r;
    const int ph = f.height + 2 * r;
    std::vector<double> out(2 * static_cast<size_t>(pw) * ph);
    for (int y = 0; y < ph; ++y) {
        for (int x = 0; x < pw; ++x) {
            const int sx = std::clamp(x - r, 0, f.width - 1);
            const int sy = std::clamp(y - r, 0, f.height - 1);
            const auto v = f.at(sx, sy);
            const size_t o = 2 * (static_cast<size_t>(y) * pw + x);
            out[o] = v.real();
            out[o + 1] = v.imag();
        }
    }
    return out;
}

// 1D analytic Gaussian and first-derivative-carrier samples at integer
// offsets, unit-mass continuous normalization.
void gauss_1d(double sigma, int radius, std::vector<double>& g,
              std::vector<double>& tg) {
    const double norm = 1.0 / (std::sqrt(2.0 * std::numbers::pi) * sigma);
    g.resize(2 * radius + 1);
    tg.resize(2 * radius + 1);
    for (int t = -radius; t <= radius; ++t) {
        const double v = norm * std::exp(-0.5 * t * t / (sigma * sigma));
        g[t + radius] = v;
        tg[t + radius] = t * v;
    }
}

// Two row correlations along x sharing the padded input, replicate border:
// out_i(x,y) = sum_u k_i[u] * in(x+u, y).
void correlate_rows2(const GrayImage& img, const std::vector<double>& k0,
                     const std::vector<double>& k1, GrayImage& out0,
                     GrayImage& out1) {
    const int r = (static_cast<int>(k0.size()) - 1) / 2;
    GrayImage padded = padded_replicate(img, r);
    out0 = GrayImage(img.width, img.height);
    out1 = GrayImage(img.width, img.height);
    for (int y = 0; y < img.height; ++y) {
        const double* prow = padded.row(y + r);
        for (int x = 0; x < img.width; ++x) {
            const auto d = simd::dot2(prow + x, k0.data(), k1.data(), k0.size());
            out0.at(x, y) = d.a;
            out1.at(x, y) = d.b;
        }
    }
}

// Correlation along y via row axpy accumulation, replicate border.
GrayImage correlate_cols(const GrayImage& img, const std::vector<double>& k) {
    const int r = (static_cast<int>(k.size()) - 1) / 2;
    GrayImage out(img.width, img.height);
    for (int y = 0; y < img.height; ++y) {
        double* orow = out.row(y);
        for (int t = -r; t <= r; ++t) {
            const int sy = std::clamp(y + t, 0, img.height - 1);
            simd::axpy(k[t + r], img.row(sy), orow, img.width);
        }
    }
    return out;
}

}  // namespace

GrayImage to_grayscale(const Raster& raster) {
    if (raster.empty() || raster.samples.empty())
        throw InputError("empty raster");
    const double maxval = raster.bit_depth == 16 ? 65535.0 : 255.0;
    GrayImage out(raster.width, raster.height);
    const int c = raster.channels;
    const uint16_t* s = raster.samples.data();
    for (size_t p = 0; p < out.pixels.size(); ++p, s += c) {
        double v;
        if (c >= 3) {
            v = (0.299 * s[0] + 0.587 * s[1] + 0.114 * s[2]) / maxval;
        } else {
            v = s[0] / maxval;
        }
        out.pixels[p] = std::clamp(v, 0.0, 1.0);
    }
    return out;
}

GrayImage clahe(const GrayImage& img, double clip_limit, int tiles_x, int tiles_y) {
    if (img.empty()) throw InputError("empty image");
    if (clip_limit <= 0.0) throw ParamError("clahe clip limit must be > 0");
    if (tiles_x < 1 || tiles_y < 1) throw ParamError("clahe tile grid must be >= 1x1");

    // Tiles are sized to cover the image exactly after replicate padding.
    const int tw = (img.width + tiles_x - 1) / tiles_x;
    const int th = (img.height + tiles_y - 1) / tiles_y;
    const double tile_pixels = static_cast<double>(tw) * th;
    const double clip_count = clip_limit * tile_pixels;

    // Per-tile clipped inclusive-CDF mappings (replicate-padded sampling).
    std::vector<std::array<double, kHistBins>> mapping(
        static_cast<size_t>(tiles_x) * tiles_y);
    for (int ty = 0; ty < tiles_y; ++ty) {
        for (int tx = 0; tx < tiles_x; ++tx) {
            std::array<double, kHistBins> hist{};
            for (int y = ty * th; y < (ty + 1) * th; ++y)
                for (int x = tx * tw; x < (tx + 1) * tw; ++x)
                    hist[intensity_bin(img.at_clamped(x, y))] += 1.0;
            double excess = 0.0;
            for (double& hb : hist) {
                if (hb > clip_count) {
                    excess += hb - clip_count;
                    hb = clip_count;
                }
            }
            const double add = excess / kHistBins;
            double cum = 0.0;
            auto& map = mapping[static_cast<size_t>(ty) * tiles_x + tx];
            for (int b = 0; b < kHistBins; ++b) {
                cum += hist[b] + add;
                map[b] = cum / tile_pixels;
            }
        }
    }

    GrayImage out(img.width, img.height);
    for (int y = 0; y < img.height; ++y) {
        const double gy = (y + 0.5) / th - 0.5;
        const int j0 = static_cast<int>(std::floor(gy));
        const double fy = gy - j0;
        const int j0c = std::clamp(j0, 0, tiles_y - 1);
        const int j1c = std::clamp(j0 + 1, 0, tiles_y - 1);
        for (int x = 0; x < img.width; ++x) {
            const double gx = (x + 0.5) / tw - 0.5;
            const int i0 = static_cast<int>(std::floor(gx));
            const double fx = gx - i0;
            const int i0c = std::clamp(i0, 0, tiles_x - 1);
            const int i1c = std::clamp(i0 + 1, 0, tiles_x - 1);
            const int b = intensity_bin(img.at(x, y));
            const double m00 = mapping[static_cast<size_t>(j0c) * tiles_x + i0c][b];
            const double m01 = mapping[static_cast<size_t>(j0c) * tiles_x + i1c][b];
            const double m10 = mapping[static_cast<size_t>(j1c) * tiles_x + i0c][b];
            const double m11 = mapping[static_cast<size_t>(j1c) * tiles_x + i1c][b];
            const double v = (1.0 - fy) * ((1.0 - fx) * m00 + fx * m01) +
                             fy * ((1.0 - fx) * m10 + fx * m11);
            out.at(x, y) = std::clamp(v, 0.0, 1.0);
        }
    }
    return out;
}

GrayImage bicubic_resize(const GrayImage& img, double scale) {
    if (img.empty()) throw InputError("empty image");
    if (!(scale > 0.0)) throw ParamError("resize scale must be > 0");
    const int ow = static_cast<int>(std::lround(scale * img.width));
    const int oh = static_cast<int>(std::lround(scale * img.height));
    if (ow < 4 || oh < 4) throw ParamError("resized image would be smaller than 4x4");

    // Horizontal pass.
    GrayImage hpass(ow, img.height);
    for (int x = 0; x < ow; ++x) {
        const double sx = (x + 0.5) / scale - 0.5;
        const int bx = static_cast<int>(std::floor(sx));
        const double fx = sx - bx;
        const std::array<double, 4> w{cubic_weight(fx + 1.0), cubic_weight(fx),
                                      cubic_weight(fx - 1.0), cubic_weight(fx - 2.0)};
        for (int y = 0; y < img.height; ++y) {
            double v = 0.0;
            for (int i = 0; i < 4; ++i) v += w[i] * img.at_clamped(bx - 1 + i, y);
            hpass.at(x, y) = v;
        }
    }
    // Vertical pass.
    GrayImage out(ow, oh);
    for (int y = 0; y < oh; ++y) {
        const double sy = (y + 0.5) / scale - 0.5;
        const int by = static_cast<int>(std::floor(sy));
        const double fy = sy - by;
        const std::array<double, 4> w{cubic_weight(fy + 1.0), cubic_weight(fy),
                                      cubic_weight(fy - 1.0), cubic_weight(fy - 2.0)};
        for (int x = 0; x < ow; ++x) {
            double v = 0.0;
            for (int j = 0; j < 4; ++j) v += w[j] * hpass.at_clamped(x, by - 1 + j);
            out.at(x, y) = std::clamp(v, 0.0, 1.0);
        }
    }
    return out;
}

GrayImage rotate_image(const GrayImage& img, double phi, double cx, double cy) {
    if (img.empty()) throw InputError("empty image");
    const double c = std::cos(phi);
    const double s = std::sin(phi);
    GrayImage out(img.width, img.height);
    for (int y = 0; y < img.height; ++y) {
        for (int x = 0; x < img.width; ++x) {
            // Inverse map: source = center + R(-phi) * (p - center).
            const double dx = x - cx;
            const double dy = y - cy;
            const double sx = cx + c * dx + s * dy;
            const double sy = cy - s * dx + c * dy;
            out.at(x, y) = std::clamp(bicubic_sample(img, sx, sy), 0.0, 1.0);
        }
    }
    return out;
}

ComplexKernel gamma_kernel(int n, double sigma, int side) {
    if (!(sigma > 0.0)) throw ParamError("gamma kernel sigma must be > 0");
    const int absn = std::abs(n);
    if (absn > 8) throw ParamError("gamma kernel order |n| must be <= 8");
    const int min_side = 2 * static_cast<int>(std::ceil(4.0 * sigma)) + 1;
    if (side == 0) side = min_side;
    if (side < min_side || side % 2 == 0)
        throw ParamError("gamma kernel side must be odd and >= 2*ceil(4*sigma)+1");

    ComplexKernel k(side);
    k.order = n;
    k.sigma = sigma;
    const int r = k.radius();
    const double s2 = sigma * sigma;
    const double gauss_norm = 1.0 / (2.0 * std::numbers::pi * s2);
    const double ysign = n >= 0 ? 1.0 : -1.0;
    const double carrier_scale = (absn % 2 == 0) ? 1.0 : -1.0;  // (-1)^|n|
    for (int y = -r; y <= r; ++y) {
        for (int x = -r; x <= r; ++x) {
            const double g = gauss_norm * std::exp(-0.5 * (x * x + y * y) / s2);
            std::complex<double> w{x / s2, ysign * y / s2};
            std::complex<double> carrier{1.0, 0.0};
            for (int i = 0; i < absn; ++i) carrier *= w;
            k.at(x, y) = carrier_scale * carrier * g;
        }
    }
    return k;
}

ComplexField convolve_complex(const GrayImage& img, const ComplexKernel& kernel) {
    if (img.empty()) throw InputError("empty image");
    if (kernel.side > img.width || kernel.side > img.height)
        throw InputError("kernel larger than image");
    const int side = kernel.side;
    const int r = kernel.radius();

    // Split the kernel into row-major real planes for the dot2 inner loop.
    std::vector<double> kre(static_cast<size_t>(side) * side);
    std::vector<double> kim(kre.size());
    for (size_t i = 0; i < kre.size(); ++i) {
        kre[i] = kernel.taps[i].real();
        kim[i] = kernel.taps[i].imag();
    }

    GrayImage padded = padded_replicate(img, r);
    ComplexField out(img.width, img.height);
    for (int y = 0; y < img.height; ++y) {
        for (int x = 0; x < img.width; ++x) {
            double re = 0.0, im = 0.0;
            for (int ky = 0; ky < side; ++ky) {
                const double* prow = padded.row(y + ky) + x;
                const auto d = simd::dot2(prow, kre.data() + static_cast<size_t>(ky) * side,
                                          kim.data() + static_cast<size_t>(ky) * side, side);
                re += d.a;
                im -= d.b;  // conjugated kernel
            }
            out.at(x, y) = {re, im};
        }
    }
    return out;
}

ComplexField convolve_complex(const ComplexField& field, const ComplexKernel& kernel) {
    if (field.empty()) throw InputError("empty field");
    if (kernel.side > field.width || kernel.side > field.height)
        throw InputError("kernel larger than field");
    const int side = kernel.side;
    const int r = kernel.radius();
    const int pw = field.width + 2 * r;

    std::vector<double> padded = padded_interleaved(field, r);
    const double* ktaps = reinterpret_cast<const double*>(kernel.taps.data());

    ComplexField out(field.width, field.height);
    for (int y = 0; y < field.height; ++y) {
        for (int x = 0; x < field.width; ++x) {
            double re = 0.0, im = 0.0;
            for (int ky = 0; ky < side; ++ky) {
                const double* prow =
                    padded.data() + 2 * (static_cast<size_t>(y + ky) * pw + x);
                const auto d =
                    simd::cdot(ktaps + 2 * static_cast<size_t>(ky) * side, prow, side);
                re += d.re;
                im += d.im;
            }
            out.at(x, y) = {re, im};
        }
    }
    return out;
}

ComplexField orientation_field(const GrayImage& img, double sigma) {
    if (img.empty()) throw InputError("empty image");
    if (!(sigma > 0.0)) throw ParamError("orientation field sigma must be > 0");
    const int radius = static_cast<int>(std::ceil(4.0 * sigma));
    std::vector<double> g, tg;
    gauss_1d(sigma, radius, g, tg);

    // z = sum_u Gamma1(u) f(p+u) = -(A + iB)/sigma^2 with
    // A = f (*) (t*g x g), B = f (*) (g x t*g); h = z^2.
    GrayImage pa, pb;
    correlate_rows2(img, tg, g, pa, pb);
    GrayImage A = correlate_cols(pa, g);
    GrayImage B = correlate_cols(pb, tg);

    const double inv_s4 = 1.0 / (sigma * sigma * sigma * sigma);
    ComplexField h(img.width, img.height);
    for (size_t i = 0; i < h.values.size(); ++i) {
        const std::complex<double> z{A.pixels[i], B.pixels[i]};
        h.values[i] = inv_s4 * z * z;
    }
    return h;
}

GrayImage gaussian_blur(const GrayImage& img, double sigma) {
    if (img.empty()) throw InputError("empty image");
    if (sigma < 0.0) throw ParamError("blur sigma must be >= 0");
    if (sigma == 0.0) return img;
    const int radius = static_cast<int>(std::ceil(4.0 * sigma));
    std::vector<double> g(2 * radius + 1);
    double total = 0.0;
    for (int t = -radius; t <= radius; ++t) {
        g[t + radius] = std::exp(-0.5 * t * t / (sigma * sigma));
        total += g[t + radius];
    }
    for (double& v : g) v /= total;

    const int r = radius;
    GrayImage padded = padded_replicate(img, r);
    GrayImage hpass(img.width, img.height);
    for (int y = 0; y < img.height; ++y) {
        const double* prow = padded.row(y + r);
        for (int x = 0; x < img.width; ++x)
            hpass.at(x, y) = simd::dot(prow + x, g.data(), g.size());
    }
    return correlate_cols(hpass, g);
}

}  // namespace peri
