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

#include "peri/image_io.hpp"

#include <png.h>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <memory>

#include "peri/imgproc.hpp"

namespace peri {

namespace {

struct FileCloser {
    void operator()(std::FILE* f) const {
        if (f) std::fclose(f);
    }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

Raster load_png(const std::string& path) {
    FilePtr fp(std::fopen(path.c_str(), "rb"));
    if (!fp) throw IoError("cannot open " + path);

    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (!png) throw IoError("libpng init failed");
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_read_struct(&png, nullptr, nullptr);
        throw IoError("libpng init failed");
    }
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw IoError("failed to decode PNG " + path);
    }

    png_init_io(png, fp.get());
    png_read_info(png, info);

    png_uint_32 w = 0, h = 0;
    int bit_depth = 0, color_type = 0;
    png_get_IHDR(png, info, &w, &h, &bit_depth, &color_type, nullptr, nullptr, nullptr);

    if (color_type == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
    if (color_type == PNG_COLOR_TYPE_GRAY && bit_depth < 8) png_set_expand_gray_1_2_4_to_8(png);
    if (png_get_valid(png, info, PNG_INFO_tRNS)) png_set_tRNS_to_alpha(png);
    if (bit_depth == 16) png_set_swap(png);  // libpng delivers big-endian 16-bit
    png_read_update_info(png, info);
    png_get_IHDR(png, info, &w, &h, &bit_depth, &color_type, nullptr, nullptr, nullptr);

    const int channels = png_get_channels(png, info);
    Raster out;
    out.width = static_cast<int>(w);
    out.height = static_cast<int>(h);
    out.channels = channels;
    out.bit_depth = bit_depth;
    out.samples.resize(static_cast<size_t>(w) * h * channels);

    std::vector<png_bytep> rows(h);
    std::vector<uint8_t> buffer(static_cast<size_t>(png_get_rowbytes(png, info)) * h);
    for (png_uint_32 y = 0; y < h; ++y)
        rows[y] = buffer.data() + static_cast<size_t>(y) * png_get_rowbytes(png, info);
    png_read_image(png, rows.data());
    png_read_end(png, nullptr);
    png_destroy_read_struct(&png, &info, nullptr);

    if (bit_depth == 16) {
        const uint16_t* src = reinterpret_cast<const uint16_t*>(buffer.data());
        std::copy(src, src + out.samples.size(), out.samples.begin());
    } else {
        for (size_t i = 0; i < out.samples.size(); ++i) out.samples[i] = buffer[i];
    }
    return out;
}

void skip_pnm_space(std::istream& in) {
    int c = in.peek();
    while (c == '#' || std::isspace(c)) {
        if (c == '#') {
            std::string line;
            std::getline(in, line);
        } else {
            in.get();
        }
        c = in.peek();
    }
}

Raster load_pgm(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path);
    std::string magic;
    in >> magic;
    if (magic != "P2" && magic != "P5") throw InputError("not a PGM file: " + path);
    long w = 0, h = 0, maxval = 0;
    skip_pnm_space(in);
    in >> w;
    skip_pnm_space(in);
    in >> h;
    skip_pnm_space(in);
    in >> maxval;
    if (!in || w <= 0 || h <= 0 || maxval <= 0 || maxval > 65535)
        throw InputError("malformed PGM header: " + path);

    Raster out;
    out.width = static_cast<int>(w);
    out.height = static_cast<int>(h);
    out.channels = 1;
    out.bit_depth = maxval > 255 ? 16 : 8;
    const size_t n = static_cast<size_t>(w) * h;
    out.samples.resize(n);

    if (magic == "P2") {
        for (size_t i = 0; i < n; ++i) {
            long v;
            in >> v;
            if (!in) throw InputError("truncated PGM data: " + path);
            out.samples[i] = static_cast<uint16_t>(std::clamp(v, 0L, 65535L));
        }
    } else {
        in.get();  // single whitespace after maxval
        if (maxval > 255) {
            std::vector<uint8_t> raw(2 * n);
            in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
            if (!in) throw InputError("truncated PGM data: " + path);
            for (size_t i = 0; i < n; ++i)
                out.samples[i] = static_cast<uint16_t>((raw[2 * i] << 8) | raw[2 * i + 1]);
        } else {
            std::vector<uint8_t> raw(n);
            in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
            if (!in) throw InputError("truncated PGM data: " + path);
            for (size_t i = 0; i < n; ++i) out.samples[i] = raw[i];
        }
    }
    // Rescale a non-power-of-two maxval to the full sample range.
    const int full = out.bit_depth == 16 ? 65535 : 255;
    if (maxval != full) {
        for (auto& s : out.samples)
            s = static_cast<uint16_t>(std::lround(static_cast<double>(s) * full / maxval));
    }
    return out;
}

bool has_suffix(const std::string& s, const std::string& suffix) {
    if (s.size() < suffix.size()) return false;
    std::string tail = s.substr(s.size() - suffix.size());
    std::transform(tail.begin(), tail.end(), tail.begin(),
                   [](unsigned char c) { return std::tolower(c); });
    return tail == suffix;
}

}  // namespace

Raster load_raster(const std::string& path) {
    if (has_suffix(path, ".pgm")) return load_pgm(path);
    if (has_suffix(path, ".png")) return load_png(path);
    // Sniff the signature for extension-less paths.
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path);
    char sig[2] = {0, 0};
    in.read(sig, 2);
    in.close();
    if (sig[0] == 'P' && (sig[1] == '2' || sig[1] == '5')) return load_pgm(path);
    return load_png(path);
}

GrayImage load_gray(const std::string& path) { return to_grayscale(load_raster(path)); }

void save_png_gray8(const GrayImage& img, const std::string& path) {
    if (img.empty()) throw InputError("empty image");
    FilePtr fp(std::fopen(path.c_str(), "wb"));
    if (!fp) throw IoError("cannot write " + path);

    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (!png) throw IoError("libpng init failed");
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_write_struct(&png, nullptr);
        throw IoError("libpng init failed");
    }
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        throw IoError("failed to encode PNG " + path);
    }

    png_init_io(png, fp.get());
    png_set_IHDR(png, info, img.width, img.height, 8, PNG_COLOR_TYPE_GRAY,
                 PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);

    std::vector<uint8_t> row(img.width);
    for (int y = 0; y < img.height; ++y) {
        for (int x = 0; x < img.width; ++x) {
            const double v = std::clamp(img.at(x, y), 0.0, 1.0);
            row[x] = static_cast<uint8_t>(std::lround(v * 255.0));
        }
        png_write_row(png, row.data());
    }
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
}

void save_pgm(const GrayImage& img, const std::string& path, int bit_depth) {
    if (img.empty()) throw InputError("empty image");
    if (bit_depth != 8 && bit_depth != 16) throw ParamError("PGM bit depth must be 8 or 16");
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path);
    const int maxval = bit_depth == 16 ? 65535 : 255;
    out << "P5\n" << img.width << " " << img.height << "\n" << maxval << "\n";
    for (int y = 0; y < img.height; ++y) {
        for (int x = 0; x < img.width; ++x) {
            const double v = std::clamp(img.at(x, y), 0.0, 1.0);
            const long q = std::lround(v * maxval);
            if (bit_depth == 16) {
                out.put(static_cast<char>((q >> 8) & 0xff));
                out.put(static_cast<char>(q & 0xff));
            } else {
                out.put(static_cast<char>(q & 0xff));
            }
        }
    }
    if (!out) throw IoError("short write to " + path);
}

}  // namespace peri
