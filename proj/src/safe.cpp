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

#include "peri/safe.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>

#include "json.hpp"
#include "peri/imgproc.hpp"
#include "peri/simd/kernels.hpp"
#include "peri/util.hpp"

namespace peri::safe {

namespace {

constexpr double kDegToRad = std::numbers::pi / 180.0;

// Samples the annular harmonic on an odd grid and L2-normalizes over the
// sampled support. Radial profile evaluated in log space so large width
// exponents cannot overflow.
ComplexKernel sample_ring(int n, double r_peak, double sigma_r, int side) {
    ComplexKernel k(side);
    const double mu = (r_peak / sigma_r) * (r_peak / sigma_r);
    k.order = n;
    k.sigma = sigma_r;
    k.mu = mu;
    k.r_peak = r_peak;

    const int radius = k.radius();
    // Peak exponent, used to keep exp() in range: at r = r_peak the
    // exponent mu*ln(r) - r^2/(2 sigma^2) attains mu*ln(r_peak) - mu/2.
    const double peak_exp = mu * std::log(r_peak) - 0.5 * mu;
    double norm_sq = 0.0;
    for (int y = -radius; y <= radius; ++y) {
        for (int x = -radius; x <= radius; ++x) {
            const double r2 = static_cast<double>(x) * x + static_cast<double>(y) * y;
            if (r2 == 0.0) continue;  // r^mu -> 0 at the center (mu > 0)
            const double r = std::sqrt(r2);
            const double m =
                std::exp(mu * std::log(r) - 0.5 * r2 / (sigma_r * sigma_r) - peak_exp);
            const double phi = std::atan2(-static_cast<double>(y), static_cast<double>(x));
            k.at(x, y) = std::polar(m, n * phi);
            norm_sq += m * m;
        }
    }
    const double norm = std::sqrt(norm_sq);
    if (norm == 0.0) throw ParamError("ring filter support is empty");
    for (auto& t : k.taps) t /= norm;
    k.kappa = norm * std::exp(peak_exp);
    return k;
}

nlohmann::json descriptor_to_json(const SafeDescriptor& d) {
    nlohmann::json coeffs = nlohmann::json::array();
    for (size_t s = 0; s < d.scales.size(); ++s) {
        nlohmann::json block = nlohmann::json::array();
        for (size_t i = 0; i < d.block_size(); ++i) {
            const auto& c = d.coeffs[s * d.block_size() + i];
            block.push_back({c.real(), c.imag()});
        }
        coeffs.push_back(std::move(block));
    }
    return nlohmann::json{{"matcher", "safe"},
                          {"params_hash", d.params_hash},
                          {"sclera_radius_px", d.sclera_radius},
                          {"orders", d.orders},
                          {"n_rings", d.n_rings},
                          {"scales", d.scales},
                          {"coeffs", std::move(coeffs)}};
}

}  // namespace

ComplexKernel ring_filter(int n, double r_peak, double sigma_r, int side) {
    if (!(r_peak > 0.0) || !(sigma_r > 0.0))
        throw ParamError("ring filter needs r_peak > 0 and sigma_r > 0");
    const int min_side = 2 * static_cast<int>(std::ceil(r_peak + 4.0 * sigma_r)) + 1;
    if (side % 2 == 0 || side < min_side)
        throw ParamError("ring filter side too small to contain the ring");
    return sample_ring(n, r_peak, sigma_r, side);
}

std::vector<int> default_orders() { return {-4, -3, -2, -1, 0, 1, 2, 3, 4}; }

FilterBank build_filter_bank(double r_min, double r_max, int n_rings,
                             const std::vector<int>& orders, int side) {
    if (!(r_min > 0.0) || !(r_max > r_min))
        throw ParamError("filter bank needs 0 < r_min < r_max");
    if (n_rings < 1) throw ParamError("filter bank needs at least one ring");
    if (orders.empty()) throw ParamError("filter bank needs at least one order");
    if (side == 0) side = 2 * static_cast<int>(std::floor(r_max)) + 1;
    if (side % 2 == 0) throw ParamError("filter bank side must be odd");

    FilterBank bank;
    bank.orders = orders;
    bank.r_min = r_min;
    bank.r_max = r_max;
    bank.side = side;

    // Geometric band edges; each ring peaks at the band's geometric mean
    // with radial scale half the band width.
    const double ratio = r_max / r_min;
    std::vector<double> edges(n_rings + 1);
    for (int j = 0; j <= n_rings; ++j)
        edges[j] = r_min * std::pow(ratio, static_cast<double>(j) / n_rings);
    bank.rings.resize(n_rings);
    for (int k = 0; k < n_rings; ++k) {
        RingSpec& ring = bank.rings[k];
        ring.r_peak = std::sqrt(edges[k] * edges[k + 1]);
        ring.sigma_r = 0.5 * (edges[k + 1] - edges[k]);
        ring.mu = (ring.r_peak / ring.sigma_r) * (ring.r_peak / ring.sigma_r);
    }

    bank.kernels.reserve(orders.size() * static_cast<size_t>(n_rings));
    for (int n : orders) {
        for (int k = 0; k < n_rings; ++k) {
            const RingSpec& ring = bank.rings[k];
            ComplexKernel kern = sample_ring(n, ring.r_peak, ring.sigma_r, side);
            if (n == orders.front()) bank.rings[k].kappa = kern.kappa;
            bank.kernels.push_back(std::move(kern));
        }
    }
    return bank;
}

std::string params_hash(const std::vector<int>& orders, int n_rings,
                        const std::vector<double>& base_sigmas, double span_ratio) {
    std::string s = "safe|orders=";
    for (int n : orders) s += std::to_string(n) + ",";
    s += "|nf=" + std::to_string(n_rings) + "|sigmas=";
    for (double v : base_sigmas) s += canonical_double(v) + ",";
    s += "|span=" + canonical_double(span_ratio);
    return to_hex(fnv1a64(s));
}

bool SafeDescriptor::all_zero() const {
    for (const auto& c : coeffs)
        if (c != std::complex<double>{0.0, 0.0}) return false;
    return true;
}

std::vector<std::complex<double>> project_field(const ComplexField& h,
                                                const FilterBank& bank, int cx, int cy) {
    const int r = (bank.side - 1) / 2;
    if (cx < 0 || cy < 0 || cx >= h.width || cy >= h.height)
        throw ExtractionError("annotation center outside image");
    if (cx - r < 0 || cy - r < 0 || cx + r >= h.width || cy + r >= h.height)
        throw ExtractionError("filter ring exceeds image bounds");

    std::vector<std::complex<double>> out;
    out.reserve(bank.kernels.size());
    const double* field = reinterpret_cast<const double*>(h.values.data());
    for (const auto& kern : bank.kernels) {
        double re = 0.0, im = 0.0;
        const double* taps = reinterpret_cast<const double*>(kern.taps.data());
        for (int ky = 0; ky < bank.side; ++ky) {
            const size_t field_off =
                2 * (static_cast<size_t>(cy - r + ky) * h.width + (cx - r));
            const auto d = simd::cdot(taps + 2 * static_cast<size_t>(ky) * bank.side,
                                      field + field_off, bank.side);
            re += d.re;
            im += d.im;
        }
        out.emplace_back(re, im);
    }
    return out;
}

SafeDescriptor extract(const GrayImage& roi, const EyeAnnotation& ann,
                       const std::vector<double>& sigmas, const FilterBank& bank,
                       const std::string& hash, const ExtractOptions& opts) {
    if (sigmas.empty()) throw ParamError("extraction needs at least one sigma");
    const int cx = static_cast<int>(std::lround(ann.sclera_x));
    const int cy = static_cast<int>(std::lround(ann.sclera_y));

    GrayImage prepared =
        opts.apply_clahe ? clahe(roi, opts.clahe_clip, opts.clahe_tiles, opts.clahe_tiles)
                         : roi;

    SafeDescriptor d;
    d.scales = sigmas;
    d.orders = bank.orders;
    d.n_rings = bank.n_rings();
    d.params_hash = hash;
    d.sclera_radius = ann.sclera_r;
    d.coeffs.reserve(sigmas.size() * d.block_size());
    for (double sigma : sigmas) {
        const ComplexField h = orientation_field(prepared, sigma);
        auto block = project_field(h, bank, cx, cy);
        d.coeffs.insert(d.coeffs.end(), block.begin(), block.end());
    }
    return d;
}

double match(const SafeDescriptor& ref, const SafeDescriptor& test) {
    if (ref.orders != test.orders || ref.n_rings != test.n_rings ||
        ref.scales.size() != test.scales.size() || ref.coeffs.size() != test.coeffs.size())
        throw IncompatibleError("descriptor dimensions differ");
    if (ref.params_hash != test.params_hash)
        throw IncompatibleError("descriptor params_hash differs");

    const size_t n = ref.coeffs.size();
    const auto num = simd::cdot(reinterpret_cast<const double*>(test.coeffs.data()),
                                reinterpret_cast<const double*>(ref.coeffs.data()), n);
    double den = 0.0;
    for (size_t i = 0; i < n; ++i)
        den += std::abs(ref.coeffs[i]) * std::abs(test.coeffs[i]);
    if (den == 0.0)
        throw UndefinedScoreError("match undefined for all-zero descriptor");
    // MS = |M| cos(arg M) = Re(M); |M| <= 1 by the triangle inequality.
    return std::clamp(num.re / den, -1.0, 1.0);
}

SafeDescriptor rotate_descriptor(const SafeDescriptor& d, double phi) {
    SafeDescriptor out = d;
    for (size_t s = 0; s < d.scales.size(); ++s) {
        for (int oi = 0; oi < d.n_orders(); ++oi) {
            const int n = d.orders[oi];
            // Exponent n + 2 vanishes at n = -2 (circular patterns stay put).
            const std::complex<double> f = std::polar(1.0, (n + 2) * phi);
            for (int k = 0; k < d.n_rings; ++k) {
                out.at(static_cast<int>(s), oi, k) = f * d.at(static_cast<int>(s), oi, k);
            }
        }
    }
    return out;
}

double match_with_rotation(const SafeDescriptor& ref, const SafeDescriptor& test,
                           double range_deg, double step_deg) {
    if (!(step_deg > 0.0)) throw ParamError("rotation step must be > 0");
    if (range_deg < 0.0) throw ParamError("rotation range must be >= 0");
    const int steps = static_cast<int>(std::floor(range_deg / step_deg + 1e-9));
    double best = match(ref, test);  // phi = 0
    for (int k = -steps; k <= steps; ++k) {
        if (k == 0) continue;
        const double phi = k * step_deg * kDegToRad;
        best = std::max(best, match(ref, rotate_descriptor(test, phi)));
    }
    return best;
}

void save_descriptor(const SafeDescriptor& d, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path);
    out << descriptor_to_json(d).dump(2) << "\n";
    if (!out) throw IoError("short write to " + path);
}

SafeDescriptor load_descriptor(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw InputError("malformed descriptor JSON " + path + ": " + e.what());
    }
    SafeDescriptor d;
    try {
        if (j.at("matcher") != "safe") throw InputError("not a safe descriptor: " + path);
        d.params_hash = j.at("params_hash").get<std::string>();
        d.sclera_radius = j.at("sclera_radius_px").get<double>();
        d.orders = j.at("orders").get<std::vector<int>>();
        d.n_rings = j.at("n_rings").get<int>();
        d.scales = j.at("scales").get<std::vector<double>>();
        const auto& coeffs = j.at("coeffs");
        for (const auto& block : coeffs) {
            if (block.size() != d.block_size())
                throw InputError("descriptor block size mismatch in " + path);
            for (const auto& c : block)
                d.coeffs.emplace_back(c.at(0).get<double>(), c.at(1).get<double>());
        }
        if (d.coeffs.size() != d.scales.size() * d.block_size())
            throw InputError("descriptor scale count mismatch in " + path);
    } catch (const nlohmann::json::exception& e) {
        throw InputError("malformed descriptor JSON " + path + ": " + e.what());
    }
    return d;
}

}  // namespace peri::safe
