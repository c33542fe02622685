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

#include <complex>
#include <string>
#include <vector>

#include "peri/dataset.hpp"
#include "peri/image.hpp"

namespace peri::safe {

/// Geometry of one annular band.
struct RingSpec {
    double r_peak = 0.0;   // modulus peak radius (px)
    double sigma_r = 0.0;  // radial scale (px)
    double mu = 0.0;       // width exponent, mu = (r_peak/sigma_r)^2
    double kappa = 1.0;    // L2 normalization constant
};

/// Annular harmonic filter: taps (1/kappa) * r^mu * exp(-r^2/(2*sigma_r^2))
/// * exp(i*n*phi) with phi = atan2(-y, x), L2-normalized over the sampled
/// support. The modulus peaks at r_peak = sqrt(mu)*sigma_r. Throws
/// ParamError when side is even or cannot contain r_peak + 4*sigma_r.
ComplexKernel ring_filter(int n, double r_peak, double sigma_r, int side);

struct FilterBank {
    std::vector<int> orders;      // symmetry orders n
    std::vector<RingSpec> rings;  // k = 1..N_f, peaks strictly increasing
    std::vector<ComplexKernel> kernels;  // [order-major][ring]
    double r_min = 0.0;
    double r_max = 0.0;
    int side = 0;

    int n_orders() const { return static_cast<int>(orders.size()); }
    int n_rings() const { return static_cast<int>(rings.size()); }
    const ComplexKernel& kernel(int order_idx, int ring_idx) const {
        return kernels[static_cast<size_t>(order_idx) * rings.size() + ring_idx];
    }
};

/// Build the bank over [r_min, r_max]: band edges rho_j =
/// r_min*(r_max/r_min)^(j/N_f); ring k peaks at sqrt(rho_{k-1}*rho_k) with
/// sigma_k = (rho_k - rho_{k-1})/2. Band tails beyond r_max are clipped by
/// the sampling grid (the outermost band ends at the image boundary).
/// side = 0 selects 2*floor(r_max)+1.
FilterBank build_filter_bank(double r_min, double r_max, int n_rings,
                             const std::vector<int>& orders, int side = 0);

/// Default symmetry orders, n = -4..4.
std::vector<int> default_orders();

/// Multi-scale identity model: one n_orders x n_rings complex block per
/// orientation-field scale, flattened scale-major, then order, then ring.
struct SafeDescriptor {
    std::vector<double> scales;  // sigma per block
    std::vector<int> orders;     // symmetry order per coefficient row
    int n_rings = 0;
    std::vector<std::complex<double>> coeffs;
    std::string params_hash;
    double sclera_radius = 0.0;

    int n_orders() const { return static_cast<int>(orders.size()); }
    size_t block_size() const { return orders.size() * static_cast<size_t>(n_rings); }
    std::complex<double>& at(int scale_idx, int order_idx, int ring_idx) {
        return coeffs[(static_cast<size_t>(scale_idx) * orders.size() + order_idx) * n_rings +
                      ring_idx];
    }
    std::complex<double> at(int scale_idx, int order_idx, int ring_idx) const {
        return coeffs[(static_cast<size_t>(scale_idx) * orders.size() + order_idx) * n_rings +
                      ring_idx];
    }
    bool all_zero() const;
};

/// Stable hash binding a descriptor to its extraction configuration.
/// Uses the scale-invariant configuration (orders, ring count, base sigmas,
/// radial span ratio) so descriptors from different acquisition distances
/// remain comparable after sclera-radius normalization.
std::string params_hash(const std::vector<int>& orders, int n_rings,
                        const std::vector<double>& base_sigmas, double span_ratio);

/// Project one orientation field onto the bank at center (cx, cy):
/// coeff[n][k] = sum_u conj(psi_nk(u)) * h(c + u). The bank grid must fit
/// inside the field (throws ExtractionError otherwise).
std::vector<std::complex<double>> project_field(const ComplexField& h,
                                                const FilterBank& bank, int cx, int cy);

struct ExtractOptions {
    bool apply_clahe = true;
    double clahe_clip = 0.01;
    int clahe_tiles = 8;
};

/// Full extraction: per sigma, CLAHE + orientation field + bank projection
/// at the annotated sclera center, blocks concatenated in sigma order.
SafeDescriptor extract(const GrayImage& roi, const EyeAnnotation& ann,
                       const std::vector<double>& sigmas, const FilterBank& bank,
                       const std::string& hash, const ExtractOptions& opts = {});

/// Match score MS = |M| cos(arg M) = Re(M) with
/// M = <ref, test> / <|ref|, |test|>, all scales flattened. MS is in
/// [-1, 1]; 1 means coinciding symmetry patterns. Throws IncompatibleError
/// on dimension/hash mismatch, UndefinedScoreError when either descriptor
/// is all-zero.
double match(const SafeDescriptor& ref, const SafeDescriptor& test);

/// Feature-space rotation: order-n coefficients multiplied by
/// exp(i*(n+2)*phi), which tracks rotate_image(img, phi) through
/// extraction. Magnitudes are unchanged; n = -2 is rotation-invariant.
SafeDescriptor rotate_descriptor(const SafeDescriptor& d, double phi);

/// Max of match(ref, rotate_descriptor(test, phi)) over the grid
/// phi = k*step_deg, |phi| <= range_deg (grid always contains 0).
double match_with_rotation(const SafeDescriptor& ref, const SafeDescriptor& test,
                           double range_deg, double step_deg);

/// Descriptor file round-trip (JSON; coefficient order is normative:
/// scale-major, then order n ascending, then ring k = 1..N_f).
void save_descriptor(const SafeDescriptor& d, const std::string& path);
SafeDescriptor load_descriptor(const std::string& path);

}  // namespace peri::safe
