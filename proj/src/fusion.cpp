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

#include "peri/fusion.hpp"

#include <cmath>
#include <vector>

#include "peri/errors.hpp"

namespace peri::fusion {

namespace {

double sigmoid(double t) { return 1.0 / (1.0 + std::exp(-t)); }

// log(sigmoid(t)) and log(1 - sigmoid(t)) in overflow-safe form.
double log_sigmoid(double t) { return t >= 0.0 ? -std::log1p(std::exp(-t)) : t - std::log1p(std::exp(t)); }

// Dense symmetric positive-definite solve (Cholesky); dim is tiny.
std::vector<double> spd_solve(std::vector<double> A, std::vector<double> b, size_t n) {
    for (size_t i = 0; i < n; ++i) {
        for (size_t j = 0; j <= i; ++j) {
            double s = A[i * n + j];
            for (size_t k = 0; k < j; ++k) s -= A[i * n + k] * A[j * n + k];
            if (i == j) {
                if (s <= 0.0) throw TrainingError("singular Hessian in fusion training");
                A[i * n + i] = std::sqrt(s);
            } else {
                A[i * n + j] = s / A[j * n + j];
            }
        }
    }
    // Forward then backward substitution.
    for (size_t i = 0; i < n; ++i) {
        double s = b[i];
        for (size_t k = 0; k < i; ++k) s -= A[i * n + k] * b[k];
        b[i] = s / A[i * n + i];
    }
    for (size_t ii = n; ii > 0; --ii) {
        const size_t i = ii - 1;
        double s = b[i];
        for (size_t k = i + 1; k < n; ++k) s -= A[k * n + i] * b[k];
        b[i] = s / A[i * n + i];
    }
    return b;
}

}  // namespace

FusionModel train(const std::vector<std::vector<double>>& trial_scores,
                  const std::vector<int>& labels,
                  const std::vector<std::string>& matcher_ids, const TrainOptions& opts) {
    const size_t m = trial_scores.size();
    if (m == 0 || labels.size() != m)
        throw TrainingError("scores and labels must be nonempty and aligned");
    const size_t n = matcher_ids.size();
    size_t n_pos = 0, n_neg = 0;
    for (size_t j = 0; j < m; ++j) {
        if (trial_scores[j].size() != n)
            throw TrainingError("trial score vector length mismatch");
        for (double v : trial_scores[j])
            if (!std::isfinite(v)) throw InputError("non-finite score in fusion training");
        (labels[j] ? n_pos : n_neg)++;
    }
    if (n_pos == 0 || n_neg == 0)
        throw TrainingError("fusion training needs both genuine and impostor trials");

    FusionModel model;
    model.matcher_ids = matcher_ids;
    model.means.assign(n, 0.0);
    model.stds.assign(n, 1.0);
    for (size_t i = 0; i < n; ++i) {
        double mean = 0.0;
        for (size_t j = 0; j < m; ++j) mean += trial_scores[j][i];
        mean /= static_cast<double>(m);
        double var = 0.0;
        for (size_t j = 0; j < m; ++j) {
            const double d = trial_scores[j][i] - mean;
            var += d * d;
        }
        var /= static_cast<double>(m);
        model.means[i] = mean;
        model.stds[i] = var > 1e-24 ? std::sqrt(var) : 1.0;
    }

    // Standardized design matrix with leading bias column.
    const size_t dim = n + 1;
    std::vector<double> X(m * dim);
    for (size_t j = 0; j < m; ++j) {
        X[j * dim] = 1.0;
        for (size_t i = 0; i < n; ++i)
            X[j * dim + 1 + i] = (trial_scores[j][i] - model.means[i]) / model.stds[i];
    }
    // Class-balanced trial weights summing to 1.
    const double w_pos = 0.5 / static_cast<double>(n_pos);
    const double w_neg = 0.5 / static_cast<double>(n_neg);

    std::vector<double> a(dim, 0.0);
    const double lambda = opts.l2_penalty;

    auto loss_of = [&](const std::vector<double>& w) {
        double loss = 0.0;
        for (size_t j = 0; j < m; ++j) {
            double t = 0.0;
            for (size_t d = 0; d < dim; ++d) t += w[d] * X[j * dim + d];
            const double wj = labels[j] ? w_pos : w_neg;
            loss -= wj * (labels[j] ? log_sigmoid(t) : log_sigmoid(-t));
        }
        for (size_t d = 1; d < dim; ++d) loss += lambda * w[d] * w[d];
        return loss;
    };

    double current_loss = loss_of(a);
    for (int iter = 0; iter < opts.max_iterations; ++iter) {
        std::vector<double> grad(dim, 0.0);
        std::vector<double> hess(dim * dim, 0.0);
        for (size_t j = 0; j < m; ++j) {
            const double* x = &X[j * dim];
            double t = 0.0;
            for (size_t d = 0; d < dim; ++d) t += a[d] * x[d];
            const double p = sigmoid(t);
            const double wj = labels[j] ? w_pos : w_neg;
            const double r = wj * (p - (labels[j] ? 1.0 : 0.0));
            const double q = wj * p * (1.0 - p);
            for (size_t d = 0; d < dim; ++d) {
                grad[d] += r * x[d];
                for (size_t e = 0; e <= d; ++e) hess[d * dim + e] += q * x[d] * x[e];
            }
        }
        for (size_t d = 1; d < dim; ++d) {
            grad[d] += 2.0 * lambda * a[d];
            hess[d * dim + d] += 2.0 * lambda;
        }
        // Hessian floor keeps the solve well-posed on separable data.
        for (size_t d = 0; d < dim; ++d) hess[d * dim + d] += 1e-12;
        for (size_t d = 0; d < dim; ++d)
            for (size_t e = d + 1; e < dim; ++e) hess[d * dim + e] = hess[e * dim + d];

        double gmax = 0.0;
        for (double g : grad) gmax = std::max(gmax, std::fabs(g));
        if (gmax < opts.tolerance) break;

        std::vector<double> step = spd_solve(hess, grad, dim);
        // Damped update: halve until the loss stops increasing.
        double scale = 1.0;
        std::vector<double> next(dim);
        for (int halving = 0; halving < 60; ++halving) {
            for (size_t d = 0; d < dim; ++d) next[d] = a[d] - scale * step[d];
            const double next_loss = loss_of(next);
            if (next_loss <= current_loss + 1e-15) {
                a = next;
                current_loss = next_loss;
                break;
            }
            scale *= 0.5;
        }
    }

    model.weights = std::move(a);
    return model;
}

double apply(const FusionModel& model, const std::vector<double>& trial_scores) {
    const size_t n = model.n_matchers();
    if (trial_scores.size() != n)
        throw IncompatibleError("trial score vector length does not match fusion model");
    for (double v : trial_scores)
        if (!std::isfinite(v)) throw InputError("non-finite score in fusion apply");
    double f = model.weights[0];
    for (size_t i = 0; i < n; ++i)
        f += model.weights[i + 1] * (trial_scores[i] - model.means[i]) / model.stds[i];
    return f;
}

}  // namespace peri::fusion
