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

namespace peri::fusion {

/// Trained affine score combiner f = a_0 + sum_i a_i * z_i over
/// per-matcher standardized scores z_i = (s_i - mean_i) / std_i.
struct FusionModel {
    std::vector<std::string> matcher_ids;  // size N
    std::vector<double> weights;           // size N + 1, weights[0] = a_0
    std::vector<double> means;             // size N
    std::vector<double> stds;              // size N

    size_t n_matchers() const { return matcher_ids.size(); }
};

struct TrainOptions {
    double l2_penalty = 1e-6;  // on non-bias weights
    double tolerance = 1e-9;   // on the gradient max-norm
    int max_iterations = 10000;
};

/// Class-balanced logistic regression (genuine label 1, impostor 0) with a
/// small L2 penalty; deterministic damped-Newton optimizer. All matchers
/// must be similarity-oriented. Throws TrainingError on single-class or
/// non-finite input.
FusionModel train(const std::vector<std::vector<double>>& trial_scores,
                  const std::vector<int>& labels,
                  const std::vector<std::string>& matcher_ids,
                  const TrainOptions& opts = {});

/// Raw linear output (no sigmoid; monotone, so EER-equivalent).
double apply(const FusionModel& model, const std::vector<double>& trial_scores);

}  // namespace peri::fusion
