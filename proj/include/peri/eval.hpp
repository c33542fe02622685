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

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "peri/dataset.hpp"

namespace peri::eval {

enum class PairLabel { genuine, impostor };
enum class PairFlag { ok, degenerate, failed };

struct ProtocolPair {
    int enrol_idx = 0;  // indices into the annotation list
    int test_idx = 0;
    PairLabel label = PairLabel::genuine;
};

struct Protocol {
    std::vector<ProtocolPair> pairs;
    std::vector<std::string> diagnostics;  // skipped users, missing slots

    size_t genuine_count() const;
    size_t impostor_count() const;
};

/// Verification protocol over (subject, eye) users:
///  - genuine: all unordered within-user image pairs (images sorted by
///    (session, path); no self-pairs, no symmetric duplicates);
///  - impostor: per ordered distance cell (Di, Dj), each user's first
///    image at Di against every other user's second image at Dj.
Protocol generate_protocol(const std::vector<EyeAnnotation>& annotations);

struct ScoredPair {
    int enrol_idx = 0;
    int test_idx = 0;
    PairLabel label = PairLabel::genuine;
    double score = 0.0;
    PairFlag flag = PairFlag::ok;
};

struct ScoreSet {
    std::string matcher_id;
    std::vector<ScoredPair> scores;  // aligned with the protocol pair order

    size_t count(PairFlag flag) const;
    /// ok-flagged scores split by label.
    void split(std::vector<double>& genuine, std::vector<double>& impostor) const;
};

/// Similarity (+flag) for one pair; may throw (treated as a failed pair).
using PairScorer = std::function<std::pair<double, bool>(int enrol_idx, int test_idx)>;

/// Score every protocol pair (deterministically parallel over pairs).
/// Per-pair exceptions mark the pair failed and the run continues; if more
/// than max_failure_fraction of pairs fail the run itself fails.
ScoreSet run_matcher(const Protocol& protocol, const std::string& matcher_id,
                     const PairScorer& scorer, unsigned workers = 1,
                     double max_failure_fraction = 0.10);

struct EerResult {
    double eer = 0.0;
    double threshold = 0.0;
};

/// Threshold sweep over all distinct score values; FAR = fraction of
/// impostors >= t, FRR = fraction of genuines < t; EER = (FAR+FRR)/2 at
/// the threshold minimizing |FAR-FRR| (ties -> smaller threshold).
EerResult eer(const std::vector<double>& genuine, const std::vector<double>& impostor);

struct DetPoint {
    double threshold = 0.0;
    double far = 0.0;
    double frr = 0.0;
};

/// Monotone staircase: one point per distinct score plus a final
/// above-max point at (FAR 0, FRR 1).
std::vector<DetPoint> det_curve(const std::vector<double>& genuine,
                                const std::vector<double>& impostor);

struct CrossDistance {
    std::vector<std::string> tags;  // sorted distance tags present
    // matrix[i][j]: EER for enrol distance tags[i] vs test distance tags[j];
    // absent when the cell lacks a class.
    std::vector<std::vector<std::optional<double>>> matrix;
    // pooled EER by |i - j| (0 = same scale).
    std::vector<std::optional<double>> by_lag;
};

CrossDistance cross_distance_matrix(const std::vector<EyeAnnotation>& annotations,
                                    const Protocol& protocol, const ScoreSet& scores);

struct MatcherReport {
    std::string matcher_id;
    double eer = 0.0;
    double threshold = 0.0;
    double genuine_mean = 0.0;
    double impostor_mean = 0.0;
    size_t genuine_count = 0;
    size_t impostor_count = 0;
    size_t degenerate_count = 0;
    size_t failed_count = 0;
    std::vector<DetPoint> det;
    CrossDistance cross;
};

struct FusionReport {
    std::vector<std::string> matcher_ids;
    double eer = 0.0;
    double variation_vs_best = 0.0;  // relative to the best individual EER
    size_t held_out_count = 0;
    size_t straddle_dropped = 0;     // impostor pairs crossing CV folds
    size_t degenerate_dropped = 0;
};

struct Report {
    std::string config_json;  // exact RunConfig echo (serialized JSON)
    std::vector<MatcherReport> matchers;
    std::vector<FusionReport> fusions;
    std::vector<std::string> protocol_diagnostics;
    size_t genuine_pairs = 0;
    size_t impostor_pairs = 0;
};

/// report.json (+ report.csv when csv requested) and per-matcher DET
/// point files det_<matcher>.csv under out_dir.
void emit_report(const Report& report, const std::string& out_dir, bool also_csv);
Report load_report(const std::string& path);

/// Scores CSV (normative): header
/// enrol_id,test_id,label,enrol_dist,test_dist,matcher,score,flag
struct ScoreRow {
    std::string enrol_id, test_id;
    PairLabel label = PairLabel::genuine;
    std::string enrol_dist, test_dist;
    std::string matcher;
    double score = 0.0;
    PairFlag flag = PairFlag::ok;
};

void save_scores_csv(const std::vector<EyeAnnotation>& annotations, const ScoreSet& scores,
                     const std::string& path);
std::vector<ScoreRow> load_scores_csv(const std::string& path);

/// 2-fold cross-validated fusion over users: folds from alternating sorted
/// user ids; each fold is scored by the model trained on the other; fused
/// EER is computed on pooled held-out scores only. Pairs straddling folds
/// or degenerate in any matcher are dropped and counted.
FusionReport fuse_cross_validated(const std::vector<EyeAnnotation>& annotations,
                                  const Protocol& protocol,
                                  const std::vector<const ScoreSet*>& matchers,
                                  double best_individual_eer);

}  // namespace peri::eval
