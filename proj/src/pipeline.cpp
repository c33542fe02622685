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

#include "peri/pipeline.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <filesystem>
#include <limits>
#include <map>
#include <memory>
#include <set>

#include "json.hpp"
#include "peri/image_io.hpp"
#include "peri/imgproc.hpp"
#include "peri/safe.hpp"
#include "peri/sift.hpp"
#include "peri/texture.hpp"
#include "peri/util.hpp"

namespace peri::pipeline {

namespace fs = std::filesystem;

namespace {

constexpr double kRoiFactor = 3.8;  // r_max / sclera radius (half ROI side)

std::string sanitize_stem(const std::string& path) {
    std::string stem = fs::path(path).stem().string();
    for (char& c : stem)
        if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_' && c != '-') c = '_';
    return stem;
}

struct GroupContext {
    double target_rs = 0.0;
    std::vector<double> sigmas;  // scaled for this group
    safe::FilterBank bank;
};

// Per-distance-group SAFE context: sigma scales with the group's target
// radius relative to the smallest (base) group.
std::map<std::string, GroupContext> make_group_contexts(
    const std::vector<EyeAnnotation>& normalized, const RunConfig& config) {
    std::map<std::string, double> group_rs;
    for (const auto& a : normalized) group_rs[a.distance_tag] = a.sclera_r;

    double base_rs = std::numeric_limits<double>::infinity();
    for (const auto& [tag, rs] : group_rs) base_rs = std::min(base_rs, rs);

    std::map<std::string, GroupContext> out;
    for (const auto& [tag, rs] : group_rs) {
        GroupContext ctx;
        ctx.target_rs = rs;
        for (double s : config.sigmas) ctx.sigmas.push_back(s * rs / base_rs);
        const int side = 2 * static_cast<int>(std::floor(kRoiFactor * rs)) + 1;
        ctx.bank = safe::build_filter_bank(rs, kRoiFactor * rs, config.nf,
                                           safe::default_orders(), side);
        out[tag] = std::move(ctx);
    }
    return out;
}

std::string safe_hash(const RunConfig& config) {
    return safe::params_hash(safe::default_orders(), config.nf, config.sigmas, kRoiFactor);
}

sift::SiftConfig sift_config_of(const RunConfig& config) {
    sift::SiftConfig c;
    c.lowe_ratio = config.lowe_ratio;
    c.angle_gate_deg = config.geo_angle_gate_deg;
    c.length_gate_frac = config.geo_length_gate_frac;
    return c;
}

void extract_one(const EyeAnnotation& ann, const std::string& matcher,
                 const RunConfig& config, const GroupContext& ctx,
                 const std::string& out_path) {
    const GrayImage roi = load_gray(ann.image_path);
    if (matcher == "safe") {
        safe::ExtractOptions opts;
        opts.clahe_clip = config.clahe_clip;
        opts.clahe_tiles = config.clahe_tiles;
        const auto d =
            safe::extract(roi, ann, ctx.sigmas, ctx.bank, safe_hash(config), opts);
        safe::save_descriptor(d, out_path);
    } else if (matcher == "lbp" || matcher == "hog") {
        if (roi.width != roi.height) throw ExtractionError("ROI must be square");
        const auto grid = texture::block_grid(roi.width);
        const auto d = matcher == "lbp" ? texture::extract_lbp(roi, grid)
                                        : texture::extract_hog(roi, grid);
        texture::save_block_descriptor(d, out_path);
    } else if (matcher == "sift") {
        const auto kps = sift::extract(roi, sift_config_of(config));
        sift::save_keypoints(kps, roi.width, roi.height, out_path);
    } else {
        throw ParamError("unknown matcher: " + matcher);
    }
}

double texture_similarity(const texture::BlockDescriptor& a,
                          const texture::BlockDescriptor& b, const RunConfig& config) {
    const auto metric = config.texture_metric == "euclidean"
                            ? texture::TextureMetric::euclidean
                            : texture::TextureMetric::chi2;
    return -texture::distance(a, b, metric);  // similarity = negated distance
}

struct SiftEntry {
    std::vector<sift::SiftKeypoint> kps;
    int width = 0, height = 0;
};

std::pair<double, bool> sift_pair_score(const SiftEntry& a, const SiftEntry& b,
                                        const RunConfig& config) {
    const auto cfg = sift_config_of(config);
    const auto norm =
        config.sift_norm == "avg" ? sift::SiftNorm::avg : sift::SiftNorm::min;
    if (a.kps.empty() || b.kps.empty()) {
        const auto s = sift::sift_score(0, a.kps.size(), b.kps.size(), norm);
        return {s.value, s.degenerate};
    }
    auto pairs = sift::match_keypoints(a.kps, b.kps, cfg.lowe_ratio);
    if (!pairs.empty())
        pairs = sift::geometric_filter(pairs, a.kps, b.kps, a.width, a.height, b.width,
                                       b.height, cfg.angle_gate_deg, cfg.length_gate_frac);
    const auto s = sift::sift_score(pairs.size(), a.kps.size(), b.kps.size(), norm);
    return {s.value, s.degenerate};
}

eval::MatcherReport matcher_report(const std::vector<EyeAnnotation>& annotations,
                                   const eval::Protocol& protocol,
                                   const eval::ScoreSet& scores) {
    eval::MatcherReport r;
    r.matcher_id = scores.matcher_id;
    std::vector<double> gen, imp;
    scores.split(gen, imp);
    const auto e = eval::eer(gen, imp);
    r.eer = e.eer;
    r.threshold = e.threshold;
    r.genuine_count = gen.size();
    r.impostor_count = imp.size();
    r.degenerate_count = scores.count(eval::PairFlag::degenerate);
    r.failed_count = scores.count(eval::PairFlag::failed);
    double gsum = 0.0, isum = 0.0;
    for (double v : gen) gsum += v;
    for (double v : imp) isum += v;
    r.genuine_mean = gen.empty() ? 0.0 : gsum / static_cast<double>(gen.size());
    r.impostor_mean = imp.empty() ? 0.0 : isum / static_cast<double>(imp.size());
    r.det = eval::det_curve(gen, imp);
    r.cross = eval::cross_distance_matrix(annotations, protocol, scores);
    return r;
}

}  // namespace

std::string RunConfig::to_json() const {
    nlohmann::json j{{"matchers", matchers},
                     {"nf", nf},
                     {"sigmas", sigmas},
                     {"rot_range_deg", rot_range_deg},
                     {"rot_step_deg", rot_step_deg},
                     {"clahe_clip", clahe_clip},
                     {"clahe_tiles", clahe_tiles},
                     {"texture_metric", texture_metric},
                     {"sift_norm", sift_norm},
                     {"lowe_ratio", lowe_ratio},
                     {"geo_angle_gate_deg", geo_angle_gate_deg},
                     {"geo_length_gate_frac", geo_length_gate_frac},
                     {"seed", seed}};
    return j.dump();
}

void RunConfig::merge_json(const std::string& json_text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(json_text);
    } catch (const nlohmann::json::exception& e) {
        throw InputError(std::string("malformed config JSON: ") + e.what());
    }
    try {
        if (j.contains("matchers")) matchers = j["matchers"].get<std::vector<std::string>>();
        if (j.contains("nf")) nf = j["nf"].get<int>();
        if (j.contains("sigmas")) sigmas = j["sigmas"].get<std::vector<double>>();
        if (j.contains("rot_range_deg")) rot_range_deg = j["rot_range_deg"].get<double>();
        if (j.contains("rot_step_deg")) rot_step_deg = j["rot_step_deg"].get<double>();
        if (j.contains("clahe_clip")) clahe_clip = j["clahe_clip"].get<double>();
        if (j.contains("clahe_tiles")) clahe_tiles = j["clahe_tiles"].get<int>();
        if (j.contains("texture_metric"))
            texture_metric = j["texture_metric"].get<std::string>();
        if (j.contains("sift_norm")) sift_norm = j["sift_norm"].get<std::string>();
        if (j.contains("lowe_ratio")) lowe_ratio = j["lowe_ratio"].get<double>();
        if (j.contains("geo_angle_gate_deg"))
            geo_angle_gate_deg = j["geo_angle_gate_deg"].get<double>();
        if (j.contains("geo_length_gate_frac"))
            geo_length_gate_frac = j["geo_length_gate_frac"].get<double>();
        if (j.contains("seed")) seed = j["seed"].get<uint64_t>();
    } catch (const nlohmann::json::exception& e) {
        throw InputError(std::string("bad config field: ") + e.what());
    }
}

std::string descriptor_path(const std::string& desc_dir, const std::string& matcher,
                            const EyeAnnotation& ann) {
    const std::string name =
        sanitize_stem(ann.image_path) + "_" + to_hex(fnv1a64(ann.image_path)).substr(0, 8);
    return (fs::path(desc_dir) / matcher / (name + ".json")).string();
}

std::vector<EyeAnnotation> run_normalize(const std::string& annotations_csv,
                                         const std::string& out_dir, unsigned workers) {
    std::vector<std::string> diagnostics;
    const auto annotations = load_annotations(annotations_csv, &diagnostics);
    if (annotations.empty()) throw InputError("no valid annotations in " + annotations_csv);

    std::set<std::string> tags;
    for (const auto& a : annotations) tags.insert(a.distance_tag);
    std::map<std::string, double> targets;
    for (const auto& tag : tags)
        targets[tag] = group_target_radius(annotations, tag);

    const fs::path roi_dir = fs::path(out_dir) / "roi";
    std::error_code ec;
    fs::create_directories(roi_dir, ec);
    if (ec) throw IoError("cannot create " + roi_dir.string());

    std::vector<EyeAnnotation> normalized(annotations.size());
    parallel_for(annotations.size(), workers, [&](size_t begin, size_t end) {
        for (size_t i = begin; i < end; ++i) {
            const auto& ann = annotations[i];
            const GrayImage img = load_gray(ann.image_path);
            auto roi = normalize_image(img, ann, targets.at(ann.distance_tag));
            const std::string name = sanitize_stem(ann.image_path) + "_" +
                                     to_hex(fnv1a64(ann.image_path)).substr(0, 8) + ".png";
            const std::string path = (roi_dir / name).string();
            save_png_gray8(roi.roi, path);
            roi.annotation.image_path = path;
            normalized[i] = std::move(roi.annotation);
        }
    });

    save_annotations(normalized, (fs::path(out_dir) / "normalized.csv").string());
    return normalized;
}

void run_extract(const std::vector<EyeAnnotation>& normalized,
                 const std::vector<std::string>& matchers, const RunConfig& config,
                 const std::string& desc_dir, unsigned workers) {
    const auto contexts = make_group_contexts(normalized, config);
    for (const auto& matcher : matchers) {
        std::error_code ec;
        fs::create_directories(fs::path(desc_dir) / matcher, ec);
        if (ec) throw IoError("cannot create descriptor directory for " + matcher);
    }
    // One task per (image, matcher), index-keyed for determinism.
    struct Task {
        size_t ann_idx;
        const std::string* matcher;
    };
    std::vector<Task> tasks;
    for (size_t i = 0; i < normalized.size(); ++i)
        for (const auto& m : matchers) tasks.push_back({i, &m});

    parallel_for(tasks.size(), workers, [&](size_t begin, size_t end) {
        for (size_t t = begin; t < end; ++t) {
            const auto& ann = normalized[tasks[t].ann_idx];
            const std::string& matcher = *tasks[t].matcher;
            const std::string path = descriptor_path(desc_dir, matcher, ann);
            if (fs::exists(path)) continue;
            extract_one(ann, matcher, config, contexts.at(ann.distance_tag), path);
        }
    });
}

EvalOutput run_eval(const std::string& normalized_csv, const std::string& desc_dir,
                    const RunConfig& config, const std::string& out_dir,
                    unsigned workers) {
    EvalOutput out;
    out.annotations = load_annotations(normalized_csv);
    out.protocol = eval::generate_protocol(out.annotations);

    // Descriptors extracted on demand for any missing file.
    run_extract(out.annotations, config.matchers, config, desc_dir, workers);

    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec) throw IoError("cannot create " + out_dir);

    for (const auto& matcher : config.matchers) {
        eval::PairScorer scorer;
        // Loaded descriptor caches, index-aligned with annotations.
        if (matcher == "safe") {
            auto descs = std::make_shared<std::vector<safe::SafeDescriptor>>();
            descs->reserve(out.annotations.size());
            for (const auto& ann : out.annotations)
                descs->push_back(
                    safe::load_descriptor(descriptor_path(desc_dir, matcher, ann)));
            const double range = config.rot_range_deg;
            const double step = config.rot_step_deg;
            scorer = [descs, range, step](int e, int t) -> std::pair<double, bool> {
                const double s =
                    range > 0.0
                        ? safe::match_with_rotation((*descs)[e], (*descs)[t], range, step)
                        : safe::match((*descs)[e], (*descs)[t]);
                return {s, false};
            };
        } else if (matcher == "lbp" || matcher == "hog") {
            auto descs = std::make_shared<std::vector<texture::BlockDescriptor>>();
            descs->reserve(out.annotations.size());
            for (const auto& ann : out.annotations)
                descs->push_back(
                    texture::load_block_descriptor(descriptor_path(desc_dir, matcher, ann)));
            const RunConfig cfg = config;
            scorer = [descs, cfg](int e, int t) -> std::pair<double, bool> {
                return {texture_similarity((*descs)[e], (*descs)[t], cfg), false};
            };
        } else if (matcher == "sift") {
            auto descs = std::make_shared<std::vector<SiftEntry>>();
            descs->reserve(out.annotations.size());
            for (const auto& ann : out.annotations) {
                SiftEntry entry;
                entry.kps = sift::load_keypoints(descriptor_path(desc_dir, matcher, ann),
                                                 &entry.width, &entry.height);
                descs->push_back(std::move(entry));
            }
            const RunConfig cfg = config;
            scorer = [descs, cfg](int e, int t) {
                return sift_pair_score((*descs)[e], (*descs)[t], cfg);
            };
        } else {
            throw ParamError("unknown matcher: " + matcher);
        }

        auto scores = eval::run_matcher(out.protocol, matcher, scorer, workers);
        eval::save_scores_csv(out.annotations, scores,
                              (fs::path(out_dir) / ("scores_" + matcher + ".csv")).string());
        out.report.matchers.push_back(
            matcher_report(out.annotations, out.protocol, scores));
        out.scoresets.push_back(std::move(scores));
    }

    out.report.config_json = config.to_json();
    out.report.genuine_pairs = out.protocol.genuine_count();
    out.report.impostor_pairs = out.protocol.impostor_count();
    out.report.protocol_diagnostics = out.protocol.diagnostics;
    eval::emit_report(out.report, out_dir, /*also_csv=*/true);
    return out;
}

eval::Report run_fuse(const std::string& normalized_csv, const std::string& scores_dir,
                      const std::vector<std::vector<std::string>>& combos,
                      const RunConfig& config, const std::string& out_dir) {
    const auto annotations = load_annotations(normalized_csv);
    const auto protocol = eval::generate_protocol(annotations);

    // Reload every matcher named by any combo and realign with the protocol.
    std::set<std::string> needed;
    for (const auto& combo : combos)
        for (const auto& m : combo) needed.insert(m);

    std::map<std::string, eval::ScoreSet> scoresets;
    for (const auto& matcher : needed) {
        const std::string path =
            (fs::path(scores_dir) / ("scores_" + matcher + ".csv")).string();
        const auto rows = eval::load_scores_csv(path);
        if (rows.size() != protocol.pairs.size())
            throw IncompatibleError("scores in " + path + " do not match the protocol");
        eval::ScoreSet set;
        set.matcher_id = matcher;
        set.scores.resize(rows.size());
        for (size_t i = 0; i < rows.size(); ++i) {
            const auto& pair = protocol.pairs[i];
            if (annotations[pair.enrol_idx].image_path != rows[i].enrol_id ||
                annotations[pair.test_idx].image_path != rows[i].test_id)
                throw IncompatibleError("scores in " + path +
                                        " are not aligned with the protocol");
            set.scores[i] = {pair.enrol_idx, pair.test_idx, pair.label, rows[i].score,
                             rows[i].flag};
        }
        scoresets[matcher] = std::move(set);
    }

    eval::Report report;
    report.config_json = config.to_json();
    report.genuine_pairs = protocol.genuine_count();
    report.impostor_pairs = protocol.impostor_count();
    report.protocol_diagnostics = protocol.diagnostics;

    // Individual EERs (for the best-individual baseline) come along too.
    double best_individual = std::numeric_limits<double>::infinity();
    for (const auto& [matcher, set] : scoresets) {
        auto r = matcher_report(annotations, protocol, set);
        best_individual = std::min(best_individual, r.eer);
        report.matchers.push_back(std::move(r));
    }

    for (const auto& combo : combos) {
        std::vector<const eval::ScoreSet*> sets;
        for (const auto& m : combo) sets.push_back(&scoresets.at(m));
        report.fusions.push_back(
            eval::fuse_cross_validated(annotations, protocol, sets, best_individual));
    }

    eval::emit_report(report, out_dir, /*also_csv=*/true);
    return report;
}

std::pair<double, bool> match_descriptor_files(const std::string& matcher,
                                               const std::string& enrol_path,
                                               const std::string& test_path,
                                               const RunConfig& config) {
    if (matcher == "safe") {
        const auto a = safe::load_descriptor(enrol_path);
        const auto b = safe::load_descriptor(test_path);
        const double s = config.rot_range_deg > 0.0
                             ? safe::match_with_rotation(a, b, config.rot_range_deg,
                                                         config.rot_step_deg)
                             : safe::match(a, b);
        return {s, false};
    }
    if (matcher == "lbp" || matcher == "hog") {
        const auto a = texture::load_block_descriptor(enrol_path);
        const auto b = texture::load_block_descriptor(test_path);
        return {texture_similarity(a, b, config), false};
    }
    if (matcher == "sift") {
        SiftEntry a, b;
        a.kps = sift::load_keypoints(enrol_path, &a.width, &a.height);
        b.kps = sift::load_keypoints(test_path, &b.width, &b.height);
        return sift_pair_score(a, b, config);
    }
    throw ParamError("unknown matcher: " + matcher);
}

std::vector<std::vector<std::string>> all_combos(const std::vector<std::string>& matchers) {
    std::vector<std::vector<std::string>> combos;
    const size_t n = matchers.size();
    for (size_t mask = 1; mask < (size_t{1} << n); ++mask) {
        if (__builtin_popcountll(mask) < 2) continue;
        std::vector<std::string> combo;
        for (size_t i = 0; i < n; ++i)
            if (mask & (size_t{1} << i)) combo.push_back(matchers[i]);
        combos.push_back(std::move(combo));
    }
    return combos;
}

}  // namespace peri::pipeline
