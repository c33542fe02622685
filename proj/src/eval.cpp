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

#include "peri/eval.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <set>

#include "json.hpp"
#include "peri/errors.hpp"
#include "peri/fusion.hpp"
#include "peri/util.hpp"

namespace peri::eval {

namespace {

const char* label_name(PairLabel l) {
    return l == PairLabel::genuine ? "genuine" : "impostor";
}

const char* flag_name(PairFlag f) {
    switch (f) {
        case PairFlag::ok: return "ok";
        case PairFlag::degenerate: return "degenerate";
        default: return "failed";
    }
}

PairFlag flag_from(const std::string& s) {
    if (s == "ok") return PairFlag::ok;
    if (s == "degenerate") return PairFlag::degenerate;
    if (s == "failed") return PairFlag::failed;
    throw InputError("unknown score flag: " + s);
}

// Fraction of sorted `scores` that are >= t / < t.
double frac_at_least(const std::vector<double>& sorted, double t) {
    const auto it = std::lower_bound(sorted.begin(), sorted.end(), t);
    return static_cast<double>(sorted.end() - it) / static_cast<double>(sorted.size());
}

double frac_below(const std::vector<double>& sorted, double t) {
    const auto it = std::lower_bound(sorted.begin(), sorted.end(), t);
    return static_cast<double>(it - sorted.begin()) / static_cast<double>(sorted.size());
}

std::vector<double> sorted_distinct(const std::vector<double>& genuine,
                                    const std::vector<double>& impostor) {
    std::vector<double> all;
    all.reserve(genuine.size() + impostor.size());
    all.insert(all.end(), genuine.begin(), genuine.end());
    all.insert(all.end(), impostor.begin(), impostor.end());
    std::sort(all.begin(), all.end());
    all.erase(std::unique(all.begin(), all.end()), all.end());
    return all;
}

nlohmann::json det_to_json(const std::vector<DetPoint>& det) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& p : det) arr.push_back({p.threshold, p.far, p.frr});
    return arr;
}

std::vector<DetPoint> det_from_json(const nlohmann::json& arr) {
    std::vector<DetPoint> det;
    for (const auto& p : arr) det.push_back({p.at(0), p.at(1), p.at(2)});
    return det;
}

nlohmann::json cross_to_json(const CrossDistance& c) {
    nlohmann::json matrix = nlohmann::json::array();
    for (const auto& row : c.matrix) {
        nlohmann::json r = nlohmann::json::array();
        for (const auto& cell : row) {
            if (cell)
                r.push_back(*cell);
            else
                r.push_back(nullptr);
        }
        matrix.push_back(std::move(r));
    }
    nlohmann::json lags = nlohmann::json::array();
    for (const auto& v : c.by_lag) {
        if (v)
            lags.push_back(*v);
        else
            lags.push_back(nullptr);
    }
    return nlohmann::json{{"tags", c.tags}, {"matrix", matrix}, {"by_lag", lags}};
}

CrossDistance cross_from_json(const nlohmann::json& j) {
    CrossDistance c;
    c.tags = j.at("tags").get<std::vector<std::string>>();
    for (const auto& row : j.at("matrix")) {
        std::vector<std::optional<double>> r;
        for (const auto& cell : row)
            r.push_back(cell.is_null() ? std::nullopt
                                       : std::optional<double>(cell.get<double>()));
        c.matrix.push_back(std::move(r));
    }
    for (const auto& v : j.at("by_lag"))
        c.by_lag.push_back(v.is_null() ? std::nullopt
                                       : std::optional<double>(v.get<double>()));
    return c;
}

std::string csv_escape(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char ch : s) {
        if (ch == '"') out += "\"\"";
        else out += ch;
    }
    out += "\"";
    return out;
}

}  // namespace

size_t Protocol::genuine_count() const {
    return static_cast<size_t>(std::count_if(pairs.begin(), pairs.end(), [](const auto& p) {
        return p.label == PairLabel::genuine;
    }));
}

size_t Protocol::impostor_count() const { return pairs.size() - genuine_count(); }

Protocol generate_protocol(const std::vector<EyeAnnotation>& annotations) {
    Protocol protocol;

    // Users in sorted order; images per user sorted by (session, path).
    std::map<std::string, std::vector<int>> users;
    for (int i = 0; i < static_cast<int>(annotations.size()); ++i)
        users[annotations[i].user_id()].push_back(i);
    for (auto& [id, idxs] : users) {
        std::sort(idxs.begin(), idxs.end(), [&](int a, int b) {
            const auto& A = annotations[a];
            const auto& B = annotations[b];
            if (A.session != B.session) return A.session < B.session;
            return A.image_path < B.image_path;
        });
    }

    // Genuine: all unordered within-user pairs.
    for (const auto& [id, idxs] : users) {
        for (size_t i = 0; i < idxs.size(); ++i)
            for (size_t j = i + 1; j < idxs.size(); ++j)
                protocol.pairs.push_back({idxs[i], idxs[j], PairLabel::genuine});
        if (idxs.size() < 2)
            protocol.diagnostics.push_back("user " + id + ": fewer than 2 images, no genuine pairs");
    }

    // First/second image per (user, distance), in the sorted order above.
    std::set<std::string> tag_set;
    for (const auto& a : annotations) tag_set.insert(a.distance_tag);
    const std::vector<std::string> tags(tag_set.begin(), tag_set.end());

    std::map<std::string, std::map<std::string, std::vector<int>>> per_cell;
    for (const auto& [id, idxs] : users)
        for (int idx : idxs) per_cell[id][annotations[idx].distance_tag].push_back(idx);

    for (const auto& tag : tags) {
        for (const auto& [id, cells] : per_cell) {
            const auto it = cells.find(tag);
            if (it == cells.end()) {
                protocol.diagnostics.push_back("user " + id + ": no image at " + tag);
            } else if (it->second.size() < 2) {
                protocol.diagnostics.push_back("user " + id + ": no second image at " + tag);
            }
        }
    }

    // Impostor: per ordered distance cell, first of each user against the
    // second of every other user.
    for (const auto& enrol_tag : tags) {
        for (const auto& test_tag : tags) {
            for (const auto& [enrol_user, enrol_cells] : per_cell) {
                const auto eit = enrol_cells.find(enrol_tag);
                if (eit == enrol_cells.end() || eit->second.empty()) continue;
                const int enrol_idx = eit->second.front();
                for (const auto& [test_user, test_cells] : per_cell) {
                    if (test_user == enrol_user) continue;
                    const auto tit = test_cells.find(test_tag);
                    if (tit == test_cells.end() || tit->second.size() < 2) continue;
                    protocol.pairs.push_back({enrol_idx, tit->second[1], PairLabel::impostor});
                }
            }
        }
    }
    return protocol;
}

size_t ScoreSet::count(PairFlag flag) const {
    return static_cast<size_t>(std::count_if(
        scores.begin(), scores.end(), [&](const auto& s) { return s.flag == flag; }));
}

void ScoreSet::split(std::vector<double>& genuine, std::vector<double>& impostor) const {
    genuine.clear();
    impostor.clear();
    for (const auto& s : scores) {
        if (s.flag != PairFlag::ok) continue;
        (s.label == PairLabel::genuine ? genuine : impostor).push_back(s.score);
    }
}

ScoreSet run_matcher(const Protocol& protocol, const std::string& matcher_id,
                     const PairScorer& scorer, unsigned workers,
                     double max_failure_fraction) {
    ScoreSet set;
    set.matcher_id = matcher_id;
    set.scores.resize(protocol.pairs.size());
    std::atomic<size_t> failures{0};

    parallel_for(protocol.pairs.size(), workers, [&](size_t begin, size_t end) {
        for (size_t i = begin; i < end; ++i) {
            const auto& pair = protocol.pairs[i];
            ScoredPair out;
            out.enrol_idx = pair.enrol_idx;
            out.test_idx = pair.test_idx;
            out.label = pair.label;
            try {
                const auto [score, degenerate] = scorer(pair.enrol_idx, pair.test_idx);
                out.score = score;
                out.flag = degenerate ? PairFlag::degenerate : PairFlag::ok;
            } catch (const UndefinedScoreError&) {
                out.score = 0.0;
                out.flag = PairFlag::degenerate;
            } catch (const std::exception&) {
                out.score = 0.0;
                out.flag = PairFlag::failed;
                failures.fetch_add(1, std::memory_order_relaxed);
            }
            set.scores[i] = std::move(out);
        }
    });

    if (!protocol.pairs.empty() &&
        static_cast<double>(failures.load()) >
            max_failure_fraction * static_cast<double>(protocol.pairs.size()))
        throw RunError("matcher " + matcher_id + ": " + std::to_string(failures.load()) +
                       " of " + std::to_string(protocol.pairs.size()) + " pairs failed");
    return set;
}

EerResult eer(const std::vector<double>& genuine, const std::vector<double>& impostor) {
    if (genuine.empty() || impostor.empty())
        throw InputError("EER needs at least one score of each class");
    std::vector<double> gen = genuine, imp = impostor;
    std::sort(gen.begin(), gen.end());
    std::sort(imp.begin(), imp.end());

    EerResult best;
    double best_gap = std::numeric_limits<double>::infinity();
    for (double t : sorted_distinct(gen, imp)) {
        const double far = frac_at_least(imp, t);
        const double frr = frac_below(gen, t);
        const double gap = std::fabs(far - frr);
        if (gap < best_gap) {  // strict: ties resolve to the smaller threshold
            best_gap = gap;
            best.eer = 0.5 * (far + frr);
            best.threshold = t;
        }
    }
    return best;
}

std::vector<DetPoint> det_curve(const std::vector<double>& genuine,
                                const std::vector<double>& impostor) {
    if (genuine.empty() || impostor.empty())
        throw InputError("DET curve needs at least one score of each class");
    std::vector<double> gen = genuine, imp = impostor;
    std::sort(gen.begin(), gen.end());
    std::sort(imp.begin(), imp.end());

    std::vector<DetPoint> det;
    const auto thresholds = sorted_distinct(gen, imp);
    det.reserve(thresholds.size() + 1);
    for (double t : thresholds)
        det.push_back({t, frac_at_least(imp, t), frac_below(gen, t)});
    det.push_back({thresholds.back() + 1.0, 0.0, 1.0});  // above-max sentinel
    return det;
}

CrossDistance cross_distance_matrix(const std::vector<EyeAnnotation>& annotations,
                                    const Protocol& protocol, const ScoreSet& scores) {
    if (scores.scores.size() != protocol.pairs.size())
        throw IncompatibleError("score set does not match protocol");

    std::set<std::string> tag_set;
    for (const auto& a : annotations) tag_set.insert(a.distance_tag);
    CrossDistance out;
    out.tags.assign(tag_set.begin(), tag_set.end());
    const size_t n = out.tags.size();
    auto tag_index = [&](const std::string& t) {
        return static_cast<size_t>(
            std::lower_bound(out.tags.begin(), out.tags.end(), t) - out.tags.begin());
    };

    std::vector<std::vector<std::vector<double>>> cell_gen(n,
        std::vector<std::vector<double>>(n));
    std::vector<std::vector<std::vector<double>>> cell_imp(n,
        std::vector<std::vector<double>>(n));
    std::vector<std::vector<double>> lag_gen(n), lag_imp(n);

    for (const auto& s : scores.scores) {
        if (s.flag != PairFlag::ok) continue;
        const size_t i = tag_index(annotations[s.enrol_idx].distance_tag);
        const size_t j = tag_index(annotations[s.test_idx].distance_tag);
        auto& cell = s.label == PairLabel::genuine ? cell_gen[i][j] : cell_imp[i][j];
        cell.push_back(s.score);
        const size_t lag = i > j ? i - j : j - i;
        (s.label == PairLabel::genuine ? lag_gen[lag] : lag_imp[lag]).push_back(s.score);
    }

    out.matrix.assign(n, std::vector<std::optional<double>>(n));
    for (size_t i = 0; i < n; ++i) {
        for (size_t j = 0; j < n; ++j) {
            if (cell_gen[i][j].empty() || cell_imp[i][j].empty()) continue;
            out.matrix[i][j] = eer(cell_gen[i][j], cell_imp[i][j]).eer;
        }
    }
    out.by_lag.assign(n, std::nullopt);
    for (size_t l = 0; l < n; ++l) {
        if (lag_gen[l].empty() || lag_imp[l].empty()) continue;
        out.by_lag[l] = eer(lag_gen[l], lag_imp[l]).eer;
    }
    return out;
}

void emit_report(const Report& report, const std::string& out_dir, bool also_csv) {
    std::filesystem::create_directories(out_dir);

    nlohmann::json matchers = nlohmann::json::array();
    for (const auto& m : report.matchers) {
        matchers.push_back({{"matcher", m.matcher_id},
                            {"eer", m.eer},
                            {"threshold", m.threshold},
                            {"genuine_mean", m.genuine_mean},
                            {"impostor_mean", m.impostor_mean},
                            {"genuine_count", m.genuine_count},
                            {"impostor_count", m.impostor_count},
                            {"degenerate_count", m.degenerate_count},
                            {"failed_count", m.failed_count},
                            {"det", det_to_json(m.det)},
                            {"cross_distance", cross_to_json(m.cross)}});
        // DET points as CSV for external plotting.
        std::ofstream det_csv(out_dir + "/det_" + m.matcher_id + ".csv");
        if (!det_csv) throw IoError("cannot write DET csv for " + m.matcher_id);
        det_csv << "threshold,far,frr\n";
        for (const auto& p : m.det)
            det_csv << canonical_double(p.threshold) << "," << canonical_double(p.far)
                    << "," << canonical_double(p.frr) << "\n";
    }
    nlohmann::json fusions = nlohmann::json::array();
    for (const auto& f : report.fusions) {
        fusions.push_back({{"matchers", f.matcher_ids},
                           {"eer", f.eer},
                           {"variation_vs_best", f.variation_vs_best},
                           {"held_out_count", f.held_out_count},
                           {"straddle_dropped", f.straddle_dropped},
                           {"degenerate_dropped", f.degenerate_dropped}});
    }
    nlohmann::json j{{"config", nlohmann::json::parse(report.config_json.empty()
                                                          ? std::string("{}")
                                                          : report.config_json)},
                     {"genuine_pairs", report.genuine_pairs},
                     {"impostor_pairs", report.impostor_pairs},
                     {"protocol_diagnostics", report.protocol_diagnostics},
                     {"matchers", std::move(matchers)},
                     {"fusion", std::move(fusions)}};

    std::ofstream out(out_dir + "/report.json");
    if (!out) throw IoError("cannot write report.json");
    out << j.dump(2) << "\n";
    if (!out) throw IoError("short write to report.json");

    if (also_csv) {
        std::ofstream csv(out_dir + "/report.csv");
        if (!csv) throw IoError("cannot write report.csv");
        csv << "system,kind,eer,variation_vs_best\n";
        for (const auto& m : report.matchers)
            csv << csv_escape(m.matcher_id) << ",matcher," << canonical_double(m.eer)
                << ",\n";
        for (const auto& f : report.fusions) {
            std::string combo;
            for (size_t i = 0; i < f.matcher_ids.size(); ++i)
                combo += (i ? "+" : "") + f.matcher_ids[i];
            csv << csv_escape(combo) << ",fusion," << canonical_double(f.eer) << ","
                << canonical_double(f.variation_vs_best) << "\n";
        }
    }
}

Report load_report(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path);
    nlohmann::json j;
    try {
        in >> j;
        Report r;
        r.config_json = j.at("config").dump();
        r.genuine_pairs = j.at("genuine_pairs").get<size_t>();
        r.impostor_pairs = j.at("impostor_pairs").get<size_t>();
        r.protocol_diagnostics =
            j.at("protocol_diagnostics").get<std::vector<std::string>>();
        for (const auto& m : j.at("matchers")) {
            MatcherReport mr;
            mr.matcher_id = m.at("matcher").get<std::string>();
            mr.eer = m.at("eer").get<double>();
            mr.threshold = m.at("threshold").get<double>();
            mr.genuine_mean = m.at("genuine_mean").get<double>();
            mr.impostor_mean = m.at("impostor_mean").get<double>();
            mr.genuine_count = m.at("genuine_count").get<size_t>();
            mr.impostor_count = m.at("impostor_count").get<size_t>();
            mr.degenerate_count = m.at("degenerate_count").get<size_t>();
            mr.failed_count = m.at("failed_count").get<size_t>();
            mr.det = det_from_json(m.at("det"));
            mr.cross = cross_from_json(m.at("cross_distance"));
            r.matchers.push_back(std::move(mr));
        }
        for (const auto& f : j.at("fusion")) {
            FusionReport fr;
            fr.matcher_ids = f.at("matchers").get<std::vector<std::string>>();
            fr.eer = f.at("eer").get<double>();
            fr.variation_vs_best = f.at("variation_vs_best").get<double>();
            fr.held_out_count = f.at("held_out_count").get<size_t>();
            fr.straddle_dropped = f.at("straddle_dropped").get<size_t>();
            fr.degenerate_dropped = f.at("degenerate_dropped").get<size_t>();
            r.fusions.push_back(std::move(fr));
        }
        return r;
    } catch (const nlohmann::json::exception& e) {
        throw InputError("malformed report JSON " + path + ": " + e.what());
    }
}

void save_scores_csv(const std::vector<EyeAnnotation>& annotations, const ScoreSet& scores,
                     const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path);
    out << "enrol_id,test_id,label,enrol_dist,test_dist,matcher,score,flag\n";
    for (const auto& s : scores.scores) {
        const auto& e = annotations[s.enrol_idx];
        const auto& t = annotations[s.test_idx];
        out << csv_escape(e.image_path) << "," << csv_escape(t.image_path) << ","
            << label_name(s.label) << "," << e.distance_tag << "," << t.distance_tag << ","
            << scores.matcher_id << "," << canonical_double(s.score) << ","
            << flag_name(s.flag) << "\n";
    }
    if (!out) throw IoError("short write to " + path);
}

std::vector<ScoreRow> load_scores_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path);
    std::string line;
    if (!std::getline(in, line)) throw InputError("empty scores file: " + path);
    if (line != "enrol_id,test_id,label,enrol_dist,test_dist,matcher,score,flag")
        throw InputError("unexpected scores header in " + path);

    std::vector<ScoreRow> rows;
    size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        // Minimal CSV field split supporting quoted fields.
        std::vector<std::string> fields;
        std::string cur;
        bool quoted = false;
        for (size_t i = 0; i < line.size(); ++i) {
            const char c = line[i];
            if (quoted) {
                if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
                    cur += '"';
                    ++i;
                } else if (c == '"') {
                    quoted = false;
                } else {
                    cur += c;
                }
            } else if (c == '"') {
                quoted = true;
            } else if (c == ',') {
                fields.push_back(std::move(cur));
                cur.clear();
            } else {
                cur += c;
            }
        }
        fields.push_back(std::move(cur));
        if (fields.size() != 8)
            throw InputError(path + ": line " + std::to_string(line_no) +
                             ": expected 8 fields");
        ScoreRow r;
        r.enrol_id = fields[0];
        r.test_id = fields[1];
        if (fields[2] == "genuine")
            r.label = PairLabel::genuine;
        else if (fields[2] == "impostor")
            r.label = PairLabel::impostor;
        else
            throw InputError(path + ": line " + std::to_string(line_no) + ": bad label");
        r.enrol_dist = fields[3];
        r.test_dist = fields[4];
        r.matcher = fields[5];
        try {
            r.score = std::stod(fields[6]);
        } catch (const std::exception&) {
            throw InputError(path + ": line " + std::to_string(line_no) + ": bad score");
        }
        r.flag = flag_from(fields[7]);
        rows.push_back(std::move(r));
    }
    return rows;
}

FusionReport fuse_cross_validated(const std::vector<EyeAnnotation>& annotations,
                                  const Protocol& protocol,
                                  const std::vector<const ScoreSet*>& matchers,
                                  double best_individual_eer) {
    if (matchers.empty()) throw ParamError("fusion needs at least one matcher");
    for (const auto* m : matchers)
        if (m->scores.size() != protocol.pairs.size())
            throw IncompatibleError("score sets do not align with protocol");

    // Alternate sorted users between the two folds.
    std::set<std::string> user_set;
    for (const auto& a : annotations) user_set.insert(a.user_id());
    std::map<std::string, int> fold_of;
    int next = 0;
    for (const auto& u : user_set) fold_of[u] = (next++) % 2;

    FusionReport report;
    for (const auto* m : matchers) report.matcher_ids.push_back(m->matcher_id);

    struct Trial {
        std::vector<double> scores;
        int label;
        int fold;
    };
    std::vector<Trial> trials;
    trials.reserve(protocol.pairs.size());
    for (size_t i = 0; i < protocol.pairs.size(); ++i) {
        const auto& pair = protocol.pairs[i];
        bool usable = true;
        std::vector<double> scores(matchers.size());
        for (size_t k = 0; k < matchers.size(); ++k) {
            const auto& s = matchers[k]->scores[i];
            if (s.flag != PairFlag::ok) {
                usable = false;
                break;
            }
            scores[k] = s.score;
        }
        if (!usable) {
            ++report.degenerate_dropped;
            continue;
        }
        const int fe = fold_of[annotations[pair.enrol_idx].user_id()];
        const int ft = fold_of[annotations[pair.test_idx].user_id()];
        if (fe != ft) {
            ++report.straddle_dropped;
            continue;
        }
        trials.push_back({std::move(scores), pair.label == PairLabel::genuine ? 1 : 0, fe});
    }

    std::vector<double> held_gen, held_imp;
    for (int fold = 0; fold < 2; ++fold) {
        std::vector<std::vector<double>> train_scores;
        std::vector<int> train_labels;
        for (const auto& t : trials) {
            if (t.fold == fold) {
                train_scores.push_back(t.scores);
                train_labels.push_back(t.label);
            }
        }
        const auto model =
            fusion::train(train_scores, train_labels, report.matcher_ids);
        for (const auto& t : trials) {
            if (t.fold == fold) continue;  // held-out = the other fold
            const double f = fusion::apply(model, t.scores);
            (t.label ? held_gen : held_imp).push_back(f);
        }
    }
    report.held_out_count = held_gen.size() + held_imp.size();
    report.eer = eer(held_gen, held_imp).eer;
    report.variation_vs_best =
        best_individual_eer > 0.0
            ? (report.eer - best_individual_eer) / best_individual_eer
            : 0.0;
    return report;
}

}  // namespace peri::eval
