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

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "peri/dataset.hpp"
#include "peri/errors.hpp"
#include "peri/eval.hpp"
#include "peri/pipeline.hpp"
#include "peri/util.hpp"

namespace {

using peri::pipeline::RunConfig;

std::vector<std::string> split_list(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == sep) {
            if (!cur.empty()) out.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    if (!cur.empty()) out.push_back(cur);
    return out;
}

std::vector<double> parse_doubles(const std::string& s) {
    std::vector<double> out;
    for (const auto& tok : split_list(s, ',')) out.push_back(std::stod(tok));
    return out;
}

// Flags beat config file beats defaults: parse the config file first, then
// re-apply any flag the user actually passed.
struct ConfigFlags {
    std::string matchers, sigmas, texture_metric, sift_norm;
    int nf = 0;
    double rot_range = 0.0, rot_step = 0.0;
    uint64_t seed = 0;
};

void add_config_flags(CLI::App* cmd, ConfigFlags& f, std::string& config_path) {
    cmd->add_option("--config", config_path, "JSON config file (merged under flags)");
    cmd->add_option("--matcher", f.matchers, "comma list: safe,lbp,hog,sift (or all)");
    cmd->add_option("--nf", f.nf, "SAFE annular ring count");
    cmd->add_option("--sigmas", f.sigmas, "SAFE base sigmas, comma list");
    cmd->add_option("--rot-range", f.rot_range, "SAFE rotation sweep range, degrees");
    cmd->add_option("--rot-step", f.rot_step, "SAFE rotation sweep step, degrees");
    cmd->add_option("--metric", f.texture_metric, "LBP/HOG metric: chi2|euclidean");
    cmd->add_option("--sift-norm", f.sift_norm, "SIFT score normalization: min|avg");
    cmd->add_option("--seed", f.seed, "random seed");
}

RunConfig build_config(const CLI::App* cmd, const ConfigFlags& f,
                       const std::string& config_path) {
    RunConfig config;
    if (!config_path.empty()) {
        std::ifstream in(config_path);
        if (!in) throw peri::IoError("cannot open config " + config_path);
        std::stringstream buf;
        buf << in.rdbuf();
        config.merge_json(buf.str());
    }
    if (cmd->count("--matcher")) {
        config.matchers = f.matchers == "all"
                              ? std::vector<std::string>{"safe", "lbp", "hog", "sift"}
                              : split_list(f.matchers, ',');
    }
    if (cmd->count("--nf")) config.nf = f.nf;
    if (cmd->count("--sigmas")) config.sigmas = parse_doubles(f.sigmas);
    if (cmd->count("--rot-range")) config.rot_range_deg = f.rot_range;
    if (cmd->count("--rot-step")) config.rot_step_deg = f.rot_step;
    if (cmd->count("--metric")) config.texture_metric = f.texture_metric;
    if (cmd->count("--sift-norm")) config.sift_norm = f.sift_norm;
    if (cmd->count("--seed")) config.seed = f.seed;

    if (config.nf < 1) throw peri::ParamError("--nf must be >= 1");
    if (config.sigmas.empty()) throw peri::ParamError("--sigmas must be nonempty");
    for (double s : config.sigmas)
        if (!(s > 0.0)) throw peri::ParamError("--sigmas must be positive");
    if (config.rot_range_deg < 0.0) throw peri::ParamError("--rot-range must be >= 0");
    if (config.rot_step_deg <= 0.0) throw peri::ParamError("--rot-step must be > 0");
    if (config.texture_metric != "chi2" && config.texture_metric != "euclidean")
        throw peri::ParamError("--metric must be chi2 or euclidean");
    if (config.sift_norm != "min" && config.sift_norm != "avg")
        throw peri::ParamError("--sift-norm must be min or avg");
    for (const auto& m : config.matchers)
        if (m != "safe" && m != "lbp" && m != "hog" && m != "sift")
            throw peri::ParamError("unknown matcher: " + m);
    return config;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"periocular verification toolkit"};
    app.require_subcommand(1);

    // ---- synth ----------------------------------------------------------
    auto* synth = app.add_subcommand("synth", "generate a synthetic eye dataset");
    std::string synth_out;
    int synth_subjects = 10, synth_sessions = 2;
    std::string synth_scales = "1.0";
    uint64_t synth_seed = 1;
    double synth_rs = 28.0;
    synth->add_option("--out", synth_out, "output directory")->required();
    synth->add_option("--subjects", synth_subjects, "identity count (>= 2)");
    synth->add_option("--sessions", synth_sessions, "sessions per identity");
    synth->add_option("--scales", synth_scales, "comma list of distance scales");
    synth->add_option("--seed", synth_seed, "random seed");
    synth->add_option("--base-rs", synth_rs, "sclera radius at scale 1 (px)");

    // ---- normalize ------------------------------------------------------
    auto* normalize = app.add_subcommand("normalize", "rescale + crop sclera-centered ROIs");
    std::string norm_ann, norm_out;
    unsigned norm_workers = 1;
    normalize->add_option("--annotations", norm_ann, "annotation CSV")->required();
    normalize->add_option("--out", norm_out, "output directory")->required();
    normalize->add_option("--workers", norm_workers, "worker threads");

    // ---- extract --------------------------------------------------------
    auto* extract = app.add_subcommand("extract", "extract descriptors");
    std::string ex_ann, ex_out, ex_config;
    unsigned ex_workers = 1;
    ConfigFlags ex_flags;
    extract->add_option("--annotations", ex_ann, "normalized annotation CSV")->required();
    extract->add_option("--out", ex_out, "descriptor output directory")->required();
    extract->add_option("--workers", ex_workers, "worker threads");
    add_config_flags(extract, ex_flags, ex_config);

    // ---- match ----------------------------------------------------------
    auto* match = app.add_subcommand("match", "score one descriptor pair");
    std::string m_matcher, m_enrol, m_test, m_config;
    ConfigFlags m_flags;
    match->add_option("--enrol", m_enrol, "enrolment descriptor file")->required();
    match->add_option("--test", m_test, "test descriptor file")->required();
    add_config_flags(match, m_flags, m_config);
    match->add_option("--pair-matcher", m_matcher, "matcher of the two files")->required();

    // ---- eval -----------------------------------------------------------
    auto* eval_cmd = app.add_subcommand("eval", "run the verification protocol");
    std::string ev_ann, ev_desc, ev_out, ev_config;
    unsigned ev_workers = 1;
    ConfigFlags ev_flags;
    eval_cmd->add_option("--annotations", ev_ann, "normalized annotation CSV")->required();
    eval_cmd->add_option("--desc-dir", ev_desc, "descriptor directory")->required();
    eval_cmd->add_option("--out", ev_out, "output directory")->required();
    eval_cmd->add_option("--workers", ev_workers, "worker threads");
    add_config_flags(eval_cmd, ev_flags, ev_config);

    // ---- fuse -----------------------------------------------------------
    auto* fuse = app.add_subcommand("fuse", "cross-validated score fusion");
    std::string fu_ann, fu_scores, fu_out, fu_combos = "all", fu_config;
    ConfigFlags fu_flags;
    fuse->add_option("--annotations", fu_ann, "normalized annotation CSV")->required();
    fuse->add_option("--scores-dir", fu_scores, "directory with scores_<matcher>.csv")
        ->required();
    fuse->add_option("--out", fu_out, "output directory")->required();
    fuse->add_option("--combos", fu_combos,
                     "semicolon list of +-joined combos (safe+sift;lbp+hog) or 'all'");
    add_config_flags(fuse, fu_flags, fu_config);

    // ---- report ---------------------------------------------------------
    auto* report = app.add_subcommand("report", "re-emit a report as JSON/CSV");
    std::string rp_in, rp_out, rp_format = "json";
    report->add_option("--in", rp_in, "existing report.json")->required();
    report->add_option("--out", rp_out, "output directory")->required();
    report->add_option("--format", rp_format, "json|csv (csv also writes json)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (synth->parsed()) {
            peri::SynthConfig cfg;
            cfg.out_dir = synth_out;
            cfg.n_subjects = synth_subjects;
            cfg.sessions = synth_sessions;
            cfg.distance_scales = parse_doubles(synth_scales);
            cfg.seed = synth_seed;
            cfg.base_sclera_radius = synth_rs;
            const auto anns = peri::synth_dataset(cfg);
            std::cout << "wrote " << anns.size() << " images under " << synth_out << "\n";
        } else if (normalize->parsed()) {
            const auto normalized =
                peri::pipeline::run_normalize(norm_ann, norm_out, norm_workers);
            std::cout << "normalized " << normalized.size() << " images into " << norm_out
                      << "\n";
        } else if (extract->parsed()) {
            const RunConfig config = build_config(extract, ex_flags, ex_config);
            const auto anns = peri::load_annotations(ex_ann);
            peri::pipeline::run_extract(anns, config.matchers, config, ex_out, ex_workers);
            std::cout << "extracted " << config.matchers.size() << " matcher(s) for "
                      << anns.size() << " images into " << ex_out << "\n";
        } else if (match->parsed()) {
            const RunConfig config = build_config(match, m_flags, m_config);
            const auto [score, degenerate] =
                peri::pipeline::match_descriptor_files(m_matcher, m_enrol, m_test, config);
            std::cout << peri::canonical_double(score) << (degenerate ? " degenerate" : "")
                      << "\n";
        } else if (eval_cmd->parsed()) {
            const RunConfig config = build_config(eval_cmd, ev_flags, ev_config);
            const auto out =
                peri::pipeline::run_eval(ev_ann, ev_desc, config, ev_out, ev_workers);
            for (const auto& m : out.report.matchers)
                std::cout << m.matcher_id << " EER " << 100.0 * m.eer << "%\n";
        } else if (fuse->parsed()) {
            const RunConfig config = build_config(fuse, fu_flags, fu_config);
            std::vector<std::vector<std::string>> combos;
            if (fu_combos == "all") {
                combos = peri::pipeline::all_combos(config.matchers);
            } else {
                for (const auto& c : split_list(fu_combos, ';'))
                    combos.push_back(split_list(c, '+'));
            }
            const auto rep =
                peri::pipeline::run_fuse(fu_ann, fu_scores, combos, config, fu_out);
            for (const auto& f : rep.fusions) {
                std::string combo;
                for (size_t i = 0; i < f.matcher_ids.size(); ++i)
                    combo += (i ? "+" : "") + f.matcher_ids[i];
                std::cout << combo << " EER " << 100.0 * f.eer << "%\n";
            }
        } else if (report->parsed()) {
            const auto rep = peri::eval::load_report(rp_in);
            peri::eval::emit_report(rep, rp_out, rp_format == "csv");
            std::cout << "report written to " << rp_out << "\n";
        }
    } catch (const peri::ParamError& e) {
        std::cerr << e.what() << "\n";
        return 2;
    } catch (const peri::Error& e) {
        std::cerr << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
