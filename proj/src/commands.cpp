#include "radcap/commands.hpp"

#include <algorithm>
#include <chrono>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "radcap/diagnostics.hpp"
#include "radcap/preprocess.hpp"

namespace radcap::cli {

namespace fs = std::filesystem;

namespace {

void apply_threads(const RunConfig& cfg) {
#ifdef _OPENMP
    if (cfg.threads > 0) omp_set_num_threads(cfg.threads);
#else
    (void)cfg;
#endif
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot open for writing: " + path.string());
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
}

std::string report_header(const RunConfig& cfg, const std::string& tool,
                          const std::vector<std::pair<std::string, std::string>>& inputs) {
    std::ostringstream out;
    out << "# radcap " << tool << " report\n";
    out << "# config_hash=" << config_hash(cfg) << '\n';
    for (const auto& [k, v] : inputs) out << "# " << k << '=' << v << '\n';
    if (cfg.stamp) {
        const auto now = std::chrono::system_clock::now();
        const std::time_t t = std::chrono::system_clock::to_time_t(now);
        char buf[32];
        std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
        out << "# generated_at=" << buf << '\n';
    }
    std::istringstream cfg_lines(render_config(cfg));
    std::string line;
    while (std::getline(cfg_lines, line)) out << "# config." << line << '\n';
    return out.str();
}

}  // namespace

int cmd_validate_manifest(const RunConfig& cfg, const fs::path& manifest_path, std::ostream& out) {
    (void)cfg;
    const Manifest m = load_manifest(manifest_path);
    out << "manifest: " << manifest_path.string() << '\n';
    out << "sequences: " << m.sequences.size() << '\n';
    for (Split s : {Split::Train, Split::Val, Split::Test}) {
        out << to_token(s) << ": " << m.split_sequence_count(s) << " seqs, "
            << m.split_frame_total(s) << " frames\n";
    }
    std::string zero_shot;
    for (const auto& seq : m.sequences)
        if (seq.zero_shot_weather) {
            if (!zero_shot.empty()) zero_shot += ", ";
            zero_shot += std::to_string(seq.seq_id) + " (" + std::string(to_token(seq.weather)) + ")";
        }
    out << "zero-shot weather sequences: " << (zero_shot.empty() ? "none" : zero_shot) << '\n';
    out << "OK\n";
    return 0;
}

int cmd_preprocess(const RunConfig& cfg, const fs::path& input_dir, const fs::path& output_dir,
                   const std::string& variant, std::ostream& out, std::ostream& err) {
    apply_threads(cfg);
    if (variant != "5ch" && variant != "66ch" && variant != "both")
        throw ConfigError("variant must be 5ch, 66ch or both");
    if (!fs::is_directory(input_dir))
        throw ConfigError("input directory does not exist: " + input_dir.string());
    fs::create_directories(output_dir);

    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(input_dir))
        if (entry.is_regular_file() && entry.path().extension() == ".rt4d")
            files.push_back(entry.path());
    std::sort(files.begin(), files.end());

    const bool do5 = variant == "5ch" || variant == "both";
    const bool do66 = variant == "66ch" || variant == "both";
    std::vector<std::string> errors(files.size());

#pragma omp parallel for schedule(dynamic)
    for (int64_t i = 0; i < static_cast<int64_t>(files.size()); ++i) {
        const fs::path& path = files[static_cast<size_t>(i)];
        try {
            const Tesseract tess = read_tesseract(path);
            const RACube cube = elevation_max_project(tess);
            const std::string stem = path.stem().string();
            if (do5) {
                InputTensor t = build_input(cube, cube.grid, InputVariant::FiveCh);
                write_input(output_dir / (stem + ".5ch.rt4d"), t);
            }
            if (do66) {
                InputTensor t = build_input(cube, cube.grid, InputVariant::SixtySixCh);
                write_input(output_dir / (stem + ".66ch.rt4d"), t);
            }
        } catch (const std::exception& e) {
            errors[static_cast<size_t>(i)] = e.what();
        }
    }

    size_t failed = 0;
    for (size_t i = 0; i < files.size(); ++i) {
        if (!errors[i].empty()) {
            ++failed;
            err << "error: " << files[i].string() << ": " << errors[i] << '\n';
        }
    }
    out << "preprocessed " << (files.size() - failed) << "/" << files.size() << " frames ("
        << variant << ")\n";
    return failed == 0 ? 0 : 2;
}

int cmd_gen_gt(const RunConfig& cfg, const fs::path& labels_path, const fs::path& manifest_path,
               const fs::path& output_dir, std::ostream& out) {
    apply_threads(cfg);
    const Manifest manifest = load_manifest(manifest_path);
    const ClassVocabulary& vocab = config_vocabulary(cfg);
    std::vector<LabeledFrame> frames = read_label_file(labels_path);

    for (const auto& f : frames) {
        const auto [seq, idx] = parse_frame_key(f.frame_key);
        const SequenceMeta& meta = manifest.at(seq);
        if (idx < 0 || idx >= meta.frame_count)
            throw MalformedInput("frame " + f.frame_key + " out of range for sequence " +
                                 std::to_string(seq));
    }
    std::sort(frames.begin(), frames.end(), [](const LabeledFrame& a, const LabeledFrame& b) {
        return parse_frame_key(a.frame_key) < parse_frame_key(b.frame_key);
    });

    const bool prose = cfg.caption_format == "prose" || cfg.caption_format == "both";
    const bool structured = cfg.caption_format == "structured" || cfg.caption_format == "both";
    std::vector<CaptionRecord> prose_records(prose ? frames.size() : 0);
    std::vector<CaptionRecord> structured_records(structured ? frames.size() : 0);

#pragma omp parallel for schedule(static)
    for (int64_t i = 0; i < static_cast<int64_t>(frames.size()); ++i) {
        const LabeledFrame& f = frames[static_cast<size_t>(i)];
        std::vector<SceneObject> objs;
        objs.reserve(f.boxes.size());
        for (const auto& b : f.boxes) objs.push_back(to_polar(b, vocab));
        const std::vector<SceneObject> in_fov = fov_filter(objs, cfg.fov_az_deg, cfg.fov_range_m);
        const std::vector<SceneObject> described =
            select_topk(in_fov, static_cast<size_t>(cfg.top_k));
        const int64_t total = static_cast<int64_t>(in_fov.size());
        if (prose) {
            const GtCaption cap = gen_prose(described, total, f.frame_key);
            prose_records[static_cast<size_t>(i)] = {cap.frame_key, cap.format, cap.text};
        }
        if (structured) {
            const GtCaption cap = gen_structured(described, total, f.frame_key);
            structured_records[static_cast<size_t>(i)] = {cap.frame_key, cap.format, cap.text};
        }
    }

    fs::create_directories(output_dir);
    if (prose) write_caption_file(output_dir / "gt_prose.captions", prose_records);
    if (structured) write_caption_file(output_dir / "gt_structured.captions", structured_records);
    out << "generated captions for " << frames.size() << " frames";
    if (prose) out << "  prose=" << (output_dir / "gt_prose.captions").string();
    if (structured) out << "  structured=" << (output_dir / "gt_structured.captions").string();
    out << '\n';
    return 0;
}

int cmd_parse(const RunConfig& cfg, const fs::path& captions_path, const fs::path& output_path,
              std::ostream& out) {
    apply_threads(cfg);
    const ClassVocabulary& vocab = config_vocabulary(cfg);
    const std::vector<CaptionRecord> records = read_caption_file(captions_path);

    std::vector<ParsedPrediction> parsed(records.size());
#pragma omp parallel for schedule(static)
    for (int64_t i = 0; i < static_cast<int64_t>(records.size()); ++i)
        parsed[static_cast<size_t>(i)] = parse_caption(records[static_cast<size_t>(i)], vocab);

    write_predictions(output_path, parsed);
    size_t ok = 0, partial = 0, unparsed = 0;
    for (const auto& p : parsed) {
        if (p.status == ParseStatus::Ok) ++ok;
        else if (p.status == ParseStatus::Partial) ++partial;
        else ++unparsed;
    }
    out << "parsed " << records.size() << " captions: " << ok << " ok, " << partial
        << " partial, " << unparsed << " unparsed -> " << output_path.string() << '\n';
    return 0;
}

int cmd_eval(const RunConfig& cfg, const fs::path& pred_path, const fs::path& gt_path,
             const fs::path& manifest_path, const fs::path& output_dir, std::ostream& out) {
    apply_threads(cfg);
    const Manifest manifest = load_manifest(manifest_path);
    const ClassVocabulary& vocab = config_vocabulary(cfg);

    const std::vector<CaptionRecord> gt_records = read_caption_file(gt_path);
    const std::vector<CaptionRecord> pred_records = read_caption_file(pred_path);

    std::map<std::string, const CaptionRecord*> pred_by_key;
    for (const auto& r : pred_records)
        if (!pred_by_key.emplace(r.frame_key, &r).second)
            throw KeyMismatch("duplicate prediction frame key " + r.frame_key);

    std::map<std::pair<int64_t, int64_t>, const CaptionRecord*> gt_by_frame;
    for (const auto& r : gt_records)
        if (!gt_by_frame.emplace(parse_frame_key(r.frame_key), &r).second)
            throw KeyMismatch("duplicate ground-truth frame key " + r.frame_key);
    for (const auto& r : pred_records)
        if (!gt_by_frame.count(parse_frame_key(r.frame_key)))
            throw KeyMismatch("prediction frame " + r.frame_key + " has no ground truth");

    std::vector<const CaptionRecord*> gt_ordered;
    gt_ordered.reserve(gt_by_frame.size());
    for (const auto& [key, rec] : gt_by_frame) gt_ordered.push_back(rec);

    const MatchOptions opts = cfg.match_options();
    std::vector<FrameEval> evals(gt_ordered.size());
#pragma omp parallel for schedule(static)
    for (int64_t i = 0; i < static_cast<int64_t>(gt_ordered.size()); ++i) {
        const CaptionRecord& gt_rec = *gt_ordered[static_cast<size_t>(i)];
        const std::vector<PredObject> gt_objs =
            gt_objects_from_parsed(parse_caption(gt_rec, vocab));

        ParsedPrediction pred;
        auto it = pred_by_key.find(gt_rec.frame_key);
        if (it != pred_by_key.end()) pred = parse_caption(*it->second, vocab);
        pred.frame_key = gt_rec.frame_key;
        evals[static_cast<size_t>(i)] = match_frame(pred, gt_objs, opts);
    }

    std::vector<std::pair<std::string, AggregateMetrics>> groups;
    groups.emplace_back("all", aggregate(evals));
    std::string strat_key = cfg.stratify_by;
    if (strat_key != "none") {
        auto strata = stratify(evals, manifest, stratify_key_from_token(strat_key));
        groups.insert(groups.end(), strata.begin(), strata.end());
    }

    const std::string header = report_header(cfg, "eval",
                                             {{"pred", pred_path.string()},
                                              {"gt", gt_path.string()},
                                              {"manifest", manifest_path.string()}});
    const std::string table = render_metrics_table(groups);

    fs::create_directories(output_dir);
    write_text(output_dir / "report.txt", header + "\n" + table);
    write_text(output_dir / "metrics.csv", metrics_csv_long(groups));
    if (strat_key != "none") {
        std::vector<std::pair<std::string, AggregateMetrics>> strata_only(groups.begin() + 1,
                                                                          groups.end());
        write_text(output_dir / ("per_" + strat_key + ".csv"),
                   metrics_csv_wide(strata_only, strat_key));
    }

    out << header << '\n' << table;
    return 0;
}

int cmd_report(const RunConfig& cfg, const fs::path& metrics_csv_path, std::ostream& out) {
    (void)cfg;
    std::ifstream in(metrics_csv_path);
    if (!in) throw Error("cannot open metrics file: " + metrics_csv_path.string());

    std::vector<std::pair<std::string, AggregateMetrics>> groups;
    std::map<std::string, size_t> index;
    std::string line;
    bool first = true;
    size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        while (!line.empty() && (line.back() == '\r' || line.back() == '\n')) line.pop_back();
        if (line.empty()) continue;
        if (first) {   // header
            first = false;
            continue;
        }
        const std::string ctx = metrics_csv_path.string() + ":" + std::to_string(line_no);
        const size_t c1 = line.find(',');
        const size_t c2 = c1 == std::string::npos ? std::string::npos : line.find(',', c1 + 1);
        if (c2 == std::string::npos) throw MalformedInput(ctx + ": expected group,metric,value");
        const std::string group = line.substr(0, c1);
        const std::string metric = line.substr(c1 + 1, c2 - c1 - 1);
        const std::string value = line.substr(c2 + 1);

        auto it = index.find(group);
        if (it == index.end()) {
            index.emplace(group, groups.size());
            groups.emplace_back(group, AggregateMetrics{});
            it = index.find(group);
        }
        AggregateMetrics& m = groups[it->second].second;
        auto num = [&]() { return value.empty() ? 0.0 : std::stod(value); };
        if (metric == "precision") m.precision = num();
        else if (metric == "recall") m.recall = num();
        else if (metric == "f1") m.f1 = num();
        else if (metric == "range_mae_m" && !value.empty()) m.range_mae_m = num();
        else if (metric == "bearing_acc" && !value.empty()) m.bearing_acc = num();
        else if (metric == "azimuth_mae_deg" && !value.empty()) m.azimuth_mae_deg = num();
        else if (metric == "hallucination_rate") m.hallucination_rate = num();
        else if (metric == "frame_count") m.frame_count = static_cast<int64_t>(num());
        else if (metric == "tp") m.tp = static_cast<int64_t>(num());
        else if (metric == "pred_count") m.pred_count = static_cast<int64_t>(num());
        else if (metric == "gt_count") m.gt_count = static_cast<int64_t>(num());
        else if (metric == "hallucinated_count") m.hallucinated_count = static_cast<int64_t>(num());
        else if (metric == "precision_degenerate") m.precision_degenerate = value == "1";
        else if (metric == "recall_degenerate") m.recall_degenerate = value == "1";
    }
    if (groups.empty()) throw MalformedInput(metrics_csv_path.string() + ": no metric records");
    out << render_metrics_table(groups);
    return 0;
}

int cmd_diagnose_norms(const RunConfig& cfg, const fs::path& tokens_path,
                       const fs::path& reference_path, double threshold, std::ostream& out) {
    apply_threads(cfg);
    if (threshold <= 1.0) throw ConfigError("norm threshold must be > 1");
    const TokenMatrix tokens = read_token_matrix(tokens_path);
    const TokenMatrix reference = read_token_matrix(reference_path);
    const NormReport report = norm_mismatch_check(tokens, reference, threshold);
    out << "# config_hash=" << config_hash(cfg) << '\n';
    out << "tokens:          " << tokens_path.string() << "  (" << tokens.tokens() << " x "
        << tokens.dims() << ")\n";
    out << "reference:       " << reference_path.string() << "  (" << reference.tokens() << " x "
        << reference.dims() << ")\n";
    out << render_norm_report(report);
    return 0;
}

int cmd_swap_test(const RunConfig& cfg, const fs::path& real_path, const fs::path& zeros_path,
                  const fs::path& noise_path, double threshold, std::ostream& out) {
    apply_threads(cfg);
    if (threshold <= 0.0 || threshold > 1.0)
        throw ConfigError("identical threshold must be in (0, 1]");
    const BlindnessReport report = swap_test(real_path, zeros_path, noise_path, threshold);
    out << "# config_hash=" << config_hash(cfg) << '\n';
    out << render_blindness_report(report);
    return 0;
}

}  // namespace radcap::cli
