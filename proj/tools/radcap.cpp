// radcap: weather-stratified evaluation toolkit for radar scene captions.

#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "radcap/commands.hpp"

namespace {

using radcap::RunConfig;

struct GlobalFlags {
    std::string config_path;
    int threads = -1;
    bool stamp = false;
    std::string vocabulary;
    int64_t top_k = -1;
    double fov_az = -1, fov_range = -1;
    std::string caption_format;
    std::string hallucination_mode;
    std::string oov_mode;
    std::string stratify_by;
};

void add_global_flags(CLI::App& app, GlobalFlags& g) {
    app.add_option("--config", g.config_path, "key=value config file");
    app.add_option("--threads", g.threads, "worker threads (0 = runtime default)");
    app.add_flag("--stamp", g.stamp, "embed a timestamp in reports (breaks determinism)");
    app.add_option("--vocabulary", g.vocabulary, "class vocabulary file");
    app.add_option("--top-k", g.top_k, "objects described per caption");
    app.add_option("--fov-az", g.fov_az, "azimuth FOV limit, degrees");
    app.add_option("--fov-range", g.fov_range, "range FOV limit, meters");
    app.add_option("--format", g.caption_format, "caption format: prose|structured|both");
    app.add_option("--hallucination-mode", g.hallucination_mode,
                   "hallucination scoring: instance|class");
    app.add_option("--oov-mode", g.oov_mode,
                   "out-of-vocabulary predictions: drop|count");
    app.add_option("--stratify-by", g.stratify_by,
                   "stratification key: weather|time|split|road|none");
}

RunConfig make_config(const GlobalFlags& g) {
    RunConfig cfg;
    if (!g.config_path.empty()) cfg = radcap::load_config(g.config_path);
    if (g.threads >= 0) cfg.threads = g.threads;
    cfg.stamp = g.stamp;
    if (!g.vocabulary.empty()) cfg.vocabulary_path = g.vocabulary;
    if (g.top_k >= 0) cfg.top_k = g.top_k;
    if (g.fov_az > 0) cfg.fov_az_deg = g.fov_az;
    if (g.fov_range > 0) cfg.fov_range_m = g.fov_range;
    if (!g.caption_format.empty()) cfg.caption_format = g.caption_format;
    if (!g.hallucination_mode.empty()) cfg.hallucination_mode = g.hallucination_mode;
    if (!g.oov_mode.empty()) cfg.oov_mode = g.oov_mode;
    if (!g.stratify_by.empty()) cfg.stratify_by = g.stratify_by;
    cfg.validate();
    return cfg;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"radar scene-caption evaluation toolkit"};
    app.require_subcommand(1);
    app.fallthrough();

    GlobalFlags g;
    add_global_flags(app, g);

    std::string manifest_path, input_dir, output_dir, variant = "5ch";
    std::string labels_path, captions_path, output_path;
    std::string pred_path, gt_path, metrics_path;
    std::string tokens_path, reference_path;
    std::string real_path, zeros_path, noise_path;
    double norm_threshold = 2.0, identical_threshold = 0.5;

    CLI::App* validate = app.add_subcommand("validate-manifest", "load and check a manifest");
    validate->add_option("manifest", manifest_path, "manifest file")->required();

    CLI::App* preprocess =
        app.add_subcommand("preprocess", "turn 4D frames into model input tensors");
    preprocess->add_option("--input", input_dir, "directory of .rt4d 4D frames")->required();
    preprocess->add_option("--output", output_dir, "output directory")->required();
    preprocess->add_option("--variant", variant, "5ch|66ch|both (default 5ch)");

    CLI::App* gen_gt = app.add_subcommand("gen-gt", "generate ground-truth captions from labels");
    gen_gt->add_option("--labels", labels_path, "label file")->required();
    gen_gt->add_option("--manifest", manifest_path, "manifest file")->required();
    gen_gt->add_option("--output", output_dir, "output directory")->required();

    CLI::App* parse = app.add_subcommand("parse", "parse captions into structured predictions");
    parse->add_option("--captions", captions_path, "caption file")->required();
    parse->add_option("--output", output_path, "parsed predictions file")->required();

    CLI::App* eval = app.add_subcommand("eval", "score predicted captions against ground truth");
    eval->add_option("--pred", pred_path, "predicted caption file")->required();
    eval->add_option("--gt", gt_path, "ground-truth caption file")->required();
    eval->add_option("--manifest", manifest_path, "manifest file")->required();
    eval->add_option("--output", output_dir, "report output directory")->required();

    CLI::App* report = app.add_subcommand("report", "render a saved metrics.csv as a table");
    report->add_option("--metrics", metrics_path, "metrics.csv from eval")->required();

    CLI::App* diagnose = app.add_subcommand("diagnose-norms",
                                            "compare token norms against a reference embedding dump");
    diagnose->add_option("--tokens", tokens_path, "projector output dump (RT4D 2D)")->required();
    diagnose->add_option("--reference", reference_path, "reference embedding dump (RT4D 2D)")
        ->required();
    diagnose->add_option("--threshold", norm_threshold, "flag ratio threshold (default 2.0)");

    CLI::App* swap = app.add_subcommand("swap-test",
                                        "check whether captions change when the input is swapped");
    swap->add_option("--real", real_path, "captions from real input")->required();
    swap->add_option("--zeros", zeros_path, "captions from zeroed input")->required();
    swap->add_option("--noise", noise_path, "captions from noise input")->required();
    swap->add_option("--threshold", identical_threshold,
                     "identical-fraction flag threshold (default 0.5)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 3;
    }

    try {
        const RunConfig cfg = make_config(g);
        if (validate->parsed())
            return radcap::cli::cmd_validate_manifest(cfg, manifest_path, std::cout);
        if (preprocess->parsed())
            return radcap::cli::cmd_preprocess(cfg, input_dir, output_dir, variant, std::cout,
                                               std::cerr);
        if (gen_gt->parsed())
            return radcap::cli::cmd_gen_gt(cfg, labels_path, manifest_path, output_dir, std::cout);
        if (parse->parsed())
            return radcap::cli::cmd_parse(cfg, captions_path, output_path, std::cout);
        if (eval->parsed())
            return radcap::cli::cmd_eval(cfg, pred_path, gt_path, manifest_path, output_dir,
                                         std::cout);
        if (report->parsed()) return radcap::cli::cmd_report(cfg, metrics_path, std::cout);
        if (diagnose->parsed())
            return radcap::cli::cmd_diagnose_norms(cfg, tokens_path, reference_path,
                                                   norm_threshold, std::cout);
        if (swap->parsed())
            return radcap::cli::cmd_swap_test(cfg, real_path, zeros_path, noise_path,
                                              identical_threshold, std::cout);
        std::cerr << "error: no subcommand\n";
        return 3;
    } catch (const radcap::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 3;
    } catch (const radcap::NonPositiveRange& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 3;
    } catch (const radcap::OutOfFov& e) {
        std::cerr << "internal error: " << e.what() << '\n';
        return 4;
    } catch (const radcap::Error& e) {
        std::cerr << "input error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << '\n';
        return 4;
    }
}
