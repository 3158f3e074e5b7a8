#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include "radcap/caption.hpp"
#include "radcap/metrics.hpp"
#include "radcap/tensor.hpp"

namespace radcap {

// Effective run options. Defaults match the standard measurement grid and
// caption conventions; a config file and command-line flags may override.
struct RunConfig {
    RadarGridConfig grid;
    int64_t top_k = 4;
    double fov_az_deg = 53.0;
    double fov_range_m = 80.0;
    std::string caption_format = "both";   // prose | structured | both
    std::string vocabulary_path;           // empty = built-in vocabulary
    std::string hallucination_mode = "instance";   // instance | class
    std::string oov_mode = "drop";                 // drop | count
    std::string stratify_by = "weather";           // weather | time | split | road | none
    int threads = 0;                               // 0 = runtime default
    bool stamp = false;                            // embed a timestamp in reports

    MatchOptions match_options() const;
    void validate() const;   // throws ConfigError
};

// Flat "key=value" lines, '#' comments. Unknown keys are ConfigError.
void apply_config_line(RunConfig& cfg, std::string_view line, const std::string& ctx);
RunConfig load_config(const std::filesystem::path& path, RunConfig base = {});

// Canonical effective-config block (sorted keys) and its FNV-1a hash; both
// embedded in reports so every stated convention is attributable.
std::string render_config(const RunConfig& cfg);
std::string config_hash(const RunConfig& cfg);

const ClassVocabulary& config_vocabulary(const RunConfig& cfg);

}  // namespace radcap
