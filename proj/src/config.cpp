#include "radcap/config.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <map>
#include <memory>
#include <mutex>
#include <sstream>

namespace radcap {

MatchOptions RunConfig::match_options() const {
    MatchOptions opts;
    opts.class_level_hallucination = hallucination_mode == "class";
    opts.count_oov_as_predictions = oov_mode == "count";
    return opts;
}

void RunConfig::validate() const {
    try {
        grid.validate();
    } catch (const Error& e) {
        throw ConfigError(e.what());
    }
    if (top_k < 0) throw ConfigError("top_k must be >= 0");
    if (fov_az_deg <= 0) throw ConfigError("fov_az_deg must be > 0");
    if (fov_range_m <= 0) throw ConfigError("fov_range_m must be > 0");
    if (caption_format != "prose" && caption_format != "structured" && caption_format != "both")
        throw ConfigError("caption_format must be prose, structured or both");
    if (hallucination_mode != "instance" && hallucination_mode != "class")
        throw ConfigError("hallucination_mode must be instance or class");
    if (oov_mode != "drop" && oov_mode != "count")
        throw ConfigError("oov_mode must be drop or count");
    if (stratify_by != "weather" && stratify_by != "time" && stratify_by != "split" &&
        stratify_by != "road" && stratify_by != "none")
        throw ConfigError("stratify_by must be weather, time, split, road or none");
    if (threads < 0) throw ConfigError("threads must be >= 0");
    if (!vocabulary_path.empty() && !std::filesystem::exists(vocabulary_path))
        throw ConfigError("vocabulary file does not exist: " + vocabulary_path);
}

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r'))
        s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
        s.remove_suffix(1);
    return s;
}

double parse_double(std::string_view v, const std::string& ctx) {
    double out = 0;
    auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc{} || p != v.data() + v.size())
        throw ConfigError(ctx + ": expected a number, got '" + std::string(v) + "'");
    return out;
}

int64_t parse_integer(std::string_view v, const std::string& ctx) {
    int64_t out = 0;
    auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc{} || p != v.data() + v.size())
        throw ConfigError(ctx + ": expected an integer, got '" + std::string(v) + "'");
    return out;
}

}  // namespace

void apply_config_line(RunConfig& cfg, std::string_view line, const std::string& ctx) {
    line = trim(line);
    if (line.empty() || line.front() == '#') return;
    const size_t eq = line.find('=');
    if (eq == std::string_view::npos)
        throw ConfigError(ctx + ": expected key=value, got '" + std::string(line) + "'");
    const std::string key(trim(line.substr(0, eq)));
    const std::string_view val = trim(line.substr(eq + 1));

    if (key == "range_min_m") cfg.grid.range_min_m = static_cast<float>(parse_double(val, ctx));
    else if (key == "range_max_m") cfg.grid.range_max_m = static_cast<float>(parse_double(val, ctx));
    else if (key == "az_min_deg") cfg.grid.az_min_deg = static_cast<float>(parse_double(val, ctx));
    else if (key == "az_max_deg") cfg.grid.az_max_deg = static_cast<float>(parse_double(val, ctx));
    else if (key == "doppler_min_mps")
        cfg.grid.doppler_min_mps = static_cast<float>(parse_double(val, ctx));
    else if (key == "doppler_max_mps")
        cfg.grid.doppler_max_mps = static_cast<float>(parse_double(val, ctx));
    else if (key == "doppler_bins") cfg.grid.doppler_bins = static_cast<uint32_t>(parse_integer(val, ctx));
    else if (key == "range_bins") cfg.grid.range_bins = static_cast<uint32_t>(parse_integer(val, ctx));
    else if (key == "elevation_bins")
        cfg.grid.elevation_bins = static_cast<uint32_t>(parse_integer(val, ctx));
    else if (key == "azimuth_bins")
        cfg.grid.azimuth_bins = static_cast<uint32_t>(parse_integer(val, ctx));
    else if (key == "top_k") cfg.top_k = parse_integer(val, ctx);
    else if (key == "fov_az_deg") cfg.fov_az_deg = parse_double(val, ctx);
    else if (key == "fov_range_m") cfg.fov_range_m = parse_double(val, ctx);
    else if (key == "caption_format") cfg.caption_format = std::string(val);
    else if (key == "vocabulary") cfg.vocabulary_path = std::string(val);
    else if (key == "hallucination_mode") cfg.hallucination_mode = std::string(val);
    else if (key == "oov_mode") cfg.oov_mode = std::string(val);
    else if (key == "stratify_by") cfg.stratify_by = std::string(val);
    else if (key == "threads") cfg.threads = static_cast<int>(parse_integer(val, ctx));
    else throw ConfigError(ctx + ": unknown config key '" + key + "'");
}

RunConfig load_config(const std::filesystem::path& path, RunConfig base) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config: " + path.string());
    std::string line;
    size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        apply_config_line(base, line, path.string() + ":" + std::to_string(line_no));
    }
    return base;
}

namespace {

std::string num(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.9g", v);
    return buf;
}

}  // namespace

std::string render_config(const RunConfig& cfg) {
    std::map<std::string, std::string> kv;
    kv["range_min_m"] = num(cfg.grid.range_min_m);
    kv["range_max_m"] = num(cfg.grid.range_max_m);
    kv["az_min_deg"] = num(cfg.grid.az_min_deg);
    kv["az_max_deg"] = num(cfg.grid.az_max_deg);
    kv["doppler_min_mps"] = num(cfg.grid.doppler_min_mps);
    kv["doppler_max_mps"] = num(cfg.grid.doppler_max_mps);
    kv["doppler_bins"] = std::to_string(cfg.grid.doppler_bins);
    kv["range_bins"] = std::to_string(cfg.grid.range_bins);
    kv["elevation_bins"] = std::to_string(cfg.grid.elevation_bins);
    kv["azimuth_bins"] = std::to_string(cfg.grid.azimuth_bins);
    kv["top_k"] = std::to_string(cfg.top_k);
    kv["fov_az_deg"] = num(cfg.fov_az_deg);
    kv["fov_range_m"] = num(cfg.fov_range_m);
    kv["caption_format"] = cfg.caption_format;
    kv["vocabulary"] = cfg.vocabulary_path.empty() ? "<builtin>" : cfg.vocabulary_path;
    kv["hallucination_mode"] = cfg.hallucination_mode;
    kv["oov_mode"] = cfg.oov_mode;
    kv["stratify_by"] = cfg.stratify_by;

    std::ostringstream out;
    for (const auto& [k, v] : kv) out << k << '=' << v << '\n';
    return out.str();
}

std::string config_hash(const RunConfig& cfg) {
    const std::string text = render_config(cfg);
    uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

const ClassVocabulary& config_vocabulary(const RunConfig& cfg) {
    if (cfg.vocabulary_path.empty()) return ClassVocabulary::defaults();
    static std::mutex mu;
    static std::map<std::string, std::unique_ptr<ClassVocabulary>> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(cfg.vocabulary_path);
    if (it == cache.end()) {
        auto vocab = std::make_unique<ClassVocabulary>(ClassVocabulary::load(cfg.vocabulary_path));
        it = cache.emplace(cfg.vocabulary_path, std::move(vocab)).first;
    }
    return *it->second;
}

}  // namespace radcap
