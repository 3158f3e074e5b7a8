#include "radcap/manifest.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>
#include <unordered_set>

namespace radcap {

namespace {

constexpr std::string_view kWeatherTokens[] = {"normal", "rain",       "sleet",
                                               "fog",    "light_snow", "heavy_snow"};
constexpr std::string_view kTimeTokens[] = {"day", "night"};
constexpr std::string_view kSplitTokens[] = {"train", "val", "test"};

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

int64_t parse_int(std::string_view s, const std::string& ctx) {
    s = trim(s);
    int64_t v = 0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || p != s.data() + s.size())
        throw MalformedManifest(ctx + ": expected an integer, got '" + std::string(s) + "'");
    return v;
}

std::vector<std::string_view> split_fields(std::string_view line) {
    std::vector<std::string_view> out;
    size_t start = 0;
    while (true) {
        size_t pos = line.find('|', start);
        if (pos == std::string_view::npos) {
            out.push_back(line.substr(start));
            break;
        }
        out.push_back(line.substr(start, pos - start));
        start = pos + 1;
    }
    return out;
}

}  // namespace

std::string_view to_token(Weather w) { return kWeatherTokens[static_cast<int>(w)]; }
std::string_view to_token(TimeOfDay t) { return kTimeTokens[static_cast<int>(t)]; }
std::string_view to_token(Split s) { return kSplitTokens[static_cast<int>(s)]; }

Weather weather_from_token(std::string_view tok) {
    for (int i = 0; i < 6; ++i)
        if (tok == kWeatherTokens[i]) return static_cast<Weather>(i);
    throw UnknownEnumValue("unknown weather '" + std::string(tok) + "'");
}

TimeOfDay time_from_token(std::string_view tok) {
    for (int i = 0; i < 2; ++i)
        if (tok == kTimeTokens[i]) return static_cast<TimeOfDay>(i);
    throw UnknownEnumValue("unknown time of day '" + std::string(tok) + "'");
}

Split split_from_token(std::string_view tok) {
    for (int i = 0; i < 3; ++i)
        if (tok == kSplitTokens[i]) return static_cast<Split>(i);
    throw UnknownEnumValue("unknown split '" + std::string(tok) + "'");
}

const SequenceMeta* Manifest::find(int64_t seq_id) const {
    auto it = std::lower_bound(sequences.begin(), sequences.end(), seq_id,
                               [](const SequenceMeta& m, int64_t id) { return m.seq_id < id; });
    if (it == sequences.end() || it->seq_id != seq_id) return nullptr;
    return &*it;
}

const SequenceMeta& Manifest::at(int64_t seq_id) const {
    const SequenceMeta* m = find(seq_id);
    if (!m) throw UnknownSequence("sequence " + std::to_string(seq_id) + " not in manifest");
    return *m;
}

int64_t Manifest::split_frame_total(Split s) const {
    int64_t total = 0;
    for (const auto& m : sequences)
        if (m.split == s) total += m.frame_count;
    return total;
}

int64_t Manifest::split_sequence_count(Split s) const {
    int64_t n = 0;
    for (const auto& m : sequences)
        if (m.split == s) ++n;
    return n;
}

Manifest parse_manifest(std::string_view text, const std::string& source) {
    Manifest m;
    std::unordered_set<int64_t> seen;
    size_t line_no = 0;
    size_t pos = 0;
    while (pos <= text.size()) {
        size_t eol = text.find('\n', pos);
        std::string_view line =
            text.substr(pos, eol == std::string_view::npos ? std::string_view::npos : eol - pos);
        pos = eol == std::string_view::npos ? text.size() + 1 : eol + 1;
        ++line_no;

        line = trim(line);
        if (line.empty() || line.front() == '#') continue;

        const std::string ctx = source + ":" + std::to_string(line_no);
        auto fields = split_fields(line);
        if (fields.size() != 8)
            throw MalformedManifest(ctx + ": expected 8 '|'-separated fields, got " +
                                    std::to_string(fields.size()));

        SequenceMeta meta;
        meta.seq_id = parse_int(fields[0], ctx);
        meta.frame_count = parse_int(fields[1], ctx);
        meta.object_count = parse_int(fields[2], ctx);
        meta.weather = weather_from_token(trim(fields[3]));
        meta.road = std::string(trim(fields[4]));
        meta.time_of_day = time_from_token(trim(fields[5]));
        meta.split = split_from_token(trim(fields[6]));
        const std::string_view zs = trim(fields[7]);
        if (zs == "0")
            meta.zero_shot_weather = false;
        else if (zs == "1")
            meta.zero_shot_weather = true;
        else
            throw MalformedManifest(ctx + ": zero_shot must be 0 or 1");

        if (meta.frame_count <= 0)
            throw MalformedManifest(ctx + ": frame_count must be > 0");
        if (meta.object_count < 0)
            throw MalformedManifest(ctx + ": object_count must be >= 0");
        if (!seen.insert(meta.seq_id).second)
            throw DuplicateSequence(ctx + ": duplicate seq_id " + std::to_string(meta.seq_id));
        m.sequences.push_back(std::move(meta));
    }
    std::sort(m.sequences.begin(), m.sequences.end(),
              [](const SequenceMeta& a, const SequenceMeta& b) { return a.seq_id < b.seq_id; });
    return m;
}

Manifest load_manifest(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open manifest: " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_manifest(ss.str(), path.string());
}

std::string serialize_manifest(const Manifest& m) {
    std::string out;
    for (const auto& s : m.sequences) {
        out += std::to_string(s.seq_id);
        out += '|';
        out += std::to_string(s.frame_count);
        out += '|';
        out += std::to_string(s.object_count);
        out += '|';
        out += to_token(s.weather);
        out += '|';
        out += s.road;
        out += '|';
        out += to_token(s.time_of_day);
        out += '|';
        out += to_token(s.split);
        out += '|';
        out += s.zero_shot_weather ? '1' : '0';
        out += '\n';
    }
    return out;
}

void write_manifest(const std::filesystem::path& path, const Manifest& m) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot open for writing: " + path.string());
    const std::string text = serialize_manifest(m);
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
}

std::vector<std::pair<int64_t, int64_t>> frames_of_split(const Manifest& m, Split s) {
    std::vector<std::pair<int64_t, int64_t>> out;
    for (const auto& meta : m.sequences) {
        if (meta.split != s) continue;
        for (int64_t f = 0; f < meta.frame_count; ++f) out.emplace_back(meta.seq_id, f);
    }
    return out;
}

Weather weather_of_frame(const Manifest& m, int64_t seq_id) { return m.at(seq_id).weather; }

std::string make_frame_key(int64_t seq_id, int64_t frame_index) {
    return std::to_string(seq_id) + "_" + std::to_string(frame_index);
}

std::pair<int64_t, int64_t> parse_frame_key(std::string_view key) {
    const size_t sep = key.find('_');
    if (sep == std::string_view::npos)
        throw MalformedInput("frame key '" + std::string(key) + "' is not <seq>_<frame>");
    int64_t seq = 0, frame = 0;
    auto [p1, e1] = std::from_chars(key.data(), key.data() + sep, seq);
    auto [p2, e2] = std::from_chars(key.data() + sep + 1, key.data() + key.size(), frame);
    if (e1 != std::errc{} || p1 != key.data() + sep || e2 != std::errc{} ||
        p2 != key.data() + key.size())
        throw MalformedInput("frame key '" + std::string(key) + "' is not <seq>_<frame>");
    return {seq, frame};
}

}  // namespace radcap
