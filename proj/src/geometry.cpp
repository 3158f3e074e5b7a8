#include "radcap/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>

#include <json.hpp>

#include "radcap/errors.hpp"

namespace radcap {

namespace {

constexpr std::string_view kSectorTokens[kBearingSectorCount] = {
    "far_left", "left", "slightly_left", "ahead", "slightly_right", "right", "far_right"};

constexpr std::string_view kBearingPhrases[kBearingSectorCount] = {
    "far to the left", "to the left",  "slightly to the left", "straight ahead",
    "slightly to the right", "to the right", "far to the right"};

}  // namespace

std::string_view sector_token(BearingSector s) { return kSectorTokens[static_cast<int>(s)]; }

std::optional<BearingSector> sector_from_token(std::string_view tok) {
    for (int i = 0; i < kBearingSectorCount; ++i)
        if (tok == kSectorTokens[i]) return static_cast<BearingSector>(i);
    return std::nullopt;
}

std::string_view bearing_phrase(BearingSector s) { return kBearingPhrases[static_cast<int>(s)]; }

std::optional<BearingSector> sector_from_phrase(std::string_view phrase) {
    for (int i = 0; i < kBearingSectorCount; ++i)
        if (phrase == kBearingPhrases[i]) return static_cast<BearingSector>(i);
    return std::nullopt;
}

BearingSector mirror(BearingSector s) {
    switch (s) {
        case BearingSector::FarLeft: return BearingSector::FarRight;
        case BearingSector::Left: return BearingSector::Right;
        case BearingSector::SlightlyLeft: return BearingSector::SlightlyRight;
        case BearingSector::Ahead: return BearingSector::Ahead;
        case BearingSector::SlightlyRight: return BearingSector::SlightlyLeft;
        case BearingSector::Right: return BearingSector::Left;
        case BearingSector::FarRight: return BearingSector::FarLeft;
    }
    return BearingSector::Ahead;
}

SceneObject to_polar(const Box3D& b, const ClassVocabulary& vocab) {
    auto canon = vocab.normalize(b.class_label);
    if (!canon)
        throw MalformedInput("label class '" + b.class_label + "' is not in the vocabulary");
    SceneObject obj;
    obj.class_name = *canon;
    obj.range_m = std::hypot(b.x, b.y);
    obj.azimuth_deg = std::atan2(b.y, b.x) * 180.0 / std::numbers::pi;
    return obj;
}

std::vector<SceneObject> fov_filter(std::span<const SceneObject> objs, double az_limit_deg,
                                    double range_limit_m) {
    std::vector<SceneObject> out;
    for (const auto& o : objs)
        if (std::abs(o.azimuth_deg) <= az_limit_deg && o.range_m <= range_limit_m)
            out.push_back(o);
    return out;
}

std::vector<SceneObject> select_topk(std::span<const SceneObject> objs, size_t k) {
    std::vector<SceneObject> sorted(objs.begin(), objs.end());
    std::sort(sorted.begin(), sorted.end(), [](const SceneObject& a, const SceneObject& b) {
        if (a.range_m != b.range_m) return a.range_m < b.range_m;
        const double aa = std::abs(a.azimuth_deg), ab = std::abs(b.azimuth_deg);
        if (aa != ab) return aa < ab;
        if (a.class_name != b.class_name) return a.class_name < b.class_name;
        return a.azimuth_deg < b.azimuth_deg;
    });
    if (sorted.size() > k) sorted.resize(k);
    return sorted;
}

BearingSector bearing_sector(double azimuth_deg, const SectorTable& t) {
    if (std::abs(azimuth_deg) > t.edge_deg || std::isnan(azimuth_deg))
        throw OutOfFov("azimuth " + std::to_string(azimuth_deg) + " deg outside +/-" +
                       std::to_string(t.edge_deg));
    if (azimuth_deg < -t.side_deg) return BearingSector::FarRight;
    if (azimuth_deg < -t.slight_deg) return BearingSector::Right;
    if (azimuth_deg < -t.inner_deg) return BearingSector::SlightlyRight;
    if (azimuth_deg < t.inner_deg) return BearingSector::Ahead;
    if (azimuth_deg < t.slight_deg) return BearingSector::SlightlyLeft;
    if (azimuth_deg < t.side_deg) return BearingSector::Left;
    return BearingSector::FarLeft;
}

// ---------------------------------------------------------------------------
// Label file I/O
// ---------------------------------------------------------------------------

std::vector<LabeledFrame> read_label_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open label file: " + path.string());

    std::vector<LabeledFrame> frames;
    std::string line;
    size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line.front() == '#') continue;

        const std::string ctx = path.string() + ":" + std::to_string(line_no);
        const size_t tab = line.find('\t');
        if (tab == std::string::npos)
            throw MalformedInput(ctx + ": expected 'frame_key<TAB>boxes'");

        LabeledFrame frame;
        frame.frame_key = line.substr(0, tab);
        nlohmann::json arr = nlohmann::json::parse(line.substr(tab + 1), nullptr, false);
        if (arr.is_discarded() || !arr.is_array())
            throw MalformedInput(ctx + ": box list is not a valid array");
        for (const auto& j : arr) {
            Box3D b;
            try {
                b.class_label = j.at("class").get<std::string>();
                b.x = j.at("x").get<double>();
                b.y = j.at("y").get<double>();
                b.z = j.at("z").get<double>();
                b.l = j.at("l").get<double>();
                b.w = j.at("w").get<double>();
                b.h = j.at("h").get<double>();
                b.yaw = j.at("yaw").get<double>();
            } catch (const nlohmann::json::exception& e) {
                throw MalformedInput(ctx + ": bad box record: " + e.what());
            }
            if (b.class_label.empty()) throw MalformedInput(ctx + ": empty box class");
            if (b.l <= 0 || b.w <= 0 || b.h <= 0)
                throw MalformedInput(ctx + ": box extents must be > 0");
            frame.boxes.push_back(std::move(b));
        }
        frames.push_back(std::move(frame));
    }
    return frames;
}

void write_label_file(const std::filesystem::path& path, std::span<const LabeledFrame> frames) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot open for writing: " + path.string());
    for (const auto& f : frames) {
        nlohmann::ordered_json arr = nlohmann::ordered_json::array();
        for (const auto& b : f.boxes) {
            nlohmann::ordered_json j;
            j["class"] = b.class_label;
            j["x"] = b.x;
            j["y"] = b.y;
            j["z"] = b.z;
            j["l"] = b.l;
            j["w"] = b.w;
            j["h"] = b.h;
            j["yaw"] = b.yaw;
            arr.push_back(std::move(j));
        }
        out << f.frame_key << '\t' << arr.dump() << '\n';
    }
}

}  // namespace radcap
