#include "radcap/caption.hpp"

#include <cmath>
#include <fstream>

#include <json.hpp>

#include "radcap/errors.hpp"

namespace radcap {

namespace {

int64_t round_half_away(double v) { return std::llround(v); }

}  // namespace

std::string_view format_token(CaptionFormat f) {
    return f == CaptionFormat::Prose ? "prose" : "structured";
}

CaptionFormat format_from_token(std::string_view tok) {
    if (tok == "prose") return CaptionFormat::Prose;
    if (tok == "structured") return CaptionFormat::Structured;
    throw UnknownEnumValue("unknown caption format '" + std::string(tok) + "'");
}

GtCaption gen_prose(std::span<const SceneObject> objs, int64_t total_count,
                    const std::string& frame_key) {
    GtCaption cap;
    cap.frame_key = frame_key;
    cap.format = CaptionFormat::Prose;
    cap.object_count_total = total_count;

    if (total_count <= 0) {
        cap.text = "There are no objects.";
        return cap;
    }

    std::string text = total_count == 1 ? "There is 1 object."
                                        : "There are " + std::to_string(total_count) + " objects.";
    if (!objs.empty()) {
        text += " Closest:";
        bool first = true;
        for (const auto& o : objs) {
            text += first ? " " : ", ";
            first = false;
            text += "a ";
            text += o.class_name;
            text += ' ';
            text += bearing_phrase(bearing_sector(o.azimuth_deg));
            text += " at ";
            text += std::to_string(round_half_away(o.range_m));
            text += " m";
        }
        text += '.';
    }
    cap.text = std::move(text);
    return cap;
}

GtCaption gen_structured(std::span<const SceneObject> objs, int64_t total_count,
                         const std::string& frame_key) {
    GtCaption cap;
    cap.frame_key = frame_key;
    cap.format = CaptionFormat::Structured;
    cap.object_count_total = total_count;

    nlohmann::ordered_json root;
    root["objects"] = nlohmann::ordered_json::array();
    for (const auto& o : objs) {
        nlohmann::ordered_json j;
        j["class"] = o.class_name;
        j["azimuth_deg"] = round_half_away(o.azimuth_deg);
        j["range_m"] = round_half_away(o.range_m);
        root["objects"].push_back(std::move(j));
    }
    cap.text = root.dump();
    return cap;
}

std::vector<CaptionRecord> read_caption_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open caption file: " + path.string());

    std::vector<CaptionRecord> records;
    std::string line;
    size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line.front() == '#') continue;

        const std::string ctx = path.string() + ":" + std::to_string(line_no);
        const size_t t1 = line.find('\t');
        if (t1 == std::string::npos)
            throw MalformedInput(ctx + ": expected 'frame_key<TAB>format<TAB>text'");
        const size_t t2 = line.find('\t', t1 + 1);
        if (t2 == std::string::npos)
            throw MalformedInput(ctx + ": expected 'frame_key<TAB>format<TAB>text'");
        if (line.find('\t', t2 + 1) != std::string::npos)
            throw MalformedInput(ctx + ": tabs are forbidden inside caption text");

        CaptionRecord rec;
        rec.frame_key = line.substr(0, t1);
        rec.format = format_from_token(std::string_view(line).substr(t1 + 1, t2 - t1 - 1));
        rec.text = line.substr(t2 + 1);
        records.push_back(std::move(rec));
    }
    return records;
}

void write_caption_file(const std::filesystem::path& path,
                        std::span<const CaptionRecord> records) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot open for writing: " + path.string());
    for (const auto& r : records) {
        if (r.text.find('\t') != std::string::npos)
            throw MalformedInput("caption text for " + r.frame_key + " contains a tab");
        out << r.frame_key << '\t' << format_token(r.format) << '\t' << r.text << '\n';
    }
}

}  // namespace radcap
