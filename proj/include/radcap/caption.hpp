#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "radcap/geometry.hpp"

namespace radcap {

enum class CaptionFormat { Prose, Structured };

std::string_view format_token(CaptionFormat f);                      // "prose" / "structured"
CaptionFormat format_from_token(std::string_view tok);               // throws UnknownEnumValue

struct GtCaption {
    std::string frame_key;
    CaptionFormat format = CaptionFormat::Prose;
    std::string text;
    int64_t object_count_total = 0;   // pre-top-k count
};

// objs must be range-sorted top-k output; total_count is the pre-top-k count.
//
//   "There are {N} objects. Closest: a {class} {bearing} at {R} m, ..."
//   N=1 -> "There is 1 object. ...", N=0 -> "There are no objects."
//
// Ranges render as integer meters, rounded half away from zero.
GtCaption gen_prose(std::span<const SceneObject> objs, int64_t total_count,
                    const std::string& frame_key = {});

// Canonical structured text, compact, keys in order class/azimuth_deg/range_m:
//   {"objects":[{"class":"sedan","azimuth_deg":-9,"range_m":13}]}
GtCaption gen_structured(std::span<const SceneObject> objs, int64_t total_count,
                         const std::string& frame_key = {});

// Caption container: one record per line, "frame_key<TAB>format<TAB>text".
// Tabs inside the caption text are forbidden.
struct CaptionRecord {
    std::string frame_key;
    CaptionFormat format = CaptionFormat::Prose;
    std::string text;
};

std::vector<CaptionRecord> read_caption_file(const std::filesystem::path& path);
void write_caption_file(const std::filesystem::path& path, std::span<const CaptionRecord> records);

}  // namespace radcap
