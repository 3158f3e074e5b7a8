#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "radcap/caption.hpp"
#include "radcap/geometry.hpp"
#include "radcap/vocabulary.hpp"

namespace radcap {

// One extracted object. Sectors come from prose bearing phrases, numeric
// azimuths from structured text; a parser never fabricates the other kind.
struct PredObject {
    std::string class_name;
    std::optional<double> range_m;
    std::optional<double> azimuth_deg;
    std::optional<BearingSector> sector;

    bool has_spatial() const { return range_m || azimuth_deg || sector; }
};

enum class ParseStatus { Ok, Partial, Unparsed };
std::string_view status_token(ParseStatus s);

struct ParsedPrediction {
    std::string frame_key;
    std::vector<PredObject> objects;
    ParseStatus status = ParseStatus::Unparsed;
    size_t raw_length = 0;
    std::optional<int64_t> declared_count;   // prose leading count sentence
    int64_t oov_count = 0;                   // out-of-vocabulary mentions dropped
};

// Tolerant left-to-right scan over arbitrary model output. Never throws;
// unrecognized text comes back as status Unparsed with zero objects.
ParsedPrediction parse_prose(std::string_view text,
                             const ClassVocabulary& vocab = ClassVocabulary::defaults());

// Lenient extraction from the first balanced-brace region: tolerates
// surrounding prose, trailing commas, numbers-as-strings, missing fields
// and truncated arrays. Never throws.
ParsedPrediction parse_structured(std::string_view text,
                                  const ClassVocabulary& vocab = ClassVocabulary::defaults());

// Dispatch on the record's format tag; fills frame_key and raw_length.
ParsedPrediction parse_caption(const CaptionRecord& record,
                               const ClassVocabulary& vocab = ClassVocabulary::defaults());

// Line format: frame_key<TAB>status<TAB>{"declared_count":...,"oov":...,"objects":[...]}
void write_predictions(const std::filesystem::path& path,
                       std::span<const ParsedPrediction> predictions);

}  // namespace radcap
