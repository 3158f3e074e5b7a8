#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "radcap/errors.hpp"

namespace radcap {

enum class Weather { Normal, Rain, Sleet, Fog, LightSnow, HeavySnow };
enum class TimeOfDay { Day, Night };
enum class Split { Train, Val, Test };

std::string_view to_token(Weather w);
std::string_view to_token(TimeOfDay t);
std::string_view to_token(Split s);
Weather weather_from_token(std::string_view tok);      // throws UnknownEnumValue
TimeOfDay time_from_token(std::string_view tok);       // throws UnknownEnumValue
Split split_from_token(std::string_view tok);          // throws UnknownEnumValue

struct SequenceMeta {
    int64_t seq_id = 0;
    int64_t frame_count = 0;
    int64_t object_count = 0;
    Weather weather = Weather::Normal;
    std::string road;
    TimeOfDay time_of_day = TimeOfDay::Day;
    Split split = Split::Train;
    bool zero_shot_weather = false;
};

// Immutable after load; safe to share across threads.
struct Manifest {
    std::vector<SequenceMeta> sequences;   // sorted by seq_id
    int schema_version = 1;

    const SequenceMeta* find(int64_t seq_id) const;
    const SequenceMeta& at(int64_t seq_id) const;      // throws UnknownSequence
    int64_t split_frame_total(Split s) const;
    int64_t split_sequence_count(Split s) const;
};

// Line format: seq_id|frame_count|object_count|weather|road|time|split|zero_shot
// with '#' comment lines. Throws MalformedManifest, DuplicateSequence,
// UnknownEnumValue.
Manifest parse_manifest(std::string_view text, const std::string& source = "<string>");
Manifest load_manifest(const std::filesystem::path& path);

// Canonical form: records sorted by seq_id, no comments, trailing newline.
// serialize(load(serialize(load(f)))) == serialize(load(f)) byte for byte.
std::string serialize_manifest(const Manifest& m);
void write_manifest(const std::filesystem::path& path, const Manifest& m);

// All frames of a split, ascending (seq_id, frame_index).
std::vector<std::pair<int64_t, int64_t>> frames_of_split(const Manifest& m, Split s);

Weather weather_of_frame(const Manifest& m, int64_t seq_id);   // throws UnknownSequence

// Frame keys are "<seq_id>_<frame_index>".
std::string make_frame_key(int64_t seq_id, int64_t frame_index);
std::pair<int64_t, int64_t> parse_frame_key(std::string_view key);   // throws MalformedInput

}  // namespace radcap
