#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "radcap/vocabulary.hpp"

namespace radcap {

// 3D bounding box label: x forward, y left, z up, yaw about z.
struct Box3D {
    std::string class_label;
    double x = 0, y = 0, z = 0;
    double l = 0, w = 0, h = 0;
    double yaw = 0;
};

// Polar scene object. Positive azimuth = left of boresight.
struct SceneObject {
    std::string class_name;
    double range_m = 0;
    double azimuth_deg = 0;
};

enum class BearingSector { FarLeft, Left, SlightlyLeft, Ahead, SlightlyRight, Right, FarRight };
inline constexpr int kBearingSectorCount = 7;

// Sector boundaries in degrees; every interval is closed below, open above,
// except the far-left field-of-view edge which is closed.
//   FarRight [-edge,-side)  Right [-side,-slight)  SlightlyRight [-slight,-inner)
//   Ahead [-inner,+inner)   SlightlyLeft [+inner,+slight)  Left [+slight,+side)
//   FarLeft [+side,+edge]
struct SectorTable {
    double inner_deg = 7.5;
    double slight_deg = 22.5;
    double side_deg = 40.0;
    double edge_deg = 53.0;
};

std::string_view sector_token(BearingSector s);                   // e.g. "slightly_right"
std::optional<BearingSector> sector_from_token(std::string_view tok);
std::string_view bearing_phrase(BearingSector s);                 // e.g. "slightly to the right"
std::optional<BearingSector> sector_from_phrase(std::string_view phrase);
BearingSector mirror(BearingSector s);

// Ground-plane polar conversion; class canonicalized through the vocabulary.
// Throws MalformedInput on an out-of-vocabulary label.
SceneObject to_polar(const Box3D& b, const ClassVocabulary& vocab = ClassVocabulary::defaults());

// Keep objects with |azimuth| <= az_limit and range <= range_limit, both inclusive.
std::vector<SceneObject> fov_filter(std::span<const SceneObject> objs, double az_limit_deg = 53.0,
                                    double range_limit_m = 80.0);

// Ascending range; ties by |azimuth|, then class name. Returns min(k, size).
std::vector<SceneObject> select_topk(std::span<const SceneObject> objs, size_t k = 4);

// Throws OutOfFov when |azimuth| exceeds the table edge.
BearingSector bearing_sector(double azimuth_deg, const SectorTable& table = {});

// Label file: one frame per line, "frame_key<TAB>[{...box...}, ...]".
struct LabeledFrame {
    std::string frame_key;
    std::vector<Box3D> boxes;
};

std::vector<LabeledFrame> read_label_file(const std::filesystem::path& path);
void write_label_file(const std::filesystem::path& path, std::span<const LabeledFrame> frames);

}  // namespace radcap
