#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "radcap/manifest.hpp"
#include "radcap/parse.hpp"

namespace radcap {

struct MatchOptions {
    // Hallucination counted per predicted object (default) or per distinct
    // predicted class type.
    bool class_level_hallucination = false;
    // Score out-of-vocabulary predictions as (hallucinated) predictions
    // instead of dropping them.
    bool count_oov_as_predictions = false;
};

struct MatchedPair {
    PredObject pred;
    PredObject gt;
};

struct FrameEval {
    std::string frame_key;
    int64_t tp = 0;
    int64_t pred_count = 0;
    int64_t gt_count = 0;
    int64_t hallucinated_count = 0;
    std::vector<MatchedPair> matched_pairs;
    std::vector<double> range_abs_errors;   // matched pairs, both ranges present
    std::vector<double> az_abs_errors;      // matched pairs, both azimuths present
    int64_t sector_hits = 0;                // matched pairs, both sectors present
    int64_t sector_total = 0;
    int64_t oov_count = 0;
    // hallucination_count's denominator: pred_count for instance-level
    // scoring, distinct predicted class types for class-level scoring
    int64_t hallucination_den = 0;
};

struct AggregateMetrics {
    double precision = 0;
    double recall = 0;
    double f1 = 0;
    std::optional<double> range_mae_m;
    std::optional<double> azimuth_mae_deg;
    std::optional<double> bearing_acc;
    double hallucination_rate = 0;
    int64_t frame_count = 0;
    int64_t tp = 0, pred_count = 0, gt_count = 0, hallucinated_count = 0;
    bool precision_degenerate = false;   // no predictions pooled
    bool recall_degenerate = false;      // no ground truth pooled
};

// Per-frame multiset class matching. Within each class both sides are
// range-sorted and paired index by index over the min count; matched pairs
// contribute |d range| always, and |d azimuth| / sector hits when both sides
// carry the field. gt must already be FOV-filtered and top-k truncated.
FrameEval match_frame(const ParsedPrediction& pred, std::span<const PredObject> gt,
                      const MatchOptions& opts = {});
FrameEval match_frame(const ParsedPrediction& pred, std::span<const SceneObject> gt,
                      const MatchOptions& opts = {});

// GT-side objects from a parsed GT caption; derives the bearing sector from
// a numeric azimuth when one is present.
std::vector<PredObject> gt_objects_from_parsed(const ParsedPrediction& gt);

// Micro pooling: P = sum tp / sum pred, R = sum tp / sum gt, MAEs over all
// pooled pair errors. Throws EmptyEvaluation on an empty list.
AggregateMetrics aggregate(std::span<const FrameEval> evals);

double hallucination_rate(std::span<const FrameEval> evals);

enum class StratifyKey { Weather, TimeOfDay, Split, Road };
StratifyKey stratify_key_from_token(std::string_view tok);   // throws UnknownEnumValue
std::string_view to_token(StratifyKey k);

// Per-group aggregation keyed on the sequence attribute of each frame_key.
// Groups appear in enum order (lexicographic for Road), present groups only.
std::vector<std::pair<std::string, AggregateMetrics>> stratify(std::span<const FrameEval> evals,
                                                               const Manifest& manifest,
                                                               StratifyKey key = StratifyKey::Weather);

// Rendering. The table mirrors the row set
// {Class F1, Precision, Recall, Range MAE (m), Bearing acc., Azimuth MAE (deg),
//  Hallucination}; inapplicable cells render as "---".
std::string render_metrics_table(std::span<const std::pair<std::string, AggregateMetrics>> groups);
std::string metrics_csv_long(std::span<const std::pair<std::string, AggregateMetrics>> groups);
std::string metrics_csv_wide(std::span<const std::pair<std::string, AggregateMetrics>> groups,
                             std::string_view key_column);

}  // namespace radcap
