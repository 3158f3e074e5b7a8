#include "radcap/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <iomanip>
#include <limits>
#include <map>
#include <set>
#include <sstream>

namespace radcap {

namespace {

// Total order over objects of one class so pairing is independent of input
// order: missing fields sort last, then by value.
bool object_order(const PredObject& a, const PredObject& b) {
    auto key = [](const PredObject& o) {
        return std::tuple(!o.range_m, o.range_m.value_or(0.0), !o.azimuth_deg,
                          o.azimuth_deg.value_or(0.0), !o.sector,
                          static_cast<int>(o.sector.value_or(BearingSector::Ahead)));
    };
    return key(a) < key(b);
}

PredObject to_pred_object(const SceneObject& o) {
    PredObject p;
    p.class_name = o.class_name;
    p.range_m = o.range_m;
    p.azimuth_deg = o.azimuth_deg;
    if (std::abs(o.azimuth_deg) <= SectorTable{}.edge_deg) p.sector = bearing_sector(o.azimuth_deg);
    return p;
}

AggregateMetrics aggregate_ptrs(std::span<const FrameEval* const> evals) {
    if (evals.empty()) throw EmptyEvaluation("no frames to aggregate");

    AggregateMetrics m;
    m.frame_count = static_cast<int64_t>(evals.size());
    double range_sum = 0, az_sum = 0;
    int64_t range_n = 0, az_n = 0, sector_hits = 0, sector_total = 0, halluc_den = 0;
    for (const FrameEval* e : evals) {
        m.tp += e->tp;
        m.pred_count += e->pred_count;
        m.gt_count += e->gt_count;
        m.hallucinated_count += e->hallucinated_count;
        halluc_den += e->hallucination_den;
        for (double v : e->range_abs_errors) range_sum += v;
        range_n += static_cast<int64_t>(e->range_abs_errors.size());
        for (double v : e->az_abs_errors) az_sum += v;
        az_n += static_cast<int64_t>(e->az_abs_errors.size());
        sector_hits += e->sector_hits;
        sector_total += e->sector_total;
    }

    if (m.pred_count > 0) {
        m.precision = static_cast<double>(m.tp) / static_cast<double>(m.pred_count);
    } else {
        m.precision = 0.0;
        m.precision_degenerate = true;
    }
    if (m.gt_count > 0) {
        m.recall = static_cast<double>(m.tp) / static_cast<double>(m.gt_count);
    } else {
        m.recall = 1.0;
        m.recall_degenerate = true;
    }
    m.f1 = (m.precision + m.recall) > 0 ? 2.0 * m.precision * m.recall / (m.precision + m.recall)
                                        : 0.0;
    if (range_n > 0) m.range_mae_m = range_sum / static_cast<double>(range_n);
    if (az_n > 0) m.azimuth_mae_deg = az_sum / static_cast<double>(az_n);
    if (sector_total > 0)
        m.bearing_acc = static_cast<double>(sector_hits) / static_cast<double>(sector_total);
    m.hallucination_rate =
        halluc_den > 0 ? static_cast<double>(m.hallucinated_count) / static_cast<double>(halluc_den)
                       : 0.0;
    return m;
}

}  // namespace

std::vector<PredObject> gt_objects_from_parsed(const ParsedPrediction& gt) {
    std::vector<PredObject> out = gt.objects;
    for (auto& o : out) {
        if (!o.sector && o.azimuth_deg && std::abs(*o.azimuth_deg) <= SectorTable{}.edge_deg)
            o.sector = bearing_sector(*o.azimuth_deg);
    }
    return out;
}

FrameEval match_frame(const ParsedPrediction& pred, std::span<const PredObject> gt,
                      const MatchOptions& opts) {
    FrameEval eval;
    eval.frame_key = pred.frame_key;
    eval.pred_count = static_cast<int64_t>(pred.objects.size());
    eval.gt_count = static_cast<int64_t>(gt.size());
    eval.oov_count = pred.oov_count;

    std::map<std::string_view, std::vector<const PredObject*>> pred_by_class, gt_by_class;
    for (const auto& o : pred.objects) pred_by_class[o.class_name].push_back(&o);
    for (const auto& o : gt) gt_by_class[o.class_name].push_back(&o);

    for (auto& [cls, preds] : pred_by_class) {
        auto git = gt_by_class.find(cls);
        if (git == gt_by_class.end()) continue;
        auto& gts = git->second;
        std::sort(preds.begin(), preds.end(),
                  [](const PredObject* a, const PredObject* b) { return object_order(*a, *b); });
        std::sort(gts.begin(), gts.end(),
                  [](const PredObject* a, const PredObject* b) { return object_order(*a, *b); });

        const size_t n = std::min(preds.size(), gts.size());
        eval.tp += static_cast<int64_t>(n);
        for (size_t i = 0; i < n; ++i) {
            const PredObject& p = *preds[i];
            const PredObject& g = *gts[i];
            if (p.range_m && g.range_m)
                eval.range_abs_errors.push_back(std::abs(*p.range_m - *g.range_m));
            if (p.azimuth_deg && g.azimuth_deg)
                eval.az_abs_errors.push_back(std::abs(*p.azimuth_deg - *g.azimuth_deg));
            if (p.sector && g.sector) {
                ++eval.sector_total;
                if (*p.sector == *g.sector) ++eval.sector_hits;
            }
            eval.matched_pairs.push_back({p, g});
        }
    }

    if (opts.class_level_hallucination) {
        int64_t absent_types = 0;
        for (const auto& [cls, preds] : pred_by_class)
            if (!gt_by_class.count(cls)) ++absent_types;
        eval.hallucinated_count = absent_types;
        eval.hallucination_den = static_cast<int64_t>(pred_by_class.size());
    } else {
        int64_t absent = 0;
        for (const auto& [cls, preds] : pred_by_class)
            if (!gt_by_class.count(cls)) absent += static_cast<int64_t>(preds.size());
        eval.hallucinated_count = absent;
        eval.hallucination_den = eval.pred_count;
    }

    if (opts.count_oov_as_predictions && pred.oov_count > 0) {
        // OOV classes are absent from any GT by construction.
        eval.pred_count += pred.oov_count;
        eval.hallucinated_count += pred.oov_count;
        eval.hallucination_den += pred.oov_count;
    }
    return eval;
}

FrameEval match_frame(const ParsedPrediction& pred, std::span<const SceneObject> gt,
                      const MatchOptions& opts) {
    std::vector<PredObject> gt_objs;
    gt_objs.reserve(gt.size());
    for (const auto& o : gt) gt_objs.push_back(to_pred_object(o));
    return match_frame(pred, gt_objs, opts);
}

AggregateMetrics aggregate(std::span<const FrameEval> evals) {
    std::vector<const FrameEval*> ptrs;
    ptrs.reserve(evals.size());
    for (const auto& e : evals) ptrs.push_back(&e);
    return aggregate_ptrs(ptrs);
}

double hallucination_rate(std::span<const FrameEval> evals) {
    return aggregate(evals).hallucination_rate;
}

StratifyKey stratify_key_from_token(std::string_view tok) {
    if (tok == "weather") return StratifyKey::Weather;
    if (tok == "time") return StratifyKey::TimeOfDay;
    if (tok == "split") return StratifyKey::Split;
    if (tok == "road") return StratifyKey::Road;
    throw UnknownEnumValue("unknown stratification key '" + std::string(tok) + "'");
}

std::string_view to_token(StratifyKey k) {
    switch (k) {
        case StratifyKey::Weather: return "weather";
        case StratifyKey::TimeOfDay: return "time";
        case StratifyKey::Split: return "split";
        case StratifyKey::Road: return "road";
    }
    return "weather";
}

std::vector<std::pair<std::string, AggregateMetrics>> stratify(std::span<const FrameEval> evals,
                                                               const Manifest& manifest,
                                                               StratifyKey key) {
    std::map<std::string, std::vector<const FrameEval*>> by_group;
    std::map<std::string, int> enum_rank;
    for (const auto& e : evals) {
        const auto [seq, frame] = parse_frame_key(e.frame_key);
        const SequenceMeta& meta = manifest.at(seq);
        std::string group;
        int rank = 0;
        switch (key) {
            case StratifyKey::Weather:
                group = to_token(meta.weather);
                rank = static_cast<int>(meta.weather);
                break;
            case StratifyKey::TimeOfDay:
                group = to_token(meta.time_of_day);
                rank = static_cast<int>(meta.time_of_day);
                break;
            case StratifyKey::Split:
                group = to_token(meta.split);
                rank = static_cast<int>(meta.split);
                break;
            case StratifyKey::Road:
                group = meta.road;
                rank = 0;
                break;
        }
        by_group[group].push_back(&e);
        enum_rank[group] = rank;
    }

    std::vector<std::string> order;
    for (const auto& [g, ptrs] : by_group) order.push_back(g);
    std::sort(order.begin(), order.end(), [&](const std::string& a, const std::string& b) {
        if (enum_rank[a] != enum_rank[b]) return enum_rank[a] < enum_rank[b];
        return a < b;
    });

    std::vector<std::pair<std::string, AggregateMetrics>> out;
    for (const auto& g : order) out.emplace_back(g, aggregate_ptrs(by_group[g]));
    return out;
}

// ---------------------------------------------------------------------------
// Rendering
// ---------------------------------------------------------------------------

namespace {

std::string fmt(double v, const char* format) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), format, v);
    return buf;
}

std::string fmt_opt(const std::optional<double>& v, const char* format) {
    return v ? fmt(*v, format) : "---";
}

std::string csv_field(std::string_view s) {
    if (s.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(s);
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

std::string csv_num(double v) { return fmt(v, "%.9g"); }

}  // namespace

std::string render_metrics_table(std::span<const std::pair<std::string, AggregateMetrics>> groups) {
    const std::vector<std::string> rows = {"Class F1",          "Precision", "Recall",
                                           "Range MAE (m)",     "Bearing acc.",
                                           "Azimuth MAE (deg)", "Hallucination",
                                           "Frames"};
    auto cell = [&](const AggregateMetrics& m, size_t row) -> std::string {
        switch (row) {
            case 0: return fmt(m.f1, "%.3f");
            case 1: return fmt(m.precision, "%.3f") + (m.precision_degenerate ? "*" : "");
            case 2: return fmt(m.recall, "%.3f") + (m.recall_degenerate ? "*" : "");
            case 3: return fmt_opt(m.range_mae_m, "%.1f");
            case 4: return fmt_opt(m.bearing_acc, "%.3f");
            case 5: return fmt_opt(m.azimuth_mae_deg, "%.1f");
            case 6: return fmt(m.hallucination_rate, "%.3f");
            case 7: return std::to_string(m.frame_count);
        }
        return {};
    };

    size_t name_w = 17;
    std::vector<size_t> widths;
    for (const auto& [g, m] : groups) widths.push_back(std::max<size_t>(g.size(), 8));

    std::ostringstream out;
    out << std::left << std::setw(static_cast<int>(name_w)) << "Metric";
    for (size_t c = 0; c < groups.size(); ++c)
        out << "  " << std::right << std::setw(static_cast<int>(widths[c])) << groups[c].first;
    out << '\n';
    for (size_t r = 0; r < rows.size(); ++r) {
        out << std::left << std::setw(static_cast<int>(name_w)) << rows[r];
        for (size_t c = 0; c < groups.size(); ++c)
            out << "  " << std::right << std::setw(static_cast<int>(widths[c]))
                << cell(groups[c].second, r);
        out << '\n';
    }
    if (std::any_of(groups.begin(), groups.end(), [](const auto& g) {
            return g.second.precision_degenerate || g.second.recall_degenerate;
        }))
        out << "(* degenerate denominator convention applied)\n";
    return out.str();
}

std::string metrics_csv_long(std::span<const std::pair<std::string, AggregateMetrics>> groups) {
    std::string out = "group,metric,value\r\n";
    auto row = [&](const std::string& g, std::string_view metric, const std::string& value) {
        out += csv_field(g);
        out += ',';
        out += metric;
        out += ',';
        out += value;
        out += "\r\n";
    };
    for (const auto& [g, m] : groups) {
        row(g, "precision", csv_num(m.precision));
        row(g, "recall", csv_num(m.recall));
        row(g, "f1", csv_num(m.f1));
        row(g, "range_mae_m", m.range_mae_m ? csv_num(*m.range_mae_m) : "");
        row(g, "bearing_acc", m.bearing_acc ? csv_num(*m.bearing_acc) : "");
        row(g, "azimuth_mae_deg", m.azimuth_mae_deg ? csv_num(*m.azimuth_mae_deg) : "");
        row(g, "hallucination_rate", csv_num(m.hallucination_rate));
        row(g, "frame_count", std::to_string(m.frame_count));
        row(g, "tp", std::to_string(m.tp));
        row(g, "pred_count", std::to_string(m.pred_count));
        row(g, "gt_count", std::to_string(m.gt_count));
        row(g, "hallucinated_count", std::to_string(m.hallucinated_count));
        row(g, "precision_degenerate", m.precision_degenerate ? "1" : "0");
        row(g, "recall_degenerate", m.recall_degenerate ? "1" : "0");
    }
    return out;
}

std::string metrics_csv_wide(std::span<const std::pair<std::string, AggregateMetrics>> groups,
                             std::string_view key_column) {
    std::string out = std::string(key_column) +
                      ",frames,precision,recall,f1,range_mae_m,bearing_acc,azimuth_mae_deg,"
                      "hallucination_rate\r\n";
    for (const auto& [g, m] : groups) {
        out += csv_field(g);
        out += ',' + std::to_string(m.frame_count);
        out += ',' + csv_num(m.precision);
        out += ',' + csv_num(m.recall);
        out += ',' + csv_num(m.f1);
        out += ',' + (m.range_mae_m ? csv_num(*m.range_mae_m) : std::string());
        out += ',' + (m.bearing_acc ? csv_num(*m.bearing_acc) : std::string());
        out += ',' + (m.azimuth_mae_deg ? csv_num(*m.azimuth_mae_deg) : std::string());
        out += ',' + csv_num(m.hallucination_rate);
        out += "\r\n";
    }
    return out;
}

}  // namespace radcap
