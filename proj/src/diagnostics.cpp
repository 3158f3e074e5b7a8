#include "radcap/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <numeric>
#include <sstream>
#include <vector>

namespace radcap {

void TokenMatrix::validate() const {
    if (data.ndims() != 2) throw DimMismatch("token matrix must be 2D (tokens x dims)");
    for (float v : data.values())
        if (!std::isfinite(v)) throw NonFiniteInput("token matrix contains NaN or inf");
}

TokenMatrix read_token_matrix(const std::filesystem::path& path) {
    Rt4dFile f = read_rt4d(path);
    if (f.tensor.ndims() != 2)
        throw DimMismatch("expected a 2D tensor in " + path.string());
    TokenMatrix m;
    m.data = std::move(f.tensor);
    m.validate();
    return m;
}

void write_token_matrix(const std::filesystem::path& path, const TokenMatrix& m) {
    write_rt4d(path, m.data, RadarGridConfig{});
}

NormStats token_norm_stats(const TokenMatrix& m) {
    m.validate();
    const int64_t n = m.tokens(), d = m.dims();
    const float* p = m.data.data();

    std::vector<double> norms(static_cast<size_t>(n));
#pragma omp parallel for schedule(static)
    for (int64_t i = 0; i < n; ++i) {
        double ss = 0;
        const float* row = p + i * d;
        for (int64_t j = 0; j < d; ++j) ss += static_cast<double>(row[j]) * row[j];
        norms[static_cast<size_t>(i)] = std::sqrt(ss);
    }

    NormStats s;
    s.count = n;
    s.min_l2 = norms[0];
    s.max_l2 = norms[0];
    double sum = 0;
    for (double v : norms) {
        sum += v;
        s.min_l2 = std::min(s.min_l2, v);
        s.max_l2 = std::max(s.max_l2, v);
    }
    s.mean_l2 = sum / static_cast<double>(n);
    double var = 0;
    for (double v : norms) var += (v - s.mean_l2) * (v - s.mean_l2);
    s.std_l2 = std::sqrt(var / static_cast<double>(n));
    return s;
}

NormReport norm_mismatch_check(const TokenMatrix& tokens, const TokenMatrix& reference,
                               double threshold) {
    if (tokens.dims() != reference.dims())
        throw DimMismatch("token and reference matrices have different embedding dims (" +
                          std::to_string(tokens.dims()) + " vs " +
                          std::to_string(reference.dims()) + ")");
    NormReport r;
    r.tokens = token_norm_stats(tokens);
    r.reference_mean_l2 = token_norm_stats(reference).mean_l2;
    r.ratio = r.tokens.mean_l2 / r.reference_mean_l2;
    r.threshold = threshold;
    r.flagged = r.ratio > threshold || r.ratio < 1.0 / threshold;
    return r;
}

TokenMatrix layer_norm(const TokenMatrix& m, double eps) {
    m.validate();
    const int64_t n = m.tokens(), d = m.dims();
    if (d < 2) throw DimMismatch("layer_norm needs at least 2 dims per token");

    TokenMatrix out;
    out.data = Tensor({m.tokens(), m.dims()});
    const float* src = m.data.data();
    float* dst = out.data.data();

#pragma omp parallel for schedule(static)
    for (int64_t i = 0; i < n; ++i) {
        const float* row = src + i * d;
        double sum = 0;
        for (int64_t j = 0; j < d; ++j) sum += row[j];
        const double mean = sum / static_cast<double>(d);
        double var = 0;
        for (int64_t j = 0; j < d; ++j) {
            const double c = row[j] - mean;
            var += c * c;
        }
        var /= static_cast<double>(d);
        const double inv = 1.0 / std::sqrt(var + eps);
        float* orow = dst + i * d;
        for (int64_t j = 0; j < d; ++j)
            orow[j] = static_cast<float>((row[j] - mean) * inv);
    }
    return out;
}

size_t levenshtein(std::string_view a, std::string_view b) {
    if (a.size() > b.size()) std::swap(a, b);
    const size_t m = a.size(), n = b.size();
    if (m == 0) return n;

    std::vector<size_t> costs(m + 1);
    std::iota(costs.begin(), costs.end(), size_t{0});
    for (size_t j = 0; j < n; ++j) {
        size_t corner = costs[0];
        costs[0] = j + 1;
        for (size_t i = 0; i < m; ++i) {
            const size_t upper = costs[i + 1];
            costs[i + 1] = a[i] == b[j] ? corner
                                        : 1 + std::min({upper, corner, costs[i]});
            corner = upper;
        }
    }
    return costs[m];
}

double normalized_levenshtein(std::string_view a, std::string_view b) {
    const size_t longest = std::max(a.size(), b.size());
    if (longest == 0) return 0.0;
    return static_cast<double>(levenshtein(a, b)) / static_cast<double>(longest);
}

namespace {

std::map<std::string, std::string> by_key(std::span<const CaptionRecord> records,
                                          const char* which) {
    std::map<std::string, std::string> out;
    for (const auto& r : records) {
        if (!out.emplace(r.frame_key, r.text).second)
            throw KeyMismatch(std::string(which) + ": duplicate frame key " + r.frame_key);
    }
    return out;
}

}  // namespace

BlindnessReport swap_test(std::span<const CaptionRecord> real,
                          std::span<const CaptionRecord> zeros,
                          std::span<const CaptionRecord> noise, double identical_threshold) {
    const auto real_map = by_key(real, "real");
    const auto zero_map = by_key(zeros, "zeros");
    const auto noise_map = by_key(noise, "noise");
    if (real_map.empty()) throw EmptyEvaluation("swap test over zero frames");

    auto check_keys = [&](const std::map<std::string, std::string>& other, const char* which) {
        if (other.size() != real_map.size())
            throw KeyMismatch(std::string(which) + " covers " + std::to_string(other.size()) +
                              " frames, real covers " + std::to_string(real_map.size()));
        for (const auto& [k, v] : real_map)
            if (!other.count(k))
                throw KeyMismatch(std::string(which) + " is missing frame " + k);
    };
    check_keys(zero_map, "zeros");
    check_keys(noise_map, "noise");

    BlindnessReport r;
    r.identical_threshold = identical_threshold;
    r.frame_count = static_cast<int64_t>(real_map.size());
    int64_t same_zero = 0, same_noise = 0;
    double dist_zero = 0, dist_noise = 0;
    for (const auto& [key, text] : real_map) {
        const std::string& z = zero_map.at(key);
        const std::string& x = noise_map.at(key);
        same_zero += text == z ? 1 : 0;
        same_noise += text == x ? 1 : 0;
        dist_zero += normalized_levenshtein(text, z);
        dist_noise += normalized_levenshtein(text, x);
    }
    const double n = static_cast<double>(r.frame_count);
    r.identical_fraction_zero = static_cast<double>(same_zero) / n;
    r.identical_fraction_noise = static_cast<double>(same_noise) / n;
    r.mean_norm_edit_distance_zero = dist_zero / n;
    r.mean_norm_edit_distance_noise = dist_noise / n;
    r.flagged = r.identical_fraction_zero >= identical_threshold ||
                r.identical_fraction_noise >= identical_threshold;
    return r;
}

BlindnessReport swap_test(const std::filesystem::path& real, const std::filesystem::path& zeros,
                          const std::filesystem::path& noise, double identical_threshold) {
    const auto a = read_caption_file(real);
    const auto b = read_caption_file(zeros);
    const auto c = read_caption_file(noise);
    return swap_test(a, b, c, identical_threshold);
}

namespace {

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6f", v);
    return buf;
}

}  // namespace

std::string render_norm_report(const NormReport& r) {
    std::ostringstream out;
    out << "token norms:     mean " << fmt(r.tokens.mean_l2) << "  std " << fmt(r.tokens.std_l2)
        << "  min " << fmt(r.tokens.min_l2) << "  max " << fmt(r.tokens.max_l2) << "  (n="
        << r.tokens.count << ")\n";
    out << "reference mean:  " << fmt(r.reference_mean_l2) << '\n';
    out << "ratio:           " << fmt(r.ratio) << "  (threshold " << fmt(r.threshold) << ")\n";
    out << "verdict:         "
        << (r.flagged ? "FLAGGED - token norm mismatch against the reference embedding scale"
                      : "ok - token norms are within the reference embedding scale")
        << '\n';
    return out.str();
}

std::string render_blindness_report(const BlindnessReport& r) {
    std::ostringstream out;
    out << "frames compared:              " << r.frame_count << '\n';
    out << "identical captions (zeros):   " << fmt(r.identical_fraction_zero) << '\n';
    out << "identical captions (noise):   " << fmt(r.identical_fraction_noise) << '\n';
    out << "mean edit distance (zeros):   " << fmt(r.mean_norm_edit_distance_zero) << '\n';
    out << "mean edit distance (noise):   " << fmt(r.mean_norm_edit_distance_noise) << '\n';
    out << "verdict:                      "
        << (r.flagged ? "FLAGGED - captions ignore the sensor input (threshold " +
                            fmt(r.identical_threshold) + ")"
                      : "ok - captions change with the sensor input")
        << '\n';
    return out.str();
}

}  // namespace radcap
