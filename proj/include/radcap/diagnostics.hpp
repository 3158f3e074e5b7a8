#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>

#include "radcap/caption.hpp"
#include "radcap/tensor.hpp"

namespace radcap {

// Embedding dump: n tokens x d dims, f32. Stored as an RT4D 2D tensor.
struct TokenMatrix {
    Tensor data;

    uint32_t tokens() const { return data.dim(0); }
    uint32_t dims() const { return data.dim(1); }
    void validate() const;   // NonFiniteInput on NaN/inf, DimMismatch unless 2D
};

TokenMatrix read_token_matrix(const std::filesystem::path& path);
void write_token_matrix(const std::filesystem::path& path, const TokenMatrix& m);

struct NormStats {
    double mean_l2 = 0;
    double std_l2 = 0;    // population
    double min_l2 = 0;
    double max_l2 = 0;
    int64_t count = 0;
};

// Per-token Euclidean norm statistics.
NormStats token_norm_stats(const TokenMatrix& m);

struct NormReport {
    NormStats tokens;
    double reference_mean_l2 = 0;
    double ratio = 0;        // tokens.mean_l2 / reference_mean_l2
    double threshold = 2.0;
    bool flagged = false;    // ratio > threshold or ratio < 1/threshold
};

NormReport norm_mismatch_check(const TokenMatrix& tokens, const TokenMatrix& reference,
                               double threshold = 2.0);

// Per-token standardization with unit affine (gain 1, bias 0):
// (x - mean) / sqrt(variance + eps).
TokenMatrix layer_norm(const TokenMatrix& m, double eps = 1e-5);

size_t levenshtein(std::string_view a, std::string_view b);
// edit distance / max(len); 0 when both strings are empty
double normalized_levenshtein(std::string_view a, std::string_view b);

struct BlindnessReport {
    double identical_fraction_zero = 0;
    double identical_fraction_noise = 0;
    double mean_norm_edit_distance_zero = 0;
    double mean_norm_edit_distance_noise = 0;
    double identical_threshold = 0.5;
    bool flagged = false;
    int64_t frame_count = 0;
};

// Compares captions generated from real input against captions generated
// from zeroed and noise inputs, per frame key. Throws KeyMismatch when the
// three files do not cover the same frames.
BlindnessReport swap_test(std::span<const CaptionRecord> real,
                          std::span<const CaptionRecord> zeros,
                          std::span<const CaptionRecord> noise, double identical_threshold = 0.5);
BlindnessReport swap_test(const std::filesystem::path& real, const std::filesystem::path& zeros,
                          const std::filesystem::path& noise, double identical_threshold = 0.5);

std::string render_norm_report(const NormReport& r);
std::string render_blindness_report(const BlindnessReport& r);

}  // namespace radcap
