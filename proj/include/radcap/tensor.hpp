#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "radcap/errors.hpp"

namespace radcap {

// Physical axis extents of the radar measurement grid. Bin centers are
// linearly spaced: center(i) = min + (i + 0.5) * (max - min) / bins.
struct RadarGridConfig {
    float range_min_m      = 0.0f;
    float range_max_m      = 80.0f;
    float az_min_deg       = -53.0f;
    float az_max_deg       = 53.0f;
    float doppler_min_mps  = -32.0f;
    float doppler_max_mps  = 32.0f;
    uint32_t doppler_bins   = 64;
    uint32_t range_bins     = 256;
    uint32_t elevation_bins = 37;
    uint32_t azimuth_bins   = 107;

    double range_bin_center_m(uint32_t r) const;
    double azimuth_bin_center_deg(uint32_t a) const;
    double doppler_bin_center_mps(uint32_t d) const;

    // Throws ConfigError on min >= max or a zero bin count.
    void validate() const;
};

// Dense row-major float tensor, last axis fastest.
class Tensor {
public:
    Tensor() = default;
    explicit Tensor(std::vector<uint32_t> shape);

    const std::vector<uint32_t>& shape() const { return shape_; }
    uint32_t dim(size_t i) const { return shape_.at(i); }
    size_t ndims() const { return shape_.size(); }
    size_t size() const { return data_.size(); }

    float* data() { return data_.data(); }
    const float* data() const { return data_.data(); }

    std::vector<float>& values() { return data_; }
    const std::vector<float>& values() const { return data_; }

    bool same_shape(const Tensor& other) const { return shape_ == other.shape_; }

private:
    std::vector<uint32_t> shape_;
    std::vector<float> data_;
};

enum class InputVariant { FiveCh, SixtySixCh };

// Raw 4D radar frame: (doppler, range, elevation, azimuth) power, linear units.
struct Tesseract {
    Tensor data;
    RadarGridConfig grid;

    // Shape matches grid bin counts; every value finite and >= 0.
    void validate() const;
};

// Elevation-collapsed frame: (doppler, range, azimuth).
struct RACube {
    Tensor data;
    RadarGridConfig grid;

    void validate() const;
};

// Model-ready input: (channels, range, azimuth) with channels 5 or 66.
struct InputTensor {
    InputVariant variant = InputVariant::FiveCh;
    Tensor data;
    RadarGridConfig grid;
};

// Ordered channel semantics for an input variant.
std::vector<std::string> channel_names(InputVariant v);

// ---------------------------------------------------------------------------
// RT4D container (bit-exact, little endian):
//   bytes 0..3    magic "R4DT"
//   u32           version (1)
//   u32           ndims (2, 3 or 4)
//   ndims x u32   dims
//   u32           dtype (0 = IEEE-754 binary32)
//   64 bytes      metadata: grid extents as 6 x f32
//                 (range_min, range_max, az_min, az_max, dop_min, dop_max),
//                 zero padded
//   payload       row-major f32, last axis fastest
// ---------------------------------------------------------------------------

struct Rt4dFile {
    Tensor tensor;
    RadarGridConfig grid;   // extents from metadata, bin counts from dims where derivable
};

Rt4dFile read_rt4d(const std::filesystem::path& path);
void write_rt4d(const std::filesystem::path& path, const Tensor& t, const RadarGridConfig& grid);

Tesseract read_tesseract(const std::filesystem::path& path);   // ndims == 4
RACube read_cube(const std::filesystem::path& path);           // ndims == 3

void write_tesseract(const std::filesystem::path& path, const Tesseract& t);
void write_cube(const std::filesystem::path& path, const RACube& c);
void write_input(const std::filesystem::path& path, const InputTensor& t);

}  // namespace radcap
