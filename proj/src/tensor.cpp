#include "radcap/tensor.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>

static_assert(std::endian::native == std::endian::little,
              "RT4D I/O assumes a little-endian host");
static_assert(sizeof(float) == 4 && std::numeric_limits<float>::is_iec559,
              "RT4D payload requires IEEE-754 binary32");

namespace radcap {

namespace {

constexpr char kMagic[4] = {'R', '4', 'D', 'T'};
constexpr uint32_t kVersion = 1;
constexpr uint32_t kDtypeF32 = 0;
constexpr size_t kMetadataBytes = 64;
constexpr size_t kMaxElements = size_t{1} << 31;  // 8 GiB of f32, sanity cap

double bin_center(double lo, double hi, uint32_t bins, uint32_t i) {
    return lo + (static_cast<double>(i) + 0.5) * (hi - lo) / static_cast<double>(bins);
}

void check_axis(float lo, float hi, uint32_t bins, const char* name) {
    if (!(lo < hi))
        throw ConfigError(std::string("grid axis ") + name + ": min must be < max");
    if (bins == 0)
        throw ConfigError(std::string("grid axis ") + name + ": bin count must be >= 1");
}

void validate_power_values(const Tensor& t, const char* what) {
    for (float v : t.values()) {
        if (!std::isfinite(v) || v < 0.0f)
            throw NonFiniteInput(std::string(what) + ": power values must be finite and >= 0");
    }
}

}  // namespace

double RadarGridConfig::range_bin_center_m(uint32_t r) const {
    return bin_center(range_min_m, range_max_m, range_bins, r);
}

double RadarGridConfig::azimuth_bin_center_deg(uint32_t a) const {
    return bin_center(az_min_deg, az_max_deg, azimuth_bins, a);
}

double RadarGridConfig::doppler_bin_center_mps(uint32_t d) const {
    return bin_center(doppler_min_mps, doppler_max_mps, doppler_bins, d);
}

void RadarGridConfig::validate() const {
    check_axis(range_min_m, range_max_m, range_bins, "range");
    check_axis(az_min_deg, az_max_deg, azimuth_bins, "azimuth");
    check_axis(doppler_min_mps, doppler_max_mps, doppler_bins, "doppler");
    if (elevation_bins == 0)
        throw ConfigError("grid axis elevation: bin count must be >= 1");
}

Tensor::Tensor(std::vector<uint32_t> shape) : shape_(std::move(shape)) {
    size_t n = 1;
    for (uint32_t d : shape_) {
        if (d == 0) throw DimMismatch("tensor dimension of size 0");
        if (n > kMaxElements / d) throw DimMismatch("tensor too large");
        n *= d;
    }
    data_.assign(n, 0.0f);
}

void Tesseract::validate() const {
    grid.validate();
    const auto& s = data.shape();
    if (s.size() != 4 || s[0] != grid.doppler_bins || s[1] != grid.range_bins ||
        s[2] != grid.elevation_bins || s[3] != grid.azimuth_bins)
        throw DimMismatch("tesseract shape does not match grid bin counts");
    validate_power_values(data, "tesseract");
}

void RACube::validate() const {
    grid.validate();
    const auto& s = data.shape();
    if (s.size() != 3 || s[0] != grid.doppler_bins || s[1] != grid.range_bins ||
        s[2] != grid.azimuth_bins)
        throw DimMismatch("cube shape does not match grid bin counts");
    validate_power_values(data, "cube");
}

std::vector<std::string> channel_names(InputVariant v) {
    std::vector<std::string> names;
    if (v == InputVariant::FiveCh) {
        names = {"total_power", "mean_doppler_mps", "peak_doppler_mps"};
    } else {
        for (int d = 0; d < 64; ++d)
            names.push_back("doppler_bin_" + std::to_string(d));
    }
    names.push_back("range_m");
    names.push_back("azimuth_deg");
    return names;
}

namespace {

template <typename T>
void put(std::string& out, T v) {
    char buf[sizeof(T)];
    std::memcpy(buf, &v, sizeof(T));
    out.append(buf, sizeof(T));
}

uint32_t get_u32(const char* p) {
    uint32_t v;
    std::memcpy(&v, p, 4);
    return v;
}

float get_f32(const char* p) {
    float v;
    std::memcpy(&v, p, 4);
    return v;
}

}  // namespace

void write_rt4d(const std::filesystem::path& path, const Tensor& t, const RadarGridConfig& grid) {
    if (t.ndims() < 2 || t.ndims() > 4)
        throw DimMismatch("RT4D supports 2, 3 or 4 dims, got " + std::to_string(t.ndims()));

    std::string header;
    header.append(kMagic, 4);
    put(header, kVersion);
    put(header, static_cast<uint32_t>(t.ndims()));
    for (uint32_t d : t.shape()) put(header, d);
    put(header, kDtypeF32);

    std::string meta;
    put(meta, grid.range_min_m);
    put(meta, grid.range_max_m);
    put(meta, grid.az_min_deg);
    put(meta, grid.az_max_deg);
    put(meta, grid.doppler_min_mps);
    put(meta, grid.doppler_max_mps);
    meta.resize(kMetadataBytes, '\0');

    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot open for writing: " + path.string());
    out.write(header.data(), static_cast<std::streamsize>(header.size()));
    out.write(meta.data(), static_cast<std::streamsize>(meta.size()));
    out.write(reinterpret_cast<const char*>(t.data()),
              static_cast<std::streamsize>(t.size() * sizeof(float)));
    if (!out) throw Error("short write: " + path.string());
}

Rt4dFile read_rt4d(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open: " + path.string());

    auto read_exact = [&](char* buf, size_t n) {
        in.read(buf, static_cast<std::streamsize>(n));
        if (static_cast<size_t>(in.gcount()) != n)
            throw TruncatedFile("unexpected end of file: " + path.string());
    };

    char head[12];
    read_exact(head, sizeof(head));
    if (std::memcmp(head, kMagic, 4) != 0)
        throw BadMagic("not an RT4D file: " + path.string());
    if (get_u32(head + 4) != kVersion)
        throw BadMagic("unsupported RT4D version in " + path.string());
    const uint32_t ndims = get_u32(head + 8);
    if (ndims < 2 || ndims > 4)
        throw DimMismatch("RT4D declares " + std::to_string(ndims) + " dims in " + path.string());

    std::vector<char> rest(4 * ndims + 4 + kMetadataBytes);
    read_exact(rest.data(), rest.size());

    std::vector<uint32_t> dims(ndims);
    for (uint32_t i = 0; i < ndims; ++i) dims[i] = get_u32(rest.data() + 4 * i);
    if (get_u32(rest.data() + 4 * ndims) != kDtypeF32)
        throw BadMagic("unsupported dtype code in " + path.string());

    const char* meta = rest.data() + 4 * ndims + 4;
    Rt4dFile file;
    file.grid.range_min_m = get_f32(meta + 0);
    file.grid.range_max_m = get_f32(meta + 4);
    file.grid.az_min_deg = get_f32(meta + 8);
    file.grid.az_max_deg = get_f32(meta + 12);
    file.grid.doppler_min_mps = get_f32(meta + 16);
    file.grid.doppler_max_mps = get_f32(meta + 20);

    file.tensor = Tensor(dims);
    in.read(reinterpret_cast<char*>(file.tensor.data()),
            static_cast<std::streamsize>(file.tensor.size() * sizeof(float)));
    if (static_cast<size_t>(in.gcount()) != file.tensor.size() * sizeof(float))
        throw TruncatedFile("payload shorter than declared dims: " + path.string());
    return file;
}

Tesseract read_tesseract(const std::filesystem::path& path) {
    Rt4dFile f = read_rt4d(path);
    if (f.tensor.ndims() != 4)
        throw DimMismatch("expected a 4D tensor in " + path.string());
    Tesseract t;
    t.grid = f.grid;
    t.grid.doppler_bins = f.tensor.dim(0);
    t.grid.range_bins = f.tensor.dim(1);
    t.grid.elevation_bins = f.tensor.dim(2);
    t.grid.azimuth_bins = f.tensor.dim(3);
    t.data = std::move(f.tensor);
    t.validate();
    return t;
}

RACube read_cube(const std::filesystem::path& path) {
    Rt4dFile f = read_rt4d(path);
    if (f.tensor.ndims() != 3)
        throw DimMismatch("expected a 3D tensor in " + path.string());
    RACube c;
    c.grid = f.grid;
    c.grid.doppler_bins = f.tensor.dim(0);
    c.grid.range_bins = f.tensor.dim(1);
    c.grid.azimuth_bins = f.tensor.dim(2);
    c.data = std::move(f.tensor);
    c.validate();
    return c;
}

void write_tesseract(const std::filesystem::path& path, const Tesseract& t) {
    write_rt4d(path, t.data, t.grid);
}

void write_cube(const std::filesystem::path& path, const RACube& c) {
    write_rt4d(path, c.data, c.grid);
}

void write_input(const std::filesystem::path& path, const InputTensor& t) {
    write_rt4d(path, t.data, t.grid);
}

}  // namespace radcap
