#include "radcap/preprocess.hpp"

#include <cmath>
#include <cstring>
#include <vector>

namespace radcap {

namespace {

void check_cube_shape(const RACube& c, const RadarGridConfig& g) {
    const auto& s = c.data.shape();
    if (s.size() != 3 || s[0] != g.doppler_bins || s[1] != g.range_bins || s[2] != g.azimuth_bins)
        throw DimMismatch("cube shape does not match grid bin counts");
}

std::vector<double> range_multipliers(const RadarGridConfig& g) {
    std::vector<double> mult(g.range_bins);
    for (uint32_t r = 0; r < g.range_bins; ++r) {
        const double rc = g.range_bin_center_m(r);
        if (rc <= 0.0)
            throw NonPositiveRange("range bin " + std::to_string(r) + " has center <= 0 m");
        mult[r] = r4_multiplier(rc, g.range_max_m);
    }
    return mult;
}

std::vector<double> doppler_centers(const RadarGridConfig& g) {
    std::vector<double> v(g.doppler_bins);
    for (uint32_t d = 0; d < g.doppler_bins; ++d) v[d] = g.doppler_bin_center_mps(d);
    return v;
}

}  // namespace

double r4_multiplier(double range_m, double range_max_m) {
    const double q = range_m / range_max_m;
    return q * q * q * q;
}

// ---------------------------------------------------------------------------
// Elevation max-projection
// ---------------------------------------------------------------------------

RACube elevation_max_project(const Tesseract& t) {
    const auto& s = t.data.shape();
    if (s.size() != 4) throw DimMismatch("elevation_max_project expects a 4D tensor");
    const int64_t D = s[0], R = s[1], E = s[2], A = s[3];

    RACube out;
    out.grid = t.grid;
    out.data = Tensor({static_cast<uint32_t>(D), static_cast<uint32_t>(R), static_cast<uint32_t>(A)});

    const float* in = t.data.data();
    float* dst = out.data.data();

#pragma omp parallel for collapse(2) schedule(static)
    for (int64_t d = 0; d < D; ++d) {
        for (int64_t r = 0; r < R; ++r) {
            const float* slice0 = in + ((d * R + r) * E) * A;
            float* row = dst + (d * R + r) * A;
            std::memcpy(row, slice0, static_cast<size_t>(A) * sizeof(float));
            for (int64_t e = 1; e < E; ++e) {
                const float* slice = slice0 + e * A;
                for (int64_t a = 0; a < A; ++a)
                    row[a] = std::max(row[a], slice[a]);
            }
        }
    }
    return out;
}

RACube reference::elevation_max_project(const Tesseract& t) {
    const auto& s = t.data.shape();
    if (s.size() != 4) throw DimMismatch("elevation_max_project expects a 4D tensor");
    const int64_t D = s[0], R = s[1], E = s[2], A = s[3];

    RACube out;
    out.grid = t.grid;
    out.data = Tensor({static_cast<uint32_t>(D), static_cast<uint32_t>(R), static_cast<uint32_t>(A)});

    const float* in = t.data.data();
    float* dst = out.data.data();
    for (int64_t d = 0; d < D; ++d)
        for (int64_t r = 0; r < R; ++r)
            for (int64_t a = 0; a < A; ++a) {
                float m = in[((d * R + r) * E) * A + a];
                for (int64_t e = 1; e < E; ++e)
                    m = std::max(m, in[((d * R + r) * E + e) * A + a]);
                dst[(d * R + r) * A + a] = m;
            }
    return out;
}

// ---------------------------------------------------------------------------
// R^4 range compensation
// ---------------------------------------------------------------------------

RACube r4_compensate(const RACube& c, const RadarGridConfig& g) {
    check_cube_shape(c, g);
    const std::vector<double> mult = range_multipliers(g);
    const int64_t D = g.doppler_bins, R = g.range_bins, A = g.azimuth_bins;

    RACube out;
    out.grid = g;
    out.data = Tensor(c.data.shape());
    const float* in = c.data.data();
    float* dst = out.data.data();

#pragma omp parallel for collapse(2) schedule(static)
    for (int64_t d = 0; d < D; ++d)
        for (int64_t r = 0; r < R; ++r) {
            const double m = mult[r];
            const int64_t base = (d * R + r) * A;
            for (int64_t a = 0; a < A; ++a)
                dst[base + a] = static_cast<float>(in[base + a] * m);
        }
    return out;
}

RACube reference::r4_compensate(const RACube& c, const RadarGridConfig& g) {
    check_cube_shape(c, g);
    const std::vector<double> mult = range_multipliers(g);
    const int64_t D = g.doppler_bins, R = g.range_bins, A = g.azimuth_bins;

    RACube out;
    out.grid = g;
    out.data = Tensor(c.data.shape());
    const float* in = c.data.data();
    float* dst = out.data.data();
    for (int64_t d = 0; d < D; ++d)
        for (int64_t r = 0; r < R; ++r)
            for (int64_t a = 0; a < A; ++a)
                dst[(d * R + r) * A + a] = static_cast<float>(in[(d * R + r) * A + a] * mult[r]);
    return out;
}

// ---------------------------------------------------------------------------
// Doppler aggregation
// ---------------------------------------------------------------------------

DopplerAggregate doppler_aggregate(const RACube& c, const RadarGridConfig& g) {
    check_cube_shape(c, g);
    const std::vector<double> vel = doppler_centers(g);
    const int64_t D = g.doppler_bins, R = g.range_bins, A = g.azimuth_bins;

    DopplerAggregate out;
    out.total_power = Tensor({g.range_bins, g.azimuth_bins});
    out.mean_velocity = Tensor({g.range_bins, g.azimuth_bins});
    out.peak_velocity = Tensor({g.range_bins, g.azimuth_bins});

    const float* in = c.data.data();
    float* tot = out.total_power.data();
    float* mean = out.mean_velocity.data();
    float* peak = out.peak_velocity.data();

#pragma omp parallel for schedule(static)
    for (int64_t r = 0; r < R; ++r) {
        std::vector<double> total(A, 0.0), wsum(A, 0.0);
        std::vector<float> maxp(A, 0.0f);
        std::vector<int64_t> argd(A, 0);
        for (int64_t d = 0; d < D; ++d) {
            const float* src = in + (d * R + r) * A;
            for (int64_t a = 0; a < A; ++a) {
                const float p = src[a];
                total[a] += p;
                wsum[a] += vel[d] * p;
                if (p > maxp[a]) {
                    maxp[a] = p;
                    argd[a] = d;
                }
            }
        }
        for (int64_t a = 0; a < A; ++a) {
            tot[r * A + a] = static_cast<float>(total[a]);
            mean[r * A + a] = total[a] > 0.0 ? static_cast<float>(wsum[a] / total[a]) : 0.0f;
            peak[r * A + a] = maxp[a] > 0.0f ? static_cast<float>(vel[argd[a]]) : 0.0f;
        }
    }
    return out;
}

DopplerAggregate reference::doppler_aggregate(const RACube& c, const RadarGridConfig& g) {
    check_cube_shape(c, g);
    const std::vector<double> vel = doppler_centers(g);
    const int64_t D = g.doppler_bins, R = g.range_bins, A = g.azimuth_bins;

    DopplerAggregate out;
    out.total_power = Tensor({g.range_bins, g.azimuth_bins});
    out.mean_velocity = Tensor({g.range_bins, g.azimuth_bins});
    out.peak_velocity = Tensor({g.range_bins, g.azimuth_bins});

    const float* in = c.data.data();
    for (int64_t r = 0; r < R; ++r)
        for (int64_t a = 0; a < A; ++a) {
            double total = 0.0, wsum = 0.0;
            float maxp = 0.0f;
            int64_t argd = 0;
            for (int64_t d = 0; d < D; ++d) {
                const float p = in[(d * R + r) * A + a];
                total += p;
                wsum += vel[d] * p;
                if (p > maxp) {
                    maxp = p;
                    argd = d;
                }
            }
            out.total_power.data()[r * A + a] = static_cast<float>(total);
            out.mean_velocity.data()[r * A + a] =
                total > 0.0 ? static_cast<float>(wsum / total) : 0.0f;
            out.peak_velocity.data()[r * A + a] =
                maxp > 0.0f ? static_cast<float>(vel[argd]) : 0.0f;
        }
    return out;
}

// ---------------------------------------------------------------------------
// Coordinate channels and input assembly
// ---------------------------------------------------------------------------

CoordinateChannels coordinate_channels(const RadarGridConfig& g) {
    g.validate();
    CoordinateChannels out;
    out.range_m = Tensor({g.range_bins, g.azimuth_bins});
    out.azimuth_deg = Tensor({g.range_bins, g.azimuth_bins});
    const int64_t R = g.range_bins, A = g.azimuth_bins;
    for (int64_t r = 0; r < R; ++r) {
        const float rc = static_cast<float>(g.range_bin_center_m(static_cast<uint32_t>(r)));
        for (int64_t a = 0; a < A; ++a) {
            out.range_m.data()[r * A + a] = rc;
            out.azimuth_deg.data()[r * A + a] =
                static_cast<float>(g.azimuth_bin_center_deg(static_cast<uint32_t>(a)));
        }
    }
    return out;
}

namespace {

InputTensor assemble_input(const RACube& comp, const RadarGridConfig& g, InputVariant variant,
                           const DopplerAggregate& agg) {
    const uint32_t R = g.range_bins, A = g.azimuth_bins;
    const size_t plane = static_cast<size_t>(R) * A;
    const CoordinateChannels coords = coordinate_channels(g);

    InputTensor out;
    out.variant = variant;
    out.grid = g;
    if (variant == InputVariant::FiveCh) {
        out.data = Tensor({5, R, A});
        float* dst = out.data.data();
        std::memcpy(dst + 0 * plane, agg.total_power.data(), plane * sizeof(float));
        std::memcpy(dst + 1 * plane, agg.mean_velocity.data(), plane * sizeof(float));
        std::memcpy(dst + 2 * plane, agg.peak_velocity.data(), plane * sizeof(float));
        std::memcpy(dst + 3 * plane, coords.range_m.data(), plane * sizeof(float));
        std::memcpy(dst + 4 * plane, coords.azimuth_deg.data(), plane * sizeof(float));
    } else {
        out.data = Tensor({g.doppler_bins + 2, R, A});
        float* dst = out.data.data();
        std::memcpy(dst, comp.data.data(), comp.data.size() * sizeof(float));
        std::memcpy(dst + g.doppler_bins * plane, coords.range_m.data(), plane * sizeof(float));
        std::memcpy(dst + (g.doppler_bins + 1) * plane, coords.azimuth_deg.data(),
                    plane * sizeof(float));
    }
    return out;
}

}  // namespace

InputTensor build_input(const RACube& c, const RadarGridConfig& g, InputVariant variant) {
    const RACube comp = r4_compensate(c, g);
    DopplerAggregate agg;
    if (variant == InputVariant::FiveCh) agg = doppler_aggregate(comp, g);
    return assemble_input(comp, g, variant, agg);
}

InputTensor reference::build_input(const RACube& c, const RadarGridConfig& g,
                                   InputVariant variant) {
    const RACube comp = reference::r4_compensate(c, g);
    DopplerAggregate agg;
    if (variant == InputVariant::FiveCh) agg = reference::doppler_aggregate(comp, g);
    return assemble_input(comp, g, variant, agg);
}

}  // namespace radcap
