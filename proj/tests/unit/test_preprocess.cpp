#include <doctest.h>

#include <cmath>
#include <cstring>
#include <random>

#include "helpers.hpp"
#include "radcap/preprocess.hpp"

using namespace radcap;

namespace {

RadarGridConfig mini_grid(uint32_t d, uint32_t r, uint32_t e, uint32_t a) {
    RadarGridConfig g;
    g.doppler_bins = d;
    g.range_bins = r;
    g.elevation_bins = e;
    g.azimuth_bins = a;
    return g;
}

Tesseract random_tesseract(std::mt19937& rng, const RadarGridConfig& g) {
    Tesseract t;
    t.grid = g;
    t.data = testing_helpers::random_tensor(
        rng, {g.doppler_bins, g.range_bins, g.elevation_bins, g.azimuth_bins});
    return t;
}

RACube random_cube(std::mt19937& rng, const RadarGridConfig& g) {
    RACube c;
    c.grid = g;
    c.data = testing_helpers::random_tensor(rng, {g.doppler_bins, g.range_bins, g.azimuth_bins});
    return c;
}

bool bits_equal(const Tensor& a, const Tensor& b) {
    return a.shape() == b.shape() &&
           std::memcmp(a.data(), b.data(), a.size() * sizeof(float)) == 0;
}

}  // namespace

TEST_CASE("elevation projection of a constant tensor is constant") {
    const RadarGridConfig g = mini_grid(2, 3, 4, 5);
    Tesseract t;
    t.grid = g;
    t.data = Tensor({2, 3, 4, 5});
    for (float& v : t.data.values()) v = 2.5f;
    const RACube c = elevation_max_project(t);
    for (float v : c.data.values()) CHECK(v == 2.5f);
}

TEST_CASE("elevation projection of a single voxel") {
    const RadarGridConfig g = mini_grid(2, 3, 4, 5);
    Tesseract t;
    t.grid = g;
    t.data = Tensor({2, 3, 4, 5});
    // voxel at (d=1, r=2, e=3, a=4)
    t.data.values()[((1 * 3 + 2) * 4 + 3) * 5 + 4] = 7.0f;
    const RACube c = elevation_max_project(t);
    for (size_t i = 0; i < c.data.size(); ++i) {
        const float expect = i == (1 * 3 + 2) * 5 + 4 ? 7.0f : 0.0f;
        CHECK(c.data.values()[i] == expect);
    }
}

TEST_CASE("elevation projection matches a brute-force per-cell max") {
    std::mt19937 rng(11);
    for (int trial = 0; trial < 25; ++trial) {
        const RadarGridConfig g = mini_grid(2, 3, 2, 2);
        const Tesseract t = random_tesseract(rng, g);
        const RACube c = elevation_max_project(t);
        for (uint32_t d = 0; d < 2; ++d)
            for (uint32_t r = 0; r < 3; ++r)
                for (uint32_t a = 0; a < 2; ++a) {
                    float m = -1.0f;
                    for (uint32_t e = 0; e < 2; ++e)
                        m = std::max(m, t.data.values()[((d * 3 + r) * 2 + e) * 2 + a]);
                    CHECK(c.data.values()[(d * 3 + r) * 2 + a] == m);
                }
    }
}

TEST_CASE("projection dominates every elevation slice") {
    std::mt19937 rng(12);
    const RadarGridConfig g = mini_grid(3, 5, 4, 6);
    const Tesseract t = random_tesseract(rng, g);
    const RACube c = elevation_max_project(t);
    for (uint32_t d = 0; d < 3; ++d)
        for (uint32_t r = 0; r < 5; ++r)
            for (uint32_t e = 0; e < 4; ++e)
                for (uint32_t a = 0; a < 6; ++a)
                    CHECK(c.data.values()[(d * 5 + r) * 6 + a] >=
                          t.data.values()[((d * 5 + r) * 4 + e) * 6 + a]);
}

TEST_CASE("r4 multiplier is 1 at the normalization range") {
    CHECK(r4_multiplier(80.0, 80.0) == 1.0);
    CHECK(r4_multiplier(40.0, 80.0) == doctest::Approx(0.0625).epsilon(1e-12));
}

TEST_CASE("r4 compensation equalizes free-space path loss") {
    // scatterers with received power k * r^-4 at the bins nearest the probe ranges
    RadarGridConfig g;
    g.doppler_bins = 1;
    g.elevation_bins = 1;
    RACube c;
    c.grid = g;
    c.data = Tensor({1, g.range_bins, g.azimuth_bins});

    const double k = 3.7e6;
    const double probes[] = {10.0, 20.0, 40.0, 80.0};
    std::vector<uint32_t> bins;
    for (double probe : probes) {
        uint32_t best = 0;
        double best_err = 1e300;
        for (uint32_t r = 0; r < g.range_bins; ++r) {
            const double err = std::abs(g.range_bin_center_m(r) - probe);
            if (err < best_err) {
                best_err = err;
                best = r;
            }
        }
        bins.push_back(best);
        const double rc = g.range_bin_center_m(best);
        c.data.values()[best * g.azimuth_bins + 50] = static_cast<float>(k / (rc * rc * rc * rc));
    }

    const RACube comp = r4_compensate(c, g);
    const double expect = k / (80.0 * 80.0 * 80.0 * 80.0);
    for (uint32_t bin : bins) {
        const double got = comp.data.values()[bin * g.azimuth_bins + 50];
        CHECK(got == doctest::Approx(expect).epsilon(1e-6));
    }
}

TEST_CASE("r4 compensation of zeros is zeros, and it is linear in power") {
    std::mt19937 rng(13);
    const RadarGridConfig g = mini_grid(2, 8, 1, 3);
    RACube zeros;
    zeros.grid = g;
    zeros.data = Tensor({2, 8, 3});
    const RACube comp_zeros = r4_compensate(zeros, g);
    for (float v : comp_zeros.data.values()) CHECK(v == 0.0f);

    const RACube c = random_cube(rng, g);
    RACube scaled = c;
    const float alpha = 0.37f;
    for (float& v : scaled.data.values()) v *= alpha;
    const RACube comp = r4_compensate(c, g);
    const RACube comp_scaled = r4_compensate(scaled, g);
    for (size_t i = 0; i < comp.data.size(); ++i)
        CHECK(comp_scaled.data.values()[i] ==
              doctest::Approx(alpha * comp.data.values()[i]).epsilon(1e-5));
}

TEST_CASE("r4 compensation rejects non-positive range bins") {
    RadarGridConfig g = mini_grid(1, 4, 1, 1);
    g.range_min_m = -10.0f;
    g.range_max_m = 10.0f;
    RACube c;
    c.grid = g;
    c.data = Tensor({1, 4, 1});
    CHECK_THROWS_AS(r4_compensate(c, g), NonPositiveRange);
}

TEST_CASE("doppler aggregation on a single occupied bin") {
    // 32 bins over -32..32 put a bin center exactly at +5 m/s (bin 18)
    RadarGridConfig g = mini_grid(32, 2, 1, 2);
    CHECK(g.doppler_bin_center_mps(18) == doctest::Approx(5.0).epsilon(1e-12));

    RACube c;
    c.grid = g;
    c.data = Tensor({32, 2, 2});
    c.data.values()[(18 * 2 + 1) * 2 + 0] = 4.5f;

    const DopplerAggregate agg = doppler_aggregate(c, g);
    CHECK(agg.total_power.values()[1 * 2 + 0] == doctest::Approx(4.5).epsilon(1e-7));
    CHECK(agg.mean_velocity.values()[1 * 2 + 0] == doctest::Approx(5.0).epsilon(1e-7));
    CHECK(agg.peak_velocity.values()[1 * 2 + 0] == doctest::Approx(5.0).epsilon(1e-7));
    // untouched cell: no return means zero velocities
    CHECK(agg.total_power.values()[0] == 0.0f);
    CHECK(agg.mean_velocity.values()[0] == 0.0f);
    CHECK(agg.peak_velocity.values()[0] == 0.0f);
}

TEST_CASE("doppler aggregation matches a brute-force per-bin oracle") {
    std::mt19937 rng(14);
    const RadarGridConfig g = mini_grid(4, 3, 1, 3);
    for (int trial = 0; trial < 50; ++trial) {
        const RACube c = random_cube(rng, g);
        const DopplerAggregate agg = doppler_aggregate(c, g);
        for (uint32_t r = 0; r < 3; ++r)
            for (uint32_t a = 0; a < 3; ++a) {
                double total = 0, wsum = 0, maxp = -1;
                uint32_t argd = 0;
                for (uint32_t d = 0; d < 4; ++d) {
                    const double p = c.data.values()[(d * 3 + r) * 3 + a];
                    total += p;
                    wsum += g.doppler_bin_center_mps(d) * p;
                    if (p > maxp) {
                        maxp = p;
                        argd = d;
                    }
                }
                const size_t i = r * 3 + a;
                CHECK(agg.total_power.values()[i] == doctest::Approx(total).epsilon(1e-6));
                CHECK(agg.mean_velocity.values()[i] ==
                      doctest::Approx(wsum / total).epsilon(1e-5));
                CHECK(agg.peak_velocity.values()[i] ==
                      doctest::Approx(g.doppler_bin_center_mps(argd)).epsilon(1e-6));
            }
    }
}

TEST_CASE("doppler ties break toward the lowest bin") {
    const RadarGridConfig g = mini_grid(4, 1, 1, 1);
    RACube c;
    c.grid = g;
    c.data = Tensor({4, 1, 1});
    c.data.values()[1] = 2.0f;
    c.data.values()[3] = 2.0f;
    const DopplerAggregate agg = doppler_aggregate(c, g);
    CHECK(agg.peak_velocity.values()[0] ==
          doctest::Approx(g.doppler_bin_center_mps(1)).epsilon(1e-9));
}

TEST_CASE("mean velocity stays within the doppler extent when power is present") {
    std::mt19937 rng(15);
    const RadarGridConfig g = mini_grid(8, 4, 1, 4);
    for (int trial = 0; trial < 20; ++trial) {
        const RACube c = random_cube(rng, g);
        const DopplerAggregate agg = doppler_aggregate(c, g);
        for (size_t i = 0; i < agg.mean_velocity.size(); ++i) {
            if (agg.total_power.values()[i] > 0) {
                CHECK(agg.mean_velocity.values()[i] >= g.doppler_min_mps);
                CHECK(agg.mean_velocity.values()[i] <= g.doppler_max_mps);
            }
        }
    }
}

TEST_CASE("coordinate channels") {
    RadarGridConfig g;
    const CoordinateChannels coords = coordinate_channels(g);

    // azimuth plane: constant along range, endpoints at first/last bin centers
    CHECK(coords.azimuth_deg.values()[0] ==
          doctest::Approx(g.azimuth_bin_center_deg(0)).epsilon(1e-6));
    CHECK(coords.azimuth_deg.values()[106] ==
          doctest::Approx(g.azimuth_bin_center_deg(106)).epsilon(1e-6));
    CHECK(coords.azimuth_deg.values()[0] < 0);
    CHECK(coords.azimuth_deg.values()[106] > 0);
    for (uint32_t r = 1; r < g.range_bins; ++r)
        CHECK(coords.azimuth_deg.values()[r * 107 + 42] == coords.azimuth_deg.values()[42]);

    // range plane: strictly increasing along range, constant along azimuth,
    // closed form (r + 0.5) * 80 / 256 for the default grid
    CHECK(coords.range_m.values()[0] < coords.range_m.values()[255 * 107]);
    for (uint32_t r = 0; r < g.range_bins; ++r) {
        const double expect = (r + 0.5) * 80.0 / 256.0;
        CHECK(coords.range_m.values()[r * 107 + 13] == doctest::Approx(expect).epsilon(1e-6));
    }
}

TEST_CASE("build_input shapes and zero-cube content") {
    RadarGridConfig g;
    RACube zeros;
    zeros.grid = g;
    zeros.data = Tensor({g.doppler_bins, g.range_bins, g.azimuth_bins});

    const InputTensor five = build_input(zeros, g, InputVariant::FiveCh);
    CHECK(five.data.shape() == std::vector<uint32_t>{5, 256, 107});
    const InputTensor sixsix = build_input(zeros, g, InputVariant::SixtySixCh);
    CHECK(sixsix.data.shape() == std::vector<uint32_t>{66, 256, 107});

    const size_t plane = 256 * 107;
    for (size_t i = 0; i < 3 * plane; ++i) CHECK(five.data.values()[i] == 0.0f);
    const CoordinateChannels coords = coordinate_channels(g);
    CHECK(std::memcmp(five.data.data() + 3 * plane, coords.range_m.data(),
                      plane * sizeof(float)) == 0);
    CHECK(std::memcmp(five.data.data() + 4 * plane, coords.azimuth_deg.data(),
                      plane * sizeof(float)) == 0);

    CHECK(channel_names(InputVariant::FiveCh).size() == 5);
    CHECK(channel_names(InputVariant::SixtySixCh).size() == 66);
    CHECK(channel_names(InputVariant::FiveCh)[0] == "total_power");
    CHECK(channel_names(InputVariant::SixtySixCh)[65] == "azimuth_deg");
}

TEST_CASE("five-channel total power equals the sum of the 66-channel doppler planes") {
    std::mt19937 rng(16);
    const RadarGridConfig g = mini_grid(8, 16, 1, 9);
    const RACube c = random_cube(rng, g);
    const InputTensor five = build_input(c, g, InputVariant::FiveCh);
    const InputTensor full = build_input(c, g, InputVariant::SixtySixCh);

    const size_t plane = 16 * 9;
    for (size_t i = 0; i < plane; ++i) {
        double sum = 0;
        for (uint32_t d = 0; d < 8; ++d) sum += full.data.values()[d * plane + i];
        CHECK(five.data.values()[i] == doctest::Approx(sum).epsilon(1e-5));
    }
}

TEST_CASE("parallel kernels are bit-identical to the serial reference") {
    std::mt19937 rng(17);
    const RadarGridConfig g = mini_grid(16, 32, 7, 21);
    const Tesseract t = random_tesseract(rng, g);

    const RACube cube_par = elevation_max_project(t);
    const RACube cube_ref = reference::elevation_max_project(t);
    CHECK(bits_equal(cube_par.data, cube_ref.data));

    CHECK(bits_equal(r4_compensate(cube_par, g).data,
                     reference::r4_compensate(cube_par, g).data));

    const DopplerAggregate a = doppler_aggregate(cube_par, g);
    const DopplerAggregate b = reference::doppler_aggregate(cube_par, g);
    CHECK(bits_equal(a.total_power, b.total_power));
    CHECK(bits_equal(a.mean_velocity, b.mean_velocity));
    CHECK(bits_equal(a.peak_velocity, b.peak_velocity));

    for (InputVariant v : {InputVariant::FiveCh, InputVariant::SixtySixCh})
        CHECK(bits_equal(build_input(cube_par, g, v).data,
                         reference::build_input(cube_par, g, v).data));
}
