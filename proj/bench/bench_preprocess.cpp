// Timing comparison between the serial reference kernels and the OpenMP
// versions on a synthetic full-size frame, plus a bit-identity check.

#include <chrono>
#include <cstdio>
#include <cstring>
#include <random>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "radcap/preprocess.hpp"

using namespace radcap;

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
    return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

Tesseract make_frame(uint64_t seed) {
    Tesseract t;
    t.grid = RadarGridConfig{};
    t.data = Tensor({t.grid.doppler_bins, t.grid.range_bins, t.grid.elevation_bins,
                     t.grid.azimuth_bins});
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<float> dist(0.0f, 100.0f);
    for (float& v : t.data.values()) v = dist(rng);
    return t;
}

bool bits_equal(const Tensor& a, const Tensor& b) {
    return a.shape() == b.shape() &&
           std::memcmp(a.data(), b.data(), a.size() * sizeof(float)) == 0;
}

template <typename F>
double best_of(int reps, F&& fn) {
    double best = 1e300;
    for (int i = 0; i < reps; ++i) {
        const auto t0 = Clock::now();
        fn();
        best = std::min(best, ms_since(t0));
    }
    return best;
}

}  // namespace

int main(int argc, char** argv) {
    const int reps = argc > 1 ? std::atoi(argv[1]) : 3;
#ifdef _OPENMP
    std::printf("threads: %d\n", omp_get_max_threads());
#else
    std::printf("threads: 1 (no OpenMP)\n");
#endif

    std::printf("generating synthetic frame (64x256x37x107)...\n");
    const Tesseract frame = make_frame(42);
    const RadarGridConfig& g = frame.grid;

    const RACube cube_ref = reference::elevation_max_project(frame);
    const RACube cube_par = elevation_max_project(frame);
    const InputTensor five_ref = reference::build_input(cube_ref, g, InputVariant::FiveCh);
    const InputTensor five_par = build_input(cube_par, g, InputVariant::FiveCh);
    const InputTensor sixsix_ref = reference::build_input(cube_ref, g, InputVariant::SixtySixCh);
    const InputTensor sixsix_par = build_input(cube_par, g, InputVariant::SixtySixCh);
    const bool identical = bits_equal(cube_ref.data, cube_par.data) &&
                           bits_equal(five_ref.data, five_par.data) &&
                           bits_equal(sixsix_ref.data, sixsix_par.data);
    std::printf("serial/parallel outputs bit-identical: %s\n", identical ? "yes" : "NO");

    struct Row {
        const char* name;
        double serial_ms;
        double parallel_ms;
    };
    Row rows[] = {
        {"elevation_max_project",
         best_of(reps, [&] { (void)reference::elevation_max_project(frame); }),
         best_of(reps, [&] { (void)elevation_max_project(frame); })},
        {"r4_compensate", best_of(reps, [&] { (void)reference::r4_compensate(cube_ref, g); }),
         best_of(reps, [&] { (void)r4_compensate(cube_ref, g); })},
        {"build_input 5ch",
         best_of(reps, [&] { (void)reference::build_input(cube_ref, g, InputVariant::FiveCh); }),
         best_of(reps, [&] { (void)build_input(cube_ref, g, InputVariant::FiveCh); })},
        {"build_input 66ch",
         best_of(reps,
                 [&] { (void)reference::build_input(cube_ref, g, InputVariant::SixtySixCh); }),
         best_of(reps, [&] { (void)build_input(cube_ref, g, InputVariant::SixtySixCh); })},
    };

    std::printf("\n%-24s %12s %12s %9s\n", "kernel", "serial ms", "parallel ms", "speedup");
    double serial_total = 0, parallel_total = 0;
    for (const Row& r : rows) {
        std::printf("%-24s %12.2f %12.2f %8.2fx\n", r.name, r.serial_ms, r.parallel_ms,
                    r.serial_ms / r.parallel_ms);
        serial_total += r.serial_ms;
        parallel_total += r.parallel_ms;
    }
    std::printf("%-24s %12.2f %12.2f %8.2fx\n", "total", serial_total, parallel_total,
                serial_total / parallel_total);

    const auto t0 = Clock::now();
    const RACube c = elevation_max_project(frame);
    (void)build_input(c, g, InputVariant::FiveCh);
    (void)build_input(c, g, InputVariant::SixtySixCh);
    std::printf("\nfull frame, both variants: %.2f ms\n", ms_since(t0));
    return identical ? 0 : 1;
}
