#pragma once

#include "radcap/tensor.hpp"

namespace radcap {

// Per-cell Doppler summary planes, each (range, azimuth).
struct DopplerAggregate {
    Tensor total_power;     // sum of power over Doppler bins
    Tensor mean_velocity;   // power-weighted first moment, 0 where total power is 0
    Tensor peak_velocity;   // bin-center velocity at argmax power, ties -> lowest bin
};

// Metric coordinate planes, each (range, azimuth).
struct CoordinateChannels {
    Tensor range_m;       // constant along azimuth
    Tensor azimuth_deg;   // constant along range
};

// (range_m / range_max_m)^4 free-space path loss correction factor.
double r4_multiplier(double range_m, double range_max_m);

// Collapse the elevation axis by per-cell max power: (D,R,E,A) -> (D,R,A).
RACube elevation_max_project(const Tesseract& t);

// Multiply each cell by r4_multiplier(range bin center). Throws
// NonPositiveRange if any range bin center is <= 0.
RACube r4_compensate(const RACube& c, const RadarGridConfig& g);

// Reduce the Doppler axis of an already compensated cube to three planes.
DopplerAggregate doppler_aggregate(const RACube& c, const RadarGridConfig& g);

CoordinateChannels coordinate_channels(const RadarGridConfig& g);

// Compensate, then aggregate (FiveCh) or keep all Doppler bins (SixtySixCh),
// then append the two coordinate planes. Input cube must be uncompensated.
// FiveCh channel order:     [total power, mean velocity, peak velocity, range, azimuth]
// SixtySixCh channel order: [64 Doppler bins ascending velocity, range, azimuth]
InputTensor build_input(const RACube& c, const RadarGridConfig& g, InputVariant variant);

// Serial implementations of the kernels above. Kept as the oracle for the
// parallel versions and as the benchmark baseline; results are bit-identical.
namespace reference {

RACube elevation_max_project(const Tesseract& t);
RACube r4_compensate(const RACube& c, const RadarGridConfig& g);
DopplerAggregate doppler_aggregate(const RACube& c, const RadarGridConfig& g);
InputTensor build_input(const RACube& c, const RadarGridConfig& g, InputVariant variant);

}  // namespace reference

}  // namespace radcap
