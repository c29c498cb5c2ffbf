#ifndef SNLOC_SIGPROC_HPP
#define SNLOC_SIGPROC_HPP

#include <stdexcept>
#include <vector>

#include "snloc/detection.hpp"
#include "snloc/fir.hpp"
#include "snloc/sensor.hpp"

namespace snloc {

struct NoiseExtraction {
    std::vector<double> non_offset; // g = z - rho_o
    std::vector<double> filtered;   // x_f, low-pass of g
    std::vector<double> noise;      // w = g - x_f
    double rho_o = 0.0;
};

// Offset removal, low-pass filtering, and subtraction: g = x_f + w exactly.
inline NoiseExtraction extract_noise(const Trace& trace, int p, const FirFilter& f) {
    if (trace.samples.size() <= f.taps.size())
        throw std::invalid_argument("extract_noise: trace shorter than the filter");
    NoiseExtraction out;
    out.rho_o = estimate_offset(trace, p);
    out.non_offset.resize(trace.samples.size());
    for (std::size_t n = 0; n < trace.samples.size(); ++n)
        out.non_offset[n] = trace.samples[n] - out.rho_o;
    out.filtered = apply_fir(f, out.non_offset);
    out.noise.resize(out.non_offset.size());
    for (std::size_t n = 0; n < out.noise.size(); ++n)
        out.noise[n] = out.non_offset[n] - out.filtered[n];
    return out;
}

// First half of a trace of at least 90 s, used for signal-distribution fits
// (the second half is contaminated by reflections).
inline Trace first_half_window(const Trace& trace) {
    if (trace.duration() < 90.0)
        throw std::invalid_argument("first_half_window: trace shorter than 90 s");
    Trace out = trace;
    const auto n = static_cast<std::size_t>(std::llround(90.0 * trace.sample_rate));
    if (out.samples.size() > n) out.samples.resize(n);
    return out;
}

} // namespace snloc

#endif
