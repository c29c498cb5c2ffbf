#ifndef SNLOC_DETECTION_HPP
#define SNLOC_DETECTION_HPP

#include <cmath>
#include <stdexcept>
#include <vector>

#include "snloc/sensor.hpp"

namespace snloc {

enum class DetectionScheme { amplitude, energy };

struct DetectionConfig {
    DetectionScheme scheme = DetectionScheme::energy;
    double amplitude_threshold = 0.05; // A_T, V
    double energy_threshold = 4.3e-3;  // lambda, J
    int window = 7;                    // L, moving-average length
    int offset_window = 50;            // p, samples averaged for rho_o
    double load_resistance = 1000.0;   // R_l, ohm
};

struct DetectionResult {
    NodeId node;
    bool detected = false;
    double t = 0.0;      // s
    double gamma = 0.0;  // V
    double rho_o = 0.0;  // estimated offset, V
};

// Mean of the first p samples.
inline double estimate_offset(const Trace& trace, int p) {
    if (p < 1 || static_cast<std::size_t>(p) > trace.samples.size())
        throw std::invalid_argument("estimate_offset: trace shorter than offset window");
    double s = 0.0;
    for (int n = 0; n < p; ++n) s += trace.samples[n];
    return s / p;
}

// Causal L-sample mean with edge hold (x[m] = x[0] for m < 0).
inline std::vector<double> moving_average(const std::vector<double>& x, int L) {
    if (L < 1) throw std::invalid_argument("moving_average: window must be >= 1");
    std::vector<double> y(x.size());
    for (std::size_t n = 0; n < x.size(); ++n) {
        double s = 0.0;
        for (int k = 0; k < L; ++k) {
            const std::ptrdiff_t m = static_cast<std::ptrdiff_t>(n) - k;
            s += x[m >= 0 ? m : 0];
        }
        y[n] = s / L;
    }
    return y;
}

// Threshold gamma = rho_o + A_T on the moving-average output; detection at
// the first qualifying sample.
inline DetectionResult amplitude_detect(const Trace& trace, const DetectionConfig& cfg) {
    DetectionResult res;
    res.node = trace.node;
    res.rho_o = estimate_offset(trace, cfg.offset_window);
    const double gamma = res.rho_o + cfg.amplitude_threshold;
    const std::vector<double> y = moving_average(trace.samples, cfg.window);
    for (std::size_t n = 0; n < y.size(); ++n) {
        if (y[n] >= gamma) {
            res.detected = true;
            res.t = trace.sample_time(n);
            res.gamma = gamma;
            return res;
        }
    }
    return res;
}

// Cumulative energy of the offset-removed signal across the load resistor,
// E[n] = (dt / R_l) * sum g^2; detection when E reaches lambda. gamma is the
// instantaneous (raw) voltage at that sample.
inline DetectionResult energy_detect(const Trace& trace, const DetectionConfig& cfg) {
    DetectionResult res;
    res.node = trace.node;
    res.rho_o = estimate_offset(trace, cfg.offset_window);
    const double dt = 1.0 / trace.sample_rate;
    double energy = 0.0;
    for (std::size_t n = 0; n < trace.samples.size(); ++n) {
        const double g = trace.samples[n] - res.rho_o;
        energy += dt * g * g / cfg.load_resistance;
        if (energy >= cfg.energy_threshold) {
            res.detected = true;
            res.t = trace.sample_time(n);
            res.gamma = trace.samples[n];
            return res;
        }
    }
    return res;
}

inline DetectionResult detect(const Trace& trace, const DetectionConfig& cfg) {
    return cfg.scheme == DetectionScheme::amplitude ? amplitude_detect(trace, cfg)
                                                    : energy_detect(trace, cfg);
}

} // namespace snloc

#endif
