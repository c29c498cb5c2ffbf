#ifndef SNLOC_EXPERIMENT_HPP
#define SNLOC_EXPERIMENT_HPP

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "snloc/config.hpp"
#include "snloc/detection.hpp"
#include "snloc/estimation.hpp"
#include "snloc/sensor.hpp"

namespace snloc {

inline PlumeParams effective_plume(const ExperimentConfig& cfg) {
    PlumeParams p = cfg.plume;
    if (cfg.mass_from_wind) {
        const MassEstimate m = transmitted_mass(p.wind_x, p.wind_y, cfg.sncla_cfg.area,
                                                cfg.sncla_cfg.emission_time, cfg.sncla_cfg.h1);
        p.mass = m.m_t;
    }
    return p;
}

struct MeasurementResult {
    int measurement = 0;
    std::vector<DetectionResult> detections;
    std::optional<SnclaResult> sncla;
    std::string failure; // non-empty when estimation failed
};

struct RunReport {
    std::vector<MeasurementResult> measurements;
    std::map<int, double> epsilon_c;                 // per cluster
    std::map<std::string, double> mean_detection_time; // per node name, detected runs only
    int failures = 0;

    std::vector<std::vector<LocationEstimate>> estimate_runs() const {
        std::vector<std::vector<LocationEstimate>> runs;
        for (const auto& m : measurements)
            if (m.sncla) runs.push_back(m.sncla->estimates);
        return runs;
    }
};

// One seeded measurement: fresh puff, fresh noise substream, detect, SNCLA.
inline MeasurementResult run_measurement(const ExperimentConfig& cfg, int measurement) {
    MeasurementResult res;
    res.measurement = measurement;
    const PlumeParams plume = effective_plume(cfg);
    const std::uint64_t seed = cfg.seed + 0x51ed270b * static_cast<std::uint64_t>(measurement);
    const std::vector<Trace> traces = synthesize_traces(cfg.grid, plume, cfg.noise,
                                                        cfg.sensitivity, cfg.sample_rate,
                                                        cfg.duration, seed);
    for (const Trace& tr : traces) res.detections.push_back(detect(tr, cfg.detection));
    try {
        res.sncla = sncla(res.detections, cfg.grid, cfg.sensitivity, cfg.sncla_cfg);
    } catch (const EstimationError& e) {
        res.failure = e.what();
    }
    return res;
}

inline RunReport run_experiment(const ExperimentConfig& cfg) {
    RunReport report;
    std::map<std::string, std::pair<double, int>> tsum;
    for (int m = 1; m <= cfg.measurements; ++m) {
        MeasurementResult res = run_measurement(cfg, m);
        if (!res.sncla) ++report.failures;
        for (const DetectionResult& d : res.detections)
            if (d.detected) {
                auto& acc = tsum[d.node.name()];
                acc.first += d.t;
                acc.second += 1;
            }
        report.measurements.push_back(std::move(res));
    }
    for (const auto& [name, acc] : tsum)
        report.mean_detection_time[name] = acc.first / acc.second;
    const auto runs = report.estimate_runs();
    if (!runs.empty())
        report.epsilon_c = cluster_error(runs, cfg.plume.source_x, cfg.plume.source_y);
    return report;
}

struct Quartiles {
    double q25 = 0.0, median = 0.0, q75 = 0.0;
    int n = 0;
};

inline Quartiles quartiles(std::vector<double> v) {
    Quartiles q;
    q.n = static_cast<int>(v.size());
    if (v.empty()) return q;
    std::sort(v.begin(), v.end());
    auto at = [&](double p) {
        const double pos = p * (v.size() - 1);
        const std::size_t lo = static_cast<std::size_t>(pos);
        const std::size_t hi = std::min(lo + 1, v.size() - 1);
        return v[lo] + (v[hi] - v[lo]) * (pos - lo);
    };
    q.q25 = at(0.25);
    q.median = at(0.5);
    q.q75 = at(0.75);
    return q;
}

struct SweepRow {
    double threshold = 0.0;
    int cluster = 0;
    Quartiles q;
};

// Repeats the full detect+estimate pipeline over a threshold grid and
// summarizes per-pair localization errors as box-plot quartiles per cluster.
inline std::vector<SweepRow> sweep_thresholds(ExperimentConfig cfg,
                                              const std::vector<double>& thresholds) {
    std::vector<SweepRow> rows;
    for (double th : thresholds) {
        if (cfg.detection.scheme == DetectionScheme::energy)
            cfg.detection.energy_threshold = th;
        else
            cfg.detection.amplitude_threshold = th;
        std::map<int, std::vector<double>> dists;
        for (int m = 1; m <= cfg.measurements; ++m) {
            const MeasurementResult res = run_measurement(cfg, m);
            if (!res.sncla) continue;
            for (const LocationEstimate& e : res.sncla->estimates)
                dists[e.cluster].push_back(std::hypot(e.x_hat - cfg.plume.source_x,
                                                      e.y_hat - cfg.plume.source_y));
        }
        if (dists.empty()) {
            rows.push_back({th, 0, Quartiles{}});
            continue;
        }
        for (auto& [cluster, d] : dists) rows.push_back({th, cluster, quartiles(std::move(d))});
    }
    return rows;
}

} // namespace snloc

#endif
