// snloc: simulation / detection / estimation pipeline driver.
//
// Subcommands read and write CSV files inside --out (default ".") so they can
// be chained: simulate -> detect -> estimate, or run end to end via evaluate.

#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "snloc/snloc.hpp"

namespace fs = std::filesystem;

namespace {

struct CommonOpts {
    std::string config;
    std::string out = ".";
    std::string in;
    std::uint64_t seed = 0;
    bool seed_set = false;
    int measurements = 0;
    std::string scheme;
    double threshold = -1.0;
    std::string sweep;
};

snloc::ExperimentConfig make_config(const CommonOpts& o) {
    snloc::ExperimentConfig cfg =
        o.config.empty() ? snloc::ExperimentConfig{} : snloc::load_config(o.config);
    if (o.seed_set) cfg.seed = o.seed;
    if (o.measurements > 0) cfg.measurements = o.measurements;
    if (!o.scheme.empty())
        cfg.detection.scheme = o.scheme == "amplitude" ? snloc::DetectionScheme::amplitude
                                                       : snloc::DetectionScheme::energy;
    if (o.threshold >= 0.0) {
        if (cfg.detection.scheme == snloc::DetectionScheme::energy)
            cfg.detection.energy_threshold = o.threshold;
        else
            cfg.detection.amplitude_threshold = o.threshold;
    }
    return cfg;
}

void add_common(CLI::App* cmd, CommonOpts& o, bool with_scheme = false) {
    cmd->add_option("--config", o.config, "key=value experiment config file")
        ->check(CLI::ExistingFile);
    cmd->add_option("--out", o.out, "output directory");
    cmd->add_option("--seed", o.seed, "RNG seed")->each([&o](const std::string&) {
        o.seed_set = true;
    });
    cmd->add_option("--measurements", o.measurements, "number of measurements M_m");
    if (with_scheme) {
        cmd->add_option("--scheme", o.scheme, "detection scheme")
            ->check(CLI::IsMember({"amplitude", "energy"}));
        cmd->add_option("--threshold", o.threshold,
                        "detection threshold (J for energy, V for amplitude)");
    }
}

fs::path out_file(const CommonOpts& o, const char* name) {
    fs::create_directories(o.out);
    return fs::path(o.out) / name;
}

fs::path in_file(const CommonOpts& o, const char* dflt) {
    return o.in.empty() ? fs::path(o.out) / dflt : fs::path(o.in);
}

std::vector<double> parse_sweep(const std::string& s) {
    double lo, hi, step;
    if (std::sscanf(s.c_str(), "%lf:%lf:%lf", &lo, &hi, &step) != 3 || step <= 0.0 || hi < lo)
        throw CLI::ValidationError("--sweep", "expected LO:HI:STEP with STEP > 0 and HI >= LO");
    std::vector<double> v;
    for (int k = 0;; ++k) {
        const double x = lo + k * step;
        if (x > hi + 1e-12 * step) break;
        v.push_back(x);
    }
    return v;
}

void write_wind_mass(const fs::path& path,
                     const std::vector<std::pair<int, const snloc::SnclaResult*>>& rows) {
    snloc::AtomicWriter w(path);
    w.stream() << "measurement,ux,uy,u,Qe,mT\n";
    char buf[192];
    for (const auto& [meas, r] : rows) {
        std::snprintf(buf, sizeof buf, "%d,%.9g,%.9g,%.9g,%.9g,%.9g", meas,
                      r->wind.signed_ux(), r->wind.signed_uy(), r->wind.speed(), r->mass.q_e,
                      r->mass.m_t);
        w.stream() << buf << "\n";
    }
    w.commit();
}

int cmd_simulate(const CommonOpts& o) {
    const snloc::ExperimentConfig cfg = make_config(o);
    const auto traces = snloc::synthesize_traces(cfg.grid, snloc::effective_plume(cfg), cfg.noise,
                                                 cfg.sensitivity, cfg.sample_rate, cfg.duration,
                                                 cfg.seed);
    const fs::path path = out_file(o, "traces.csv");
    snloc::write_traces_csv(path, traces);
    std::printf("wrote %s (%zu nodes, %zu samples)\n", path.string().c_str(), traces.size(),
                traces.front().samples.size());
    return 0;
}

int cmd_detect(const CommonOpts& o) {
    const snloc::ExperimentConfig cfg = make_config(o);
    const auto traces = snloc::read_traces_csv(in_file(o, "traces.csv"));
    std::vector<snloc::DetectionResult> dets;
    for (const auto& tr : traces) dets.push_back(snloc::detect(tr, cfg.detection));
    const fs::path path = out_file(o, "detections.csv");
    snloc::write_detections_csv(path, dets);
    int n = 0;
    for (const auto& d : dets) n += d.detected;
    std::printf("wrote %s (%d of %zu nodes detected)\n", path.string().c_str(), n, dets.size());
    return 0;
}

int cmd_estimate(const CommonOpts& o) {
    const snloc::ExperimentConfig cfg = make_config(o);
    const auto dets = snloc::read_detections_csv(in_file(o, "detections.csv"));
    const snloc::SnclaResult res = snloc::sncla(dets, cfg.grid, cfg.sensitivity, cfg.sncla_cfg);
    std::vector<std::pair<int, snloc::LocationEstimate>> rows;
    for (const auto& e : res.estimates) rows.push_back({1, e});
    snloc::write_estimates_csv(out_file(o, "estimates.csv"), rows);
    write_wind_mass(out_file(o, "wind_mass.csv"), {{1, &res}});
    std::printf("clusters {%d,%d}: %zu pair estimates, %d skipped; u=(%.4g,%.4g) m/s, mT=%.4g kg\n",
                res.clusters[0], res.clusters[1], res.estimates.size(), res.skipped_pairs,
                res.wind.signed_ux(), res.wind.signed_uy(), res.mass.m_t);
    return 0;
}

int cmd_evaluate(const CommonOpts& o) {
    const snloc::ExperimentConfig cfg = make_config(o);
    const snloc::RunReport report = snloc::run_experiment(cfg);

    std::vector<std::pair<int, snloc::LocationEstimate>> est_rows;
    std::vector<std::pair<int, const snloc::SnclaResult*>> wm_rows;
    for (const auto& m : report.measurements) {
        if (!m.sncla) continue;
        for (const auto& e : m.sncla->estimates) est_rows.push_back({m.measurement, e});
        wm_rows.push_back({m.measurement, &*m.sncla});
    }
    snloc::write_estimates_csv(out_file(o, "estimates.csv"), est_rows);
    write_wind_mass(out_file(o, "wind_mass.csv"), wm_rows);

    {
        snloc::AtomicWriter w(out_file(o, "epsilon.csv"));
        w.stream() << "cluster,epsilon_m\n";
        char buf[64];
        for (const auto& [cluster, eps] : report.epsilon_c) {
            std::snprintf(buf, sizeof buf, "%d,%.9g", cluster, eps);
            w.stream() << buf << "\n";
        }
        w.commit();
    }
    {
        snloc::AtomicWriter w(out_file(o, "detection_times.csv"));
        w.stream() << "node,mean_t_s\n";
        char buf[64];
        for (const auto& [node, t] : report.mean_detection_time) {
            std::snprintf(buf, sizeof buf, "%s,%.9g", node.c_str(), t);
            w.stream() << buf << "\n";
        }
        w.commit();
    }
    std::printf("%d measurements, %d estimation failures\n", cfg.measurements, report.failures);
    for (const auto& [cluster, eps] : report.epsilon_c)
        std::printf("cluster %d: epsilon_c = %.6g m\n", cluster, eps);
    return 0;
}

int cmd_sweep(const CommonOpts& o) {
    snloc::ExperimentConfig cfg = make_config(o);
    std::vector<double> grid;
    if (!o.sweep.empty()) {
        grid = parse_sweep(o.sweep);
    } else if (cfg.detection.scheme == snloc::DetectionScheme::energy) {
        grid = parse_sweep("0:0.015:0.001"); // 0-15 mJ in 1 mJ steps
    } else {
        grid = parse_sweep("0:0.15:0.01"); // 0-150 mV in 10 mV steps
    }
    const auto rows = snloc::sweep_thresholds(cfg, grid);
    snloc::AtomicWriter w(out_file(o, "sweep.csv"));
    w.stream() << "threshold,cluster,n,q25_m,median_m,q75_m\n";
    char buf[160];
    for (const auto& r : rows) {
        std::snprintf(buf, sizeof buf, "%.9g,%d,%d,%.9g,%.9g,%.9g", r.threshold, r.cluster, r.q.n,
                      r.q.q25, r.q.median, r.q.q75);
        w.stream() << buf << "\n";
    }
    w.commit();
    std::printf("swept %zu thresholds -> %zu rows\n", grid.size(), rows.size());
    return 0;
}

int cmd_extract_noise(const CommonOpts& o) {
    const snloc::ExperimentConfig cfg = make_config(o);
    const auto traces = snloc::read_traces_csv(in_file(o, "traces.csv"));
    const snloc::FirFilter filt = snloc::design_fir(cfg.filter);
    std::vector<snloc::Trace> noise;
    for (const auto& tr : traces) {
        const auto ex = snloc::extract_noise(tr, cfg.detection.offset_window, filt);
        snloc::Trace w = tr;
        w.samples = ex.noise;
        noise.push_back(std::move(w));
    }
    const fs::path path = out_file(o, "noise.csv");
    snloc::write_traces_csv(path, noise);
    std::printf("wrote %s (filter order %d, ripple %.3g)\n", path.string().c_str(), filt.order(),
                filt.ripple);
    return 0;
}

int cmd_fit(const CommonOpts& o) {
    const auto traces = snloc::read_traces_csv(in_file(o, "noise.csv"));
    std::vector<double> pooled;
    for (const auto& tr : traces)
        pooled.insert(pooled.end(), tr.samples.begin(), tr.samples.end());

    snloc::AtomicWriter w(out_file(o, "fit.csv"));
    w.stream() << "family,param1,param2,mse\n";
    char buf[160];
    for (auto family : {snloc::DistFamily::student_t, snloc::DistFamily::log_normal,
                        snloc::DistFamily::weibull, snloc::DistFamily::inverse_gaussian}) {
        // positive-support families see |samples| (noise is sign-symmetric)
        std::vector<double> data = pooled;
        if (family != snloc::DistFamily::student_t)
            for (double& x : data) x = std::fabs(x);
        try {
            const auto fit = snloc::fit_distribution(data, family);
            std::snprintf(buf, sizeof buf, "%s,%.9g,%.9g,%.9g",
                          snloc::family_name(family).c_str(), fit.params[0], fit.params[1],
                          fit.mse);
            w.stream() << buf << "\n";
            std::printf("%s\n", buf);
        } catch (const std::exception& e) {
            std::fprintf(stderr, "fit %s failed: %s\n", snloc::family_name(family).c_str(),
                         e.what());
        }
    }
    w.commit();
    return 0;
}

int cmd_design_filter(const CommonOpts& o) {
    const snloc::ExperimentConfig cfg = make_config(o);
    const snloc::FirFilter filt = snloc::design_fir(cfg.filter);
    const fs::path path = out_file(o, "taps.txt");
    snloc::write_taps(path, filt.taps);
    std::printf("wrote %s: order %d, %zu taps, equiripple delta %.6g\n", path.string().c_str(),
                filt.order(), filt.taps.size(), filt.ripple);
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"gas-source localization toolkit: puff simulation, detection, SNCLA estimation"};
    app.require_subcommand(1);

    CommonOpts o;
    auto* simulate = app.add_subcommand("simulate", "synthesize sensor voltage traces");
    add_common(simulate, o);
    auto* detect = app.add_subcommand("detect", "run amplitude/energy detection on traces");
    add_common(detect, o, true);
    detect->add_option("--in", o.in, "traces CSV (default <out>/traces.csv)");
    auto* estimate = app.add_subcommand("estimate", "run SNCLA on a detection set");
    add_common(estimate, o);
    estimate->add_option("--in", o.in, "detections CSV (default <out>/detections.csv)");
    auto* evaluate = app.add_subcommand("evaluate", "full multi-measurement run with error tables");
    add_common(evaluate, o, true);
    auto* sweep = app.add_subcommand("sweep", "repeat detect+estimate over a threshold grid");
    add_common(sweep, o, true);
    sweep->add_option("--sweep", o.sweep, "threshold grid LO:HI:STEP");
    auto* extract = app.add_subcommand("extract-noise", "low-pass separation of trace noise");
    add_common(extract, o);
    extract->add_option("--in", o.in, "traces CSV (default <out>/traces.csv)");
    auto* fit = app.add_subcommand("fit", "fit noise/signal distribution families");
    add_common(fit, o);
    fit->add_option("--in", o.in, "samples CSV in trace format (default <out>/noise.csv)");
    auto* design = app.add_subcommand("design-filter", "emit equiripple low-pass taps");
    add_common(design, o);

    CLI11_PARSE(app, argc, argv);

    try {
        if (simulate->parsed()) return cmd_simulate(o);
        if (detect->parsed()) return cmd_detect(o);
        if (estimate->parsed()) return cmd_estimate(o);
        if (evaluate->parsed()) return cmd_evaluate(o);
        if (sweep->parsed()) return cmd_sweep(o);
        if (extract->parsed()) return cmd_extract_noise(o);
        if (fit->parsed()) return cmd_fit(o);
        if (design->parsed()) return cmd_design_filter(o);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
