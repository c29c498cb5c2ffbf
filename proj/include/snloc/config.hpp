#ifndef SNLOC_CONFIG_HPP
#define SNLOC_CONFIG_HPP

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <stdexcept>
#include <string>

#include "snloc/detection.hpp"
#include "snloc/estimation.hpp"
#include "snloc/fir.hpp"
#include "snloc/plume.hpp"
#include "snloc/sensor.hpp"

namespace snloc {

// Flat key=value experiment configuration. Every value the reference platform
// publishes is the shipped default, so a bare run mirrors that setup.
struct ExperimentConfig {
    SensorGrid grid = SensorGrid::make_default();
    PlumeParams plume{};
    bool mass_from_wind = true; // m_T = transmitted_mass(|wind|) unless mass_kg is set
    NoiseModel noise{};
    SensitivityParams sensitivity{};
    DetectionConfig detection{};
    FilterSpec filter{};
    SnclaConfig sncla_cfg{};
    double sample_rate = 10.0; // Hz
    double duration = 180.0;   // s
    int measurements = 25;     // M_m
    std::uint64_t seed = 1;

    ExperimentConfig() {
        plume.source_x = 0.3;
        plume.source_y = 0.3;
        plume.wind_x = -0.03;
        plume.wind_y = 0.02;
    }
};

namespace detail {

struct KvFile {
    std::map<std::string, std::string> kv;
    std::string name;

    bool has(const std::string& k) const { return kv.count(k) != 0; }
    double num(const std::string& k, double dflt) const {
        auto it = kv.find(k);
        if (it == kv.end()) return dflt;
        try {
            std::size_t pos = 0;
            const double v = std::stod(it->second, &pos);
            if (pos != it->second.size()) throw std::invalid_argument(it->second);
            return v;
        } catch (const std::exception&) {
            throw std::runtime_error(name + ": key '" + k + "': not a number: '" + it->second + "'");
        }
    }
    std::string str(const std::string& k, const std::string& dflt) const {
        auto it = kv.find(k);
        return it == kv.end() ? dflt : it->second;
    }
};

inline KvFile parse_kv_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config " + path.string());
    KvFile f;
    f.name = path.filename().string();
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        // trim
        const auto b = line.find_first_not_of(" \t\r");
        if (b == std::string::npos) continue;
        const auto e = line.find_last_not_of(" \t\r");
        line = line.substr(b, e - b + 1);
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::runtime_error(f.name + ":" + std::to_string(lineno) +
                                     ": expected key=value");
        auto trim = [](std::string s) {
            const auto x = s.find_first_not_of(" \t");
            const auto y = s.find_last_not_of(" \t");
            return x == std::string::npos ? std::string{} : s.substr(x, y - x + 1);
        };
        const std::string key = trim(line.substr(0, eq));
        const std::string val = trim(line.substr(eq + 1));
        if (key.empty())
            throw std::runtime_error(f.name + ":" + std::to_string(lineno) + ": empty key");
        f.kv[key] = val;
    }
    return f;
}

} // namespace detail

inline ExperimentConfig load_config(const std::filesystem::path& path) {
    const detail::KvFile f = detail::parse_kv_file(path);
    static const std::set<std::string> known = {
        "grid_rows",      "grid_cols",     "grid_spacing_m",  "origin_x_m",
        "origin_y_m",     "tx_x_m",        "tx_y_m",          "tx_z_m",
        "wind_x_ms",      "wind_y_ms",     "sigma_x_m",       "sigma_y_m",
        "sigma_z_m",      "mass_kg",       "noise_nu",        "noise_scale_v",
        "offset_v",       "a1",            "b1",              "d1",
        "v_in_v",         "r_l_ohm",       "r_o_ohm",         "scheme",
        "lambda_j",       "a_t_v",         "ma_window",       "offset_window",
        "filter_pass_hz", "filter_stop_hz", "filter_order",   "petri_area_m2",
        "emission_time_s", "h1",           "subtract_offset", "sample_rate_hz",
        "duration_s",     "measurements",  "seed"};
    for (const auto& [key, val] : f.kv)
        if (!known.count(key))
            throw std::runtime_error(f.name + ": unknown key '" + key + "'");
    ExperimentConfig c;

    c.grid.rows = static_cast<int>(f.num("grid_rows", c.grid.rows));
    c.grid.cols = static_cast<int>(f.num("grid_cols", c.grid.cols));
    c.grid.spacing = f.num("grid_spacing_m", c.grid.spacing);
    c.grid.origin_x = f.num("origin_x_m", c.grid.origin_x);
    c.grid.origin_y = f.num("origin_y_m", c.grid.origin_y);
    if (f.num("grid_rows", 5) != 5 || f.num("grid_cols", 5) != 5 ||
        c.grid.origin_x != 0.0 || c.grid.origin_y != 0.0 || c.grid.spacing != 0.15) {
        // non-default geometry: rebuild occupancy (all cells except the center)
        c.grid.occupied.clear();
        const int ci = (c.grid.rows + 1) / 2, cj = (c.grid.cols + 1) / 2;
        for (int i = 1; i <= c.grid.rows; ++i)
            for (int j = 1; j <= c.grid.cols; ++j)
                if (!(i == ci && j == cj)) c.grid.occupied.push_back({i, j});
    }

    c.plume.source_x = f.num("tx_x_m", c.plume.source_x);
    c.plume.source_y = f.num("tx_y_m", c.plume.source_y);
    c.plume.source_z = f.num("tx_z_m", c.plume.source_z);
    c.plume.wind_x = f.num("wind_x_ms", c.plume.wind_x);
    c.plume.wind_y = f.num("wind_y_ms", c.plume.wind_y);
    c.plume.sigma_x = f.num("sigma_x_m", c.plume.sigma_x);
    c.plume.sigma_y = f.num("sigma_y_m", c.plume.sigma_y);
    c.plume.sigma_z = f.num("sigma_z_m", c.plume.sigma_z);
    if (f.has("mass_kg")) {
        c.plume.mass = f.num("mass_kg", 0.0);
        c.mass_from_wind = false;
    }

    c.noise.nu = f.num("noise_nu", c.noise.nu);
    c.noise.noise_scale = f.num("noise_scale_v", c.noise.noise_scale);
    c.noise.offset = f.num("offset_v", c.noise.offset);

    c.sensitivity.a1 = f.num("a1", c.sensitivity.a1);
    c.sensitivity.b1 = f.num("b1", c.sensitivity.b1);
    c.sensitivity.d1 = f.num("d1", c.sensitivity.d1);
    c.sensitivity.v_in = f.num("v_in_v", c.sensitivity.v_in);
    c.sensitivity.r_l = f.num("r_l_ohm", c.sensitivity.r_l);
    c.sensitivity.r_o = f.num("r_o_ohm", c.sensitivity.r_o);

    const std::string scheme = f.str("scheme", "energy");
    if (scheme == "energy") c.detection.scheme = DetectionScheme::energy;
    else if (scheme == "amplitude") c.detection.scheme = DetectionScheme::amplitude;
    else throw std::runtime_error(f.name + ": scheme must be 'energy' or 'amplitude'");
    c.detection.energy_threshold = f.num("lambda_j", c.detection.energy_threshold);
    c.detection.amplitude_threshold = f.num("a_t_v", c.detection.amplitude_threshold);
    c.detection.window = static_cast<int>(f.num("ma_window", c.detection.window));
    c.detection.offset_window = static_cast<int>(f.num("offset_window", c.detection.offset_window));
    c.detection.load_resistance = c.sensitivity.r_l;

    c.filter.passband_edge = f.num("filter_pass_hz", c.filter.passband_edge);
    c.filter.stopband_edge = f.num("filter_stop_hz", c.filter.stopband_edge);
    c.filter.order = static_cast<int>(f.num("filter_order", c.filter.order));

    c.sncla_cfg.sigma_x = c.plume.sigma_x;
    c.sncla_cfg.sigma_y = c.plume.sigma_y;
    c.sncla_cfg.sigma_z = c.plume.sigma_z;
    c.sncla_cfg.area = f.num("petri_area_m2", c.sncla_cfg.area);
    c.sncla_cfg.emission_time = f.num("emission_time_s", c.sncla_cfg.emission_time);
    c.sncla_cfg.h1 = f.num("h1", c.sncla_cfg.h1);
    c.sncla_cfg.subtract_offset = f.num("subtract_offset", 1.0) != 0.0;

    c.sample_rate = f.num("sample_rate_hz", c.sample_rate);
    c.duration = f.num("duration_s", c.duration);
    c.measurements = static_cast<int>(f.num("measurements", c.measurements));
    c.seed = static_cast<std::uint64_t>(f.num("seed", static_cast<double>(c.seed)));
    c.filter.sample_rate = c.sample_rate;
    return c;
}

} // namespace snloc

#endif
