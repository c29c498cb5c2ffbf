#ifndef SNLOC_SENSOR_HPP
#define SNLOC_SENSOR_HPP

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "snloc/lm.hpp"
#include "snloc/plume.hpp"
#include "snloc/random.hpp"

namespace snloc {

// MQ-3 detection scope, kg/m^3
inline constexpr double kScopeMin = 5e-5;
inline constexpr double kScopeMax = 1e-2;

struct NodeId {
    int i = 1; // row, 1-based
    int j = 1; // column, 1-based
    bool operator==(const NodeId&) const = default;
    std::string name() const { return "N" + std::to_string(i) + std::to_string(j); }
};

struct SensorGrid {
    int rows = 5;
    int cols = 5;
    double spacing = 0.15;   // m
    double origin_x = 0.0;   // position of node (1,1)
    double origin_y = 0.0;
    std::vector<NodeId> occupied; // default: all cells minus the TX cell (3,3)

    static SensorGrid make_default() {
        SensorGrid g;
        for (int i = 1; i <= g.rows; ++i)
            for (int j = 1; j <= g.cols; ++j)
                if (!(i == 3 && j == 3)) g.occupied.push_back({i, j});
        return g;
    }

    bool contains(const NodeId& n) const {
        return std::find(occupied.begin(), occupied.end(), n) != occupied.end();
    }

    double node_x(const NodeId& n) const { return origin_x + (n.j - 1) * spacing; }
    double node_y(const NodeId& n) const { return origin_y + (n.i - 1) * spacing; }

    double centroid_x() const { return origin_x + (cols - 1) * spacing / 2.0; }
    double centroid_y() const { return origin_y + (rows - 1) * spacing / 2.0; }
};

struct SensitivityParams {
    double a1 = 0.0116;
    double b1 = -0.5855;
    double d1 = -0.0743;
    double v_in = 5.0;    // V
    double r_l = 1000.0;  // ohm
    double r_o = 24000.0; // ohm
};

struct Trace {
    NodeId node;
    std::vector<double> samples; // V; sample n (1-based) taken at t = n / sample_rate
    double sample_rate = 10.0;   // Hz

    double duration() const { return samples.size() / sample_rate; }
    double sample_time(std::size_t index0) const {
        return (static_cast<double>(index0) + 1.0) / sample_rate;
    }
};

struct NoiseModel {
    double nu = 1.43;          // Student's t degrees of freedom
    double noise_scale = 0.005; // V
    double offset = 0.1;        // rho_o, V, per node
};

struct ScopeError : std::domain_error {
    using std::domain_error::domain_error;
};

// Power-law sensitivity curve a1 * C^b1 + d1, valid on the detection scope.
inline double sensitivity_forward(double c, const SensitivityParams& sp) {
    if (c < kScopeMin || c > kScopeMax)
        throw ScopeError("sensitivity_forward: concentration outside detection scope");
    return sp.a1 * std::pow(c, sp.b1) + sp.d1;
}

namespace detail {
// Unchecked curve evaluation used by trace synthesis, where below-scope
// concentrations extrapolate to a near-zero divider output and above-scope
// ones saturate at the scope maximum.
inline double sensitivity_raw(double c, const SensitivityParams& sp) {
    return sp.a1 * std::pow(c, sp.b1) + sp.d1;
}

inline double divider_voltage(double rs, const SensitivityParams& sp) {
    return sp.v_in * sp.r_l / (sp.r_l + rs);
}
} // namespace detail

// Voltage divider output for a concentration inside the detection scope.
inline double voltage_from_concentration(double c, const SensitivityParams& sp) {
    const double rs = sp.r_o * sensitivity_forward(c, sp);
    if (rs <= 0.0) throw std::domain_error("voltage_from_concentration: non-positive R_s");
    return detail::divider_voltage(rs, sp);
}

// Saturating variant for synthesis: clamps above scope, extrapolates the
// power law below it (response decays smoothly to zero with concentration).
inline double voltage_from_concentration_clamped(double c, const SensitivityParams& sp) {
    if (c <= 0.0) return 0.0;
    if (c > kScopeMax) c = kScopeMax;
    const double rs = sp.r_o * detail::sensitivity_raw(c, sp);
    if (rs <= 0.0) return sp.v_in; // curve extrapolated past its positive range
    return detail::divider_voltage(rs, sp);
}

// Inverts the divider + sensitivity curve: gamma (V) -> concentration.
inline double concentration_from_voltage(double gamma, const SensitivityParams& sp) {
    if (gamma <= 0.0 || gamma >= sp.v_in)
        throw std::domain_error("concentration_from_voltage: voltage outside (0, V_in)");
    const double base = (sp.v_in * sp.r_l - gamma * sp.r_l - sp.d1 * gamma * sp.r_o) /
                        (gamma * sp.r_o * sp.a1);
    if (base <= 0.0)
        throw std::domain_error("concentration_from_voltage: voltage inconsistent with the fitted curve");
    return std::pow(base, 1.0 / sp.b1);
}

struct SensitivityFit {
    SensitivityParams params;
    double rmse = 0.0;
};

// Least-squares fit of the sensitivity curve to (C, Rs/Ro) datasheet points.
inline SensitivityFit fit_sensitivity(const std::vector<std::pair<double, double>>& points,
                                      const SensitivityParams& circuit = SensitivityParams{}) {
    if (points.size() < 4)
        throw std::invalid_argument("fit_sensitivity: need at least 4 points");

    LMProblem prob;
    prob.residual = [&points](const std::vector<double>& p) {
        std::vector<double> r(points.size());
        for (std::size_t k = 0; k < points.size(); ++k)
            r[k] = p[0] * std::pow(points[k].first, p[1]) + p[2] - points[k].second;
        return r;
    };
    prob.initial_params = {0.01, -0.5, 0.0};
    prob.max_iterations = 500;
    prob.tolerance = 1e-14;

    const LMResult res = lm_fit(prob);
    if (!res.converged)
        throw std::runtime_error("fit_sensitivity: LM did not converge");

    SensitivityFit out;
    out.params = circuit;
    out.params.a1 = res.params[0];
    out.params.b1 = res.params[1];
    out.params.d1 = res.params[2];
    out.rmse = res.rmse;
    return out;
}

// Per-node synthetic voltage traces: puff concentration -> divider voltage,
// plus the per-node offset and scaled Student's t noise, clamped to [0, V_in].
// Each node draws from its own substream so traces are order-independent.
inline std::vector<Trace> synthesize_traces(const SensorGrid& grid, const PlumeParams& plume,
                                            const NoiseModel& nm, const SensitivityParams& sp,
                                            double sample_rate, double duration,
                                            std::uint64_t seed) {
    if (sample_rate <= 0.0 || duration <= 0.0)
        throw std::invalid_argument("synthesize_traces: sample_rate and duration must be positive");
    if (nm.nu <= 0.0 || nm.noise_scale < 0.0 || nm.offset < 0.0)
        throw std::invalid_argument("synthesize_traces: invalid noise model");

    const auto n_samples = static_cast<std::size_t>(std::llround(duration * sample_rate));
    std::vector<Trace> traces;
    traces.reserve(grid.occupied.size());
    for (const NodeId& node : grid.occupied) {
        Trace tr;
        tr.node = node;
        tr.sample_rate = sample_rate;
        tr.samples.resize(n_samples);
        Rng rng = Rng::substream(seed, static_cast<std::uint64_t>(node.i) * 100 + node.j);
        const double nx = grid.node_x(node);
        const double ny = grid.node_y(node);
        for (std::size_t n = 0; n < n_samples; ++n) {
            const double t = tr.sample_time(n);
            const double c = sensor_concentration(plume, nx, ny, t);
            double v = voltage_from_concentration_clamped(c, sp) + nm.offset;
            if (nm.noise_scale > 0.0) {
                const double z = rng.normal();
                const double w = rng.chi_squared(nm.nu);
                v += nm.noise_scale * z / std::sqrt(w / nm.nu);
            }
            tr.samples[n] = std::clamp(v, 0.0, sp.v_in);
        }
        traces.push_back(std::move(tr));
    }
    return traces;
}

} // namespace snloc

#endif
