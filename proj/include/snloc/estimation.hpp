#ifndef SNLOC_ESTIMATION_HPP
#define SNLOC_ESTIMATION_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <tuple>
#include <vector>

#include "snloc/detection.hpp"
#include "snloc/roots.hpp"
#include "snloc/sensor.hpp"

namespace snloc {

struct EstimationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Cluster-1: x- pairs (N_{i,1}, N_{i,2});  Cluster-3: x+ pairs (N_{i,4}, N_{i,5})
// Cluster-2: y+ pairs (N_{4,j}, N_{5,j});  Cluster-4: y- pairs (N_{1,j}, N_{2,j})
struct NodePair {
    NodeId upwind;   // detects first when the wind matches the cluster direction
    NodeId downwind; // detection-time difference is t(downwind) - t(upwind)
    int index = 0;   // row (clusters 1/3) or column (clusters 2/4), 1-based
};

inline std::vector<NodePair> cluster_pairs(int cluster, const SensorGrid& grid) {
    std::vector<NodePair> pairs;
    switch (cluster) {
        case 1:
            for (int i = 1; i <= grid.rows; ++i) pairs.push_back({{i, 2}, {i, 1}, i});
            break;
        case 3:
            for (int i = 1; i <= grid.rows; ++i)
                pairs.push_back({{i, grid.cols - 1}, {i, grid.cols}, i});
            break;
        case 2:
            for (int j = 1; j <= grid.cols; ++j)
                pairs.push_back({{grid.rows - 1, j}, {grid.rows, j}, j});
            break;
        case 4:
            for (int j = 1; j <= grid.cols; ++j) pairs.push_back({{2, j}, {1, j}, j});
            break;
        default:
            throw std::invalid_argument("cluster_pairs: cluster id must be 1..4");
    }
    std::erase_if(pairs, [&grid](const NodePair& p) {
        return !grid.contains(p.upwind) || !grid.contains(p.downwind);
    });
    return pairs;
}

struct PairWind {
    int index = 0;
    double u = 0.0;
    bool valid = false;
};

// Velocity across two detection positions along one axis; invalid when the
// time difference is non-positive or either detection is missing.
inline PairWind pairwise_wind(double coord1, double coord2, double t1, double t2,
                              bool detected1, bool detected2, int index = 0) {
    PairWind w;
    w.index = index;
    if (!detected1 || !detected2) return w;
    const double dt = t2 - t1;
    if (dt <= 0.0) return w;
    w.u = std::fabs(coord2 - coord1) / dt;
    w.valid = true;
    return w;
}

struct WindEstimate {
    // directional means, indexed: 0 = x-, 1 = x+, 2 = y+, 3 = y-
    std::array<double, 4> mean{};
    std::array<int, 4> valid_count{};
    std::array<std::vector<PairWind>, 4> pair_winds; // same indexing
    double u_x = 0.0; // selected magnitudes
    double u_y = 0.0;
    int x_sign = -1;  // -1 when the x- direction won, +1 otherwise
    int y_sign = +1;
    double signed_ux() const { return x_sign * u_x; }
    double signed_uy() const { return y_sign * u_y; }
    double speed() const { return std::hypot(u_x, u_y); }
};

namespace detail {
inline const DetectionResult* find_detection(const std::vector<DetectionResult>& dets,
                                             const NodeId& node) {
    for (const auto& d : dets)
        if (d.node == node) return &d;
    return nullptr;
}

inline int direction_of_cluster(int cluster) {
    switch (cluster) {
        case 1: return 0; // x-
        case 3: return 1; // x+
        case 2: return 2; // y+
        case 4: return 3; // y-
    }
    throw std::invalid_argument("direction_of_cluster: cluster id must be 1..4");
}
} // namespace detail

// Directional wind means over the valid pair subset of each cluster, with
// u_x / u_y selected as the larger of the opposing directional means.
inline WindEstimate cluster_wind(const std::vector<DetectionResult>& detections,
                                 const SensorGrid& grid) {
    WindEstimate est;
    for (int cluster : {1, 3, 2, 4}) {
        const int dir = detail::direction_of_cluster(cluster);
        double sum = 0.0;
        for (const NodePair& pair : cluster_pairs(cluster, grid)) {
            const DetectionResult* a = detail::find_detection(detections, pair.upwind);
            const DetectionResult* b = detail::find_detection(detections, pair.downwind);
            const bool da = a != nullptr && a->detected;
            const bool db = b != nullptr && b->detected;
            const bool horizontal = cluster == 1 || cluster == 3;
            const double ca = horizontal ? grid.node_x(pair.upwind) : grid.node_y(pair.upwind);
            const double cb = horizontal ? grid.node_x(pair.downwind) : grid.node_y(pair.downwind);
            PairWind w = pairwise_wind(ca, cb, da ? a->t : 0.0, db ? b->t : 0.0, da, db, pair.index);
            est.pair_winds[dir].push_back(w);
            if (w.valid) {
                sum += w.u;
                est.valid_count[dir] += 1;
            }
        }
        est.mean[dir] = est.valid_count[dir] > 0 ? sum / est.valid_count[dir] : 0.0;
    }
    if (est.valid_count[0] + est.valid_count[1] + est.valid_count[2] + est.valid_count[3] == 0)
        throw EstimationError("cluster_wind: no valid pair in any direction");

    est.u_x = std::max(est.mean[0], est.mean[1]);
    est.u_y = std::max(est.mean[2], est.mean[3]);
    est.x_sign = est.mean[0] >= est.mean[1] ? -1 : +1;
    est.y_sign = est.mean[2] >= est.mean[3] ? +1 : -1;
    return est;
}

struct MassEstimate {
    double u = 0.0;   // wind speed, m/s
    double q_e = 0.0; // evaporation rate, kg/(m^2 s)
    double q = 0.0;   // mass flow rate, kg/s
    double m_t = 0.0; // transmitted mass, kg
    double area = 0.0024;   // petri dish surface, m^2
    double t_e = 0.1;       // emission time, s
    double h1 = 4e-3;       // ethanol evaporation constant
    bool degenerate = false; // u == 0 -> zero mass
};

// Evaporation-rate power law Q_e = h1 * u^0.54 and m_T = Q_e * A * T_e.
inline MassEstimate transmitted_mass(double u_x, double u_y, double area, double t_e,
                                     double h1 = 4e-3) {
    if (area <= 0.0 || t_e <= 0.0)
        throw std::invalid_argument("transmitted_mass: area and emission time must be positive");
    MassEstimate m;
    m.area = area;
    m.t_e = t_e;
    m.h1 = h1;
    m.u = std::hypot(u_x, u_y);
    m.degenerate = m.u == 0.0;
    m.q_e = m.degenerate ? 0.0 : h1 * std::pow(m.u, 0.54);
    m.q = m.q_e * area;
    m.m_t = m.q * t_e;
    return m;
}

// n_{i,j} = ln(sqrt(2) pi^{3/2} sx sy sz C / m_T)
inline double residual_n(double c, double m_t, double sigma_x, double sigma_y, double sigma_z) {
    if (c <= 0.0 || m_t <= 0.0)
        throw std::domain_error("residual_n: concentration and mass must be positive");
    return std::log(std::sqrt(2.0) * std::pow(std::numbers::pi, 1.5) *
                    sigma_x * sigma_y * sigma_z * c / m_t);
}

struct PairObservation {
    double x = 0.0;
    double y = 0.0;
    double t = 0.0;
    double n = 0.0;
};

struct LocationEstimate {
    int cluster = 0;
    int pair_index = 0;
    double x_hat = 0.0;  // real parts of the root nearer the grid centroid
    double y_hat = 0.0;
    double root2_x = 0.0; // real parts of the other root
    double root2_y = 0.0;
};

// Builds the two per-node constraints with each node's own (x, y, t, n) and
// the signed wind components, solves the pair in closed form, and keeps the
// real parts of both roots. The root nearer (cx, cy) is the pair estimate.
inline LocationEstimate solve_pair(const PairObservation& a, const PairObservation& b,
                                   double wind_x, double wind_y,
                                   double sigma_x, double sigma_y,
                                   double cx, double cy) {
    EllipseEq ea{a.x - wind_x * a.t, a.y - wind_y * a.t, a.n};
    EllipseEq eb{b.x - wind_x * b.t, b.y - wind_y * b.t, b.n};
    const ComplexRootPair roots = solve_ellipse_pair(ea, eb, sigma_x, sigma_y);

    LocationEstimate est;
    const double d1 = std::hypot(roots.x1.real() - cx, roots.y1.real() - cy);
    const double d2 = std::hypot(roots.x2.real() - cx, roots.y2.real() - cy);
    if (d1 <= d2) {
        est.x_hat = roots.x1.real();
        est.y_hat = roots.y1.real();
        est.root2_x = roots.x2.real();
        est.root2_y = roots.y2.real();
    } else {
        est.x_hat = roots.x2.real();
        est.y_hat = roots.y2.real();
        est.root2_x = roots.x1.real();
        est.root2_y = roots.y1.real();
    }
    return est;
}

struct SnclaConfig {
    double sigma_x = 0.0115;
    double sigma_y = 0.0115;
    double sigma_z = 0.0046;
    double area = 0.0024;    // m^2
    double emission_time = 0.1; // s
    double h1 = 4e-3;
    // The synthetic channel adds rho_o on top of the divider response, so the
    // estimator removes the estimated offset from gamma before inverting the
    // sensitivity curve.
    bool subtract_offset = true;
};

struct SnclaResult {
    WindEstimate wind;
    MassEstimate mass;
    std::array<int, 2> clusters{}; // the two selected clusters
    std::vector<LocationEstimate> estimates; // sorted by (cluster, pair index)
    int skipped_pairs = 0; // invalid or non-invertible pairs in the selected clusters
};

// Full clustered localization: wind means, mass, cluster selection by wind
// direction, and a closed-form solve per valid pair of the two clusters.
inline SnclaResult sncla(const std::vector<DetectionResult>& detections, const SensorGrid& grid,
                         const SensitivityParams& sp, const SnclaConfig& cfg) {
    SnclaResult result;
    result.wind = cluster_wind(detections, grid);
    if (result.wind.speed() == 0.0)
        throw EstimationError("sncla: zero wind estimate leaves the mass model degenerate");
    result.mass = transmitted_mass(result.wind.signed_ux(), result.wind.signed_uy(),
                                   cfg.area, cfg.emission_time, cfg.h1);

    const bool x_neg = result.wind.x_sign < 0;
    const bool y_pos = result.wind.y_sign > 0;
    if (x_neg && y_pos) result.clusters = {1, 2};
    else if (x_neg) result.clusters = {1, 4};
    else if (y_pos) result.clusters = {2, 3};
    else result.clusters = {3, 4};
    std::sort(result.clusters.begin(), result.clusters.end());

    const double ux = result.wind.signed_ux();
    const double uy = result.wind.signed_uy();

    for (int cluster : result.clusters) {
        const int dir = detail::direction_of_cluster(cluster);
        for (const NodePair& pair : cluster_pairs(cluster, grid)) {
            const auto& winds = result.wind.pair_winds[dir];
            const auto it = std::find_if(winds.begin(), winds.end(),
                                         [&](const PairWind& w) { return w.index == pair.index; });
            if (it == winds.end() || !it->valid) {
                ++result.skipped_pairs;
                continue;
            }
            const DetectionResult* da = detail::find_detection(detections, pair.upwind);
            const DetectionResult* db = detail::find_detection(detections, pair.downwind);
            try {
                auto observe = [&](const DetectionResult& d, const NodeId& node) {
                    double gamma = d.gamma;
                    if (cfg.subtract_offset) gamma -= d.rho_o;
                    const double c = concentration_from_voltage(gamma, sp);
                    PairObservation obs;
                    obs.x = grid.node_x(node);
                    obs.y = grid.node_y(node);
                    obs.t = d.t;
                    obs.n = residual_n(c, result.mass.m_t, cfg.sigma_x, cfg.sigma_y, cfg.sigma_z);
                    return obs;
                };
                LocationEstimate est =
                    solve_pair(observe(*da, pair.upwind), observe(*db, pair.downwind), ux, uy,
                               cfg.sigma_x, cfg.sigma_y, grid.centroid_x(), grid.centroid_y());
                est.cluster = cluster;
                est.pair_index = pair.index;
                result.estimates.push_back(est);
            } catch (const std::domain_error&) {
                ++result.skipped_pairs;
            } catch (const DegenerateGeometryError&) {
                ++result.skipped_pairs;
            }
        }
    }
    if (result.estimates.empty())
        throw EstimationError("sncla: no valid pair in either selected cluster");
    std::sort(result.estimates.begin(), result.estimates.end(),
              [](const LocationEstimate& a, const LocationEstimate& b) {
                  return std::tie(a.cluster, a.pair_index) < std::tie(b.cluster, b.pair_index);
              });
    return result;
}

// Two-level mean of the Euclidean error: per cluster, average over node pairs
// of the average over measurements.
inline std::map<int, double> cluster_error(const std::vector<std::vector<LocationEstimate>>& runs,
                                           double truth_x, double truth_y) {
    if (runs.empty()) throw std::invalid_argument("cluster_error: no measurements");
    // (cluster, pair) -> accumulated distance and count
    std::map<std::pair<int, int>, std::pair<double, int>> per_pair;
    for (const auto& run : runs)
        for (const LocationEstimate& e : run) {
            auto& acc = per_pair[{e.cluster, e.pair_index}];
            acc.first += std::hypot(e.x_hat - truth_x, e.y_hat - truth_y);
            acc.second += 1;
        }
    std::map<int, std::pair<double, int>> per_cluster;
    for (const auto& [key, acc] : per_pair) {
        auto& c = per_cluster[key.first];
        c.first += acc.first / acc.second;
        c.second += 1;
    }
    std::map<int, double> out;
    for (const auto& [cluster, acc] : per_cluster) out[cluster] = acc.first / acc.second;
    return out;
}

} // namespace snloc

#endif
