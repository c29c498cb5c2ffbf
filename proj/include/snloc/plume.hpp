#ifndef SNLOC_PLUME_HPP
#define SNLOC_PLUME_HPP

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <utility>

namespace snloc {

struct PlumeParams {
    double mass = 0.0;              // m_T, kg
    double source_x = 0.0;          // m
    double source_y = 0.0;
    double source_z = 0.0;
    double wind_x = 0.0;            // m/s, signed
    double wind_y = 0.0;
    double sigma_x = 0.0115;        // dispersion widths, m
    double sigma_y = 0.0115;
    double sigma_z = 0.0046;
};

struct DiffusivityParams {
    double kx = 0.0, ky = 0.0, kz = 0.0; // m^2/s
};

// Briggs open-country dispersion widths for stable conditions.
// sigma_x is conventionally taken equal to sigma_y.
inline std::pair<double, double> briggs_sigma(double r) {
    if (r < 0.0) throw std::invalid_argument("briggs_sigma: negative distance");
    const double sy = 0.04 * r / std::sqrt(1.0 + 0.0001 * r);
    const double sz = 0.016 * r / (1.0 + 0.0003 * r);
    return {sy, sz};
}

// Instantaneous-puff concentration with ground reflection at z = 0.
inline double puff_concentration_3d(const PlumeParams& p, double x, double y, double z, double t) {
    if (t <= 0.0) throw std::invalid_argument("puff_concentration_3d: t must be positive");
    const double two_pi = 2.0 * std::numbers::pi;
    const double norm = p.mass / (std::pow(two_pi, 1.5) * p.sigma_x * p.sigma_y * p.sigma_z);
    const double ex = (x - p.source_x - p.wind_x * t) / p.sigma_x;
    const double ey = (y - p.source_y - p.wind_y * t) / p.sigma_y;
    const double ezm = (z - p.source_z) / p.sigma_z;
    const double ezp = (z + p.source_z) / p.sigma_z;
    return norm * std::exp(-0.5 * (ex * ex + ey * ey)) *
           (std::exp(-0.5 * ezm * ezm) + std::exp(-0.5 * ezp * ezp));
}

// Planar concentration at a sensor node, with the sqrt(2 pi^3) normalization.
// This single-term form is the model the location estimator inverts; sqrt(2 pi^3)
// is half of (2 pi)^{3/2}, so it equals puff_concentration_3d at z = z_T = 0,
// where the ground-reflection image doubles the direct term.
inline double sensor_concentration(const PlumeParams& p, double node_x, double node_y, double t) {
    if (t <= 0.0) throw std::invalid_argument("sensor_concentration: t must be positive");
    const double norm = p.mass / (std::sqrt(2.0 * std::pow(std::numbers::pi, 3)) *
                                  p.sigma_x * p.sigma_y * p.sigma_z);
    const double ex = (node_x - p.source_x - p.wind_x * t) / p.sigma_x;
    const double ey = (node_y - p.source_y - p.wind_y * t) / p.sigma_y;
    return norm * std::exp(-0.5 * (ex * ex + ey * ey));
}

} // namespace snloc

#endif
