#ifndef SNLOC_RANDOM_HPP
#define SNLOC_RANDOM_HPP

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace snloc {

// Seeded generator with hand-rolled variate transforms so that a given
// seed produces the same sample sequence on every platform and compiler.
// Core state is splitmix64; normal deviates come from the polar method,
// gamma deviates from Marsaglia-Tsang.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {
        // splitmix64 warm-up so small seeds decorrelate quickly
        next_u64();
        next_u64();
    }

    // Derive an independent substream, e.g. one per sensor node.
    static Rng substream(std::uint64_t seed, std::uint64_t stream) {
        return Rng(seed ^ (0x9e3779b97f4a7c15ULL + stream * 0xbf58476d1ce4e5b9ULL));
    }

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    // Uniform in (0, 1); never returns 0 or 1 exactly.
    double uniform() {
        return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
    }

    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u, v, s;
        do {
            u = 2.0 * uniform() - 1.0;
            v = 2.0 * uniform() - 1.0;
            s = u * u + v * v;
        } while (s >= 1.0 || s == 0.0);
        const double f = std::sqrt(-2.0 * std::log(s) / s);
        spare_ = v * f;
        have_spare_ = true;
        return u * f;
    }

    // Marsaglia-Tsang; shape < 1 handled via the boost trick.
    double gamma(double shape, double scale = 1.0) {
        if (shape <= 0.0 || scale <= 0.0)
            throw std::invalid_argument("Rng::gamma: shape and scale must be positive");
        if (shape < 1.0) {
            const double u = uniform();
            return gamma(shape + 1.0, scale) * std::pow(u, 1.0 / shape);
        }
        const double d = shape - 1.0 / 3.0;
        const double c = 1.0 / std::sqrt(9.0 * d);
        for (;;) {
            double x, v;
            do {
                x = normal();
                v = 1.0 + c * x;
            } while (v <= 0.0);
            v = v * v * v;
            const double u = uniform();
            if (u < 1.0 - 0.0331 * x * x * x * x) return d * v * scale;
            if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v * scale;
        }
    }

    double chi_squared(double dof) { return gamma(0.5 * dof, 2.0); }

private:
    std::uint64_t state_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

// Scaled Student's t samples via the normal / chi-square ratio.
inline std::vector<double> sample_student_t(double nu, double scale, std::size_t n, std::uint64_t seed) {
    if (nu <= 0.0) throw std::invalid_argument("sample_student_t: nu must be positive");
    if (scale <= 0.0) throw std::invalid_argument("sample_student_t: scale must be positive");
    Rng rng(seed);
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double z = rng.normal();
        const double w = rng.chi_squared(nu);
        out[i] = scale * z / std::sqrt(w / nu);
    }
    return out;
}

// exp(mu + sigma * Z) with Z standard normal.
inline std::vector<double> sample_lognormal(double mu_ln, double sigma_ln, std::size_t n, std::uint64_t seed) {
    if (sigma_ln <= 0.0) throw std::invalid_argument("sample_lognormal: sigma_ln must be positive");
    Rng rng(seed);
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i)
        out[i] = std::exp(mu_ln + sigma_ln * rng.normal());
    return out;
}

} // namespace snloc

#endif
