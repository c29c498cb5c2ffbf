#ifndef SNLOC_DISTFIT_HPP
#define SNLOC_DISTFIT_HPP

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include "snloc/lm.hpp"

namespace snloc {

enum class DistFamily { student_t, log_normal, weibull, inverse_gaussian };

inline std::string family_name(DistFamily f) {
    switch (f) {
        case DistFamily::student_t: return "student_t";
        case DistFamily::log_normal: return "log_normal";
        case DistFamily::weibull: return "weibull";
        case DistFamily::inverse_gaussian: return "inverse_gaussian";
    }
    return "?";
}

// Scaled Student's t pdf (nu dof, scale s, centered at zero).
inline double pdf_student_t(double x, double nu, double s) {
    const double z = x / s;
    const double lg = std::lgamma(0.5 * (nu + 1.0)) - std::lgamma(0.5 * nu) -
                      0.5 * std::log(nu * std::numbers::pi) - std::log(s);
    return std::exp(lg - 0.5 * (nu + 1.0) * std::log1p(z * z / nu));
}

inline double pdf_log_normal(double x, double mu, double sigma) {
    if (x <= 0.0) return 0.0;
    const double z = (std::log(x) - mu) / sigma;
    return std::exp(-0.5 * z * z) / (x * sigma * std::sqrt(2.0 * std::numbers::pi));
}

inline double pdf_weibull(double x, double shape, double scale) {
    if (x < 0.0) return 0.0;
    if (x == 0.0) return shape > 1.0 ? 0.0 : (shape == 1.0 ? 1.0 / scale : 0.0);
    const double z = x / scale;
    return shape / scale * std::pow(z, shape - 1.0) * std::exp(-std::pow(z, shape));
}

inline double pdf_inverse_gaussian(double x, double mu, double lambda) {
    if (x <= 0.0) return 0.0;
    const double d = x - mu;
    return std::sqrt(lambda / (2.0 * std::numbers::pi * x * x * x)) *
           std::exp(-lambda * d * d / (2.0 * mu * mu * x));
}

struct Histogram {
    std::vector<double> centers;
    std::vector<double> heights; // density-normalized against the full sample count
    double bin_width = 0.0;
};

namespace detail {
inline double quantile_sorted(const std::vector<double>& s, double q) {
    const double pos = q * (s.size() - 1);
    const std::size_t lo = static_cast<std::size_t>(pos);
    const std::size_t hi = std::min(lo + 1, s.size() - 1);
    const double frac = pos - lo;
    return s[lo] * (1.0 - frac) + s[hi] * frac;
}
} // namespace detail

// bins == 0 selects the Freedman-Diaconis width over a 0.05%-quantile-trimmed
// range (heavy-tailed data would otherwise stretch the histogram over an
// essentially empty support). Explicit bins span the full data range.
inline Histogram build_histogram(std::vector<double> samples, int bins = 0) {
    if (samples.size() < 100)
        throw std::invalid_argument("build_histogram: need at least 100 samples");
    std::sort(samples.begin(), samples.end());
    const std::size_t n = samples.size();

    double lo, hi;
    int nbins;
    if (bins == 0) {
        lo = detail::quantile_sorted(samples, 0.0005);
        hi = detail::quantile_sorted(samples, 0.9995);
        const double iqr = detail::quantile_sorted(samples, 0.75) -
                           detail::quantile_sorted(samples, 0.25);
        const double width = 2.0 * iqr / std::cbrt(static_cast<double>(n));
        if (width <= 0.0 || hi <= lo)
            throw std::invalid_argument("build_histogram: degenerate sample support");
        nbins = std::max(10, static_cast<int>(std::ceil((hi - lo) / width)));
    } else {
        if (bins < 10) throw std::invalid_argument("build_histogram: need at least 10 bins");
        lo = samples.front();
        hi = samples.back();
        if (hi <= lo) throw std::invalid_argument("build_histogram: degenerate sample support");
        nbins = bins;
    }

    Histogram h;
    h.bin_width = (hi - lo) / nbins;
    h.centers.resize(nbins);
    h.heights.assign(nbins, 0.0);
    for (int b = 0; b < nbins; ++b) h.centers[b] = lo + (b + 0.5) * h.bin_width;
    for (double x : samples) {
        if (x < lo || x > hi) continue;
        int b = static_cast<int>((x - lo) / h.bin_width);
        b = std::clamp(b, 0, nbins - 1);
        h.heights[b] += 1.0;
    }
    const double norm = 1.0 / (static_cast<double>(n) * h.bin_width);
    for (double& v : h.heights) v *= norm;
    return h;
}

struct DistributionFit {
    DistFamily family = DistFamily::student_t;
    std::vector<double> params; // family-specific, see pdf signatures
    double mse = 0.0;
};

namespace detail {

struct Moments {
    double mean = 0.0, var = 0.0, mad = 0.0;
    double log_mean = 0.0, log_var = 0.0;
    std::size_t n_pos = 0;
};

inline Moments moments(const std::vector<double>& s) {
    Moments m;
    double sum = 0.0;
    for (double x : s) sum += x;
    m.mean = sum / s.size();
    double v = 0.0;
    for (double x : s) v += (x - m.mean) * (x - m.mean);
    m.var = v / s.size();
    std::vector<double> abs(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) abs[i] = std::fabs(s[i]);
    std::nth_element(abs.begin(), abs.begin() + abs.size() / 2, abs.end());
    m.mad = abs[abs.size() / 2];
    double ls = 0.0;
    for (double x : s)
        if (x > 0.0) {
            ls += std::log(x);
            ++m.n_pos;
        }
    if (m.n_pos > 0) {
        m.log_mean = ls / m.n_pos;
        double lv = 0.0;
        for (double x : s)
            if (x > 0.0) lv += (std::log(x) - m.log_mean) * (std::log(x) - m.log_mean);
        m.log_var = lv / m.n_pos;
    }
    return m;
}

inline std::vector<double> initial_params(DistFamily family, const Moments& m) {
    switch (family) {
        case DistFamily::student_t:
            return {3.0, std::max(m.mad / 0.8, 1e-12)};
        case DistFamily::log_normal:
            return {m.log_mean, std::max(std::sqrt(m.log_var), 1e-3)};
        case DistFamily::weibull: {
            const double sl = std::max(std::sqrt(m.log_var), 1e-3);
            const double shape = std::numbers::pi / (sl * std::sqrt(6.0));
            return {shape, std::exp(m.log_mean + 0.5772156649 / shape)};
        }
        case DistFamily::inverse_gaussian: {
            const double mu = std::max(m.mean, 1e-12);
            return {mu, std::max(mu * mu * mu / std::max(m.var, 1e-20), 1e-12)};
        }
    }
    throw std::invalid_argument("initial_params: unknown family");
}

inline double eval_pdf(DistFamily family, double x, const std::vector<double>& p) {
    switch (family) {
        case DistFamily::student_t: return pdf_student_t(x, p[0], p[1]);
        case DistFamily::log_normal: return pdf_log_normal(x, p[0], p[1]);
        case DistFamily::weibull: return pdf_weibull(x, p[0], p[1]);
        case DistFamily::inverse_gaussian: return pdf_inverse_gaussian(x, p[0], p[1]);
    }
    return 0.0;
}

} // namespace detail

// Histogram-based LM fit of a pdf family; the MSE over bins is the comparison
// metric. Positivity-constrained parameters are optimized in log space
// (log-normal's location parameter is free).
inline DistributionFit fit_distribution(const std::vector<double>& samples, DistFamily family,
                                        int bins = 0) {
    const Histogram hist = build_histogram(samples, bins);
    const detail::Moments mom = detail::moments(samples);
    const std::vector<double> init = detail::initial_params(family, mom);

    const bool first_is_log = family != DistFamily::log_normal;

    auto decode = [&](const std::vector<double>& q) {
        std::vector<double> p(2);
        p[0] = first_is_log ? std::exp(q[0]) : q[0];
        p[1] = std::exp(q[1]);
        return p;
    };

    LMProblem prob;
    prob.residual = [&hist, family, &decode](const std::vector<double>& q) {
        const std::vector<double> p = decode(q);
        std::vector<double> r(hist.centers.size());
        for (std::size_t b = 0; b < hist.centers.size(); ++b)
            r[b] = detail::eval_pdf(family, hist.centers[b], p) - hist.heights[b];
        return r;
    };
    prob.initial_params = {first_is_log ? std::log(std::max(init[0], 1e-12)) : init[0],
                           std::log(std::max(init[1], 1e-12))};
    prob.max_iterations = 400;
    prob.tolerance = 1e-12;

    const LMResult res = lm_fit(prob);
    DistributionFit fit;
    fit.family = family;
    fit.params = decode(res.params);
    fit.mse = res.rmse * res.rmse;
    return fit;
}

} // namespace snloc

#endif
