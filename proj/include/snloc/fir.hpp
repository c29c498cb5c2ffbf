#ifndef SNLOC_FIR_HPP
#define SNLOC_FIR_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

namespace snloc {

struct FilterSpec {
    double passband_edge = 0.04;  // Hz
    double stopband_edge = 0.09;  // Hz
    double sample_rate = 10.0;    // Hz
    int order = 242;              // even, symmetric linear phase
    double passband_weight = 1.0;
    double stopband_weight = 1.0;

    void validate() const {
        if (!(passband_edge > 0.0 && passband_edge < stopband_edge &&
              stopband_edge < sample_rate / 2.0))
            throw std::invalid_argument("FilterSpec: need 0 < pass < stop < Nyquist");
        if (order < 0 || order % 2 != 0)
            throw std::invalid_argument("FilterSpec: order must be even and non-negative");
    }
};

struct FirFilter {
    std::vector<double> taps;
    double ripple = 0.0; // equiripple deviation delta from the exchange

    int order() const { return static_cast<int>(taps.size()) - 1; }

    // Amplitude response of the symmetric filter at normalized frequency
    // f in [0, 0.5] (zero-phase form, can be negative in the stopband).
    double amplitude(double f) const {
        const int m = order() / 2;
        double a = taps[m];
        for (int k = 1; k <= m; ++k)
            a += 2.0 * taps[m - k] * std::cos(2.0 * std::numbers::pi * f * k);
        return a;
    }
};

struct FilterDesignError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

namespace remez_detail {

struct Grid {
    std::vector<double> freq;    // normalized, [0, 0.5]
    std::vector<double> x;       // cos(2 pi f)
    std::vector<double> desired; // D(f)
    std::vector<double> weight;  // W(f)
};

inline Grid build_grid(double fp, double fs, double wp, double ws, int r, int density) {
    Grid g;
    const double widths[2][2] = {{0.0, fp}, {fs, 0.5}};
    const double wts[2] = {wp, ws};
    const double des[2] = {1.0, 0.0};
    const double total = fp + (0.5 - fs);
    for (int b = 0; b < 2; ++b) {
        const double lo = widths[b][0], hi = widths[b][1];
        const double frac = (hi - lo) / total;
        int n = std::max(32, static_cast<int>(std::lround(frac * 2.0 * r * density)));
        for (int k = 0; k < n; ++k) {
            const double f = lo + (hi - lo) * k / (n - 1);
            g.freq.push_back(f);
            g.x.push_back(std::cos(2.0 * std::numbers::pi * f));
            g.desired.push_back(des[b]);
            g.weight.push_back(wts[b]);
        }
    }
    return g;
}

// Barycentric weights over the current extremal set, with the classic x2
// scaling per factor to keep the products in range at high orders.
inline std::vector<long double> bary_weights(const std::vector<double>& x) {
    const std::size_t m = x.size();
    std::vector<long double> d(m, 1.0L);
    for (std::size_t k = 0; k < m; ++k)
        for (std::size_t i = 0; i < m; ++i)
            if (i != k) d[k] /= 2.0L * (static_cast<long double>(x[k]) - x[i]);
    return d;
}

} // namespace remez_detail

// Equiripple linear-phase low-pass design (Parks-McClellan / Remez exchange)
// for even order. Frequencies in the spec are in Hz and are normalized by the
// configured sample rate.
inline FirFilter design_fir(const FilterSpec& spec, int grid_density = 16) {
    spec.validate();
    if (spec.order == 0) return FirFilter{{1.0}, 0.0};

    const double fp = spec.passband_edge / spec.sample_rate;
    const double fs = spec.stopband_edge / spec.sample_rate;
    const int r = spec.order / 2 + 1;       // cosine-basis coefficients
    const int n_ext = r + 1;                // alternation count

    using remez_detail::Grid;
    const Grid grid = remez_detail::build_grid(fp, fs, spec.passband_weight,
                                               spec.stopband_weight, r, grid_density);
    const int gs = static_cast<int>(grid.freq.size());
    if (gs < 2 * n_ext) throw FilterDesignError("design_fir: grid too coarse");

    // initial extrema: evenly spread grid indices
    std::vector<int> ext(n_ext);
    for (int k = 0; k < n_ext; ++k)
        ext[k] = static_cast<int>(std::lround(static_cast<double>(k) * (gs - 1) / (n_ext - 1)));

    std::vector<double> err(gs);
    long double delta = 0.0L;
    std::vector<double> xe(n_ext);
    std::vector<long double> dw;
    bool converged = false;

    for (int iter = 0; iter < 64 && !converged; ++iter) {
        for (int k = 0; k < n_ext; ++k) xe[k] = grid.x[ext[k]];
        dw = remez_detail::bary_weights(xe);

        long double num = 0.0L, den = 0.0L;
        long double sign = 1.0L;
        for (int k = 0; k < n_ext; ++k) {
            num += dw[k] * grid.desired[ext[k]];
            den += sign * dw[k] / grid.weight[ext[k]];
            sign = -sign;
        }
        if (den == 0.0L) throw FilterDesignError("design_fir: degenerate extremal set");
        delta = num / den;

        // values interpolated through the first r extrema
        std::vector<long double> cval(r);
        std::vector<long double> cw(remez_detail::bary_weights(
            std::vector<double>(xe.begin(), xe.begin() + r)));
        sign = 1.0L;
        for (int k = 0; k < r; ++k) {
            cval[k] = grid.desired[ext[k]] - sign * delta / grid.weight[ext[k]];
            sign = -sign;
        }

        auto amplitude_at = [&](double x) -> long double {
            long double nsum = 0.0L, dsum = 0.0L;
            for (int k = 0; k < r; ++k) {
                const long double dx = static_cast<long double>(x) - xe[k];
                if (std::fabs(static_cast<double>(dx)) < 1e-14) return cval[k];
                const long double t = cw[k] / dx;
                nsum += t * cval[k];
                dsum += t;
            }
            return nsum / dsum;
        };

        for (int i = 0; i < gs; ++i)
            err[i] = grid.weight[i] *
                     (static_cast<double>(amplitude_at(grid.x[i])) - grid.desired[i]);

        // candidate extrema: local maxima of |err| plus band edges
        std::vector<int> cand;
        for (int i = 0; i < gs; ++i) {
            const bool left_ok = i == 0 || std::fabs(err[i]) >= std::fabs(err[i - 1]) ||
                                 grid.freq[i] - grid.freq[i - 1] > 1e-9 * 2.0;
            const bool band_edge =
                i == 0 || i == gs - 1 ||
                grid.desired[i] != grid.desired[i - 1] || grid.desired[i] != grid.desired[i + 1];
            const bool local_max =
                (i == 0 || std::fabs(err[i]) > std::fabs(err[i - 1])) &&
                (i == gs - 1 || std::fabs(err[i]) >= std::fabs(err[i + 1]));
            (void)left_ok;
            if (local_max || band_edge) cand.push_back(i);
        }

        // enforce sign alternation: within runs of equal sign keep the largest
        std::vector<int> alt;
        for (int idx : cand) {
            if (!alt.empty() && (err[alt.back()] > 0) == (err[idx] > 0)) {
                if (std::fabs(err[idx]) > std::fabs(err[alt.back()])) alt.back() = idx;
            } else {
                alt.push_back(idx);
            }
        }
        if (static_cast<int>(alt.size()) < n_ext)
            throw FilterDesignError("design_fir: lost alternation (got " +
                                    std::to_string(alt.size()) + " extrema, need " +
                                    std::to_string(n_ext) + ")");
        // trim to n_ext by dropping the smaller of the two end extrema
        while (static_cast<int>(alt.size()) > n_ext) {
            if (std::fabs(err[alt.front()]) <= std::fabs(err[alt.back()]))
                alt.erase(alt.begin());
            else
                alt.pop_back();
        }

        double emax = 0.0;
        for (int idx : alt) emax = std::max(emax, std::fabs(err[idx]));
        const double dabs = std::fabs(static_cast<double>(delta));
        if (emax - dabs < 1e-6 * dabs) converged = true;
        ext = alt;
    }
    if (!converged)
        throw FilterDesignError("design_fir: Remez exchange did not converge");

    // final interpolant through the first r extrema
    for (int k = 0; k < n_ext; ++k) xe[k] = grid.x[ext[k]];
    std::vector<long double> cw(remez_detail::bary_weights(
        std::vector<double>(xe.begin(), xe.begin() + r)));
    std::vector<long double> cval(r);
    long double sign = 1.0L;
    for (int k = 0; k < r; ++k) {
        cval[k] = grid.desired[ext[k]] - sign * delta / grid.weight[ext[k]];
        sign = -sign;
    }
    auto amplitude_at = [&](double f) -> long double {
        const double x = std::cos(2.0 * std::numbers::pi * f);
        long double nsum = 0.0L, dsum = 0.0L;
        for (int k = 0; k < r; ++k) {
            const long double dx = static_cast<long double>(x) - xe[k];
            if (std::fabs(static_cast<double>(dx)) < 1e-14) return cval[k];
            const long double t = cw[k] / dx;
            nsum += t * cval[k];
            dsum += t;
        }
        return nsum / dsum;
    };

    // type-I synthesis: sample A(f) at k/N and invert the cosine series
    const int ntaps = spec.order + 1;
    const int m = spec.order / 2;
    std::vector<long double> a(m + 1);
    for (int k = 0; k <= m; ++k) a[k] = amplitude_at(static_cast<double>(k) / ntaps);

    FirFilter filt;
    filt.taps.resize(ntaps);
    for (int n = 0; n <= m; ++n) {
        long double h = a[0];
        for (int k = 1; k <= m; ++k)
            h += 2.0L * a[k] *
                 std::cos(2.0L * std::numbers::pi_v<long double> * k * (n - m) / ntaps);
        filt.taps[n] = static_cast<double>(h / ntaps);
        filt.taps[spec.order - n] = filt.taps[n]; // exact symmetry
    }
    filt.ripple = std::fabs(static_cast<double>(delta));
    return filt;
}

// Herrmann/Rabiner order predictor for an equiripple low-pass.
inline int estimate_fir_order(double passband_edge_hz, double stopband_edge_hz,
                              double sample_rate_hz, double delta_pass, double delta_stop) {
    const double df = (stopband_edge_hz - passband_edge_hz) / sample_rate_hz;
    if (df <= 0.0) throw std::invalid_argument("estimate_fir_order: invalid band edges");
    const double l1 = std::log10(delta_pass);
    const double l2 = std::log10(delta_stop);
    const double dinf = (0.005309 * l1 * l1 + 0.07114 * l1 - 0.4761) * l2 -
                        (0.00266 * l1 * l1 + 0.5941 * l1 + 0.4278);
    const double f = 11.012 + 0.51244 * (l1 - l2);
    int order = static_cast<int>(std::ceil(dinf / df - f * df));
    if (order % 2 != 0) ++order; // keep the symmetric type-I structure
    return std::max(order, 0);
}

// Direct-form convolution with zero-padded edges and the order/2 group delay
// removed, so the output aligns sample-for-sample with the input.
inline std::vector<double> apply_fir(const FirFilter& f, const std::vector<double>& x) {
    const int ntaps = static_cast<int>(f.taps.size());
    const int half = (ntaps - 1) / 2;
    const int n = static_cast<int>(x.size());
    std::vector<double> y(x.size(), 0.0);
    for (int i = 0; i < n; ++i) {
        double s = 0.0;
        for (int k = 0; k < ntaps; ++k) {
            const int m = i + half - k;
            if (m >= 0 && m < n) s += f.taps[k] * x[m];
        }
        y[i] = s;
    }
    return y;
}

} // namespace snloc

#endif
