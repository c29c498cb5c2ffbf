#ifndef SNLOC_LM_HPP
#define SNLOC_LM_HPP

#include <cmath>
#include <cstddef>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace snloc {

using ResidualFn = std::function<std::vector<double>(const std::vector<double>&)>;

struct LMProblem {
    ResidualFn residual;
    std::vector<double> initial_params;
    std::size_t max_iterations = 200;
    double tolerance = 1e-12; // relative step norm
};

struct LMResult {
    std::vector<double> params;
    double rmse = 0.0;
    std::size_t iterations = 0;
    bool converged = false;
};

namespace detail {

// Gaussian elimination with partial pivoting; the normal-equation systems
// here are tiny (a handful of parameters).
inline std::vector<double> solve_linear(std::vector<std::vector<double>> a, std::vector<double> b) {
    const std::size_t n = b.size();
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t piv = col;
        for (std::size_t r = col + 1; r < n; ++r)
            if (std::fabs(a[r][col]) > std::fabs(a[piv][col])) piv = r;
        if (a[piv][col] == 0.0) throw std::runtime_error("solve_linear: singular system");
        std::swap(a[col], a[piv]);
        std::swap(b[col], b[piv]);
        for (std::size_t r = col + 1; r < n; ++r) {
            const double f = a[r][col] / a[col][col];
            for (std::size_t c = col; c < n; ++c) a[r][c] -= f * a[col][c];
            b[r] -= f * b[col];
        }
    }
    std::vector<double> x(n);
    for (std::size_t i = n; i-- > 0;) {
        double s = b[i];
        for (std::size_t c = i + 1; c < n; ++c) s -= a[i][c] * x[c];
        x[i] = s / a[i][i];
    }
    return x;
}

inline double sum_sq(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return s;
}

inline bool all_finite(const std::vector<double>& v) {
    for (double x : v)
        if (!std::isfinite(x)) return false;
    return true;
}

} // namespace detail

// Levenberg-Marquardt with a numerical Jacobian (central differences,
// step 1e-6 * max(1, |param|)) and a multiply/divide-by-10 damping schedule.
inline LMResult lm_fit(const LMProblem& problem) {
    if (problem.tolerance <= 0.0) throw std::invalid_argument("lm_fit: tolerance must be positive");

    std::vector<double> p = problem.initial_params;
    const std::size_t np = p.size();
    std::vector<double> r = problem.residual(p);
    if (r.size() < np) throw std::invalid_argument("lm_fit: fewer residuals than parameters");
    if (!detail::all_finite(r)) throw std::runtime_error("lm_fit: residual not finite at initial params");

    double cost = detail::sum_sq(r);
    double lambda = 1e-3;
    LMResult result;
    result.params = p;

    for (std::size_t iter = 0; iter < problem.max_iterations; ++iter) {
        result.iterations = iter + 1;

        // central-difference Jacobian, column per parameter
        std::vector<std::vector<double>> jac(r.size(), std::vector<double>(np));
        for (std::size_t j = 0; j < np; ++j) {
            const double h = 1e-6 * std::max(1.0, std::fabs(p[j]));
            std::vector<double> pp = p, pm = p;
            pp[j] += h;
            pm[j] -= h;
            const std::vector<double> rp = problem.residual(pp);
            const std::vector<double> rm = problem.residual(pm);
            for (std::size_t i = 0; i < r.size(); ++i)
                jac[i][j] = (rp[i] - rm[i]) / (2.0 * h);
        }

        // JtJ and Jtr
        std::vector<std::vector<double>> jtj(np, std::vector<double>(np, 0.0));
        std::vector<double> jtr(np, 0.0);
        for (std::size_t i = 0; i < r.size(); ++i)
            for (std::size_t a = 0; a < np; ++a) {
                jtr[a] += jac[i][a] * r[i];
                for (std::size_t b = a; b < np; ++b) jtj[a][b] += jac[i][a] * jac[i][b];
            }
        for (std::size_t a = 0; a < np; ++a)
            for (std::size_t b = 0; b < a; ++b) jtj[a][b] = jtj[b][a];

        bool accepted = false;
        for (int attempt = 0; attempt < 32 && !accepted; ++attempt) {
            auto damped = jtj;
            for (std::size_t a = 0; a < np; ++a) damped[a][a] += lambda * jtj[a][a] + 1e-300;
            std::vector<double> step;
            try {
                std::vector<double> rhs = jtr;
                step = detail::solve_linear(damped, rhs);
            } catch (const std::runtime_error&) {
                lambda *= 10.0;
                continue;
            }

            std::vector<double> pnew(np);
            for (std::size_t a = 0; a < np; ++a) pnew[a] = p[a] - step[a];
            std::vector<double> rnew = problem.residual(pnew);
            if (!detail::all_finite(rnew)) {
                lambda *= 10.0;
                continue;
            }
            const double cnew = detail::sum_sq(rnew);
            if (cnew <= cost) {
                // relative step norm for convergence
                double sn = 0.0, pn = 0.0;
                for (std::size_t a = 0; a < np; ++a) {
                    sn += step[a] * step[a];
                    pn += std::max(1.0, p[a] * p[a]);
                }
                p = pnew;
                r = rnew;
                cost = cnew;
                lambda = std::max(lambda / 10.0, 1e-15);
                accepted = true;
                if (std::sqrt(sn / pn) < problem.tolerance) {
                    result.converged = true;
                }
            } else {
                lambda *= 10.0;
            }
        }
        result.params = p;
        result.rmse = std::sqrt(cost / static_cast<double>(r.size()));
        if (result.converged || !accepted) {
            // no acceptable step found at any damping -> local minimum
            result.converged = result.converged || !accepted;
            break;
        }
    }
    result.params = p;
    result.rmse = std::sqrt(cost / static_cast<double>(r.size()));
    return result;
}

} // namespace snloc

#endif
