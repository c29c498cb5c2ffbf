#ifndef SNLOC_ROOTS_HPP
#define SNLOC_ROOTS_HPP

#include <cmath>
#include <complex>
#include <stdexcept>

namespace snloc {

// One axis-aligned quadratic constraint
//   (cx - x)^2 / (2 sx^2) + (cy - y)^2 / (2 sy^2) + n = 0.
// For n < 0 this is an ellipse centered at (cx, cy).
struct EllipseEq {
    double cx = 0.0;
    double cy = 0.0;
    double n = 0.0;
};

struct ComplexRootPair {
    std::complex<double> x1, y1;
    std::complex<double> x2, y2;
};

struct DegenerateGeometryError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline double ellipse_residual(const EllipseEq& eq, double sx, double sy, double x, double y) {
    const double dx = eq.cx - x;
    const double dy = eq.cy - y;
    return dx * dx / (2.0 * sx * sx) + dy * dy / (2.0 * sy * sy) + eq.n;
}

inline std::complex<double> ellipse_residual(const EllipseEq& eq, double sx, double sy,
                                             std::complex<double> x, std::complex<double> y) {
    const std::complex<double> dx = eq.cx - x;
    const std::complex<double> dy = eq.cy - y;
    return dx * dx / (2.0 * sx * sx) + dy * dy / (2.0 * sy * sy) + eq.n;
}

// Closed-form intersection of two such constraints sharing (sx, sy).
// Subtracting the equations leaves a line; substituting it back into the
// first yields a univariate quadratic, solved with the quadratic formula
// in complex arithmetic. Disjoint ellipses give conjugate roots.
inline ComplexRootPair solve_ellipse_pair(const EllipseEq& a, const EllipseEq& b,
                                          double sigma_x, double sigma_y) {
    if (sigma_x <= 0.0 || sigma_y <= 0.0)
        throw std::invalid_argument("solve_ellipse_pair: sigmas must be positive");

    const double isx = 1.0 / (sigma_x * sigma_x);
    const double isy = 1.0 / (sigma_y * sigma_y);

    // a - b:  alpha*x + beta*y + gamma = 0
    const double alpha = (b.cx - a.cx) * isx;
    const double beta = (b.cy - a.cy) * isy;
    const double gamma = 0.5 * (a.cx * a.cx - b.cx * b.cx) * isx +
                         0.5 * (a.cy * a.cy - b.cy * b.cy) * isy + (a.n - b.n);

    if (alpha == 0.0 && beta == 0.0)
        throw DegenerateGeometryError("solve_ellipse_pair: identical centers");

    ComplexRootPair out;
    if (std::fabs(alpha) >= std::fabs(beta)) {
        // x = -(beta*y + gamma)/alpha, substitute into equation a
        const double m = -beta / alpha;
        const double q = -gamma / alpha;
        // (m*y + q - cx)^2 * isx/2 + (y - cy)^2 * isy/2 + n = 0
        const double A = 0.5 * (m * m * isx + isy);
        const double B = m * (q - a.cx) * isx - a.cy * isy;
        const double Cc = 0.5 * ((q - a.cx) * (q - a.cx) * isx + a.cy * a.cy * isy) + a.n;
        const std::complex<double> disc(B * B - 4.0 * A * Cc, 0.0);
        const std::complex<double> sq = std::sqrt(disc);
        out.y1 = (-B + sq) / (2.0 * A);
        out.y2 = (-B - sq) / (2.0 * A);
        out.x1 = m * out.y1 + q;
        out.x2 = m * out.y2 + q;
    } else {
        const double m = -alpha / beta;
        const double q = -gamma / beta;
        const double A = 0.5 * (isx + m * m * isy);
        const double B = -a.cx * isx + m * (q - a.cy) * isy;
        const double Cc = 0.5 * (a.cx * a.cx * isx + (q - a.cy) * (q - a.cy) * isy) + a.n;
        const std::complex<double> disc(B * B - 4.0 * A * Cc, 0.0);
        const std::complex<double> sq = std::sqrt(disc);
        out.x1 = (-B + sq) / (2.0 * A);
        out.x2 = (-B - sq) / (2.0 * A);
        out.y1 = m * out.x1 + q;
        out.y2 = m * out.x2 + q;
    }
    return out;
}

} // namespace snloc

#endif
