#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <vector>

#include "nccscat/errors.hpp"

namespace nccscat::detail {

/// Dense column-major real matrix just big enough for the channel solver.
struct Mat {
    std::size_t rows = 0, cols = 0;
    std::vector<double> a;

    Mat() = default;
    Mat(std::size_t r, std::size_t c) : rows(r), cols(c), a(r * c, 0.0) {}
    double& operator()(std::size_t i, std::size_t j) { return a[j * rows + i]; }
    double operator()(std::size_t i, std::size_t j) const { return a[j * rows + i]; }

    static Mat identity(std::size_t n) {
        Mat m(n, n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }
};

inline Mat matmul(const Mat& x, const Mat& y) {
    if (x.cols != y.rows) throw numeric_error("matmul: shape mismatch");
    Mat z(x.rows, y.cols);
    for (std::size_t j = 0; j < y.cols; ++j)
        for (std::size_t k = 0; k < x.cols; ++k) {
            const double yk = y(k, j);
            if (yk == 0.0) continue;
            for (std::size_t i = 0; i < x.rows; ++i) z(i, j) += x(i, k) * yk;
        }
    return z;
}

/// In-place QR by modified Gram-Schmidt: A is replaced by Q, R is returned.
/// Suitable for the well-scaled matrices produced between re-orthogonalization
/// points; a zero column signals loss of independence.
inline Mat qr_mgs(Mat& A) {
    const std::size_t n = A.cols;
    Mat R(n, n);
    for (std::size_t j = 0; j < n; ++j) {
        for (std::size_t k = 0; k < j; ++k) {
            double dot = 0.0;
            for (std::size_t i = 0; i < A.rows; ++i) dot += A(i, k) * A(i, j);
            R(k, j) = dot;
            for (std::size_t i = 0; i < A.rows; ++i) A(i, j) -= dot * A(i, k);
        }
        double nrm = 0.0;
        for (std::size_t i = 0; i < A.rows; ++i) nrm += A(i, j) * A(i, j);
        nrm = std::sqrt(nrm);
        if (nrm == 0.0 || !std::isfinite(nrm))
            throw numeric_error("qr_mgs: linearly dependent or non-finite columns");
        R(j, j) = nrm;
        for (std::size_t i = 0; i < A.rows; ++i) A(i, j) /= nrm;
    }
    return R;
}

using cdouble = std::complex<double>;

/// Dense column-major complex matrix for the boundary-matching solve.
struct CMat {
    std::size_t rows = 0, cols = 0;
    std::vector<cdouble> a;

    CMat() = default;
    CMat(std::size_t r, std::size_t c) : rows(r), cols(c), a(r * c) {}
    cdouble& operator()(std::size_t i, std::size_t j) { return a[j * rows + i]; }
    cdouble operator()(std::size_t i, std::size_t j) const { return a[j * rows + i]; }
};

inline CMat cmatmul(const CMat& x, const CMat& y) {
    if (x.cols != y.rows) throw numeric_error("cmatmul: shape mismatch");
    CMat z(x.rows, y.cols);
    for (std::size_t j = 0; j < y.cols; ++j)
        for (std::size_t k = 0; k < x.cols; ++k) {
            const cdouble yk = y(k, j);
            if (yk == 0.0) continue;
            for (std::size_t i = 0; i < x.rows; ++i) z(i, j) += x(i, k) * yk;
        }
    return z;
}

/// LU solve with partial pivoting, A X = B, B overwritten with X.
/// Returns the pivot-magnitude ratio max|p| / min|p| as a cheap conditioning
/// proxy for the stabilization-failure check.
inline double lu_solve(CMat A, CMat& B) {
    const std::size_t n = A.rows;
    if (A.cols != n || B.rows != n) throw numeric_error("lu_solve: shape mismatch");
    std::vector<std::size_t> piv(n);
    double pmax = 0.0, pmin = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t imax = k;
        double amax = std::abs(A(k, k));
        for (std::size_t i = k + 1; i < n; ++i)
            if (std::abs(A(i, k)) > amax) { amax = std::abs(A(i, k)); imax = i; }
        if (amax == 0.0 || !std::isfinite(amax))
            throw numeric_error("lu_solve: singular or non-finite matrix");
        piv[k] = imax;
        if (imax != k) {
            for (std::size_t j = 0; j < n; ++j) std::swap(A(k, j), A(imax, j));
            for (std::size_t j = 0; j < B.cols; ++j) std::swap(B(k, j), B(imax, j));
        }
        pmax = (k == 0) ? amax : std::max(pmax, amax);
        pmin = (k == 0) ? amax : std::min(pmin, amax);
        const cdouble pivot = A(k, k);
        for (std::size_t i = k + 1; i < n; ++i) {
            const cdouble m = A(i, k) / pivot;
            if (m == cdouble(0.0)) continue;
            A(i, k) = m;
            for (std::size_t j = k + 1; j < n; ++j) A(i, j) -= m * A(k, j);
            for (std::size_t j = 0; j < B.cols; ++j) B(i, j) -= m * B(k, j);
        }
    }
    for (std::size_t j = 0; j < B.cols; ++j)
        for (std::size_t ii = n; ii-- > 0;) {
            cdouble s = B(ii, j);
            for (std::size_t k2 = ii + 1; k2 < n; ++k2) s -= A(ii, k2) * B(k2, j);
            B(ii, j) = s / A(ii, ii);
        }
    return (pmin > 0.0) ? pmax / pmin : std::numeric_limits<double>::infinity();
}

/// Natural cubic spline on a uniform grid.  Stores second derivatives; eval
/// clamps to the grid ends (coefficients are flat there by construction).
class UniformSpline {
public:
    UniformSpline() = default;

    UniformSpline(double x0, double dx, std::vector<double> y)
        : x0_(x0), dx_(dx), y_(std::move(y)) {
        const std::size_t n = y_.size();
        if (n < 3) throw numeric_error("UniformSpline: need at least 3 points");
        m_.assign(n, 0.0);
        // natural boundary m_0 = m_{n-1} = 0; interior rows solve
        // m_{i-1} + 4 m_i + m_{i+1} = 6 (y_{i+1} - 2 y_i + y_{i-1}) / dx^2
        std::vector<double> cp(n, 0.0), dp(n, 0.0);
        double cp_prev = 0.0, dp_prev = 0.0;
        for (std::size_t i = 1; i + 1 < n; ++i) {
            const double r = 6.0 * (y_[i + 1] - 2.0 * y_[i] + y_[i - 1]) / (dx_ * dx_);
            const double denom = 4.0 - cp_prev;
            cp[i] = 1.0 / denom;
            dp[i] = (r - dp_prev) / denom;
            cp_prev = cp[i];
            dp_prev = dp[i];
        }
        for (std::size_t ii = n - 1; ii-- > 1;)
            m_[ii] = dp[ii] - cp[ii] * m_[ii + 1];
    }

    double operator()(double x) const {
        const std::size_t n = y_.size();
        double t = (x - x0_) / dx_;
        if (t <= 0.0) return y_.front();
        if (t >= static_cast<double>(n - 1)) return y_.back();
        const std::size_t i = static_cast<std::size_t>(t);
        const double a = t - static_cast<double>(i);
        const double b = 1.0 - a;
        return b * y_[i] + a * y_[i + 1] +
               ((b * b * b - b) * m_[i] + (a * a * a - a) * m_[i + 1]) *
                   (dx_ * dx_) / 6.0;
    }

private:
    double x0_ = 0.0, dx_ = 1.0;
    std::vector<double> y_, m_;
};

/// Eigenvalues of a symmetric 2x2 matrix [[a, b], [b, c]].
inline void sym2x2_eigenvalues(double a, double b, double c, double& lo, double& hi) {
    const double tr = 0.5 * (a + c);
    const double det = std::sqrt(0.25 * (a - c) * (a - c) + b * b);
    lo = tr - det;
    hi = tr + det;
}

} // namespace nccscat::detail
