#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "nccscat/errors.hpp"

namespace nccscat::detail {

/// Lowest-eigenpair solver for a real symmetric tridiagonal matrix
/// (diagonal d[0..n-1], off-diagonal e[0..n-2]).  Eigenvalues by Sturm
/// bisection, eigenvectors by inverse iteration with a partially pivoted
/// tridiagonal factorization.  Intended for the finite-difference
/// Schroedinger operator where only the few lowest states are needed.
class TridiagEigen {
public:
    /// Number of eigenvalues strictly below x (Sturm count).
    static int count_below(const std::vector<double>& d,
                           const std::vector<double>& e, double x) {
        const std::size_t n = d.size();
        int count = 0;
        double q = d[0] - x;
        if (q < 0) ++count;
        for (std::size_t i = 1; i < n; ++i) {
            const double e2 = e[i - 1] * e[i - 1];
            if (q == 0.0) q = 1e-300;
            q = d[i] - x - e2 / q;
            if (q < 0) ++count;
        }
        return count;
    }

    /// k-th smallest eigenvalue (k = 0-based) by bisection.
    static double eigenvalue(const std::vector<double>& d,
                             const std::vector<double>& e, int k) {
        const std::size_t n = d.size();
        double lo = d[0], hi = d[0];
        for (std::size_t i = 0; i < n; ++i) {
            const double r = (i > 0 ? std::abs(e[i - 1]) : 0.0) +
                             (i + 1 < n ? std::abs(e[i]) : 0.0);
            lo = std::min(lo, d[i] - r);
            hi = std::max(hi, d[i] + r);
        }
        const double span = hi - lo;
        for (int it = 0; it < 200 && (hi - lo) > 1e-15 * std::max(1.0, std::abs(span)); ++it) {
            const double mid = 0.5 * (lo + hi);
            if (count_below(d, e, mid) > k) hi = mid; else lo = mid;
        }
        return 0.5 * (lo + hi);
    }

    /// Solve (T - lambda) x = b with partial pivoting; overwrites b with x.
    /// Zero pivots are replaced by a tiny value (standard inverse-iteration guard).
    static void solve_shifted(const std::vector<double>& d,
                              const std::vector<double>& e, double lambda,
                              std::vector<double>& b) {
        const std::size_t n = d.size();
        // Band storage: sub (len n), diag, sup1, sup2 (fill-in from pivoting).
        std::vector<double> diag(n), sup1(n, 0.0), sup2(n, 0.0), sub(n, 0.0);
        for (std::size_t i = 0; i < n; ++i) diag[i] = d[i] - lambda;
        for (std::size_t i = 0; i + 1 < n; ++i) { sup1[i] = e[i]; sub[i + 1] = e[i]; }

        for (std::size_t i = 0; i + 1 < n; ++i) {
            if (std::abs(sub[i + 1]) > std::abs(diag[i])) {
                // swap rows i, i+1
                std::swap(diag[i], sub[i + 1]);
                std::swap(sup1[i], diag[i + 1]);
                std::swap(sup2[i], sup1[i + 1]);
                std::swap(b[i], b[i + 1]);
            }
            if (diag[i] == 0.0) diag[i] = 1e-300;
            const double m = sub[i + 1] / diag[i];
            diag[i + 1] -= m * sup1[i];
            sup1[i + 1] -= m * sup2[i];
            b[i + 1] -= m * b[i];
        }
        if (diag[n - 1] == 0.0) diag[n - 1] = 1e-300;
        // back substitution
        b[n - 1] /= diag[n - 1];
        if (n >= 2)
            b[n - 2] = (b[n - 2] - sup1[n - 2] * b[n - 1]) / diag[n - 2];
        for (std::size_t ii = n; ii-- > 2;) {
            const std::size_t i = ii - 2;
            b[i] = (b[i] - sup1[i] * b[i + 1] - sup2[i] * b[i + 2]) / diag[i];
        }
    }

    /// Lowest n_pairs eigenpairs.  Eigenvectors are normalized so that
    /// sum(v_i^2) * weight = 1 for the supplied quadrature weight, and
    /// orthogonalized within clusters of near-degenerate eigenvalues.
    static void lowest(const std::vector<double>& d, const std::vector<double>& e,
                       int n_pairs, double weight, std::vector<double>& values,
                       std::vector<std::vector<double>>& vectors) {
        const std::size_t n = d.size();
        if (n_pairs <= 0 || static_cast<std::size_t>(n_pairs) > n)
            throw numeric_error("TridiagEigen: invalid eigenpair count");
        values.resize(n_pairs);
        vectors.assign(n_pairs, std::vector<double>(n));

        double scale = 0.0;
        for (std::size_t i = 0; i < n; ++i) scale = std::max(scale, std::abs(d[i]));
        for (std::size_t i = 0; i + 1 < n; ++i) scale = std::max(scale, std::abs(e[i]));

        for (int k = 0; k < n_pairs; ++k) {
            values[k] = eigenvalue(d, e, k);
            auto& v = vectors[k];
            // deterministic start vector with no accidental symmetry
            for (std::size_t i = 0; i < n; ++i)
                v[i] = 1.0 + 0.5 * std::sin(0.7 * static_cast<double>(i + 1) +
                                            1.3 * static_cast<double>(k));
            const double shift = values[k] * (1.0 + 1e-14) + 1e-14 * scale;
            for (int it = 0; it < 4; ++it) {
                solve_shifted(d, e, shift, v);
                // orthogonalize against earlier vectors of a degenerate cluster
                for (int j = 0; j < k; ++j) {
                    if (std::abs(values[j] - values[k]) > 1e-8 * std::max(1.0, scale))
                        continue;
                    double dot = 0.0;
                    for (std::size_t i = 0; i < n; ++i) dot += v[i] * vectors[j][i];
                    dot *= weight;
                    for (std::size_t i = 0; i < n; ++i) v[i] -= dot * vectors[j][i];
                }
                double nrm = 0.0;
                for (double x : v) nrm += x * x;
                nrm = std::sqrt(nrm * weight);
                if (nrm == 0.0) throw numeric_error("TridiagEigen: null eigenvector");
                for (double& x : v) x /= nrm;
            }
        }
    }
};

} // namespace nccscat::detail
