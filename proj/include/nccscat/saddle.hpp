#pragma once

#include <algorithm>
#include <cmath>
#include <sstream>
#include <vector>

#include "nccscat/detail/linalg.hpp"
#include "nccscat/errors.hpp"
#include "nccscat/leps.hpp"
#include "nccscat/mass_system.hpp"

namespace nccscat {

/// First-order saddle of the collinear surface V(q0, q1) = V(q0, q1, theta=0).
struct SaddlePoint {
    double q0 = 0.0;
    double q1 = 0.0;
    double energy = 0.0;
    double grad_norm = 0.0;
    double hess_eig_low = 0.0;  ///< negative at a proper saddle
    double hess_eig_high = 0.0; ///< positive at a proper saddle
};

struct SaddleSearchControls {
    double q0_min = 0.5, q0_max = 12.0;
    double q1_min = 0.05, q1_max = 12.0;
    int scan_n = 120;          ///< scan resolution per axis
    double grad_tol = 1e-8;
    int newton_max_iter = 200;
    double fd_step = 1e-5;
};

namespace saddle_detail {

struct Derivs {
    double g0, g1;       // gradient
    double h00, h01, h11; // Hessian
};

template <class F>
Derivs fd_derivs(const F& f, double x, double y, double h) {
    Derivs d;
    const double fpp = f(x + h, y + h), fpm = f(x + h, y - h);
    const double fmp = f(x - h, y + h), fmm = f(x - h, y - h);
    const double fp0 = f(x + h, y), fm0 = f(x - h, y);
    const double f0p = f(x, y + h), f0m = f(x, y - h);
    const double f00 = f(x, y);
    d.g0 = (fp0 - fm0) / (2.0 * h);
    d.g1 = (f0p - f0m) / (2.0 * h);
    d.h00 = (fp0 - 2.0 * f00 + fm0) / (h * h);
    d.h11 = (f0p - 2.0 * f00 + f0m) / (h * h);
    d.h01 = (fpp - fpm - fmp + fmm) / (4.0 * h * h);
    return d;
}

} // namespace saddle_detail

/// Locates the barrier between the reactant and product valleys: a coarse
/// scan selects the best stationary-looking seeds, Newton iteration on the
/// gradient polishes them, and the Hessian signature (+,-) is verified.
/// Throws numeric_error with the scan summary when no saddle exists.
inline SaddlePoint find_saddle(const LepsParameters& p, const MassSystem& ms,
                               const SaddleSearchControls& ctl = {}) {
    auto V = [&](double q0, double q1) {
        return potential_internal(ms, p, q0, q1, 0.0);
    };

    // collect seeds ordered by gradient magnitude
    struct Seed { double q0, q1, gnorm; };
    std::vector<Seed> seeds;
    const double dq0 = (ctl.q0_max - ctl.q0_min) / ctl.scan_n;
    const double dq1 = (ctl.q1_max - ctl.q1_min) / ctl.scan_n;
    for (int i = 1; i < ctl.scan_n; ++i)
        for (int j = 1; j < ctl.scan_n; ++j) {
            const double q0 = ctl.q0_min + i * dq0;
            const double q1 = ctl.q1_min + j * dq1;
            const auto d = saddle_detail::fd_derivs(V, q0, q1, 1e-4);
            const double det = d.h00 * d.h11 - d.h01 * d.h01;
            if (det < 0.0) // saddle signature region
                seeds.push_back({q0, q1, std::hypot(d.g0, d.g1)});
        }
    std::sort(seeds.begin(), seeds.end(),
              [](const Seed& a, const Seed& b) { return a.gnorm < b.gnorm; });

    const std::size_t tries = std::min<std::size_t>(seeds.size(), 12);
    for (std::size_t t = 0; t < tries; ++t) {
        double q0 = seeds[t].q0, q1 = seeds[t].q1;
        bool ok = true;
        for (int it = 0; it < ctl.newton_max_iter; ++it) {
            const auto d = saddle_detail::fd_derivs(V, q0, q1, ctl.fd_step);
            const double det = d.h00 * d.h11 - d.h01 * d.h01;
            if (det == 0.0) { ok = false; break; }
            const double s0 = (d.h11 * d.g0 - d.h01 * d.g1) / det;
            const double s1 = (d.h00 * d.g1 - d.h01 * d.g0) / det;
            q0 -= s0;
            q1 -= s1;
            if (q0 < ctl.q0_min || q0 > ctl.q0_max || q1 < ctl.q1_min ||
                q1 > ctl.q1_max) {
                ok = false;
                break;
            }
            if (std::hypot(d.g0, d.g1) < ctl.grad_tol &&
                std::hypot(s0, s1) < 1e-12)
                break;
        }
        if (!ok) continue;
        const auto d = saddle_detail::fd_derivs(V, q0, q1, ctl.fd_step);
        const double gnorm = std::hypot(d.g0, d.g1);
        if (gnorm >= ctl.grad_tol) continue;
        double lo, hi;
        detail::sym2x2_eigenvalues(d.h00, d.h01, d.h11, lo, hi);
        if (lo < 0.0 && hi > 0.0) {
            SaddlePoint sp;
            sp.q0 = q0;
            sp.q1 = q1;
            sp.energy = V(q0, q1);
            sp.grad_norm = gnorm;
            sp.hess_eig_low = lo;
            sp.hess_eig_high = hi;
            return sp;
        }
    }

    std::ostringstream msg;
    msg << "find_saddle: no stationary point of saddle signature found; scan "
           "window q0 in ["
        << ctl.q0_min << ", " << ctl.q0_max << "], q1 in [" << ctl.q1_min << ", "
        << ctl.q1_max << "], " << seeds.size()
        << " saddle-signature cells inspected";
    throw numeric_error(msg.str());
}

/// Default curve constant: makes the reaction path pass through the saddle,
/// a = (q0* - b q1* - q_eq_plus)(q1* - q_eq_minus).
inline double curve_constant_through(const SaddlePoint& sp, double b,
                                     double q_eq_minus, double q_eq_plus) {
    const double a = (sp.q0 - b * sp.q1 - q_eq_plus) * (sp.q1 - q_eq_minus);
    if (!(a > 0.0))
        throw numeric_error("curve_constant_through: saddle lies outside the "
                            "curve family (non-positive a)");
    return a;
}

} // namespace nccscat
