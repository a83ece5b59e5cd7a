#pragma once

#include <cmath>
#include <limits>
#include <string>

#include "nccscat/detail/rootfind.hpp"
#include "nccscat/errors.hpp"
#include "nccscat/mass_system.hpp"

namespace nccscat {

/// Parameters of the analytic reaction-coordinate curve
///
///     q0c(q1c) = a / (q1c - q_eq_minus) + b q1c + q_eq_plus,
///
/// a hyperbola-plus-line that interpolates between the reactant valley
/// (q1c -> q_eq_minus, q0c -> infinity) and the product valley ray
/// (q0c -> b q1c + q_eq_plus).  The natural collision coordinates (u, v)
/// measure progress along this curve and signed distance from it.
struct ReactionPathSpec {
    double a = 1.0;          ///< curve constant, (mass-scaled length)^2
    double b = 1.0;          ///< skew parameter from the mass system
    double q_eq_minus = 0.0; ///< reactant equilibrium bond length, mass-scaled
    double q_eq_plus = 0.0;  ///< product equilibrium bond length, mass-scaled
    double u0 = 0.0;         ///< origin of the u coordinate

    void validate() const {
        if (!(a > 0.0) || !(b > 0.0) || q_eq_minus < 0.0 || q_eq_plus < 0.0)
            throw domain_error("ReactionPathSpec: require a > 0, b > 0, q_eq +- >= 0");
    }
};

/// A point in natural collision coordinates.
struct NccPoint {
    double u = 0.0;     ///< reaction coordinate
    double v = 0.0;     ///< signed distance from the curve
    double theta = 0.0; ///< Jacobi angle
};

/// Curvature data of the curve at a given u:
///   K      curvature,
///   ds_du  arclength factor ds/du,
///   F      auxiliary 1 + (b - a/qbar^2)^2.
struct CurvatureData {
    double K = 0.0;
    double ds_du = 0.0;
    double F = 0.0;
};

namespace path_detail {

inline double qbar_of_q1c(const ReactionPathSpec& spec, double q1c) {
    const double qbar = q1c - spec.q_eq_minus;
    if (!(qbar > 0.0))
        throw domain_error("reaction path: q1c must exceed q_eq_minus");
    return qbar;
}

/// Positive root of b*qbar^2 - (u - u0)*qbar - a = 0.
inline double qbar_of_u(const ReactionPathSpec& spec, double u) {
    const double w = u - spec.u0;
    // write the root to avoid cancellation for w << 0
    const double disc = std::sqrt(w * w + 4.0 * spec.a * spec.b);
    if (w >= 0.0) return (w + disc) / (2.0 * spec.b);
    return 2.0 * spec.a / (disc - w);
}

} // namespace path_detail

/// q0 on the curve for a given q1c (both mass-scaled).
inline double path_point(const ReactionPathSpec& spec, double q1c) {
    const double qbar = path_detail::qbar_of_q1c(spec, q1c);
    return spec.a / qbar + spec.b * q1c + spec.q_eq_plus;
}

/// Reaction coordinate u for a point on the curve.
inline double u_of(const ReactionPathSpec& spec, double q1c) {
    const double qbar = path_detail::qbar_of_q1c(spec, q1c);
    return spec.u0 - spec.a / qbar + spec.b * qbar;
}

/// Inverse of u_of (closed form; exact up to round-off).
inline double q1c_of_u(const ReactionPathSpec& spec, double u) {
    return spec.q_eq_minus + path_detail::qbar_of_u(spec, u);
}

/// Tilt angle phi(u) of the local (u, v) frame, chosen continuously in
/// (0, pi) from cot(phi) = dq0c/dq1c = b - a/qbar^2.  As u -> +inf it tends
/// to the skew angle arccot(b).
inline double phi_of_u(const ReactionPathSpec& spec, double u) {
    const double qbar = path_detail::qbar_of_u(spec, u);
    const double cot_phi = spec.b - spec.a / (qbar * qbar);
    // arccot with range (0, pi) is continuous in its argument, so no branch
    // unwrapping is needed along the curve.
    return M_PI_2 - std::atan(cot_phi);
}

/// Curvature, arclength factor and the auxiliary F at a given u.
inline CurvatureData curvature_data(const ReactionPathSpec& spec, double u) {
    const double qbar = path_detail::qbar_of_u(spec, u);
    const double slope = spec.b - spec.a / (qbar * qbar);
    CurvatureData c;
    c.F = 1.0 + slope * slope;
    c.ds_du = std::sqrt(c.F) / (spec.b + spec.a / (qbar * qbar));
    c.K = 2.0 * spec.a * std::pow(c.F, -1.5) / (qbar * qbar * qbar);
    return c;
}

/// NCC -> mass-scaled coordinates (Jacobi angle passes through unchanged).
inline void ncc_to_scaled(const ReactionPathSpec& spec, double u, double v,
                          double& q0, double& q1) {
    const double q1c = q1c_of_u(spec, u);
    const double q0c = spec.a / (q1c - spec.q_eq_minus) + spec.b * q1c + spec.q_eq_plus;
    const double phi = phi_of_u(spec, u);
    q0 = q0c - v * std::sin(phi);
    q1 = q1c + v * std::cos(phi);
}

/// Metric factor eta(u, v) = [1 + K(u) v] ds/du.  Vanishes on the caustic
/// v = -1/K and is invalid beyond it.
inline double eta(const ReactionPathSpec& spec, double u, double v) {
    const CurvatureData c = curvature_data(spec, u);
    const double g = 1.0 + c.K * v;
    if (g < 0.0)
        throw region_error("eta: point beyond the caustic 1 + K v = 0 "
                           "(self-crossing region)");
    return g * c.ds_du;
}

/// Controls for the numerical inversion in scaled_to_ncc.
struct NccInversionControls {
    double u_scan_min = -80.0;
    double u_scan_max = 80.0;
    int scan_points = 1600;
    double u_tol = 1e-12;
};

/// Mass-scaled -> NCC by nearest-point projection on the curve: finds u with
/// (q - qc(u)) orthogonal to the tangent, then v as the signed normal
/// component.  Points past the caustic (no unique foot point) are refused.
inline NccPoint scaled_to_ncc(const ReactionPathSpec& spec, double q0, double q1,
                              const NccInversionControls& ctl = {}) {
    auto residual = [&](double u) {
        // tangent direction is (cos phi, sin phi)
        double q0c, q1c;
        ncc_to_scaled(spec, u, 0.0, q0c, q1c);
        const double phi = phi_of_u(spec, u);
        return (q0 - q0c) * std::cos(phi) + (q1 - q1c) * std::sin(phi);
    };

    const double du = (ctl.u_scan_max - ctl.u_scan_min) / ctl.scan_points;
    double best_u = 0.0, best_abs_v = std::numeric_limits<double>::infinity();
    bool found = false;
    double prev_u = ctl.u_scan_min, prev_r = residual(prev_u);
    for (int i = 1; i <= ctl.scan_points; ++i) {
        const double cur_u = ctl.u_scan_min + i * du;
        const double cur_r = residual(cur_u);
        if (prev_r == 0.0 || prev_r * cur_r < 0.0) {
            const double u_root = detail::brent_root(residual, prev_u, cur_u,
                                                     prev_r, cur_r, ctl.u_tol);
            const double phi = phi_of_u(spec, u_root);
            double q0c, q1c;
            ncc_to_scaled(spec, u_root, 0.0, q0c, q1c);
            const double v = -(q0 - q0c) * std::sin(phi) + (q1 - q1c) * std::cos(phi);
            if (std::abs(v) < best_abs_v) {
                best_abs_v = std::abs(v);
                best_u = u_root;
                found = true;
            }
        }
        prev_u = cur_u;
        prev_r = cur_r;
    }
    if (!found)
        throw numeric_error("scaled_to_ncc: no foot point located in scan window");

    NccPoint p;
    p.u = best_u;
    const double phi = phi_of_u(spec, best_u);
    double q0c, q1c;
    ncc_to_scaled(spec, best_u, 0.0, q0c, q1c);
    p.v = -(q0 - q0c) * std::sin(phi) + (q1 - q1c) * std::cos(phi);
    p.theta = 0.0;
    const double g = 1.0 + curvature_data(spec, best_u).K * p.v;
    if (g <= 0.0)
        throw region_error("scaled_to_ncc: point lies in the self-crossing region");
    return p;
}

/// Mass-scaled distance between the A and B particles,
/// f = sqrt(q0^2 - 2 b q0 q1 cos(theta) + b^2 q1^2).
inline double ab_distance(const MassSystem& ms, double q0, double q1, double theta) {
    if (q0 < 0.0 || q1 < 0.0)
        throw domain_error("ab_distance: q0 and q1 must be non-negative");
    const double ct = std::cos(theta);
    const double f2 = q0 * q0 - 2.0 * ms.b * q0 * q1 * ct + ms.b * ms.b * q1 * q1;
    return std::sqrt(std::max(f2, 0.0));
}

} // namespace nccscat
