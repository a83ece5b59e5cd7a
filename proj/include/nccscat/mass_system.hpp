#pragma once

#include <array>
#include <cmath>
#include <string>

#include "nccscat/errors.hpp"

namespace nccscat {

using Vec3 = std::array<double, 3>;

/// Masses of the A + (BC) arrangement together with the derived scaling
/// constants of the mass-scaled Jacobi coordinate system.
///
/// The scaled coordinates q0 = lambda*R, q1 = r/lambda reduce the kinetic
/// energy to a single effective mass mu for every degree of freedom.
struct MassSystem {
    double m_A = 0, m_B = 0, m_C = 0; ///< particle masses (internal units)
    double M = 0;                     ///< total mass
    double mu = 0;                    ///< effective mass sqrt(mA*mB*mC/M)
    double lambda = 0;                ///< scaling factor, dimensionless
    double b = 0;                     ///< skew parameter cot(theta_skew)
    double theta_skew = 0;            ///< angle between asymptotic valleys, rad

    /// Skew parameter of the A-C pair, sqrt(mA*mB/(mC*M)).  Appears in the
    /// A-C distance the same way b appears in the A-B distance.
    double b_ac() const { return std::sqrt(m_A * m_B / (m_C * M)); }
};

/// Builds the full mass-scaling algebra from three masses.
/// Throws domain_error if any mass is non-positive or non-finite.
inline MassSystem build_mass_system(double m_A, double m_B, double m_C) {
    auto check = [](double m, const char* name) {
        if (!std::isfinite(m) || m <= 0.0)
            throw domain_error(std::string("build_mass_system: mass ") + name +
                               " must be positive and finite");
    };
    check(m_A, "m_A");
    check(m_B, "m_B");
    check(m_C, "m_C");

    MassSystem ms;
    ms.m_A = m_A;
    ms.m_B = m_B;
    ms.m_C = m_C;
    ms.M = m_A + m_B + m_C;
    ms.mu = std::sqrt(m_A * m_B * m_C / ms.M);
    ms.lambda = std::sqrt(m_A * (1.0 - m_A / ms.M) / ms.mu);
    ms.b = std::sqrt(m_A * m_C / (m_B * ms.M));
    ms.theta_skew = std::atan2(1.0, ms.b); // arccot(b) in (0, pi/2) for b > 0
    return ms;
}

/// Jacobi (R, r) -> mass-scaled (q0, q1).
inline void jacobi_to_scaled(const MassSystem& ms, const Vec3& R, const Vec3& r,
                             Vec3& q0, Vec3& q1) {
    for (int i = 0; i < 3; ++i) {
        if (!std::isfinite(R[i]) || !std::isfinite(r[i]))
            throw domain_error("jacobi_to_scaled: non-finite input vector");
        q0[i] = ms.lambda * R[i];
        q1[i] = r[i] / ms.lambda;
    }
}

/// Inverse of jacobi_to_scaled; exact up to round-off.
inline void scaled_to_jacobi(const MassSystem& ms, const Vec3& q0, const Vec3& q1,
                             Vec3& R, Vec3& r) {
    for (int i = 0; i < 3; ++i) {
        if (!std::isfinite(q0[i]) || !std::isfinite(q1[i]))
            throw domain_error("scaled_to_jacobi: non-finite input vector");
        R[i] = q0[i] / ms.lambda;
        r[i] = q1[i] * ms.lambda;
    }
}

} // namespace nccscat
