#pragma once

#include <cmath>
#include <utility>

#include "nccscat/detail/quadrature.hpp"
#include "nccscat/errors.hpp"
#include "nccscat/mass_system.hpp"
#include "nccscat/units.hpp"

namespace nccscat {

/// Normalized associated Legendre function Theta_{jK}(theta) with
/// int_0^pi Theta_{jK} Theta_{j'K} sin(theta) dtheta = delta_{jj'}.
inline double theta_jk(int j, int K, double theta) {
    if (K < 0 || j < K) throw domain_error("theta_jk: need 0 <= K <= j");
    double ratio = 1.0; // (j-K)! / (j+K)!
    for (int m = j - K + 1; m <= j + K; ++m) ratio /= m;
    const double norm = std::sqrt((2.0 * j + 1.0) / 2.0 * ratio);
    return norm * std::assoc_legendre(j, K, std::cos(theta));
}

/// Angular matrix element U^K_{jj'}(u,v) = int Theta_{jK} U(theta) Theta_{j'K}
/// sin(theta) dtheta by Gauss-Legendre quadrature in cos(theta).
/// The quadrature order must resolve the combined polynomial degree.
template <class UOfTheta>
double angular_matrix(const UOfTheta& u_of_theta, int j, int jp, int K,
                      int quad_order) {
    if (K < 0 || j < K || jp < K)
        throw domain_error("angular_matrix: need 0 <= K <= min(j, j')");
    if (quad_order < j + jp + 2)
        throw domain_error("angular_matrix: quadrature order below j + j' + 2");
    const detail::GaussLegendre gl(quad_order);
    double acc = 0.0;
    for (int i = 0; i < quad_order; ++i) {
        const double x = gl.nodes[i]; // cos(theta)
        const double theta = std::acos(x);
        acc += gl.weights[i] * theta_jk(j, K, theta) * u_of_theta(theta) *
               theta_jk(jp, K, theta);
    }
    return acc;
}

/// Ladder coefficients c+-_{JK} = sqrt(J(J+1) - K(K+-1)) and their product
/// form C+-_{JjK} = c+-_{JK} c+-_{jK} coupling adjacent K blocks.
inline std::pair<double, double> coriolis_coefficients(int J, int j, int K) {
    if (std::abs(K) > std::min(J, j))
        throw domain_error("coriolis_coefficients: need |K| <= min(J, j)");
    auto c = [](int JJ, int KK, int sign) {
        const long val = static_cast<long>(JJ) * (JJ + 1) -
                         static_cast<long>(KK) * (KK + sign);
        return (val > 0) ? std::sqrt(static_cast<double>(val)) : 0.0;
    };
    return {c(J, K, +1) * c(j, K, +1), c(J, K, -1) * c(j, K, -1)};
}

/// Rotational energy shift E_JK = (1/2) hbar^2 mu^-1 q0^-2 (J(J+1) - 2 K^2).
inline double centrifugal_energy(const MassSystem& ms, int J, int K, double q0) {
    if (std::abs(K) > J)
        throw domain_error("centrifugal_energy: need |K| <= J");
    if (!(q0 > 0.0)) throw domain_error("centrifugal_energy: need q0 > 0");
    return 0.5 * units::hbar * units::hbar / (ms.mu * q0 * q0) *
           (static_cast<double>(J) * (J + 1) - 2.0 * static_cast<double>(K) * K);
}

} // namespace nccscat
