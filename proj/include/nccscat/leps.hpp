#pragma once

#include <array>
#include <cmath>
#include <sstream>
#include <string>

#include "nccscat/errors.hpp"
#include "nccscat/mass_system.hpp"
#include "nccscat/reaction_path.hpp"
#include "nccscat/units.hpp"

namespace nccscat {

/// Morse + Sato parameters of one atom pair (internal units).
struct PairParameters {
    double De = 0.0;   ///< well depth
    double beta = 0.0; ///< Morse range parameter
    double re = 0.0;   ///< equilibrium separation
    double sato = 0.0; ///< Sato overlap parameter

    void validate(const char* pair) const {
        if (!(De > 0.0) || !(beta > 0.0) || !(re > 0.0) || !(sato > -1.0))
            throw domain_error(std::string("LEPS pair ") + pair +
                               ": require De, beta, re > 0 and sato > -1");
    }
};

/// Full LEPS surface: one parameter set per pair, indexed BC, AB, AC.
struct LepsParameters {
    PairParameters bc, ab, ac;

    void validate() const {
        bc.validate("BC");
        ab.validate("AB");
        ac.validate("AC");
    }
};

/// Physical bond lengths of the triangle, the bridge between mass-scaled
/// coordinates and the pairwise potential.
struct InternalGeometry {
    double r_bc = 0.0;
    double r_ab = 0.0;
    double r_ac = 0.0;
};

namespace leps_detail {

/// Coulomb and exchange integrals of one pair in the Sato parametrization.
inline void pair_qj(const PairParameters& p, double r, double& Q, double& J) {
    const double x = r - p.re;
    const double em = std::exp(-p.beta * x);
    const double em2 = em * em;
    const double pref = p.De / (4.0 * (1.0 + p.sato));
    Q = pref * ((3.0 + p.sato) * em2 - (2.0 + 6.0 * p.sato) * em);
    J = pref * ((1.0 + 3.0 * p.sato) * em2 - (6.0 + 2.0 * p.sato) * em);
}

} // namespace leps_detail

/// LEPS energy for a geometry.  Zero of energy at three separated atoms;
/// each diatomic limit reduces exactly to the pair's Morse curve.
inline double leps_energy(const LepsParameters& p, const InternalGeometry& g) {
    double q1, j1, q2, j2, q3, j3;
    leps_detail::pair_qj(p.bc, g.r_bc, q1, j1);
    leps_detail::pair_qj(p.ab, g.r_ab, q2, j2);
    leps_detail::pair_qj(p.ac, g.r_ac, q3, j3);
    const double d12 = j1 - j2, d23 = j2 - j3, d31 = j3 - j1;
    const double exch = std::sqrt(0.5 * (d12 * d12 + d23 * d23 + d31 * d31));
    return q1 + q2 + q3 - exch;
}

/// Bond lengths from mass-scaled intrinsic coordinates (q0, q1, theta).
inline InternalGeometry internal_geometry(const MassSystem& ms, double q0,
                                          double q1, double theta) {
    if (q0 < 0.0 || q1 < 0.0)
        throw domain_error("internal_geometry: q0 and q1 must be non-negative");
    InternalGeometry g;
    g.r_bc = ms.lambda * q1;
    g.r_ab = ab_distance(ms, q0, q1, theta) / ms.lambda;
    // A-C distance carries the swapped skew parameter and the opposite sign
    // of the cross term (B and C sit on opposite sides of the BC center).
    const double bp = ms.b_ac();
    const double f2 = q0 * q0 + 2.0 * bp * q0 * q1 * std::cos(theta) +
                      bp * bp * q1 * q1;
    g.r_ac = std::sqrt(std::max(f2, 0.0)) / ms.lambda;
    return g;
}

/// Interaction potential V(q0, q1, theta) in mass-scaled coordinates.
inline double potential_internal(const MassSystem& ms, const LepsParameters& p,
                                 double q0, double q1, double theta) {
    return leps_energy(p, internal_geometry(ms, q0, q1, theta));
}

/// Collinear potential evaluated at an NCC point, U(u, v, theta=0).
inline double potential_ncc_collinear(const ReactionPathSpec& spec,
                                      const MassSystem& ms,
                                      const LepsParameters& p, double u, double v) {
    double q0, q1;
    ncc_to_scaled(spec, u, v, q0, q1);
    if (q0 < 0.0 || q1 < 0.0)
        throw region_error("potential_ncc_collinear: (u, v) maps outside the "
                           "physical quadrant q0, q1 >= 0");
    return potential_internal(ms, p, q0, q1, 0.0);
}

/// Full potential at an NCC point with explicit Jacobi angle.
inline double potential_ncc(const ReactionPathSpec& spec, const MassSystem& ms,
                            const LepsParameters& p, double u, double v,
                            double theta) {
    double q0, q1;
    ncc_to_scaled(spec, u, v, q0, q1);
    if (q0 < 0.0 || q1 < 0.0)
        throw region_error("potential_ncc: (u, v) maps outside the physical "
                           "quadrant q0, q1 >= 0");
    return potential_internal(ms, p, q0, q1, theta);
}

/// Effective potential of the transverse-channel reduction evaluated from a
/// generic metric factor eta(u, v):
///
///   U_eff = (1/4 eta^2) (d eta/dv)^2 - (1/2 eta^3) d2 eta/du2
///           + (5/4 eta^4) (d eta/du)^2
///
/// with the v-derivative supplied analytically and the u-derivatives by
/// central differences of step h_u.
template <class Eta>
inline double u_eff_from_eta(Eta&& eta_f, double deta_dv, double u, double v,
                             double h_u) {
    const double e0 = eta_f(u, v);
    if (!(e0 > 0.0))
        throw region_error("u_eff: eta <= 0 (outside the single-valued region)");
    const double ep = eta_f(u + h_u, v);
    const double em = eta_f(u - h_u, v);
    const double deta_du = (ep - em) / (2.0 * h_u);
    const double d2eta_du2 = (ep - 2.0 * e0 + em) / (h_u * h_u);
    const double e2 = e0 * e0;
    return 0.25 * deta_dv * deta_dv / e2 - 0.5 * d2eta_du2 / (e2 * e0) +
           1.25 * deta_du * deta_du / (e2 * e2);
}

/// U_eff for the reaction-path metric factor eta(u,v) = (1 + K v) ds/du.
inline double u_eff(const ReactionPathSpec& spec, double u, double v,
                    double h_u = 1e-4) {
    const CurvatureData c = curvature_data(spec, u);
    const double deta_dv = c.K * c.ds_du; // analytic
    auto eta_f = [&spec](double uu, double vv) { return eta(spec, uu, vv); };
    return u_eff_from_eta(eta_f, deta_dv, u, v, h_u);
}

/// Channel potential of the vibrational eigenproblem,
/// U_bar(u, v) = U(u, v, 0) - U_eff(u, v).
inline double u_bar(const ReactionPathSpec& spec, const MassSystem& ms,
                    const LepsParameters& p, double u, double v,
                    double h_u = 1e-4) {
    return potential_ncc_collinear(spec, ms, p, u, v) - u_eff(spec, u, v, h_u);
}

/// Parses the PES parameter file format:
///
///   [pair.BC]
///   De_eV = 6.0
///   beta_invA = 2.2
///   re_A = 0.92
///   sato = 0.1
///
/// (sections pair.AB, pair.AC analogous).  Values are converted to internal
/// units.  The text is supplied by the caller; this module does not touch
/// the filesystem.
inline LepsParameters parse_leps_parameters(const std::string& text) {
    LepsParameters out;
    std::array<bool, 12> seen{};
    auto pair_index = [](const std::string& s) -> int {
        if (s == "pair.BC") return 0;
        if (s == "pair.AB") return 1;
        if (s == "pair.AC") return 2;
        return -1;
    };

    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    int section = -1;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos) continue;
        auto last = line.find_last_not_of(" \t\r");
        line = line.substr(first, last - first + 1);
        if (line.front() == '[') {
            if (line.back() != ']')
                throw config_error("PES file line " + std::to_string(lineno) +
                                   ": unterminated section header");
            section = pair_index(line.substr(1, line.size() - 2));
            if (section < 0)
                throw config_error("PES file line " + std::to_string(lineno) +
                                   ": unknown section " + line);
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw config_error("PES file line " + std::to_string(lineno) +
                               ": expected key = value");
        if (section < 0)
            throw config_error("PES file line " + std::to_string(lineno) +
                               ": key outside any [pair.*] section");
        std::string key = line.substr(0, eq);
        std::string val = line.substr(eq + 1);
        auto trim = [](std::string& s) {
            const auto b = s.find_first_not_of(" \t");
            const auto e = s.find_last_not_of(" \t");
            s = (b == std::string::npos) ? "" : s.substr(b, e - b + 1);
        };
        trim(key);
        trim(val);
        double x = 0.0;
        std::size_t pos = 0;
        try {
            x = std::stod(val, &pos);
        } catch (const std::exception&) {
            throw config_error("PES file line " + std::to_string(lineno) +
                               ": unparsable number '" + val + "'");
        }
        if (pos != val.size())
            throw config_error("PES file line " + std::to_string(lineno) +
                               ": trailing characters after number");

        PairParameters& p = (section == 0) ? out.bc : (section == 1) ? out.ab : out.ac;
        int slot = -1;
        if (key == "De_eV") { p.De = units::energy_from_ev(x); slot = 0; }
        else if (key == "beta_invA") { p.beta = units::inv_length_from_inv_angstrom(x); slot = 1; }
        else if (key == "re_A") { p.re = units::length_from_angstrom(x); slot = 2; }
        else if (key == "sato") { p.sato = x; slot = 3; }
        else
            throw config_error("PES file line " + std::to_string(lineno) +
                               ": unknown key '" + key + "'");
        seen[static_cast<std::size_t>(section * 4 + slot)] = true;
    }
    for (std::size_t i = 0; i < seen.size(); ++i)
        if (!seen[i]) {
            static const char* pairs[] = {"pair.BC", "pair.AB", "pair.AC"};
            static const char* keys[] = {"De_eV", "beta_invA", "re_A", "sato"};
            throw config_error(std::string("PES file: missing key ") + keys[i % 4] +
                               " in section [" + pairs[i / 4] + "]");
        }
    out.validate();
    return out;
}

} // namespace nccscat
