#pragma once

#include <cmath>

namespace nccscat {

/// Internal unit system: Hartree atomic units (hbar = m_e = e = 1).
/// All file and CLI I/O uses amu / angstrom / eV; conversion happens at the
/// boundary so the dynamical equations never carry unit factors.
namespace units {

inline constexpr double hbar = 1.0;

// CODATA-fixed conversion constants.
inline constexpr double amu_to_au    = 1822.888486;     // 1 amu in electron masses
inline constexpr double angstrom_to_au = 1.8897259886;  // 1 angstrom in bohr
inline constexpr double ev_to_au     = 0.036749322;     // 1 eV in hartree

inline constexpr double au_to_amu      = 1.0 / amu_to_au;
inline constexpr double au_to_angstrom = 1.0 / angstrom_to_au;
inline constexpr double au_to_ev       = 1.0 / ev_to_au;

inline double mass_from_amu(double amu) { return amu * amu_to_au; }
inline double length_from_angstrom(double a) { return a * angstrom_to_au; }
inline double energy_from_ev(double ev) { return ev * ev_to_au; }
inline double inv_length_from_inv_angstrom(double b) { return b / angstrom_to_au; }

} // namespace units

} // namespace nccscat
