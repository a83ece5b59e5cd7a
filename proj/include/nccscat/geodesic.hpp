#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <thread>
#include <vector>

#include "nccscat/detail/ode.hpp"
#include "nccscat/detail/rootfind.hpp"
#include "nccscat/errors.hpp"
#include "nccscat/leps.hpp"
#include "nccscat/mass_system.hpp"
#include "nccscat/reaction_path.hpp"
#include "nccscat/units.hpp"

namespace nccscat {

/// State of the geodesic flow on the Lagrange surface, in the intrinsic
/// coordinates x = (u, v, theta) with derivatives taken with respect to the
/// natural parameter s of the conformal metric g_ij = P^2 delta_ij,
/// P^2 = 2 mu (E - U).
struct GeodesicState {
    std::array<double, 3> x{};    ///< (u, v, theta)
    std::array<double, 3> xdot{}; ///< d(u, v, theta)/ds
    double s = 0.0;               ///< natural parameter
    double I = 0.0;               ///< total angular momentum (0 = collinear)
};

enum class Outcome : int { NonReactive = 0, Reactive = 1, Undecided = 2 };

/// Sampled trajectory with its conserved-norm audit trail.
/// For I = 0 the conserved norm is g_ij xdot^i xdot^j; for I != 0 the
/// centrifugal correction I^2/(mu^2 g00) is added so the stored quantity
/// stays a first integral.
struct GeodesicTrajectory {
    std::vector<GeodesicState> samples;
    std::vector<double> conserved_norm;
    Outcome outcome = Outcome::Undecided;
    double initial_phase = 0.0;
    double energy = 0.0;
    double u_lowest = 0.0;  ///< swept-envelope minimum of u(s)
    double u_highest = 0.0; ///< swept-envelope maximum of u(s)
    bool boundary_grazed = false; ///< step underflow at the surface boundary
};

/// Integration and classification controls for geodesic runs.
struct TrajectoryControls {
    detail::OdeControls ode{1e-10, 1e-12, 1e-3, 1e-12, 0.0, 50'000'000};
    double s_max = 2.0e5;
    int output_stride = 10;   ///< record every n-th accepted step
    double grad_step = 1e-5;  ///< central-difference step for chi gradients
    double u_react = 10.0;    ///< outcome threshold on the product side
    double u_nonreact = -10.0;///< outcome threshold on the reactant side
};

/// Metric factor and gradient of chi = ln g00 at a state.
struct MetricData {
    double g00 = 0.0;
    std::array<double, 3> chi_grad{};
};

/// Conformal metric factor g00 = 2 mu (E - U) and the chi gradients by
/// central differences.  The theta gradient is taken as exactly zero on the
/// collinear symmetry plane (U is even in theta there).  Throws region_error
/// when the point leaves the classically allowed region E > U.
template <class Potential>
MetricData metric(const Potential& pot, double mu, const std::array<double, 3>& x,
                  double E, double grad_step = 1e-5, bool collinear = false) {
    const double U0 = pot(x[0], x[1], x[2]);
    const double g00 = 2.0 * mu * (E - U0);
    if (!(g00 > 0.0))
        throw region_error("metric: state left the Lagrange surface (E <= U)");

    MetricData m;
    m.g00 = g00;
    const double h = grad_step;
    for (int i = 0; i < 3; ++i) {
        if (i == 2 && collinear) {
            m.chi_grad[2] = 0.0;
            continue;
        }
        auto xp = x, xm = x;
        xp[i] += h;
        xm[i] -= h;
        const double gp = 2.0 * mu * (E - pot(xp[0], xp[1], xp[2]));
        const double gm = 2.0 * mu * (E - pot(xm[0], xm[1], xm[2]));
        if (!(gp > 0.0) || !(gm > 0.0))
            throw region_error("metric: gradient probe left the Lagrange surface");
        m.chi_grad[i] = (std::log(gp) - std::log(gm)) / (2.0 * h);
    }
    return m;
}

/// Right-hand side of the geodesic system
///
///   xddot^k + (1/2) chi_k { (xdot^k)^2 - sum_{i != k} (xdot^i)^2
///                           - I^2/(mu^2 g00^2) }
///           + { sum_{i != k} chi_i xdot^i } xdot^k = 0.
///
/// With I = 0 this is the geodesic equation of the conformal metric; the
/// centrifugal term carries the scalar total angular momentum.
template <class Potential>
void geodesic_rhs(const Potential& pot, double mu, const GeodesicState& st,
                  double E, double grad_step, std::array<double, 3>& xddot) {
    const bool collinear =
        (st.I == 0.0 && st.x[2] == 0.0 && st.xdot[2] == 0.0);
    const MetricData m = metric(pot, mu, st.x, E, grad_step, collinear);
    const double cent = st.I * st.I / (mu * mu * m.g00 * m.g00);
    const double sq0 = st.xdot[0] * st.xdot[0];
    const double sq1 = st.xdot[1] * st.xdot[1];
    const double sq2 = st.xdot[2] * st.xdot[2];
    const double sq[3] = {sq0, sq1, sq2};
    const double total = sq0 + sq1 + sq2;
    double chidot = 0.0;
    for (int i = 0; i < 3; ++i) chidot += m.chi_grad[i] * st.xdot[i];
    for (int k = 0; k < 3; ++k) {
        const double brace = 2.0 * sq[k] - total - cent;
        const double cross = (chidot - m.chi_grad[k] * st.xdot[k]) * st.xdot[k];
        xddot[k] = -0.5 * m.chi_grad[k] * brace - cross;
    }
}

/// Conserved quantity g00 |xdot|^2 + I^2/(mu^2 g00) of the flow.
template <class Potential>
double conserved_norm(const Potential& pot, double mu, const GeodesicState& st,
                      double E) {
    const double U0 = pot(st.x[0], st.x[1], st.x[2]);
    const double g00 = 2.0 * mu * (E - U0);
    if (!(g00 > 0.0))
        throw region_error("conserved_norm: state outside the Lagrange surface");
    const double v2 = st.xdot[0] * st.xdot[0] + st.xdot[1] * st.xdot[1] +
                      st.xdot[2] * st.xdot[2];
    return g00 * v2 + st.I * st.I / (mu * mu * g00);
}

/// Physical total energy reconstructed from a state through the Maupertuis
/// relation dt = mu ds / g00: E_rec = U + g00^2 |xdot|^2 / (2 mu).
template <class Potential>
double reconstructed_energy(const Potential& pot, double mu,
                            const GeodesicState& st, double E) {
    const double U0 = pot(st.x[0], st.x[1], st.x[2]);
    const double g00 = 2.0 * mu * (E - U0);
    const double v2 = st.xdot[0] * st.xdot[0] + st.xdot[1] * st.xdot[1] +
                      st.xdot[2] * st.xdot[2];
    return U0 + g00 * g00 * v2 / (2.0 * mu);
}

/// Production potential adapter: collinear-plane LEPS surface in NCC.
struct NccLepsPotential {
    const ReactionPathSpec* spec = nullptr;
    const MassSystem* ms = nullptr;
    const LepsParameters* p = nullptr;

    double operator()(double u, double v, double theta) const {
        return potential_ncc(*spec, *ms, *p, u, v, theta);
    }
};

/// Asymptotic diatom data used to seed trajectories.
struct AsymptoticWell {
    double v_center = 0.0;   ///< well minimum position in v
    double well_floor = 0.0; ///< potential at the minimum
    double omega = 0.0;      ///< harmonic frequency of the v motion
};

/// Locates the transverse well of the collinear potential at fixed u.
template <class Potential>
AsymptoticWell locate_well(const Potential& pot, double mu, double u,
                           double v_lo = -0.8, double v_hi = 0.8) {
    auto f = [&](double v) { return pot(u, v, 0.0); };
    // coarse scan guards against golden search landing on a shoulder
    const int n_scan = 64;
    double best_v = v_lo, best_f = f(v_lo);
    for (int i = 1; i <= n_scan; ++i) {
        const double v = v_lo + (v_hi - v_lo) * i / n_scan;
        const double fv = f(v);
        if (fv < best_f) { best_f = fv; best_v = v; }
    }
    const double span = (v_hi - v_lo) / n_scan;
    const double v_center = detail::golden_min(
        f, std::max(v_lo, best_v - 2.0 * span), std::min(v_hi, best_v + 2.0 * span));
    AsymptoticWell w;
    w.v_center = v_center;
    w.well_floor = f(v_center);
    const double h = 1e-4;
    const double d2 = (f(v_center + h) - 2.0 * w.well_floor + f(v_center - h)) / (h * h);
    w.omega = (d2 > 0.0) ? std::sqrt(d2 / mu) : 0.0;
    return w;
}

/// Internal energy of the asymptotic reactant diatom in state n, from the
/// Morse spectrum of the BC pair (exact in the separated-atom limit):
/// eps_n = -De + hw (n + 1/2) - [hw (n + 1/2)]^2 / (4 De),  w = lambda beta
/// sqrt(2 De / mu).
inline double channel_energy_bc(const MassSystem& ms, const LepsParameters& p,
                                int n) {
    if (n < 0) throw domain_error("channel_energy_bc: n must be >= 0");
    const double omega = ms.lambda * p.bc.beta * std::sqrt(2.0 * p.bc.De / ms.mu);
    const double q = units::hbar * omega * (n + 0.5);
    if (q >= 2.0 * p.bc.De)
        throw domain_error("channel_energy_bc: state above the Morse dissociation");
    return -p.bc.De + q - q * q / (4.0 * p.bc.De);
}

/// Vibrational phase period expressed as a length in u: the distance the
/// incoming trajectory advances during one transverse oscillation.
inline double phase_period_length(const MassSystem& ms, const LepsParameters& p,
                                  const ReactionPathSpec& spec, double E, int n,
                                  double u_start) {
    NccLepsPotential pot{&spec, &ms, &p};
    const AsymptoticWell w = locate_well(pot, ms.mu, u_start);
    const double eps_n = channel_energy_bc(ms, p, n);
    if (E <= eps_n)
        throw domain_error("phase_period_length: E below the channel energy");
    const double udot = std::sqrt(2.0 * (E - eps_n) / ms.mu);
    if (w.omega <= 0.0)
        throw numeric_error("phase_period_length: no transverse confinement");
    return udot * 2.0 * M_PI / w.omega;
}

/// Builds the asymptotic initial state: the diatom is placed on its
/// internal-energy shell eps_n at vibrational phase phi (v at the outer
/// displacement for phi = 0, maximal |vdot| at phi = pi/2), the remaining
/// energy goes into translation toward the interaction region, and the
/// velocities are converted to the natural parametrization so the metric
/// norm is exactly 1.
inline GeodesicState initial_conditions(const MassSystem& ms,
                                        const LepsParameters& p,
                                        const ReactionPathSpec& spec, double E,
                                        int n, double phi, double u_start,
                                        bool* asymptotic_ok = nullptr) {
    NccLepsPotential pot{&spec, &ms, &p};
    const AsymptoticWell w = locate_well(pot, ms.mu, u_start);
    const double eps_n = channel_energy_bc(ms, p, n);
    if (E <= eps_n)
        throw domain_error("initial_conditions: closed channel, E <= eps_n");

    if (asymptotic_ok) {
        // asymptotic when the well floor has converged to the free-diatom depth
        *asymptotic_ok = std::abs(w.well_floor + p.bc.De) <= 1e-6 * p.bc.De;
    }

    auto f = [&](double v) { return pot(u_start, v, 0.0); };
    if (!(eps_n > w.well_floor))
        throw numeric_error("initial_conditions: channel below the local well floor");

    // classical turning points of the transverse well at energy eps_n
    auto turning = [&](double lo, double hi) {
        return detail::brent_root([&](double v) { return f(v) - eps_n; }, lo, hi,
                                  1e-13);
    };
    double v_plus, v_minus;
    {
        double hi = w.v_center;
        double step = 0.02;
        while (f(hi) < eps_n) {
            hi += step;
            step *= 1.5;
            if (hi > w.v_center + 10.0)
                throw numeric_error("initial_conditions: no outer turning point");
        }
        v_plus = turning(w.v_center, hi);
        double lo = w.v_center;
        step = 0.02;
        while (f(lo) < eps_n) {
            lo -= step;
            step *= 1.5;
            if (lo < w.v_center - 10.0)
                throw numeric_error("initial_conditions: no inner turning point");
        }
        v_minus = turning(lo, w.v_center);
    }

    const double amp_plus = v_plus - w.v_center;
    const double amp_minus = w.v_center - v_minus;
    const double c = std::cos(phi);
    const double v = w.v_center + (c >= 0.0 ? amp_plus : amp_minus) * c;
    const double kinetic_v = std::max(0.0, eps_n - f(v));
    const double sin_phi = std::sin(phi);
    const double vdot_t = (sin_phi == 0.0)
                              ? 0.0
                              : -std::copysign(std::sqrt(2.0 * kinetic_v / ms.mu),
                                               sin_phi);
    const double udot_t = std::sqrt(2.0 * (E - eps_n) / ms.mu);

    GeodesicState st;
    st.x = {u_start, v, 0.0};
    const double g00 = 2.0 * ms.mu * (E - f(v));
    if (!(g00 > 0.0))
        throw region_error("initial_conditions: start point outside the surface");
    const double dt_ds = ms.mu / g00; // natural-parameter conversion
    st.xdot = {udot_t * dt_ds, vdot_t * dt_ds, 0.0};
    st.s = 0.0;
    st.I = 0.0;
    return st;
}

/// Classifies a finished trajectory against the outcome thresholds.
inline Outcome classify_outcome(const GeodesicTrajectory& traj, double u_react,
                                double u_nonreact) {
    if (!(u_nonreact < 0.0) || !(u_react > 0.0))
        throw domain_error("classify_outcome: need u_nonreact < 0 < u_react");
    for (const auto& st : traj.samples) {
        if (st.x[0] >= u_react && st.xdot[0] > 0.0) return Outcome::Reactive;
        if (st.x[0] <= u_nonreact && st.xdot[0] < 0.0) return Outcome::NonReactive;
    }
    return Outcome::Undecided;
}

/// Integrates a trajectory until it is classified, s_max is exhausted, or the
/// step size underflows at the surface boundary (partial result, flagged).
template <class Potential>
GeodesicTrajectory integrate(const Potential& pot, double mu,
                             const GeodesicState& init,
                             const TrajectoryControls& ctl) {
    if (!(ctl.u_nonreact < 0.0) || !(ctl.u_react > 0.0))
        throw domain_error("integrate: need u_nonreact < 0 < u_react");

    GeodesicTrajectory traj;
    traj.energy = pot.energy();

    const double I = init.I;
    auto rhs = [&](double /*s*/, const std::vector<double>& y,
                   std::vector<double>& dy) {
        GeodesicState st;
        st.x = {y[0], y[1], y[2]};
        st.xdot = {y[3], y[4], y[5]};
        st.I = I;
        std::array<double, 3> acc{};
        geodesic_rhs(pot, mu, st, pot.energy(), ctl.grad_step, acc);
        dy[0] = y[3];
        dy[1] = y[4];
        dy[2] = y[5];
        dy[3] = acc[0];
        dy[4] = acc[1];
        dy[5] = acc[2];
    };

    std::vector<double> y = {init.x[0], init.x[1], init.x[2],
                             init.xdot[0], init.xdot[1], init.xdot[2]};
    detail::RK45 rk(6, ctl.ode);
    double s = init.s;
    double h = ctl.ode.h_init;

    auto snapshot = [&](double s_now, const std::vector<double>& yy) {
        GeodesicState st;
        st.x = {yy[0], yy[1], yy[2]};
        st.xdot = {yy[3], yy[4], yy[5]};
        st.s = s_now;
        st.I = I;
        traj.samples.push_back(st);
        traj.conserved_norm.push_back(conserved_norm(pot, mu, st, pot.energy()));
    };

    traj.u_lowest = traj.u_highest = y[0];
    snapshot(s, y);

    long step_count = 0;
    int stride_count = 0;
    while (s < init.s + ctl.s_max) {
        detail::StepStatus st;
        try {
            st = rk.step(rhs, s, y, h, init.s + ctl.s_max);
        } catch (const region_error&) {
            // a stage probed outside the surface: shrink and retry
            h *= 0.25;
            rk.reset();
            if (h < ctl.ode.h_min) {
                traj.boundary_grazed = true;
                break;
            }
            continue;
        }
        if (st == detail::StepStatus::Underflow) {
            traj.boundary_grazed = true;
            break;
        }
        if (st != detail::StepStatus::Accepted) continue;
        if (++step_count > static_cast<long>(ctl.ode.max_steps))
            throw numeric_error("integrate: maximum step count exceeded");

        traj.u_lowest = std::min(traj.u_lowest, y[0]);
        traj.u_highest = std::max(traj.u_highest, y[0]);

        const bool reactive = (y[0] >= ctl.u_react && y[3] > 0.0);
        const bool nonreactive = (y[0] <= ctl.u_nonreact && y[3] < 0.0);
        if (++stride_count >= ctl.output_stride || reactive || nonreactive) {
            stride_count = 0;
            snapshot(s, y);
        }
        if (reactive) {
            traj.outcome = Outcome::Reactive;
            break;
        }
        if (nonreactive) {
            traj.outcome = Outcome::NonReactive;
            break;
        }
    }
    if (traj.samples.back().s != s) snapshot(s, y);
    return traj;
}

/// Wraps a potential together with the conserved total energy so the
/// integrator needs a single object.
template <class Potential>
struct EnergyClamped {
    Potential pot;
    double E = 0.0;
    double operator()(double u, double v, double th) const { return pot(u, v, th); }
    double energy() const { return E; }
    const Potential& potential() const { return pot; }
};

template <class Potential>
EnergyClamped<Potential> with_energy(Potential pot, double E) {
    return EnergyClamped<Potential>{std::move(pot), E};
}

/// Controls for the two-trajectory Lyapunov estimator.
struct LyapunovControls {
    double delta0 = 1e-8;    ///< initial state-space offset
    double renorm_ds = 1.0;  ///< renormalization interval in s
    double s_total = 2.0e4;  ///< total averaging span
    int max_retries = 5;     ///< delta0 halvings when the shadow exits
    bool stop_at_outcome = true; ///< stop averaging when the reference classifies
};

/// Leading Lyapunov exponent by shadow-trajectory renormalization: the
/// reference and a shadow offset by delta0 are advanced together; every
/// renorm_ds the log of the separation growth is accumulated and the shadow
/// is pulled back to distance delta0.
template <class Potential>
double lyapunov_max(const EnergyClamped<Potential>& pot, double mu,
                    const GeodesicState& init, const TrajectoryControls& tctl,
                    const LyapunovControls& lctl) {
    double delta0 = lctl.delta0;
    for (int attempt = 0; attempt <= lctl.max_retries; ++attempt) {
        try {
            auto rhs = [&](double /*s*/, const std::vector<double>& y,
                           std::vector<double>& dy) {
                for (int half = 0; half < 2; ++half) {
                    GeodesicState st;
                    const int o = 6 * half;
                    st.x = {y[o + 0], y[o + 1], y[o + 2]};
                    st.xdot = {y[o + 3], y[o + 4], y[o + 5]};
                    st.I = init.I;
                    std::array<double, 3> acc{};
                    geodesic_rhs(pot, mu, st, pot.energy(), tctl.grad_step, acc);
                    dy[o + 0] = y[o + 3];
                    dy[o + 1] = y[o + 4];
                    dy[o + 2] = y[o + 5];
                    dy[o + 3] = acc[0];
                    dy[o + 4] = acc[1];
                    dy[o + 5] = acc[2];
                }
            };

            // offset along the collinear subspace so collinear runs stay collinear
            std::vector<double> y(12);
            for (int i = 0; i < 3; ++i) {
                y[i] = init.x[i];
                y[3 + i] = init.xdot[i];
            }
            const double w = delta0 / 2.0;
            y[6] = init.x[0] + w;
            y[7] = init.x[1] + w;
            y[8] = init.x[2];
            y[9] = init.xdot[0] + w;
            y[10] = init.xdot[1] - w;
            y[11] = init.xdot[2];
            double d_init = 0.0;
            for (int i = 0; i < 6; ++i) {
                const double d = y[6 + i] - y[i];
                d_init += d * d;
            }
            d_init = std::sqrt(d_init);
            for (int i = 0; i < 6; ++i)
                y[6 + i] = y[i] + (y[6 + i] - y[i]) * (delta0 / d_init);

            detail::RK45 rk(12, tctl.ode);
            double s = 0.0, log_sum = 0.0;
            double s_used = 0.0;
            while (s < lctl.s_total) {
                const double s_target = std::min(s + lctl.renorm_ds, lctl.s_total);
                bool stop = false;
                rk.integrate(rhs, s, y, s_target,
                             [&](double, const std::vector<double>& yy) {
                                 if (!lctl.stop_at_outcome) return true;
                                 if (yy[0] >= tctl.u_react && yy[3] > 0.0) stop = true;
                                 if (yy[0] <= tctl.u_nonreact && yy[3] < 0.0) stop = true;
                                 return !stop;
                             });
                double d = 0.0;
                for (int i = 0; i < 6; ++i) {
                    const double di = y[6 + i] - y[i];
                    d += di * di;
                }
                d = std::sqrt(d);
                if (d <= 0.0) throw numeric_error("lyapunov_max: degenerate pair");
                log_sum += std::log(d / delta0);
                for (int i = 0; i < 6; ++i)
                    y[6 + i] = y[i] + (y[6 + i] - y[i]) * (delta0 / d);
                s_used = s;
                if (stop) break;
            }
            if (s_used <= 0.0)
                throw numeric_error("lyapunov_max: no averaging span covered");
            return log_sum / s_used;
        } catch (const region_error&) {
            delta0 *= 0.5; // shadow left the surface; retry closer to the reference
        }
    }
    throw numeric_error("lyapunov_max: retry limit exhausted (shadow keeps "
                        "leaving the Lagrange surface)");
}

/// Outcome map over a rectangle of (E, phi) initial conditions.
struct ChaosMap {
    std::vector<double> energies;  ///< nE values, inclusive range
    std::vector<double> phases;    ///< nPhi values, half-open [phi_min, phi_max)
    std::vector<Outcome> outcomes; ///< row-major, E outer, phi inner
    std::vector<double> lyapunov;  ///< optional, same layout (empty if off)
    int cell_failures = 0;         ///< integration failures recorded Undecided
};

struct ChaosMapControls {
    TrajectoryControls traj;
    double u_start = -10.0;
    int n_vib = 0;
    bool with_lyapunov = false;
    LyapunovControls lyap;
    unsigned threads = 1;
};

/// Sweeps the (E, phi) grid.  Cells are independent; the partition over
/// threads does not affect any cell's result.
inline ChaosMap chaos_map(const MassSystem& ms, const LepsParameters& p,
                          const ReactionPathSpec& spec, double E_min, double E_max,
                          double phi_min, double phi_max, int nE, int nPhi,
                          const ChaosMapControls& ctl) {
    if (nE < 1 || nPhi < 1)
        throw domain_error("chaos_map: grid sizes must be >= 1");

    ChaosMap map;
    map.energies.resize(nE);
    map.phases.resize(nPhi);
    for (int i = 0; i < nE; ++i)
        map.energies[i] = (nE == 1) ? E_min
                                    : E_min + (E_max - E_min) * i / (nE - 1);
    for (int j = 0; j < nPhi; ++j)
        map.phases[j] = phi_min + (phi_max - phi_min) * j / nPhi;

    const std::size_t n_cells = static_cast<std::size_t>(nE) * nPhi;
    map.outcomes.assign(n_cells, Outcome::Undecided);
    if (ctl.with_lyapunov) map.lyapunov.assign(n_cells, 0.0);
    std::vector<std::uint8_t> failed(n_cells, 0);

    auto run_cell = [&](std::size_t cell) {
        const int i = static_cast<int>(cell) / nPhi;
        const int j = static_cast<int>(cell) % nPhi;
        try {
            const GeodesicState st0 = initial_conditions(
                ms, p, spec, map.energies[i], ctl.n_vib, map.phases[j], ctl.u_start);
            NccLepsPotential base{&spec, &ms, &p};
            auto pot = with_energy(base, map.energies[i]);
            GeodesicTrajectory traj = integrate(pot, ms.mu, st0, ctl.traj);
            map.outcomes[cell] = traj.outcome;
            if (traj.boundary_grazed) failed[cell] = 1;
            if (ctl.with_lyapunov)
                map.lyapunov[cell] = lyapunov_max(pot, ms.mu, st0, ctl.traj, ctl.lyap);
        } catch (const error&) {
            map.outcomes[cell] = Outcome::Undecided;
            failed[cell] = 1;
        }
    };

    const unsigned n_threads = std::max(1u, ctl.threads);
    if (n_threads == 1) {
        for (std::size_t c = 0; c < n_cells; ++c) run_cell(c);
    } else {
        std::vector<std::thread> pool;
        for (unsigned t = 0; t < n_threads; ++t)
            pool.emplace_back([&, t] {
                for (std::size_t c = t; c < n_cells; c += n_threads) run_cell(c);
            });
        for (auto& th : pool) th.join();
    }
    for (auto f : failed) map.cell_failures += f;
    return map;
}

} // namespace nccscat
