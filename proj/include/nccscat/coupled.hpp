#pragma once

#include <cmath>
#include <complex>
#include <optional>
#include <vector>

#include "nccscat/angular.hpp"
#include "nccscat/detail/linalg.hpp"
#include "nccscat/detail/ode.hpp"
#include "nccscat/errors.hpp"
#include "nccscat/geodesic.hpp"
#include "nccscat/units.hpp"
#include "nccscat/vibrational.hpp"

namespace nccscat {

using detail::cdouble;

/// u-dependent coefficient tables of the coupled-channel system
///
///   G''_n' + 2 A_{n'm}(u) G'_m + [B_{n'm}(u)
///       + (2 mu / hbar^2) (E - eps_m(u)) W_{n'm}(u)] G_m = 0
///
/// with A = <d/du - (1/eta) deta/du>, B = <d2/du2 - (2/eta) deta/du d/du>
/// and W = <eta^2>.  Entries are cubic splines in u so the adaptive
/// propagator can sample between basis slices; the tables are energy
/// independent and shared across a scan.
class ChannelTables {
public:
    int n_channels = 0;
    double u_min = 0.0, u_max = 0.0;
    double mu = 0.0;

    template <class EtaF>
    static ChannelTables build(const ChannelBasis& basis, const EtaF& eta_f,
                               double mu) {
        ChannelTables t;
        const int N = basis.n_channels;
        const std::size_t n_u = basis.u_grid.size();
        t.n_channels = N;
        t.mu = mu;
        t.u_min = basis.u_grid.front();
        t.u_max = basis.u_grid.back();
        const double du = basis.du();

        std::vector<std::vector<double>> eps(N, std::vector<double>(n_u));
        std::vector<std::vector<double>> a(N * N, std::vector<double>(n_u));
        std::vector<std::vector<double>> b(N * N, std::vector<double>(n_u));
        std::vector<std::vector<double>> w(N * N, std::vector<double>(n_u));
        for (std::size_t k = 0; k < n_u; ++k) {
            CouplingMatrices cm = coupling_matrices(basis, eta_f, k);
            for (int n = 0; n < N; ++n) eps[n][k] = basis.slices[k].energies[n];
            for (int r = 0; r < N; ++r)
                for (int c = 0; c < N; ++c) {
                    const int i = r * N + c;
                    a[i][k] = cm.d1[i] - cm.eta_log[i];
                    b[i][k] = cm.d2[i] - 2.0 * cm.eta_d1[i];
                    w[i][k] = cm.weta2[i];
                }
        }
        t.eps_.reserve(N);
        for (int n = 0; n < N; ++n)
            t.eps_.emplace_back(t.u_min, du, std::move(eps[n]));
        t.a_.reserve(N * N);
        t.b_.reserve(N * N);
        t.w_.reserve(N * N);
        for (int i = 0; i < N * N; ++i) {
            t.a_.emplace_back(t.u_min, du, std::move(a[i]));
            t.b_.emplace_back(t.u_min, du, std::move(b[i]));
            t.w_.emplace_back(t.u_min, du, std::move(w[i]));
        }
        return t;
    }

    /// Synthetic tables for solver tests: constant diagonal channel energies,
    /// zero derivative couplings, unit eta weight.
    static ChannelTables diagonal(std::vector<double> eps_const, double mu,
                                  double u_min, double u_max) {
        ChannelTables t;
        const int N = static_cast<int>(eps_const.size());
        t.n_channels = N;
        t.mu = mu;
        t.u_min = u_min;
        t.u_max = u_max;
        const int n_u = 8;
        const double du = (u_max - u_min) / (n_u - 1);
        for (int n = 0; n < N; ++n)
            t.eps_.emplace_back(u_min, du,
                                std::vector<double>(n_u, eps_const[n]));
        for (int r = 0; r < N; ++r)
            for (int c = 0; c < N; ++c) {
                t.a_.emplace_back(u_min, du, std::vector<double>(n_u, 0.0));
                t.b_.emplace_back(u_min, du, std::vector<double>(n_u, 0.0));
                t.w_.emplace_back(u_min, du,
                                  std::vector<double>(n_u, r == c ? 1.0 : 0.0));
            }
        return t;
    }

    double eps(int n, double u) const { return eps_[n](u); }
    double a(int r, int c, double u) const { return a_[r * n_channels + c](u); }
    double b(int r, int c, double u) const { return b_[r * n_channels + c](u); }
    double w(int r, int c, double u) const { return w_[r * n_channels + c](u); }

    /// Diagonal second-order coefficient at u: B_nn + (2mu/hbar^2)(E - eps_n) W_nn.
    double diagonal_coefficient(int n, double u, double E) const {
        return b(n, n, u) + 2.0 * mu / (units::hbar * units::hbar) *
                                (E - eps(n, u)) * w(n, n, u);
    }

private:
    std::vector<detail::UniformSpline> eps_, a_, b_, w_;
};

/// One open scattering channel: side 0 = reactant (u_min), 1 = product (u_max).
struct OpenChannel {
    int n = 0;
    int side = 0;
    double momentum = 0.0;       ///< wavenumber of the boundary plane wave in u
    double channel_energy = 0.0; ///< asymptotic eps_n at the matching end
};

/// Scattering matrix over the open channels at fixed energy.
struct ScatteringMatrix {
    double energy = 0.0;
    std::vector<OpenChannel> channels; ///< reactant block first
    detail::CMat s;                    ///< amplitudes S[m <- n]
    double condition = 0.0;            ///< pivot-ratio proxy of the matching solve
    bool tube_mode = false;
    double phi = 0.0;       ///< generating-trajectory phase (tube mode)
    bool resonant = false;  ///< tube mode: trajectory never classified

    int n_reactant() const {
        int c = 0;
        for (const auto& ch : channels) c += (ch.side == 0);
        return c;
    }

    /// |S_{m<-n}|^2
    double probability(int m, int n) const { return std::norm(s(m, n)); }
};

/// Max-norm of S^dagger S - 1 over the open channels.
inline double unitarity_residual(const ScatteringMatrix& sm) {
    const std::size_t n = sm.s.rows;
    double worst = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            cdouble acc = (i == j) ? cdouble(-1.0) : cdouble(0.0);
            for (std::size_t k = 0; k < n; ++k)
                acc += std::conj(sm.s(k, i)) * sm.s(k, j);
            worst = std::max(worst, std::abs(acc));
        }
    return worst;
}

/// Propagation controls for the channel solver.
struct SolveControls {
    detail::OdeControls ode{1e-9, 1e-11, 1e-4, 1e-15, 0.0, 20'000'000};
    int reorth_stride = 50;       ///< QR re-orthogonalization cadence
    double condition_limit = 1e12;
    double open_margin = 0.0;     ///< channel open when diag coeff > margin
};

namespace coupled_detail {

/// Fundamental-matrix propagation of the 2N-dimensional first-order system
/// with periodic QR re-orthogonalization.  Returns Q_final and the list of
/// triangular factors (applied oldest first).
struct Propagated {
    detail::Mat q;                  // 2N x 2N orthonormal
    std::vector<detail::Mat> rfactors;
};

inline Propagated propagate_fundamental(const ChannelTables& t, double E,
                                        double u_from, double u_to,
                                        const SolveControls& ctl) {
    const int N = t.n_channels;
    const int dim = 2 * N;
    const double two_mu = 2.0 * t.mu / (units::hbar * units::hbar);

    // flattened column-major fundamental matrix Y (dim x dim)
    std::vector<double> y(static_cast<std::size_t>(dim) * dim, 0.0);
    for (int i = 0; i < dim; ++i) y[static_cast<std::size_t>(i) * dim + i] = 1.0;

    std::vector<double> amat(static_cast<std::size_t>(N) * N);
    std::vector<double> cmat(static_cast<std::size_t>(N) * N);
    auto rhs = [&](double u, const std::vector<double>& yy,
                   std::vector<double>& dy) {
        for (int r = 0; r < N; ++r)
            for (int c = 0; c < N; ++c) {
                amat[r * N + c] = t.a(r, c, u);
                cmat[r * N + c] = t.b(r, c, u) +
                                  two_mu * (E - t.eps(c, u)) * t.w(r, c, u);
            }
        // column j of Y: (G, G'); G'' = -C G - 2 A G'
        for (int j = 0; j < dim; ++j) {
            const double* g = &yy[static_cast<std::size_t>(j) * dim];
            const double* gp = g + N;
            double* out = &dy[static_cast<std::size_t>(j) * dim];
            for (int r = 0; r < N; ++r) out[r] = gp[r];
            for (int r = 0; r < N; ++r) {
                double acc = 0.0;
                for (int c = 0; c < N; ++c)
                    acc -= cmat[r * N + c] * g[c] + 2.0 * amat[r * N + c] * gp[c];
                out[N + r] = acc;
            }
        }
    };

    Propagated out;
    detail::RK45 rk(static_cast<std::size_t>(dim) * dim, ctl.ode);
    double u = u_from;
    double h = ctl.ode.h_init;
    int since_reorth = 0;
    auto reorthogonalize = [&]() {
        detail::Mat ymat(dim, dim);
        ymat.a = y;
        detail::Mat r = detail::qr_mgs(ymat);
        out.rfactors.push_back(std::move(r));
        y = ymat.a;
        rk.reset();
    };
    while (u < u_to) {
        const auto st = rk.step(rhs, u, y, h, u_to);
        if (st == detail::StepStatus::Underflow)
            throw numeric_error("channel propagation: step underflow");
        if (st != detail::StepStatus::Accepted) continue;
        if (++since_reorth >= ctl.reorth_stride) {
            since_reorth = 0;
            reorthogonalize();
        }
    }
    detail::Mat q(dim, dim);
    q.a = y;
    out.rfactors.push_back(detail::qr_mgs(q));
    out.q = std::move(q);
    return out;
}

/// Applies Phi = Q R_K ... R_1 to a complex matrix with per-column
/// renormalization between factors; scales[j] accumulates log2 of the
/// removed magnitude so exponential closed-channel growth never overflows.
inline detail::CMat apply_propagator(const Propagated& prop, detail::CMat x,
                                     std::vector<double>& scales) {
    const std::size_t dim = x.rows;
    scales.assign(x.cols, 0.0);
    auto renorm = [&]() {
        for (std::size_t j = 0; j < x.cols; ++j) {
            double m = 0.0;
            for (std::size_t i = 0; i < dim; ++i)
                m = std::max(m, std::abs(x(i, j)));
            if (m > 1e100 || (m > 0.0 && m < 1e-100)) {
                const double e = std::log2(m);
                const double f = std::exp2(-e);
                for (std::size_t i = 0; i < dim; ++i) x(i, j) *= f;
                scales[j] += e;
            }
        }
    };
    for (const auto& r : prop.rfactors) {
        detail::CMat next(dim, x.cols);
        for (std::size_t j = 0; j < x.cols; ++j)
            for (std::size_t i = 0; i < dim; ++i) {
                cdouble acc = 0.0;
                for (std::size_t k = i; k < dim; ++k) acc += r(i, k) * x(k, j);
                next(i, j) = acc;
            }
        x = std::move(next);
        renorm();
    }
    detail::CMat result(dim, x.cols);
    for (std::size_t j = 0; j < x.cols; ++j)
        for (std::size_t i = 0; i < dim; ++i) {
            cdouble acc = 0.0;
            for (std::size_t k = 0; k < dim; ++k) acc += prop.q(i, k) * x(k, j);
            result(i, j) = acc;
        }
    return result;
}

} // namespace coupled_detail

/// Solves the coupled-channel boundary-value problem over [u_from, u_to]:
/// 2N real fundamental solutions are propagated across the grid, and the
/// boundary matching imposes incoming/outgoing plane waves in the open
/// channels and decaying exponentials in the closed ones at both ends.
/// Channels are listed reactant side first; closed channels participate in
/// the propagation and matching but are excluded from S.
inline ScatteringMatrix solve_coupled_interval(const ChannelTables& t, double E,
                                               double u_from, double u_to,
                                               const SolveControls& ctl = {}) {
    const int N = t.n_channels;
    if (!(u_to > u_from))
        throw domain_error("solve_coupled_interval: empty interval");
    if (u_from < t.u_min - 1e-9 || u_to > t.u_max + 1e-9)
        throw domain_error("solve_coupled_interval: interval outside tables");

    // boundary mode data
    std::vector<double> klo(N), khi(N); // wavenumber (open) or decay rate (closed)
    std::vector<bool> open_lo(N), open_hi(N);
    int n_open_lo = 0, n_open_hi = 0;
    for (int n = 0; n < N; ++n) {
        const double clo = t.diagonal_coefficient(n, u_from, E);
        const double chi = t.diagonal_coefficient(n, u_to, E);
        open_lo[n] = clo > ctl.open_margin;
        open_hi[n] = chi > ctl.open_margin;
        klo[n] = std::sqrt(std::abs(clo));
        khi[n] = std::sqrt(std::abs(chi));
        n_open_lo += open_lo[n];
        n_open_hi += open_hi[n];
    }
    if (n_open_lo + n_open_hi == 0)
        throw domain_error("solve_coupled_interval: no open channels at E (below "
                           "threshold)");

    const auto prop =
        coupled_detail::propagate_fundamental(t, E, u_from, u_to, ctl);

    const int dim = 2 * N;
    const cdouble iu(0.0, 1.0);

    // unknown outgoing/decaying mode columns at each end
    detail::CMat w_lo(dim, N), w_hi(dim, N);
    for (int n = 0; n < N; ++n) {
        const cdouble slope_lo = open_lo[n] ? iu * klo[n] : cdouble(klo[n]);
        w_lo(n, n) = 1.0;
        w_lo(N + n, n) = slope_lo; // e^{+ik u} outgoing to the left / decaying
        const cdouble slope_hi = open_hi[n] ? -iu * khi[n] : cdouble(-khi[n]);
        w_hi(n, n) = 1.0;
        w_hi(N + n, n) = slope_hi; // e^{-ik u} outgoing to the right / decaying
    }

    // incident columns: from the left (open_lo) and from the right (open_hi)
    detail::CMat inc_lo(dim, n_open_lo);
    {
        int c = 0;
        for (int n = 0; n < N; ++n)
            if (open_lo[n]) {
                inc_lo(n, c) = 1.0;
                inc_lo(N + n, c) = -iu * klo[n]; // e^{-ik u} moving right
                ++c;
            }
    }
    detail::CMat inc_hi(dim, n_open_hi);
    {
        int c = 0;
        for (int n = 0; n < N; ++n)
            if (open_hi[n]) {
                inc_hi(n, c) = 1.0;
                inc_hi(N + n, c) = iu * khi[n]; // e^{+ik u} moving left
                ++c;
            }
    }

    // propagate [w_lo | inc_lo] through Phi with per-column scaling
    detail::CMat left_block(dim, static_cast<std::size_t>(N) + n_open_lo);
    for (int j = 0; j < N; ++j)
        for (int i = 0; i < dim; ++i) left_block(i, j) = w_lo(i, j);
    for (int j = 0; j < n_open_lo; ++j)
        for (int i = 0; i < dim; ++i) left_block(i, N + j) = inc_lo(i, j);
    std::vector<double> scales;
    detail::CMat phi_left =
        coupled_detail::apply_propagator(prop, std::move(left_block), scales);

    // matching system: [Phi w_lo | -w_hi] [x; y] = rhs
    detail::CMat lhs(dim, dim);
    for (int j = 0; j < N; ++j)
        for (int i = 0; i < dim; ++i) {
            lhs(i, j) = phi_left(i, j);
            lhs(i, N + j) = -w_hi(i, j);
        }
    // incident columns stay in their scaled form; the solution is rescaled
    // afterwards (linearity), so no exponential ever materializes here
    detail::CMat rhs(dim, static_cast<std::size_t>(n_open_lo) + n_open_hi);
    for (int j = 0; j < n_open_lo; ++j)
        for (int i = 0; i < dim; ++i) rhs(i, j) = -phi_left(i, N + j);
    for (int j = 0; j < n_open_hi; ++j)
        for (int i = 0; i < dim; ++i) rhs(i, n_open_lo + j) = inc_hi(i, j);

    const double cond = detail::lu_solve(lhs, rhs);
    if (cond > ctl.condition_limit)
        throw numeric_error("solve_coupled_interval: stabilization failure "
                            "(matching condition beyond limit; reduce the "
                            "re-orthogonalization stride)");

    // undo the column scaling of the w_lo block: x_true = x * 2^{scale_j}
    // (solved against scaled columns y_j = 2^{-s_j} Phi w_j)
    // Note rhs rows 0..N-1 are the x coefficients, N..2N-1 the y coefficients.
    ScatteringMatrix sm;
    sm.energy = E;
    sm.condition = cond;
    for (int n = 0; n < N; ++n)
        if (open_lo[n])
            sm.channels.push_back({n, 0, klo[n], t.eps(n, u_from)});
    for (int n = 0; n < N; ++n)
        if (open_hi[n])
            sm.channels.push_back({n, 1, khi[n], t.eps(n, u_to)});
    const int n_open = n_open_lo + n_open_hi;
    sm.s = detail::CMat(n_open, n_open);

    for (int col = 0; col < n_open; ++col) {
        const bool from_left = col < n_open_lo;
        const double k_in = from_left
                                ? klo[sm.channels[col].n]
                                : khi[sm.channels[col].n];
        // left-incident columns were solved against a 2^{-s_inc}-scaled image
        const double post = from_left ? std::exp2(scales[N + col]) : 1.0;
        int row = 0;
        for (int n = 0; n < N; ++n) {
            if (open_lo[n]) {
                const cdouble amp = rhs(n, col) * std::exp2(-scales[n]) * post;
                sm.s(row, col) = std::sqrt(klo[n] / k_in) * amp;
                ++row;
            }
        }
        for (int n = 0; n < N; ++n) {
            if (open_hi[n]) {
                const cdouble amp = rhs(N + n, col) * post;
                sm.s(row, col) = std::sqrt(khi[n] / k_in) * amp;
                ++row;
            }
        }
    }
    return sm;
}

/// Static mode: full-interval solve of the tables.
inline ScatteringMatrix solve_coupled_static(const ChannelTables& t, double E,
                                             const SolveControls& ctl = {}) {
    return solve_coupled_interval(t, E, t.u_min, t.u_max, ctl);
}

/// Tube mode: the quantum propagation is restricted to the u interval the
/// generating trajectory actually swept (its monotone envelope, clipped to
/// the tables).  Non-reactive tubes transmit nothing and reflect with unit
/// modulus; unclassified tubes carry a resonant flag and no amplitudes.
inline ScatteringMatrix solve_coupled_tube(const ChannelTables& t, double E,
                                           const GeodesicTrajectory& traj,
                                           const SolveControls& ctl = {}) {
    ScatteringMatrix sm;
    sm.tube_mode = true;
    sm.phi = traj.initial_phase;
    sm.energy = E;

    if (traj.outcome == Outcome::Undecided) {
        sm.resonant = true;
        return sm;
    }
    if (traj.outcome == Outcome::NonReactive) {
        // reflection block only: unit-modulus diagonal over the open
        // reactant-side channels
        int count = 0;
        for (int n = 0; n < t.n_channels; ++n)
            if (t.diagonal_coefficient(n, t.u_min, E) > ctl.open_margin) {
                const double k = std::sqrt(t.diagonal_coefficient(n, t.u_min, E));
                sm.channels.push_back({n, 0, k, t.eps(n, t.u_min)});
                ++count;
            }
        sm.s = detail::CMat(count, count);
        for (int i = 0; i < count; ++i) sm.s(i, i) = 1.0;
        return sm;
    }

    const double u_from = std::max(t.u_min, traj.u_lowest);
    const double u_to = std::min(t.u_max, traj.u_highest);
    ScatteringMatrix full = solve_coupled_interval(t, E, u_from, u_to, ctl);
    full.tube_mode = true;
    full.phi = traj.initial_phase;
    return full;
}

/// Value of the overall wavefunction Phi = sum_n G_n(u) Xi_n(v; u) Theta_{jK}
/// at a point, with the channel amplitudes G_n supplied at that u and the
/// basis functions interpolated bilinearly from the tables.
inline cdouble wavefunction_value(const ChannelBasis& basis,
                                  const std::vector<cdouble>& g_at_u, double u,
                                  double v, double theta, int J, int K) {
    if (static_cast<int>(g_at_u.size()) != basis.n_channels)
        throw domain_error("wavefunction_value: wrong number of channel amplitudes");
    if (K < 0 || K > basis.j || J < K)
        throw domain_error("wavefunction_value: indices must satisfy K <= min(J, j)");
    const double u0 = basis.u_grid.front();
    const double du = basis.du();
    const double tu = (u - u0) / du;
    if (tu < 0.0 || tu > static_cast<double>(basis.u_grid.size() - 1))
        throw domain_error("wavefunction_value: u outside the basis grid");
    const double v0 = basis.v_grid.point(0);
    const double tv = (v - v0) / basis.v_grid.h;
    if (tv < 0.0 || tv > static_cast<double>(basis.v_grid.n - 1))
        throw domain_error("wavefunction_value: v outside the basis grid");

    const std::size_t ku = std::min<std::size_t>(static_cast<std::size_t>(tu),
                                                 basis.u_grid.size() - 2);
    const std::size_t kv = std::min<std::size_t>(static_cast<std::size_t>(tv),
                                                 basis.v_grid.n - 2);
    const double au = tu - static_cast<double>(ku);
    const double av = tv - static_cast<double>(kv);

    const double ang = theta_jk(basis.j, K, theta);
    cdouble acc = 0.0;
    for (int n = 0; n < basis.n_channels; ++n) {
        const auto& s0 = basis.slices[ku].states[n];
        const auto& s1 = basis.slices[ku + 1].states[n];
        const double xi = (1.0 - au) * ((1.0 - av) * s0[kv] + av * s0[kv + 1]) +
                          au * ((1.0 - av) * s1[kv] + av * s1[kv + 1]);
        acc += g_at_u[n] * xi;
    }
    return acc * ang;
}

} // namespace nccscat
