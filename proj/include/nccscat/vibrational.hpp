#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "nccscat/detail/linalg.hpp"
#include "nccscat/detail/tridiag.hpp"
#include "nccscat/errors.hpp"
#include "nccscat/leps.hpp"
#include "nccscat/units.hpp"

namespace nccscat {

/// Uniform transverse grid with Dirichlet walls; interior points only.
struct VGrid {
    double v_min = 0.0;
    double v_max = 0.0;
    int n = 0;          ///< number of interior points
    double h = 0.0;     ///< spacing

    VGrid() = default;
    VGrid(double lo, double hi, int n_interior)
        : v_min(lo), v_max(hi), n(n_interior),
          h((hi - lo) / (n_interior + 1)) {
        if (!(hi > lo) || n_interior < 8)
            throw domain_error("VGrid: need v_max > v_min and >= 8 points");
    }

    double point(int i) const { return v_min + (i + 1) * h; }
};

/// Eigenpairs of the transverse Schroedinger operator at one u slice.
struct VibrationalSlice {
    std::vector<double> energies;              ///< ascending, length N
    std::vector<std::vector<double>> states;   ///< N vectors on the grid
};

/// Lowest N eigenpairs of
///   [-hbar^2/(2 mu) d2/dv2 + W(v) + hbar^2 j(j+1)/(2 mu v^2)] Xi = eps Xi
/// on the Dirichlet grid, normalized so that sum Xi^2 h = 1.
/// The potential is any callable W(v).
template <class W>
VibrationalSlice vibrational_eigenstates(const W& well, double mu, int j,
                                         int n_states, const VGrid& grid) {
    if (n_states < 1)
        throw domain_error("vibrational_eigenstates: need n_states >= 1");
    if (n_states > grid.n / 4)
        throw domain_error("vibrational_eigenstates: channel count exceeds "
                           "grid.n / 4; enlarge the v grid");
    const double t = units::hbar * units::hbar / (2.0 * mu * grid.h * grid.h);
    std::vector<double> d(grid.n), e(grid.n - 1, -t);
    double wall = std::numeric_limits<double>::infinity();
    for (int i = 0; i < grid.n; ++i) {
        const double v = grid.point(i);
        double pot = well(v);
        if (j > 0) {
            if (v <= 0.0)
                throw domain_error("vibrational_eigenstates: centrifugal term "
                                   "needs v > 0 over the whole grid");
            pot += units::hbar * units::hbar * j * (j + 1) / (2.0 * mu * v * v);
        }
        d[i] = 2.0 * t + pot;
        if (i == 0 || i == grid.n - 1) wall = std::min(wall, pot);
    }

    VibrationalSlice slice;
    detail::TridiagEigen::lowest(d, e, n_states, grid.h, slice.energies,
                                 slice.states);
    if (slice.energies.back() >= wall)
        throw numeric_error("vibrational_eigenstates: fewer than the requested "
                            "bound-like states are resolvable; enlarge the v grid");
    return slice;
}

/// Adiabatic channel basis tabulated on a uniform u grid.
struct ChannelBasis {
    std::vector<double> u_grid;
    VGrid v_grid;
    int j = 0;
    int n_channels = 0;
    std::vector<VibrationalSlice> slices; ///< one per u
    bool phase_fixed = false;             ///< sign continuity applied

    double du() const { return u_grid.size() > 1 ? u_grid[1] - u_grid[0] : 0.0; }
};

/// v-integral <f>_{nm} = sum_i Xi_n(v_i) f(v_i) Xi_m(v_i) h on the grid.
inline double basis_overlap(const ChannelBasis& basis, std::size_t k, int n,
                            int m, const std::vector<double>& f) {
    const auto& xn = basis.slices[k].states[n];
    const auto& xm = basis.slices[k].states[m];
    double acc = 0.0;
    for (std::size_t i = 0; i < xn.size(); ++i) acc += xn[i] * f[i] * xm[i];
    return acc * basis.v_grid.h;
}

/// Builds the basis over [u_min, u_max] with n_u slices (parallel over
/// slices, then a sequential sign-continuity pass).
template <class WellOfU>
ChannelBasis build_channel_basis(const WellOfU& well_of_u, double mu, int j,
                                 int n_channels, double u_min, double u_max,
                                 int n_u, const VGrid& grid,
                                 unsigned threads = 1) {
    if (n_u < 5 || !(u_max > u_min))
        throw domain_error("build_channel_basis: need n_u >= 5, u_max > u_min");
    ChannelBasis basis;
    basis.v_grid = grid;
    basis.j = j;
    basis.n_channels = n_channels;
    basis.u_grid.resize(n_u);
    basis.slices.resize(n_u);
    for (int k = 0; k < n_u; ++k)
        basis.u_grid[k] = u_min + (u_max - u_min) * k / (n_u - 1);

    std::exception_ptr first_error = nullptr;
    std::mutex err_mutex;
    auto work = [&](int k) {
        try {
            const double u = basis.u_grid[k];
            auto w = [&](double v) { return well_of_u(u, v); };
            basis.slices[k] = vibrational_eigenstates(w, mu, j, n_channels, grid);
        } catch (...) {
            std::scoped_lock lk(err_mutex);
            if (!first_error) first_error = std::current_exception();
        }
    };
    const unsigned n_threads = std::max(1u, threads);
    if (n_threads == 1) {
        for (int k = 0; k < n_u; ++k) work(k);
    } else {
        std::vector<std::thread> pool;
        for (unsigned t = 0; t < n_threads; ++t)
            pool.emplace_back([&, t] {
                for (int k = static_cast<int>(t); k < n_u;
                     k += static_cast<int>(n_threads))
                    work(k);
            });
        for (auto& th : pool) th.join();
    }
    if (first_error) std::rethrow_exception(first_error);

    // sign continuity: <Xi_n(u_k), Xi_n(u_{k+1})> > 0 for all k
    for (int k = 1; k < n_u; ++k)
        for (int n = 0; n < n_channels; ++n) {
            double dot = 0.0;
            const auto& prev = basis.slices[k - 1].states[n];
            auto& cur = basis.slices[k].states[n];
            for (std::size_t i = 0; i < cur.size(); ++i) dot += prev[i] * cur[i];
            if (dot < 0.0)
                for (double& x : cur) x = -x;
        }
    basis.phase_fixed = true;
    return basis;
}

/// Matrices coupling the channel functions at one interior u index:
///   d1[n][m]    = <Xi_n | dXi_m/du>
///   d2[n][m]    = <Xi_n | d2Xi_m/du2>
///   eta_log[n][m]  = <Xi_n | (1/eta) deta/du | Xi_m>
///   eta_d1[n][m]   = <Xi_n | (1/eta) deta/du dXi_m/du>
///   weta2[n][m]    = <Xi_n | eta^2 | Xi_m>
/// Derivatives in u are central differences on the basis grid; boundary
/// slices fall back to one-sided differences (flagged).
struct CouplingMatrices {
    int n = 0;
    std::vector<double> d1, d2, eta_log, eta_d1, weta2; // row-major n x n
    bool one_sided = false;

    double& at(std::vector<double>& m, int r, int c) { return m[r * n + c]; }
};

template <class EtaF>
CouplingMatrices coupling_matrices(const ChannelBasis& basis, const EtaF& eta_f,
                                   std::size_t k, double h_eta = 1e-4) {
    if (!basis.phase_fixed)
        throw domain_error("coupling_matrices: basis must be sign-fixed first");
    const int N = basis.n_channels;
    const std::size_t n_u = basis.u_grid.size();
    if (k >= n_u) throw domain_error("coupling_matrices: u index out of range");
    CouplingMatrices cm;
    cm.n = N;
    cm.one_sided = (k == 0 || k + 1 == n_u);
    cm.d1.assign(N * N, 0.0);
    cm.d2.assign(N * N, 0.0);
    cm.eta_log.assign(N * N, 0.0);
    cm.eta_d1.assign(N * N, 0.0);
    cm.weta2.assign(N * N, 0.0);

    const double du = basis.du();
    const std::size_t kp = (k + 1 < n_u) ? k + 1 : k;
    const std::size_t km = (k > 0) ? k - 1 : k;
    const double denom1 = basis.u_grid[kp] - basis.u_grid[km];

    const int nv = basis.v_grid.n;
    const double u = basis.u_grid[k];
    std::vector<double> eta2(nv), eta_rel(nv);
    for (int i = 0; i < nv; ++i) {
        const double v = basis.v_grid.point(i);
        const double e0 = eta_f(u, v);
        const double ep = eta_f(u + h_eta, v);
        const double em = eta_f(u - h_eta, v);
        eta2[i] = e0 * e0;
        eta_rel[i] = (ep - em) / (2.0 * h_eta) / e0;
    }

    const double h = basis.v_grid.h;
    for (int r = 0; r < N; ++r) {
        const auto& xr = basis.slices[k].states[r];
        for (int c = 0; c < N; ++c) {
            const auto& xc = basis.slices[k].states[c];
            const auto& xp = basis.slices[kp].states[c];
            const auto& xm = basis.slices[km].states[c];
            double s_d1 = 0.0, s_d2 = 0.0, s_el = 0.0, s_ed = 0.0, s_w = 0.0;
            for (int i = 0; i < nv; ++i) {
                const double dxi = (xp[i] - xm[i]) / denom1;
                const double ddxi = (xp[i] - 2.0 * xc[i] + xm[i]) / (du * du);
                s_d1 += xr[i] * dxi;
                s_d2 += xr[i] * ddxi;
                s_el += xr[i] * eta_rel[i] * xc[i];
                s_ed += xr[i] * eta_rel[i] * dxi;
                s_w += xr[i] * eta2[i] * xc[i];
            }
            cm.at(cm.d1, r, c) = s_d1 * h;
            cm.at(cm.d2, r, c) = s_d2 * h;
            cm.at(cm.eta_log, r, c) = s_el * h;
            cm.at(cm.eta_d1, r, c) = s_ed * h;
            cm.at(cm.weta2, r, c) = s_w * h;
        }
    }
    return cm;
}

} // namespace nccscat
