#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <vector>

#include "nccscat/vibrational.hpp"

using namespace nccscat;

namespace {

/// Brute-force symmetric eigensolver (cyclic Jacobi) used as an independent
/// oracle against the bisection/inverse-iteration path.
struct JacobiEigen {
    std::vector<double> values;

    JacobiEigen(std::vector<std::vector<double>> a) {
        const std::size_t n = a.size();
        for (int sweep = 0; sweep < 100; ++sweep) {
            double off = 0.0;
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = i + 1; j < n; ++j) off += a[i][j] * a[i][j];
            if (off < 1e-26) break;
            for (std::size_t p = 0; p < n; ++p)
                for (std::size_t q = p + 1; q < n; ++q) {
                    if (std::abs(a[p][q]) < 1e-300) continue;
                    const double theta = 0.5 * (a[q][q] - a[p][p]) / a[p][q];
                    const double t = ((theta >= 0) ? 1.0 : -1.0) /
                                     (std::abs(theta) +
                                      std::sqrt(theta * theta + 1.0));
                    const double c = 1.0 / std::sqrt(t * t + 1.0), s = t * c;
                    for (std::size_t k = 0; k < n; ++k) {
                        const double akp = a[k][p], akq = a[k][q];
                        a[k][p] = c * akp - s * akq;
                        a[k][q] = s * akp + c * akq;
                    }
                    for (std::size_t k = 0; k < n; ++k) {
                        const double apk = a[p][k], aqk = a[q][k];
                        a[p][k] = c * apk - s * aqk;
                        a[q][k] = s * apk + c * aqk;
                    }
                }
        }
        values.resize(n);
        for (std::size_t i = 0; i < n; ++i) values[i] = a[i][i];
        std::sort(values.begin(), values.end());
    }
};

} // namespace

TEST_CASE("harmonic oscillator eigenvalues") {
    const double mu = 1000.0, omega = 0.02, ve = 0.1;
    auto well = [&](double v) {
        const double x = v - ve;
        return 0.5 * mu * omega * omega * x * x;
    };
    const VGrid grid(ve - 1.1, ve + 1.1, 2000);
    const auto s = vibrational_eigenstates(well, mu, 0, 6, grid);
    for (int n = 0; n <= 5; ++n)
        // 3e-5 is the measured accuracy floor of the 3-point operator at
        // this grid size; the convergence test below pins the h^2 law
        CHECK_THAT(s.energies[n],
                   Catch::Matchers::WithinRel(omega * (n + 0.5), 3e-5));
}

TEST_CASE("Morse oscillator eigenvalues") {
    const double D = 0.2, alpha = 1.0, mu = 1000.0;
    const double omega = alpha * std::sqrt(2.0 * D / mu);
    auto well = [&](double v) {
        const double e = std::exp(-alpha * v);
        return D * (1.0 - e) * (1.0 - e);
    };
    const VGrid grid(-0.9, 1.8, 2000);
    const auto s = vibrational_eigenstates(well, mu, 0, 6, grid);
    auto exact = [&](int n) {
        const double q = omega * (n + 0.5);
        return q - q * q / (4.0 * D);
    };
    CHECK_THAT(s.energies[0], Catch::Matchers::WithinRel(0.009875, 1e-5));
    for (int n = 0; n <= 5; ++n)
        CHECK_THAT(s.energies[n], Catch::Matchers::WithinRel(exact(n), 1e-5));
}

TEST_CASE("grid-density convergence of the ground state") {
    const double D = 0.2, alpha = 1.0, mu = 1000.0;
    auto well = [&](double v) {
        const double e = std::exp(-alpha * v);
        return D * (1.0 - e) * (1.0 - e);
    };
    const auto e1 =
        vibrational_eigenstates(well, mu, 0, 1, VGrid(-0.9, 1.8, 4000)).energies[0];
    const auto e2 =
        vibrational_eigenstates(well, mu, 0, 1, VGrid(-0.9, 1.8, 8000)).energies[0];
    CHECK(std::abs(e1 - e2) < 1e-8);
}

TEST_CASE("orthonormality and ordering") {
    const double mu = 500.0;
    auto well = [](double v) { return 0.1 * v * v + 0.02 * v * v * v * v; };
    const VGrid grid(-2.0, 2.0, 900);
    const auto s = vibrational_eigenstates(well, mu, 0, 8, grid);
    for (int n = 0; n < 8; ++n) {
        if (n > 0) CHECK(s.energies[n] >= s.energies[n - 1]);
        for (int m = n; m < 8; ++m) {
            double dot = 0.0;
            for (int i = 0; i < grid.n; ++i)
                dot += s.states[n][i] * s.states[m][i];
            dot *= grid.h;
            CHECK_THAT(dot, Catch::Matchers::WithinAbs(n == m ? 1.0 : 0.0, 1e-8));
        }
    }
}

TEST_CASE("centrifugal term requires a positive grid and raises energies") {
    const double mu = 800.0;
    auto well = [](double v) { return 50.0 * (v - 1.0) * (v - 1.0); };
    const VGrid pos(0.2, 2.2, 600);
    const auto j0 = vibrational_eigenstates(well, mu, 0, 3, pos);
    const auto j2 = vibrational_eigenstates(well, mu, 2, 3, pos);
    for (int n = 0; n < 3; ++n) CHECK(j2.energies[n] > j0.energies[n]);

    const VGrid crossing(-0.5, 2.0, 600);
    CHECK_THROWS_AS(vibrational_eigenstates(well, mu, 2, 3, crossing),
                    domain_error);
}

TEST_CASE("basis-deficiency and precondition errors") {
    const double mu = 1000.0;
    auto shallow = [](double v) { return 1e-4 * v * v; };
    // walls sit far below the requested states of this nearly free well
    CHECK_THROWS_AS(vibrational_eigenstates(shallow, mu, 0, 40,
                                            VGrid(-0.3, 0.3, 170)),
                    numeric_error);
    CHECK_THROWS_AS(vibrational_eigenstates(shallow, mu, 0, 100,
                                            VGrid(-0.3, 0.3, 200)),
                    domain_error); // N > grid/4
}

TEST_CASE("tridiagonal path matches a dense Jacobi eigensolve") {
    // 50-point instance of the discretized operator
    const double mu = 900.0;
    auto well = [](double v) { return 0.3 * v * v + 0.05 * std::sin(3.0 * v); };
    const VGrid grid(-1.5, 1.5, 50);
    const auto s = vibrational_eigenstates(well, mu, 0, 5, grid);

    const double t = 1.0 / (2.0 * mu * grid.h * grid.h);
    std::vector<std::vector<double>> dense(50, std::vector<double>(50, 0.0));
    for (int i = 0; i < 50; ++i) {
        dense[i][i] = 2.0 * t + well(grid.point(i));
        if (i + 1 < 50) dense[i][i + 1] = dense[i + 1][i] = -t;
    }
    const JacobiEigen oracle(dense);
    for (int n = 0; n < 5; ++n)
        CHECK_THAT(s.energies[n],
                   Catch::Matchers::WithinAbs(oracle.values[n], 1e-10));
}

TEST_CASE("channel basis: sign continuity and slice layout") {
    const double mu = 600.0;
    // well drifts with u so the eigenvectors genuinely rotate
    auto well_of_u = [](double u, double v) {
        const double c = 0.1 * std::tanh(u);
        return 40.0 * (v - c) * (v - c);
    };
    const VGrid grid(-1.0, 1.0, 300);
    const auto basis =
        build_channel_basis(well_of_u, mu, 0, 4, -3.0, 3.0, 61, grid);
    REQUIRE(basis.phase_fixed);
    REQUIRE(basis.slices.size() == 61);
    for (std::size_t k = 1; k < basis.slices.size(); ++k)
        for (int n = 0; n < 4; ++n) {
            double dot = 0.0;
            for (int i = 0; i < grid.n; ++i)
                dot += basis.slices[k - 1].states[n][i] *
                       basis.slices[k].states[n][i];
            CHECK(dot > 0.0);
        }
    // threaded build must produce the identical basis
    const auto basis2 =
        build_channel_basis(well_of_u, mu, 0, 4, -3.0, 3.0, 61, grid, 2);
    for (std::size_t k = 0; k < basis.slices.size(); ++k)
        for (int n = 0; n < 4; ++n)
            CHECK(basis.slices[k].energies[n] == basis2.slices[k].energies[n]);
}

TEST_CASE("coupling matrices: identities") {
    const double mu = 600.0;
    auto well_of_u = [](double u, double v) {
        const double c = 0.1 * std::tanh(u);
        return 40.0 * (v - c) * (v - c);
    };
    const VGrid grid(-1.0, 1.0, 300);
    const auto basis =
        build_channel_basis(well_of_u, mu, 0, 4, -3.0, 3.0, 121, grid);
    auto eta_unit = [](double, double) { return 1.0; };

    const auto cm = coupling_matrices(basis, eta_unit, 60);
    CHECK_FALSE(cm.one_sided);
    // unit weight overlap = identity
    std::vector<double> ones(grid.n, 1.0);
    for (int n = 0; n < 4; ++n)
        for (int m = 0; m < 4; ++m) {
            CHECK_THAT(basis_overlap(basis, 60, n, m, ones),
                       Catch::Matchers::WithinAbs(n == m ? 1.0 : 0.0, 1e-8));
            // unit eta: weta2 = overlap identity
            CHECK_THAT(cm.weta2[n * 4 + m],
                       Catch::Matchers::WithinAbs(n == m ? 1.0 : 0.0, 1e-8));
        }
    // diagonal of <d/du> vanishes (derivative of unit norm)
    for (int n = 0; n < 4; ++n)
        CHECK_THAT(cm.d1[n * 4 + n], Catch::Matchers::WithinAbs(0.0, 1e-6));
    // first-derivative coupling antisymmetric up to discretization
    for (int n = 0; n < 4; ++n)
        for (int m = 0; m < 4; ++m)
            CHECK_THAT(cm.d1[n * 4 + m] + cm.d1[m * 4 + n],
                       Catch::Matchers::WithinAbs(0.0, 1e-6));

    // asymptotic slice: u-independent basis, all derivative couplings tiny
    const auto cm_far = coupling_matrices(basis, eta_unit, 2);
    for (int i = 0; i < 16; ++i) {
        CHECK(std::abs(cm_far.d1[i]) < 1e-8);
        CHECK(std::abs(cm_far.d2[i]) < 1e-6);
    }

    CHECK_THROWS_AS([&] {
        ChannelBasis unfixed = basis;
        unfixed.phase_fixed = false;
        return coupling_matrices(unfixed, eta_unit, 60);
    }(), domain_error);
}
