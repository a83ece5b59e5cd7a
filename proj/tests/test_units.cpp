#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "nccscat/mass_system.hpp"
#include "nccscat/units.hpp"

using namespace nccscat;

TEST_CASE("mass scaling for Li + FH") {
    // hand evaluation: M = 27, mu = sqrt(133/27), lambda = sqrt((140/27)/mu),
    // b = sqrt(7/513)
    const MassSystem ms = build_mass_system(7.0, 19.0, 1.0);
    CHECK(ms.M == 27.0);
    CHECK_THAT(ms.mu, Catch::Matchers::WithinRel(2.21945, 1e-5));
    CHECK_THAT(ms.lambda, Catch::Matchers::WithinRel(1.52848, 1e-5));
    CHECK_THAT(ms.b, Catch::Matchers::WithinRel(0.116813, 1e-5));
    // arccot(0.1168128) = 1.4545105 rad = 83.3373 deg by series evaluation
    CHECK_THAT(ms.theta_skew * 180.0 / M_PI,
               Catch::Matchers::WithinAbs(83.3373, 2e-3));
}

TEST_CASE("mass scaling for equal masses") {
    const MassSystem ms = build_mass_system(1.0, 1.0, 1.0);
    CHECK_THAT(ms.mu, Catch::Matchers::WithinRel(0.577350, 1e-5));
    CHECK_THAT(ms.lambda, Catch::Matchers::WithinRel(1.074570, 1e-5));
    CHECK_THAT(ms.b, Catch::Matchers::WithinRel(0.577350, 1e-5));
    CHECK_THAT(ms.theta_skew, Catch::Matchers::WithinAbs(M_PI / 3.0, 1e-12));
}

TEST_CASE("mu and b are symmetric under swapping the outer masses") {
    const MassSystem a = build_mass_system(3.5, 11.0, 0.7);
    const MassSystem b = build_mass_system(0.7, 11.0, 3.5);
    CHECK_THAT(a.mu, Catch::Matchers::WithinRel(b.mu, 1e-14));
    CHECK_THAT(a.b, Catch::Matchers::WithinRel(b.b, 1e-14));
}

TEST_CASE("invalid masses are rejected by field name") {
    CHECK_THROWS_WITH(build_mass_system(-1.0, 2.0, 3.0),
                      Catch::Matchers::ContainsSubstring("m_A"));
    CHECK_THROWS_WITH(build_mass_system(1.0, 0.0, 3.0),
                      Catch::Matchers::ContainsSubstring("m_B"));
    CHECK_THROWS_WITH(build_mass_system(1.0, 2.0,
                                        std::numeric_limits<double>::infinity()),
                      Catch::Matchers::ContainsSubstring("m_C"));
}

TEST_CASE("derived-field identities") {
    std::mt19937_64 rng(20260810);
    std::uniform_real_distribution<double> mass(0.5, 40.0);
    for (int i = 0; i < 200; ++i) {
        const MassSystem ms = build_mass_system(mass(rng), mass(rng), mass(rng));
        CHECK_THAT(ms.lambda * ms.lambda * ms.mu,
                   Catch::Matchers::WithinRel(ms.m_A * (1.0 - ms.m_A / ms.M), 1e-12));
        CHECK_THAT(1.0 / std::tan(ms.theta_skew),
                   Catch::Matchers::WithinRel(ms.b, 1e-12));
    }
}

TEST_CASE("jacobi_to_scaled direct values") {
    MassSystem ms = build_mass_system(1.0, 1.0, 1.0);
    ms.lambda = 2.0; // direct-substitution check with a synthetic lambda
    Vec3 q0{}, q1{};
    jacobi_to_scaled(ms, {1.0, 0.0, 0.0}, {1.0, 0.0, 0.0}, q0, q1);
    CHECK(q0[0] == 2.0);
    CHECK(q1[0] == 0.5);

    ms.lambda = 1.0;
    jacobi_to_scaled(ms, {0.3, -0.2, 0.9}, {1.5, 0.1, -0.4}, q0, q1);
    CHECK(q0 == Vec3{0.3, -0.2, 0.9});
    CHECK(q1 == Vec3{1.5, 0.1, -0.4});
}

TEST_CASE("scaled/jacobi round trip on random inputs") {
    std::mt19937_64 rng(77);
    std::uniform_real_distribution<double> mass(0.5, 40.0);
    std::uniform_real_distribution<double> coord(-5.0, 5.0);
    for (int i = 0; i < 1000; ++i) {
        const MassSystem ms = build_mass_system(mass(rng), mass(rng), mass(rng));
        const Vec3 R{coord(rng), coord(rng), coord(rng)};
        const Vec3 r{coord(rng), coord(rng), coord(rng)};
        Vec3 q0{}, q1{}, R2{}, r2{};
        jacobi_to_scaled(ms, R, r, q0, q1);
        scaled_to_jacobi(ms, q0, q1, R2, r2);
        for (int k = 0; k < 3; ++k) {
            CHECK_THAT(R2[k], Catch::Matchers::WithinRel(R[k], 1e-14) ||
                                  Catch::Matchers::WithinAbs(0.0, 1e-14));
            CHECK_THAT(r2[k], Catch::Matchers::WithinRel(r[k], 1e-14) ||
                                  Catch::Matchers::WithinAbs(0.0, 1e-14));
        }
    }
}

TEST_CASE("unit constants") {
    CHECK(units::hbar == 1.0);
    CHECK_THAT(units::mass_from_amu(1.0),
               Catch::Matchers::WithinRel(1822.888486, 1e-12));
    CHECK_THAT(units::length_from_angstrom(1.0),
               Catch::Matchers::WithinRel(1.8897259886, 1e-12));
    CHECK_THAT(units::energy_from_ev(1.0),
               Catch::Matchers::WithinRel(0.036749322, 1e-12));
    CHECK_THAT(units::au_to_ev * units::ev_to_au,
               Catch::Matchers::WithinRel(1.0, 1e-14));
}
