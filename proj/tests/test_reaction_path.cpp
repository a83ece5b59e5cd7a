#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "nccscat/reaction_path.hpp"

using namespace nccscat;

namespace {

ReactionPathSpec simple_spec() {
    ReactionPathSpec s;
    s.a = 1.0;
    s.b = 1.0;
    s.q_eq_minus = 0.0;
    s.q_eq_plus = 2.0;
    s.u0 = 0.0;
    return s;
}

ReactionPathSpec lifh_like_spec() {
    ReactionPathSpec s;
    s.a = 2.0;
    s.b = 0.116813;
    s.q_eq_minus = 1.5;
    s.q_eq_plus = 2.5;
    s.u0 = 0.0;
    return s;
}

} // namespace

TEST_CASE("path_point direct evaluations") {
    const auto s = simple_spec();
    CHECK_THAT(path_point(s, 1.0), Catch::Matchers::WithinRel(4.0, 1e-14));
    // asymptote: q0c - (b q1c + q_eq_plus) -> 0
    CHECK_THAT(path_point(s, 1e8) - (1e8 + 2.0),
               Catch::Matchers::WithinAbs(0.0, 1e-7));

    const auto t = lifh_like_spec();
    CHECK_THAT(path_point(t, 2.5), Catch::Matchers::WithinRel(4.792033, 1e-6));

    CHECK_THROWS_AS(path_point(t, 1.5), domain_error);
    CHECK_THROWS_AS(path_point(t, 1.0), domain_error);
}

TEST_CASE("u_of fixed point and inverse") {
    const auto s = simple_spec();
    CHECK_THAT(u_of(s, 1.0), Catch::Matchers::WithinAbs(0.0, 1e-14));
    CHECK_THAT(q1c_of_u(s, 0.0), Catch::Matchers::WithinRel(1.0, 1e-14));
}

TEST_CASE("u round trip on 1000 random u values") {
    const auto specs = {simple_spec(), lifh_like_spec()};
    std::mt19937_64 rng(123);
    std::uniform_real_distribution<double> uu(-50.0, 50.0);
    for (const auto& s : specs)
        for (int i = 0; i < 1000; ++i) {
            const double u = uu(rng);
            const double q1c = q1c_of_u(s, u);
            const double back = u_of(s, q1c);
            CHECK_THAT(back, Catch::Matchers::WithinAbs(u, 1e-12) ||
                                 Catch::Matchers::WithinRel(u, 1e-12));
        }
}

TEST_CASE("u_of is strictly increasing in q1c") {
    const auto s = lifh_like_spec();
    double prev = u_of(s, s.q_eq_minus + 1e-4);
    for (int i = 1; i <= 2000; ++i) {
        const double q1c = s.q_eq_minus + 1e-4 + i * 0.01;
        const double u = u_of(s, q1c);
        CHECK(u > prev);
        prev = u;
    }
}

TEST_CASE("phi_of_u values and skew-angle limit") {
    const auto s = simple_spec();
    // qbar = 1 at u = 0: cot(phi) = 0
    CHECK_THAT(phi_of_u(s, 0.0), Catch::Matchers::WithinRel(M_PI_2, 1e-13));
    // qbar = 2 at u = -1/2 + 2 = 1.5: cot(phi) = 1 - 1/4 = 0.75
    CHECK_THAT(phi_of_u(s, 1.5), Catch::Matchers::WithinRel(0.927295, 1e-6));

    const auto t = lifh_like_spec();
    const double limit = std::atan2(1.0, t.b);
    CHECK_THAT(phi_of_u(t, 1e3), Catch::Matchers::WithinAbs(limit, 1e-6));
}

TEST_CASE("ncc_to_scaled at phi = pi/2") {
    const auto s = simple_spec();
    double q0 = 0, q1 = 0;
    ncc_to_scaled(s, 0.0, 0.5, q0, q1);
    CHECK_THAT(q0, Catch::Matchers::WithinRel(3.5, 1e-13));
    CHECK_THAT(q1, Catch::Matchers::WithinRel(1.0, 1e-13));

    // v = 0 lands on the curve
    ncc_to_scaled(s, 1.7, 0.0, q0, q1);
    CHECK_THAT(q0, Catch::Matchers::WithinRel(path_point(s, q1), 1e-12));
}

TEST_CASE("orthogonality of the local frame") {
    for (const auto& s : {simple_spec(), lifh_like_spec()}) {
        for (double u = -20.0; u <= 20.0; u += 0.25) {
            // analytic tangent from the defining curve formulas:
            // dq1c/du = 1/(b + a/qbar^2), dq0c/dq1c = b - a/qbar^2
            const double qbar = q1c_of_u(s, u) - s.q_eq_minus;
            const double dq1 = 1.0 / (s.b + s.a / (qbar * qbar));
            const double t1 = dq1;
            const double t0 = (s.b - s.a / (qbar * qbar)) * dq1;
            const double phi = phi_of_u(s, u);
            const double dot = t0 * (-std::sin(phi)) + t1 * std::cos(phi);
            CHECK_THAT(dot / std::hypot(t0, t1),
                       Catch::Matchers::WithinAbs(0.0, 1e-10));
            // displacement direction is unit length by construction
            CHECK_THAT(std::hypot(-std::sin(phi), std::cos(phi)),
                       Catch::Matchers::WithinRel(1.0, 1e-15));
        }
    }
}

TEST_CASE("curvature data spot values") {
    const auto s = simple_spec();
    // qbar = 1 (u = 0): bracket vanishes
    auto c = curvature_data(s, 0.0);
    CHECK_THAT(c.F, Catch::Matchers::WithinRel(1.0, 1e-13));
    CHECK_THAT(c.K, Catch::Matchers::WithinRel(2.0, 1e-13));
    CHECK_THAT(c.ds_du, Catch::Matchers::WithinRel(0.5, 1e-13));
    // qbar = 2 (u = 1.5)
    c = curvature_data(s, 1.5);
    CHECK_THAT(c.F, Catch::Matchers::WithinRel(1.5625, 1e-13));
    CHECK_THAT(c.ds_du, Catch::Matchers::WithinRel(1.0, 1e-13));
    CHECK_THAT(c.K, Catch::Matchers::WithinRel(0.128, 1e-13));
    // limits at large u
    c = curvature_data(s, 1e7);
    CHECK_THAT(c.K, Catch::Matchers::WithinAbs(0.0, 1e-13));
    CHECK_THAT(c.ds_du,
               Catch::Matchers::WithinRel(std::sqrt(1.0 + s.b * s.b) / s.b, 1e-6));
}

TEST_CASE("analytic curvature matches the parametrized-curve curvature") {
    // fourth-order stencils keep the oracle well below the 1e-6 gate
    const double h = 2e-3;
    auto d1 = [&](double m2, double m1, double p1, double p2) {
        return (-p2 + 8.0 * p1 - 8.0 * m1 + m2) / (12.0 * h);
    };
    auto d2 = [&](double m2, double m1, double c, double p1, double p2) {
        return (-p2 + 16.0 * p1 - 30.0 * c + 16.0 * m1 - m2) / (12.0 * h * h);
    };
    for (const auto& s : {simple_spec(), lifh_like_spec()}) {
        for (double u = -5.0; u <= 5.0; u += 0.5) {
            double x[5], y[5];
            for (int k = -2; k <= 2; ++k)
                ncc_to_scaled(s, u + k * h, 0.0, x[k + 2], y[k + 2]);
            const double dx = d1(x[0], x[1], x[3], x[4]);
            const double dy = d1(y[0], y[1], y[3], y[4]);
            const double ddx = d2(x[0], x[1], x[2], x[3], x[4]);
            const double ddy = d2(y[0], y[1], y[2], y[3], y[4]);
            const double k_num = std::abs(dx * ddy - dy * ddx) /
                                 std::pow(dx * dx + dy * dy, 1.5);
            const double k_ana = curvature_data(s, u).K;
            CHECK_THAT(k_num, Catch::Matchers::WithinRel(k_ana, 1e-6));
        }
    }
}

TEST_CASE("eta product, straight-line limit and caustic boundary") {
    const auto s = simple_spec();
    const auto c = curvature_data(s, 0.0); // K = 2, ds_du = 0.5
    CHECK_THAT(eta(s, 0.0, 0.25), Catch::Matchers::WithinRel(0.75, 1e-13));
    CHECK_THAT(eta(s, 0.0, 0.0), Catch::Matchers::WithinRel(c.ds_du, 1e-13));

    // nearly straight path: eta almost independent of v
    ReactionPathSpec line = s;
    line.a = 1e-9;
    const double e1 = eta(line, 5.0, -0.5), e2 = eta(line, 5.0, 0.5);
    CHECK_THAT(e1, Catch::Matchers::WithinRel(e2, 1e-6));

    // at v = -1/K exactly eta vanishes; errors only strictly beyond
    const double v_c = -1.0 / c.K;
    CHECK(eta(s, 0.0, v_c) == 0.0);
    CHECK_THROWS_AS(eta(s, 0.0, v_c * (1.0 + 1e-9)), region_error);
}

TEST_CASE("scaled_to_ncc inverts ncc_to_scaled") {
    const auto s = simple_spec();
    const auto p = scaled_to_ncc(s, 3.5, 1.0);
    CHECK_THAT(p.u, Catch::Matchers::WithinAbs(0.0, 1e-10));
    CHECK_THAT(p.v, Catch::Matchers::WithinAbs(0.5, 1e-10));

    // points on the curve project to v = 0
    for (double u : {-3.0, 0.0, 2.5}) {
        double q0, q1;
        ncc_to_scaled(s, u, 0.0, q0, q1);
        const auto q = scaled_to_ncc(s, q0, q1);
        CHECK_THAT(q.v, Catch::Matchers::WithinAbs(0.0, 1e-10));
        CHECK_THAT(q.u, Catch::Matchers::WithinAbs(u, 1e-9));
    }
}

TEST_CASE("ncc round trip on 1000 random in-region points") {
    const auto s = lifh_like_spec();
    std::mt19937_64 rng(5150);
    std::uniform_real_distribution<double> uu(-8.0, 8.0);
    std::uniform_real_distribution<double> frac(-0.6, 0.6);
    int tested = 0;
    for (int i = 0; i < 1000; ++i) {
        const double u = uu(rng);
        const auto c = curvature_data(s, u);
        // stay well inside the single-valued tube around the curve
        const double v = frac(rng) * std::min(2.0, 0.8 / std::max(c.K, 1e-6));
        double q0, q1;
        ncc_to_scaled(s, u, v, q0, q1);
        const auto p = scaled_to_ncc(s, q0, q1);
        double q0b, q1b;
        ncc_to_scaled(s, p.u, p.v, q0b, q1b);
        CHECK_THAT(q0b, Catch::Matchers::WithinAbs(q0, 1e-10));
        CHECK_THAT(q1b, Catch::Matchers::WithinAbs(q1, 1e-10));
        ++tested;
    }
    CHECK(tested == 1000);
}

TEST_CASE("ab_distance closed forms") {
    MassSystem ms = build_mass_system(1.0, 1.0, 1.0);
    ms.b = 1.0;
    CHECK_THAT(ab_distance(ms, 3.0, 1.0, 0.0), Catch::Matchers::WithinRel(2.0, 1e-13));
    CHECK_THAT(ab_distance(ms, 3.0, 1.0, M_PI_2),
               Catch::Matchers::WithinRel(std::sqrt(9.0 + 1.0), 1e-13));
    ms.b = 0.116813;
    CHECK_THAT(ab_distance(ms, 4.0, 2.0, M_PI),
               Catch::Matchers::WithinRel(4.233626, 1e-6));
    CHECK_THROWS_AS(ab_distance(ms, -1.0, 2.0, 0.0), domain_error);
}
