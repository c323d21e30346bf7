#include "qcurv/balancing.hpp"

#include <doctest.h>

#include <cmath>

using namespace qcurv;

namespace {

struct Fixture {
    ProblemParams P = derive_params(5, 1.5);
    InteractionConstants C = interaction_constants(P);
};

Point pt(double a, double b = 0.0) { return {a, b, 0.0, 0.0, 0.0}; }

}  // namespace

TEST_CASE_FIXTURE(Fixture, "two-point closed form") {
    for (double d : {2.0, 3.0, 5.5}) {
        auto S = make_singular_set({pt(0), pt(d)}, P);
        auto B = balance(S, {1.0, 1.0}, 3.0, C, P);
        double R = d * std::pow(C.A2, -1.0 / (2 * P.gamma_s));
        CHECK(std::abs(B.R[0] - R) <= 1e-8 * R);
        CHECK(std::abs(B.R[1] - R) <= 1e-8 * R);
        double coef = -C.A3 / (C.A1 * C.A2) / (d * d);
        CHECK(coef > 0.0);
        CHECK(std::abs(B.a0_hat[0][0] - coef * d) <= 1e-8 * coef * d);
        for (int l = 0; l < 5; ++l) CHECK(std::abs(B.a0_hat[1][l] + B.a0_hat[0][l]) <= 1e-12);
        CHECK(B.residual_B1 <= 1e-12);
        CHECK(B.residual_B2 <= 1e-12);
    }
}

TEST_CASE_FIXTURE(Fixture, "permutation equivariance and residual") {
    std::vector<Point> pts{pt(0), pt(3), pt(0, 2.5)};
    std::vector<double> q{1.0, 1.05, 0.95};
    auto S = make_singular_set(pts, P);
    auto R = solve_B1(S, q, C, P);
    auto F = balance_F(S, q, R, C.A2, P);
    for (double f : F) CHECK(std::abs(f) <= 1e-10);
    auto S2 = make_singular_set({pts[2], pts[0], pts[1]}, P);
    auto R2 = solve_B1(S2, {q[2], q[0], q[1]}, C, P);
    CHECK(R2[0] == doctest::Approx(R[2]).epsilon(1e-10));
    CHECK(R2[1] == doctest::Approx(R[0]).epsilon(1e-10));
    CHECK(R2[2] == doctest::Approx(R[1]).epsilon(1e-10));
    for (double r : R) CHECK(r > 0.0);
}

TEST_CASE_FIXTURE(Fixture, "dilating the points") {
    std::vector<Point> pts{pt(0), pt(3), pt(0, 2.5)};
    std::vector<double> q{1.0, 1.0, 1.0};
    auto S = make_singular_set(pts, P);
    auto R = solve_B1(S, q, C, P);
    auto a = solve_B2(S, q, R, C, P);
    double k = 2.5;
    std::vector<Point> big = pts;
    for (auto& p : big)
        for (auto& c : p) c *= k;
    auto Sk = make_singular_set(big, P);
    auto Rk = solve_B1(Sk, q, C, P);
    auto ak = solve_B2(Sk, q, Rk, C, P);
    for (int i = 0; i < 3; ++i) {
        CHECK(Rk[i] == doctest::Approx(k * R[i]).epsilon(1e-9));
        for (int l = 0; l < 5; ++l) CHECK(ak[i][l] == doctest::Approx(a[i][l] / k).epsilon(1e-9));
    }
}

TEST_CASE_FIXTURE(Fixture, "Jacobian at the balanced point") {
    for (auto pts : {std::vector<Point>{pt(-1), pt(1)}, std::vector<Point>{pt(0), pt(3), pt(0, 2.5)}}) {
        auto S = make_singular_set(pts, P);
        std::vector<double> q(pts.size(), 1.0);
        auto B = balance(S, q, 3.0, C, P);
        auto J = balance_jacobian(S, B.q, B.R, C, P);
        CHECK(J.q_kernel_dim == 1);
        CHECK(J.kernel_angle <= 1e-8);
        CHECK(J.diag_homogeneity_error <= 1e-8);
        // both radii enter each pair term, so the full contraction doubles
        for (std::size_t i = 0; i < q.size(); ++i) CHECK(J.dF_R_of_R[i] == doctest::Approx(2 * P.gamma_s * B.q[i]).epsilon(1e-8));
        CHECK_FALSE(J.ill_conditioned);
        if (pts.size() == 2) {
            CHECK(J.q_block_singular[0] == doctest::Approx(2.0).epsilon(1e-10));
            CHECK(std::abs(J.q_block_singular[1]) <= 1e-10);
        }
    }
}

TEST_CASE_FIXTURE(Fixture, "periods from weights") {
    CHECK(periods_from_q({1.0}, 4.0, P)[0] == doctest::Approx(4.0));
    CHECK(periods_from_q({std::exp(P.gamma_s)}, 4.0, P)[0] == doctest::Approx(3.0));
    auto Li = periods_from_q({0.8, 1.0, 1.2}, 4.0, P);
    CHECK(Li[0] > Li[1]);
    CHECK(Li[1] > Li[2]);
    auto q = q_from_periods(Li, 4.0, P);
    CHECK(q[2] == doctest::Approx(1.2));
    CHECK_THROWS_AS(periods_from_q({100.0}, 2.0, P), ParamError);
}

TEST_CASE_FIXTURE(Fixture, "rejected configurations") {
    CHECK_THROWS_AS(make_singular_set({pt(0)}, P), ParamError);
    CHECK_THROWS_AS(make_singular_set({pt(0), pt(1.5)}, P), ParamError);
    CHECK_THROWS_AS(make_singular_set({pt(0), {3.0, 0.0}}, P), ParamError);
    auto S = make_singular_set({pt(0), pt(3)}, P);
    CHECK_THROWS_AS(solve_B1(S, {1.0, -1.0}, C, P), ParamError);
    CHECK_THROWS_AS(solve_B1(S, {1.0}, C, P), ParamError);
}
