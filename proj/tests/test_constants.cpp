#include "qcurv/constants.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace qcurv;

TEST_CASE("derived exponents at (5, 1.5)") {
    auto P = derive_params(5, 1.5);
    CHECK(P.gamma_s == doctest::Approx(1.0));
    CHECK(P.gamma_s_dual == doctest::Approx(4.0));
    CHECK(P.m == 1);
    CHECK(P.s == doctest::Approx(0.5));
    CHECK(P.nonlin_exp == doctest::Approx(4.0));
    CHECK(P.crit_exp == doctest::Approx(10.0 / 2.0));
    CHECK(P.c_ns == doctest::Approx(8.0 / std::numbers::pi).epsilon(1e-12));
}

TEST_CASE("Q at (5, 1) matches the conformal Laplacian value") {
    auto P = derive_params(5, 1.0, true);
    CHECK(P.q_ns == doctest::Approx(5.0 * 3.0 / 4.0).epsilon(1e-12));
}

TEST_CASE("exponent identities over a parameter grid") {
    for (int n : {3, 4, 5, 7, 9})
        for (double s : {1.05, 1.25, 1.5, 2.5, 3.5}) {
            if (!(n > 2 * s)) continue;
            auto P = derive_params(n, s);
            CHECK(P.gamma_s + P.gamma_s_dual == doctest::Approx(n));
            CHECK(P.gamma_s_dual - P.gamma_s == doctest::Approx(2 * s));
            CHECK(P.c_ns > 0.0);
            CHECK(P.q_ns > 0.0);
            CHECK(P.s >= 0.0);
            CHECK(P.s < 1.0);
            CHECK(P.m + P.s == doctest::Approx(s));
        }
}

TEST_CASE("rejected parameters") {
    CHECK_THROWS_AS(derive_params(3, 1.5), ParamError);
    CHECK_THROWS_AS(derive_params(5, 0.5), ParamError);
    CHECK_NOTHROW(derive_params(5, 0.5, true));
    CHECK_THROWS_AS(derive_params(1, 0.2, true), ParamError);
    CHECK_THROWS_AS(derive_params(5, -1.0), ParamError);
}

TEST_CASE("gamma function against known values and std::tgamma") {
    CHECK(gamma_fn(0.5) == doctest::Approx(std::sqrt(std::numbers::pi)).epsilon(1e-13));
    CHECK(gamma_fn(5.0) == doctest::Approx(24.0).epsilon(1e-13));
    CHECK(gamma_fn(1.5) == doctest::Approx(std::sqrt(std::numbers::pi) / 2).epsilon(1e-13));
    for (double z = 0.05; z < 30.0; z += 0.37) CHECK(gamma_fn(z) == doctest::Approx(std::tgamma(z)).epsilon(1e-12));
    for (double z = 0.3; z < 200.0; z *= 1.7) CHECK(lgamma_fn(z) == doctest::Approx(std::lgamma(z)).epsilon(1e-12));
    CHECK_THROWS_AS(gamma_fn(0.0), ParamError);
}

TEST_CASE("sphere areas") {
    CHECK(sphere_area(1) == doctest::Approx(2 * std::numbers::pi));
    CHECK(sphere_area(2) == doctest::Approx(4 * std::numbers::pi));
    CHECK(sphere_area(4) == doctest::Approx(8 * std::pow(std::numbers::pi, 2) / 3));
}

TEST_CASE("nonlinearity and its derivative") {
    auto P = derive_params(5, 1.5);
    for (double xi : {0.2, 0.7, 1.3, 2.9}) {
        double h = 1e-6 * xi;
        double fd = (f_sigma(P, xi + h) - f_sigma(P, xi - h)) / (2 * h);
        CHECK(df_sigma(P, xi) == doctest::Approx(fd).epsilon(1e-7));
        CHECK(f_sigma(P, xi) == doctest::Approx(P.c_ns * std::pow(xi, 4.0)));
    }
}
