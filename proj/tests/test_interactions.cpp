#include "qcurv/fit.hpp"
#include "qcurv/interactions.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <doctest.h>

#include <cmath>

using namespace qcurv;

namespace {

Point on_axis(int n, double d, int k = 0) {
    Point x(n, 0.0);
    x[k] = d;
    return x;
}

// int_0^inf r^{n-1} (r^2 - 1)(1 + r^2)^{-gamma'-1} dr times |S^{n-1}| (n+2s)/2
double A2_oracle(const ProblemParams& P) {
    auto f = [&](double r) {
        return std::pow(r, P.n - 1) * (r * r - 1) * std::pow(1 + r * r, -P.gamma_s_dual - 1);
    };
    double I = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, 0.0, std::numeric_limits<double>::infinity(), 15, 1e-13);
    return 0.5 * (P.n + 2 * P.sigma) * sphere_area(P.n - 1) * I;
}

}  // namespace

TEST_CASE("signs of the interaction constants") {
    for (auto [n, s] : {std::pair{5, 1.5}, std::pair{7, 2.5}, std::pair{6, 1.25}}) {
        auto P = derive_params(n, s);
        auto C = interaction_constants(P);
        CHECK(C.A1 > 0.0);
        CHECK(C.A2 > 0.0);
        CHECK(C.A3 < 0.0);
        CHECK(method_name(C.method) == "closed_integral");
    }
}

TEST_CASE("A2 against a Gauss-Kronrod evaluation of the radial integral") {
    for (auto [n, s] : {std::pair{5, 1.5}, std::pair{7, 2.5}}) {
        auto P = derive_params(n, s);
        CHECK(const_A2(P) == doctest::Approx(A2_oracle(P)).epsilon(1e-9));
    }
}

TEST_CASE("oracle fit reproduces A2") {
    for (auto [n, s] : {std::pair{5, 1.5}, std::pair{7, 2.5}}) {
        auto P = derive_params(n, s);
        auto C = interaction_constants(P);
        auto f = oracle_fit(P);
        CHECK(f.A2 == doctest::Approx(C.A2).epsilon(0.02));
        CHECK(f.A3 < 0.0);
        CHECK(f.A2_samples.size() == f.lambdas.size());
        auto K = as_constants(f, C.A1);
        CHECK(method_name(K.method) == "oracle_fit");
    }
}

TEST_CASE("Psi") {
    auto P = derive_params(5, 1.5);
    CHECK(std::abs(psi(0.0, P)) <= 1e-10);
    std::vector<double> x, y;
    for (double l = 6; l <= 12; l += 0.5) {
        x.push_back(l);
        y.push_back(psi(l, P));
    }
    CHECK(fit_log(x, y).slope == doctest::Approx(-P.gamma_s).epsilon(0.03));
    // the lambda interaction carries the sphere area from the angular integral
    double l2 = std::exp(-8.0);
    double I = interaction_lambda(1.0, l2, P);
    CHECK(I == doctest::Approx(-sphere_area(P.n - 1) * psi(8.0, P)).epsilon(0.02));
    CHECK(interaction_lambda(l2, 1.0, P) == doctest::Approx(sphere_area(P.n - 1) * psi(8.0, P) / l2).epsilon(0.02));
}

TEST_CASE("far-away interactions") {
    for (auto [n, s] : {std::pair{5, 1.5}, std::pair{7, 2.5}}) {
        auto P = derive_params(n, s);
        std::vector<double> ld, lv;
        for (double d : {2.0, 4.0, 8.0}) {
            ld.push_back(std::log(d));
            lv.push_back(std::log(interaction_faraway(1e-2, 1e-2, on_axis(n, d), 0, P)));
            CHECK(std::abs(interaction_faraway(1e-2, 1e-2, on_axis(n, d), 2, P)) < 1e-12);
        }
        CHECK(fit_line(ld, lv).slope == doctest::Approx(2 * s - n).epsilon(0.02));
    }
}

TEST_CASE("cokernel Gram matrix") {
    auto P = derive_params(5, 1.5);
    int m = P.n + 1;
    auto T = make_tower(0, Point(5, 0.0), 1.0, 1.0, P, 4);
    auto G = gram_cokernels(T, P);
    REQUIRE(G.size() == static_cast<std::size_t>(5 * m));
    for (int j = 0; j < 5; ++j)
        for (int jp = 0; jp < 5; ++jp)
            for (int l = 1; l <= P.n; ++l)
                for (int lp = 1; lp <= P.n; ++lp)
                    if (l != lp) CHECK(std::abs(G[j * m + l][jp * m + lp]) < 1e-9);
    std::vector<double> dt, g0, g1;
    for (int j = 1; j < 5; ++j) {
        dt.push_back(T.t_level(j) - T.t_level(0));
        g0.push_back(std::abs(G[0][j * m]));
        g1.push_back(std::abs(G[1][j * m + 1]));
    }
    std::vector<double> dt2(dt.begin() + 1, dt.end()), g02(g0.begin() + 1, g0.end()), g12(g1.begin() + 1, g1.end());
    CHECK(fit_log(dt2, g02).slope == doctest::Approx(-P.gamma_s).epsilon(0.1));
    CHECK(fit_log(dt2, g12).slope == doctest::Approx(-(P.gamma_s + 1)).epsilon(0.1));
    for (int j = 0; j < 5; ++j)
        for (int jp = 0; jp < 5; ++jp) CHECK(G[j * m][jp * m] == doctest::Approx(G[jp * m][j * m]).epsilon(1e-8));
}
