#include "qcurv/bubbles.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace qcurv;

namespace {

Point e(int n, int k, double s = 1.0) {
    Point x(n, 0.0);
    x[k] = s;
    return x;
}

}  // namespace

TEST_CASE("bubble values") {
    auto P = derive_params(5, 1.5);
    Bubble b{1.0, Point(5, 0.0)};
    CHECK(bubble_eval(Point(5, 0.0), b, P) == doctest::Approx(2.0));
    Bubble c{0.3, {0.1, -0.2, 0.0, 0.5, 0.0}};
    for (double R : {1e3, 1e4}) {
        Point x = c.center;
        x[2] += R;
        CHECK(bubble_eval(x, c, P) * std::pow(R, 2 * P.gamma_s) == doctest::Approx(std::pow(0.6, P.gamma_s)).epsilon(1e-5));
    }
    std::mt19937_64 rng(3);
    std::normal_distribution<double> N;
    for (int k = 0; k < 10; ++k) {
        Point d1(5), d2(5);
        for (int l = 0; l < 5; ++l) {
            d1[l] = N(rng);
            d2[l] = N(rng);
        }
        double s = norm(d1) / norm(d2);
        Point x1 = c.center, x2 = c.center;
        for (int l = 0; l < 5; ++l) {
            x1[l] += d1[l];
            x2[l] += s * d2[l];
        }
        CHECK(bubble_eval(x1, c, P) == doctest::Approx(bubble_eval(x2, c, P)).epsilon(1e-12));
    }
}

TEST_CASE("bubble derivatives by central differences") {
    auto P = derive_params(5, 1.5);
    Bubble b{0.7, {0.2, 0.0, -0.1, 0.0, 0.3}};
    Point x{0.5, 0.4, 0.3, -0.2, 0.1};
    double h = 1e-5;
    Bubble bp = b, bm = b;
    bp.lambda += h;
    bm.lambda -= h;
    CHECK(bubble_dlambda(x, b, P) == doctest::Approx((bubble_eval(x, bp, P) - bubble_eval(x, bm, P)) / (2 * h)).epsilon(1e-7));
    for (int l = 0; l < 5; ++l) {
        Point xp = x, xm = x;
        xp[l] += h;
        xm[l] -= h;
        CHECK(bubble_dx(x, b, l, P) == doctest::Approx((bubble_eval(xp, b, P) - bubble_eval(xm, b, P)) / (2 * h)).epsilon(1e-7));
    }
}

TEST_CASE("cylindrical transform") {
    auto P = derive_params(5, 1.5);
    RadialFn us = [&](double r) { return bubble_eval(e(5, 0, r), Bubble{1.0, Point(5, 0.0)}, P); };
    CHECK(ef_forward(us, 0.0, P) == doctest::Approx(1.0));
    for (double t : {-3.0, -0.5, 0.7, 4.0}) CHECK(ef_forward(us, t, P) == doctest::Approx(std::pow(std::cosh(t), -P.gamma_s)).epsilon(1e-12));
    RadialFn v = [](double t) { return 1.0 + 0.3 * std::sin(t); };
    for (double t : {-2.0, 0.1, 1.3, 5.0}) {
        RadialFn back = [&](double r) { return ef_inverse(v, e(5, 1, r), P); };
        CHECK(ef_forward(back, t, P) == doctest::Approx(v(t)).epsilon(1e-12));
    }
    double a = 0.8;
    RadialFn ucyl = [&](double r) { return a * std::pow(r, -P.gamma_s); };
    for (double t : {-4.0, 0.0, 3.0, 9.0}) CHECK(ef_forward(ucyl, t, P) == doctest::Approx(a).epsilon(1e-12));
}

TEST_CASE("towers") {
    auto P = derive_params(5, 1.5);
    Point c(5, 0.0);
    auto T0 = make_tower(0, c, 2.0, 1.0, P, 0);
    Point x{0.3, 0.1, 0.0, 0.0, 0.0};
    CHECK(tower_eval(x, T0, true, P) == doctest::Approx(bubble_eval(x, T0.bubble(0), P)));

    auto T = make_tower(0, c, 1.5, 1.3, P, 6);
    for (double t : {-1.0, 0.5, 2.0, 4.5, 9.0}) {
        double r = std::exp(-t);
        double ef = std::pow(r, P.gamma_s) * tower_eval(e(5, 2, r), T, true, P);
        CHECK(ef == doctest::Approx(tower_ef(t, T.L, T.J, T.R, true, P)).epsilon(1e-10));
    }
    for (int J : {1, 3, 5}) {
        auto A = make_tower(0, c, 1.5, 1.0, P, J), B = make_tower(0, c, 1.5, 1.0, P, J + 1);
        double d = tower_eval(e(5, 0), B, true, P) - tower_eval(e(5, 0), A, true, P);
        CHECK(d >= 0.0);
        CHECK(d <= std::pow(2 * B.lambda(J + 1), P.gamma_s) + 1e-14);
    }
    for (int j = 1; j <= T.J; ++j) CHECK(T.lambda(j) < T.lambda(j - 1));
}

TEST_CASE("tower admissibility") {
    auto P = derive_params(5, 1.5);
    auto T = make_tower(0, Point(5, 0.0), 2.0, 1.0, P, 2);
    T.r = {0.1, 0.0, 0.0};
    CHECK_NOTHROW(validate_tower(T, P));
    T.r = {0.9, 0.0, 0.0};
    CHECK_THROWS_AS(validate_tower(T, P), ParamError);
    T.r.clear();
    T.a = {Point(5, 0.0), Point(5, 0.0)};
    CHECK_THROWS_AS(validate_tower(T, P), ParamError);
    T.a = {Point(5, 0.0), Point(5, 0.0), e(5, 0, 1.0)};
    CHECK_THROWS_AS(validate_tower(T, P), ParamError);
    CHECK_THROWS_AS(make_tower(0, Point(4, 0.0), 2.0, 1.0, P), ParamError);
    CHECK_THROWS_AS(make_tower(0, Point(5, 0.0), -1.0, 1.0, P), ParamError);
    CHECK(default_truncation(2.0, P) >= 1);
}

TEST_CASE("kernel elements") {
    auto P = derive_params(5, 1.5);
    auto T = make_tower(0, Point(5, 0.0), 1.0, 1.2, P, 3);
    T.a = {Point(5, 0.0), e(5, 1, 1e-3), Point(5, 0.0), Point(5, 0.0)};
    validate_tower(T, P);
    for (int j = 0; j <= 2; ++j)
        for (int l = 1; l <= 5; ++l) {
            CHECK(std::abs(kernel_Z(T.level_center(j), {0, j, l}, T, P)) < 1e-10);
            CHECK(std::abs(cokernel_Zbar(T.level_center(j), {0, j, l}, T, P)) < 1e-10);
        }

    Point x{0.2, -0.1, 0.05, 0.0, 0.1};
    for (int j = 0; j <= 2; ++j) {
        double h = 1e-5;
        auto Tp = T, Tm = T;
        Tp.r = Tm.r = std::vector<double>(T.J + 1, 0.0);
        Tp.r[j] = h;
        Tm.r[j] = -h;
        double fd = (tower_eval(x, Tp, true, P) - tower_eval(x, Tm, true, P)) / (2 * h);
        double z = kernel_Z(x, {0, j, 0}, T, P);
        CHECK(std::abs(z - fd) <= 1e-6 * std::max(1.0, std::abs(z)));
        for (int l = 1; l <= 5; ++l) {
            auto Ap = T, Am = T;
            double lam = T.lambda(j), hh = 1e-5 * lam;
            Ap.a[j][l - 1] += hh;
            Am.a[j][l - 1] -= hh;
            double fdx = lam * (tower_eval(x, Ap, true, P) - tower_eval(x, Am, true, P)) / (2 * hh);
            double zl = kernel_Z(x, {0, j, l}, T, P);
            CHECK(std::abs(zl - fdx) <= 1e-6 * std::max(1.0, std::abs(zl)));
        }
    }

    for (double R : {1.0, 3.0, 10.0, 100.0})
        for (int j = 0; j <= 3; ++j) {
            Point y = e(5, 3, R);
            double lam = T.lambda(j);
            double Z = kernel_Z(y, {0, j, 0}, T, P);
            CHECK(std::abs(Z) <= 2 * P.gamma_s * std::pow(2.0, P.gamma_s) * std::pow(R, -2 * P.gamma_s) * std::pow(lam, P.gamma_s));
            double Zb = cokernel_Zbar(y, {0, j, 0}, T, P);
            CHECK(Zb * Z >= 0.0);
            CHECK(std::abs(Zb) <= 2 * P.c_ns * P.nonlin_exp * std::pow(2.0, 5 * P.gamma_s) * P.gamma_s *
                                        std::pow(R, -(P.n + 2 * P.sigma)) * std::pow(lam, P.gamma_s));
        }
    CHECK_THROWS_AS(kernel_Z(x, {0, 9, 0}, T, P), ParamError);
    CHECK_THROWS_AS(kernel_Z(x, {0, 0, 6}, T, P), ParamError);
}
