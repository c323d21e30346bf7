#include "qcurv/delaunay.hpp"
#include "qcurv/kernels.hpp"
#include "qcurv/quadrature.hpp"
#include "qcurv/zonal.hpp"

#include <doctest.h>

#include <cmath>
#include <sstream>

using namespace qcurv;

namespace {

const ProblemParams& P5() {
    static ProblemParams P = derive_params(5, 1.5);
    return P;
}

// kappa int_R Rhat(t - tau) c v(tau)^p dtau over the real line with v extended periodically
double fixed_point_rhs(const CylSolution& s, double t) {
    const auto& P = P5();
    double kappa = calibrated_kappa(P);
    std::vector<double> pts;
    for (double x = t - 40.0; x <= t + 40.0 + 1e-9; x += s.L) pts.push_back(x);
    QuadOptions o;
    o.rel_tol = 1e-10;
    o.max_intervals = 20000;
    auto f = [&](double tau) { return riesz_kernel_cyl(t - tau, P, 1e-12) * f_sigma(P, s.eval(tau)); };
    return kappa * integrate_breaks(f, pts, o).value;
}

}  // namespace

TEST_CASE("periodic solution is positive, even and converged") {
    const auto& P = P5();
    for (double L : {2.5, 3.0, 4.0}) {
        auto s = solve_periodic(L, P, 400, 1e-10);
        CHECK(s.residual_norm <= 1e-10);
        for (double v : s.v) CHECK(v > 0.0);
        for (double t = 0.0; t <= L; t += L / 17) CHECK(std::abs(s.eval(t) - s.eval(-t)) <= 1e-9);
        CHECK(s.eval(0.3) == doctest::Approx(s.eval(0.3 + 2 * L)).epsilon(1e-12));
        CHECK_FALSE(is_constant_solution(s));
    }
}

TEST_CASE("fixed point of the calibrated convolution on the line") {
    auto s = solve_periodic(3.0, P5(), 800, 1e-11);
    for (double t : {0.0, 0.8, 1.9, 3.0}) CHECK(fixed_point_rhs(s, t) == doctest::Approx(s.eval(t)).epsilon(1e-5));
}

TEST_CASE("neck size against the tower prefactor") {
    // neck -> sum_{j} cosh((2j+1)L)^{-gamma} ~ 2 * 2^gamma e^{-gamma L}
    const auto& P = P5();
    for (double L : {4.0, 5.0}) {
        auto s = solve_periodic(L, P, 400, 1e-10);
        CHECK(s.neck * std::exp(P.gamma_s * L) / (2 * std::pow(2.0, P.gamma_s)) == doctest::Approx(1.0).epsilon(0.05));
    }
}

TEST_CASE("short periods collapse to the constant solution") {
    auto s = solve_periodic(2.0, P5(), 400, 1e-10);
    CHECK(is_constant_solution(s));
}

TEST_CASE("transfer to R^n") {
    const auto& P = P5();
    auto s = solve_periodic(3.0, P, 400, 1e-10);
    Point x{0.0, 1.0, 0.0, 0.0, 0.0};
    CHECK(delaunay_to_rn(s, x, P) == doctest::Approx(s.neck));
    double vmax = *std::max_element(s.v.begin(), s.v.end());
    for (double r : {0.01, 0.2, 0.7, 3.0}) {
        Point y{r * 0.6, 0.0, r * 0.8, 0.0, 0.0};
        CHECK(delaunay_to_rn(s, y, P) <= std::pow(r, -P.gamma_s) * vmax * (1 + 1e-12));
        Point z = y;
        for (auto& c : z) c *= std::exp(-2 * s.L);
        CHECK(delaunay_to_rn(s, z, P) == doctest::Approx(std::exp(2 * s.L * P.gamma_s) * delaunay_to_rn(s, y, P)).epsilon(1e-10));
    }
    CHECK_THROWS_AS(delaunay_to_rn(s, Point(5, 0.0), P), ParamError);
}

TEST_CASE("neck sweep") {
    const auto& P = P5();
    auto sw = neck_sweep({2.5, 3.0, 3.5, 4.0, 5.0}, P, 400, 1e-10, 1);
    REQUIRE(sw.fitted);
    CHECK(sw.slope_eps == doctest::Approx(-P.gamma_s).epsilon(0.05));
    CHECK(sw.slope_psi < -1.05 * P.gamma_s);
    for (std::size_t i = 1; i < sw.rows.size(); ++i) CHECK(sw.rows[i].eps < sw.rows[i - 1].eps);
    std::ostringstream os;
    write_sweep_csv(os, sw);
    CHECK(os.str().rfind("L,eps,psi_sup,resid,iters,constant\n", 0) == 0);
    CHECK_THROWS_AS(neck_sweep({3.0, 2.0, 4.0}, P), ParamError);
    CHECK_THROWS_AS(neck_sweep({3.0, 4.0}, P), ParamError);
}
