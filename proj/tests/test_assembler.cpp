#include "qcurv/assembler.hpp"
#include "qcurv/interactions.hpp"
#include "qcurv/zonal.hpp"

#include <doctest.h>

#include <cmath>
#include <memory>

using namespace qcurv;

namespace {

const ProblemParams& P5() {
    static ProblemParams P = derive_params(5, 1.5);
    return P;
}

Point pt(double a, double b = 0.0, double c = 0.0) { return {a, b, c, 0.0, 0.0}; }

struct Pair {
    SingularSet S;
    BalancedConfig B;
    std::shared_ptr<const ApproxSolution> u;
    std::unique_ptr<ResidualField> F;
};

// N = 2 at -e1, e1, balanced at L = 3
const Pair& pair3() {
    static Pair p = [] {
        const auto& P = P5();
        Pair q;
        q.S = make_singular_set({pt(-1), pt(1)}, P);
        q.B = balance(q.S, {1.0, 1.0}, 3.0, interaction_constants(P), P);
        q.u = std::make_shared<const ApproxSolution>(assemble(q.S, q.B, {}, P));
        q.F = std::make_unique<ResidualField>(q.u);
        return q;
    }();
    return p;
}

}  // namespace

TEST_CASE("single point reduces to the Delaunay solution") {
    const auto& P = P5();
    auto u = assemble_single(pt(0), 3.0, 1.0, P);
    for (double r : {1e-3, 0.05, 0.2, 0.5})
        for (Point d : {pt(1), pt(0, 1), pt(0.6, 0.8)}) {
            Point x = d;
            for (auto& c : x) c *= r;
            double ref = delaunay_to_rn(*u.delaunay[0], x, P);
            CHECK(std::abs(u.eval(x) - ref) <= 1e-12 * ref);
        }
}

TEST_CASE("Delaunay residual through the radial dual") {
    const auto& P = P5();
    auto u = assemble_single(pt(0), 3.0, 1.0, P);
    const CylSolution& s = *u.delaunay[0];
    RadialFn ud = [&](double r) { return std::pow(r, -P.gamma_s) * s.eval(-std::log(r)); };
    for (double r : {0.004, 0.1, 0.45, 2.0, 30.0}) {
        Point x = pt(0, r);
        CHECK(dual_apply_radial(ud, pt(0), x, P, 1e-10) == doctest::Approx(ud(r)).epsilon(1e-6));
    }
}

TEST_CASE("single point without cutoff has zero residual") {
    const auto& P = P5();
    AssembleOptions opt;
    opt.cutoff = Cutoff::none();
    auto u = std::make_shared<const ApproxSolution>(assemble_single(pt(0), 3.0, 1.0, P, opt));
    ResidualField F(u);
    for (Point x : {pt(0.01), pt(0.3, 0.2), pt(0, 0.9), pt(5, -2)}) CHECK(std::abs(F.residual(x)) <= 1e-9 * u->eval(x));
    auto smp = make_samples(*u);
    auto rep = residual(F, default_weight(P), smp, 0);
    CHECK(rep.weighted <= 1e-9);
}

TEST_CASE("cutoff and partition") {
    Cutoff c;
    CHECK(c(0.2) == 1.0);
    CHECK(c(0.5) == 1.0);
    CHECK(c(1.0) == 0.0);
    double prev = 1.0;
    for (double r = 0.5; r <= 1.0; r += 0.01) {
        CHECK(c(r) <= prev);
        prev = c(r);
    }
    CHECK(Cutoff::none()(5.0) == 1.0);

    const auto& p = pair3();
    for (Point x : {pt(-0.9, 0.1), pt(0.0, 0.5), pt(1.7), pt(0.2, -1.3)}) {
        double s = 0.0;
        for (int i = 0; i < 2; ++i) {
            Point dx = x;
            for (int l = 0; l < 5; ++l) dx[l] -= p.S.points[i][l];
            double psi, comp;
            p.u->partition_local(i, dx, &psi, &comp);
            CHECK(psi >= 0.0);
            CHECK(psi <= 1.0);
            CHECK(psi + comp == doctest::Approx(1.0));
            s += psi;
        }
        CHECK(s == doctest::Approx(1.0));
    }
    for (double r : {1e-4, 0.1, 0.45}) {
        Point x = pt(-1 + r * 0.6, r * 0.8);
        CHECK(p.u->eval(x) == doctest::Approx(p.u->raw_sum(0, x)).epsilon(1e-13));
    }
}

TEST_CASE("leading behavior near and far") {
    const auto& P = P5();
    const auto& p = pair3();
    for (int i = 0; i < 2; ++i) {
        const CylSolution& s = *p.u->delaunay[i];
        double vmax = *std::max_element(s.v.begin(), s.v.end());
        double Li = p.u->towers[i].L;
        for (double lr = 0.7; lr <= 2 * Li; lr += 0.4) {
            double r = std::exp(-lr);
            Point x = p.S.points[i];
            x[1] += r;
            double w = p.u->eval(x) * std::pow(r, P.gamma_s);
            CHECK(w >= s.neck / 2);
            CHECK(w <= 2 * vmax);
        }
    }
    double lead = 0.0;
    for (const auto& t : p.u->towers)
        for (int j = 0; j <= t.J; ++j) lead += std::pow(2 * t.lambda(j), P.gamma_s);
    for (Point d : {pt(1), pt(0, 1), pt(0.6, 0.8)}) {
        Point x = d;
        for (auto& c : x) c *= 50.0;
        CHECK(p.u->eval(x) * std::pow(50.0, 2 * P.gamma_s) == doctest::Approx(lead).epsilon(0.05));
    }
}

TEST_CASE("assembly rejects bad input") {
    const auto& P = P5();
    auto C = interaction_constants(P);
    auto S3 = make_singular_set({pt(0), pt(3), pt(0, 3)}, P);
    auto B3 = balance(S3, {1.0, 1.0, 1.0}, 3.0, C, P);
    CHECK_THROWS_AS(assemble(S3, B3, {}, P), ParamError);
    const auto& p = pair3();
    AssembleOptions bad;
    bad.cutoff.inner = 1.2;
    CHECK_THROWS_AS(assemble(p.S, p.B, {}, P, bad), ParamError);
    std::vector<Perturbation> wrong(1);
    CHECK_THROWS_AS(assemble(p.S, p.B, wrong, P), ParamError);
}

TEST_CASE("residual field consistency") {
    const auto& p = pair3();
    for (Point x : {pt(0.0, 0.3), pt(-1.2), pt(1.0, 0.01), pt(4, 4)})
        CHECK(dual_apply(*p.F, x) + p.F->residual(x) == doctest::Approx(p.u->eval(x)).epsilon(1e-12));
    for (double s : {-0.3, 1.0}) {
        auto sc = p.F->spot_check(s, 1e-8);
        CHECK(sc.rel <= 1e-6);
    }
}

TEST_CASE("symmetric beta projections") {
    const auto& P = P5();
    const auto& p = pair3();
    for (int l = 2; l <= P.n; ++l) CHECK(std::abs(beta_projection(*p.F, {0, 0, l})) <= 1e-10);
    double b0 = beta_projection(*p.F, {0, 0, 0}), b1 = beta_projection(*p.F, {1, 0, 0});
    CHECK(b0 == doctest::Approx(b1).epsilon(1e-6));
    CHECK(std::abs(beta00_leading(p.S, p.B.q, p.B.R, interaction_constants(P).A2, 3.0, 0, P)) <= 1e-12);
    CHECK_THROWS_AS(beta_projection(*p.F, {2, 0, 0}), ParamError);
}

TEST_CASE("weights and norms") {
    const auto& P = P5();
    auto w = default_weight(P);
    CHECK(w.zeta1 == doctest::Approx(-0.5));
    CHECK_NOTHROW(validate_weight(w, P));
    WeightSpec bad = w;
    bad.zeta1 = 0.5;
    CHECK_THROWS_AS(validate_weight(bad, P), ParamError);

    WeightSpec star = default_weight(P, WeightKind::star);
    CHECK(star.zeta_near(P) == doctest::Approx(std::min(star.zeta1, -P.gamma_s + star.tau)));
    CHECK(star.zeta_far(P) == doctest::Approx(-(P.n + 2 * P.sigma)));
    CHECK(w.zeta_near(P) == doctest::Approx(P.n + w.tau));
    CHECK(w.zeta_far(P) == doctest::Approx(-P.n + 2 * P.sigma));

    const auto& p = pair3();
    auto smp = make_samples(*p.u, 3);
    for (const auto& kind : {star, w}) {
        std::vector<double> v(smp.size(), 0.0);
        for (std::size_t k = 0; k < smp.size(); ++k)
            if (smp[k].region != Region::far) v[k] = std::pow(smp[k].dist, kind.zeta_near(P));
        CHECK(weighted_fn_norm(smp, v, kind, P) == doctest::Approx(1.0));
        for (double& x : v) x *= 2.0;
        CHECK(weighted_fn_norm(smp, v, kind, P) == doctest::Approx(2.0));
    }
}

TEST_CASE("sample grids") {
    const auto& p = pair3();
    auto a = make_samples(*p.u, 7), b = make_samples(*p.u, 7), c = make_samples(*p.u, 8);
    REQUIRE(a.size() == b.size());
    for (std::size_t k = 0; k < a.size(); ++k) CHECK(a[k].x == b[k].x);
    bool differ = false;
    for (std::size_t k = 0; k < a.size() && k < c.size(); ++k) differ = differ || a[k].x != c[k].x;
    CHECK(differ);
    int counts[3] = {0, 0, 0};
    for (const auto& s : a) {
        counts[static_cast<int>(s.region)]++;
        CHECK(s.region == region_of(s.dist));
    }
    for (int r = 0; r < 3; ++r) CHECK(counts[r] > 0);
    CHECK(std::string(region_name(Region::transition)) == "transition");
}
