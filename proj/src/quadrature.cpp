#include "qcurv/quadrature.hpp"

#include <Eigen/Eigenvalues>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <queue>

namespace qcurv {

namespace {

using GK = boost::math::quadrature::gauss_kronrod<double, 21>;

struct Piece {
    double a, b, value, error, l1;
    bool operator<(const Piece& o) const { return error < o.error; }
};

Piece rule(const Fn1& f, double a, double b) {
    double err = 0.0, l1 = 0.0;
    double v = GK::integrate(f, a, b, 0, 0.0, &err, &l1);
    return {a, b, v, err, l1};
}

}  // namespace

QuadResult integrate_breaks(const Fn1& f, const std::vector<double>& points, const QuadOptions& opt) {
    constexpr double kNoise = 64.0 * std::numeric_limits<double>::epsilon();
    std::priority_queue<Piece> heap;
    double total = 0.0, err = 0.0, frozen = 0.0, mass = 0.0;
    int evals = 0;
    // pieces whose estimate sits at the roundoff level are not refined further
    auto settle = [&](const Piece& p) {
        if (p.error <= kNoise * p.l1) frozen += p.error;
        else {
            err += p.error;
            heap.push(p);
        }
    };
    int count = 0;
    for (std::size_t i = 0; i + 1 < points.size(); ++i) {
        if (!(points[i + 1] > points[i])) continue;
        Piece p = rule(f, points[i], points[i + 1]);
        evals += 21;
        total += p.value;
        mass += p.l1;
        ++count;
        settle(p);
    }
    while (!heap.empty()) {
        double target = std::max(opt.abs_tol, opt.rel_tol * std::abs(total));
        if (err <= target) break;
        if (count >= opt.max_intervals) {
            char buf[160];
            std::snprintf(buf, sizeof buf, "integrate: interval budget exhausted (error %.3g, target %.3g)", err,
                          target);
            throw QuadratureError(buf);
        }
        Piece w = heap.top();
        heap.pop();
        err -= w.error;
        double mid = 0.5 * (w.a + w.b);
        if (!(mid > w.a && mid < w.b)) {
            frozen += w.error;
            continue;
        }
        Piece l = rule(f, w.a, mid);
        Piece r = rule(f, mid, w.b);
        evals += 42;
        total += l.value + r.value - w.value;
        mass += l.l1 + r.l1 - w.l1;
        ++count;
        settle(l);
        settle(r);
    }
    if (!std::isfinite(total)) throw QuadratureError("integrate: non-finite result");
    return {total, std::max(err, 0.0) + frozen, evals};
}

QuadResult integrate(const Fn1& f, double a, double b, const QuadOptions& opt) {
    if (a == b) return {};
    if (b < a) {
        QuadResult r = integrate(f, b, a, opt);
        r.value = -r.value;
        return r;
    }
    return integrate_breaks(f, {a, b}, opt);
}

QuadResult integrate_to_inf(const Fn1& f, double a, const QuadOptions& opt) {
    Fn1 g = [&](double s) {
        if (s >= 1.0) return 0.0;
        double d = 1.0 - s;
        return f(a + s / d) / (d * d);
    };
    return integrate_breaks(g, {0.0, 0.25, 0.5, 0.75, 0.9, 0.99, 1.0}, opt);
}

GaussRule gauss_gegenbauer(int npts, double a) {
    if (npts < 1 || !(a > -1.0)) throw std::invalid_argument("gauss_gegenbauer: bad arguments");
    Eigen::MatrixXd T = Eigen::MatrixXd::Zero(npts, npts);
    for (int k = 1; k < npts; ++k) {
        double s = 2.0 * k + 2.0 * a;
        // k = 1 cancels to 1/(3 + 2a), finite at a = -1/2
        double b = k == 1 ? 1.0 / (3.0 + 2.0 * a) : k * (k + 2.0 * a) / ((s + 1.0) * (s - 1.0));
        T(k, k - 1) = T(k - 1, k) = std::sqrt(b);
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(T);
    double mu0 = std::sqrt(M_PI) * std::tgamma(a + 1.0) / std::tgamma(a + 1.5);
    GaussRule g;
    g.x.resize(npts);
    g.w.resize(npts);
    for (int i = 0; i < npts; ++i) {
        g.x[i] = es.eigenvalues()(i);
        double v = es.eigenvectors()(0, i);
        g.w[i] = mu0 * v * v;
    }
    return g;
}

void gegenbauer_c(double x, double lambda, int mmax, double* out) {
    out[0] = 1.0;
    if (mmax >= 1) out[1] = 2.0 * lambda * x;
    for (int m = 2; m <= mmax; ++m)
        out[m] = (2.0 * x * (m + lambda - 1.0) * out[m - 1] - (m + 2.0 * lambda - 2.0) * out[m - 2]) / m;
}

void zonal_polys(double x, double alpha, int kmax, double* out) {
    if (alpha == 0.0) {
        out[0] = 1.0;
        if (kmax >= 1) out[1] = x;
        for (int k = 2; k <= kmax; ++k) out[k] = 2.0 * x * out[k - 1] - out[k - 2];
        return;
    }
    // normalized recurrence: P_k = ((2k+2a-2) x P_{k-1} - (k-1) P_{k-2}) / (k+2a-1)
    out[0] = 1.0;
    if (kmax >= 1) out[1] = x;
    for (int k = 2; k <= kmax; ++k)
        out[k] = ((2.0 * k + 2.0 * alpha - 2.0) * x * out[k - 1] - (k - 1.0) * out[k - 2]) /
                 (k + 2.0 * alpha - 1.0);
}

}  // namespace qcurv
