#include "qcurv/interactions.hpp"

#include "qcurv/kernels.hpp"
#include "qcurv/quadrature.hpp"

#include <algorithm>
#include <cmath>

namespace qcurv {

namespace {

// int_0^inf r^{n-1} g(r) dr through r = e^s
QuadResult radial_log(const ProblemParams& P, const std::function<double(double)>& g, std::vector<double> breaks,
                      double tol, double abs_tol = 0.0) {
    std::sort(breaks.begin(), breaks.end());
    breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());
    Fn1 f = [&](double s) {
        double r = std::exp(s);
        return std::pow(r, P.n) * g(r);
    };
    QuadOptions opt;
    opt.rel_tol = tol;
    opt.abs_tol = abs_tol;
    opt.max_intervals = 20000;
    return integrate_breaks(f, breaks, opt);
}

std::vector<double> around(double c, std::initializer_list<double> offs) {
    std::vector<double> v;
    for (double o : offs) v.push_back(c + o);
    return v;
}

struct Norm {
    double kb;  // 2 or 1 inside the bubble
    double kf;  // c or 1 in f'
};

Norm norm_of(const ProblemParams& P, Normalization nrm) {
    return nrm == Normalization::standard ? Norm{2.0, P.c_ns} : Norm{1.0, 1.0};
}

double bub(double r, double l, const ProblemParams& P, const Norm& N) {
    return std::pow(N.kb * l / (l * l + r * r), P.gamma_s);
}

double dbub_dl(double r, double l, const ProblemParams& P, const Norm& N) {
    double d = l * l + r * r;
    return bub(r, l, P, N) * P.gamma_s * (r * r - l * l) / (l * d);
}

double dbub_dr(double r, double l, const ProblemParams& P, const Norm& N) {
    return -2.0 * P.gamma_s * r / (l * l + r * r) * bub(r, l, P, N);
}

double fprime(double u, const ProblemParams& P, const Norm& N) {
    return N.kf * P.nonlin_exp * std::pow(u, P.nonlin_exp - 1.0);
}

}  // namespace

double const_A1(const ProblemParams& P, double tol) {
    auto g = [&](double r) {
        return 1.0 / (std::pow(r, 2.0 * P.gamma_s) * std::pow(1.0 + r * r, P.gamma_s_dual) + 1.0);
    };
    QuadResult q = radial_log(P, g, {-40.0, -10.0, -3.0, 0.0, 3.0, 10.0, 40.0}, tol);
    return (P.n + 2.0 * P.sigma) * (P.n - 2.0 * P.sigma) / P.n * sphere_area(P.n - 1) * q.value;
}

double const_A2(const ProblemParams& P, double tol) {
    auto g = [&](double r) { return (r * r - 1.0) * std::pow(1.0 + r * r, -P.gamma_s_dual - 1.0); };
    double top = 40.0 / P.sigma + 5.0;
    QuadResult q = radial_log(P, g, {-40.0, -3.0, 0.0, 3.0, 10.0, top}, tol);
    return 0.5 * (P.n + 2.0 * P.sigma) * sphere_area(P.n - 1) * q.value;
}

double const_A3(const ProblemParams& P, double tol) {
    auto g = [&](double r) { return r * r * std::pow(1.0 + r * r, -P.gamma_s_dual - 1.0); };
    double top = 40.0 / P.sigma + 5.0;
    QuadResult q = radial_log(P, g, {-40.0, -3.0, 0.0, 3.0, 10.0, top}, tol);
    double k = P.n - 2.0 * P.sigma;
    return -k * k / P.n * sphere_area(P.n - 1) * q.value;
}

InteractionConstants interaction_constants(const ProblemParams& P, double tol) {
    InteractionConstants c;
    c.A1 = const_A1(P, tol);
    c.A2 = const_A2(P, tol);
    c.A3 = const_A3(P, tol);
    c.method = ConstMethod::closed_integral;
    c.est_error = tol;
    return c;
}

double interaction_lambda(double l1, double l2, const ProblemParams& P, double tol, Normalization nrm) {
    if (!(l1 > 0.0 && l2 > 0.0)) throw ParamError("interaction_lambda: scales must be positive");
    Norm N = norm_of(P, nrm);
    auto g = [&](double r) {
        return fprime(bub(r, l1, P, N), P, N) * bub(r, l2, P, N) * dbub_dl(r, l1, P, N);
    };
    double a = std::log(l1), b = std::log(l2);
    std::vector<double> br = around(a, {-1.0, 0.0, 1.0});
    for (double x : around(b, {-1.0, 0.0, 1.0})) br.push_back(x);
    br.push_back(std::min(a, b) - 40.0);
    br.push_back(std::max(a, b) + 40.0);
    QuadResult q = radial_log(P, g, br, tol, 1e-300);
    return sphere_area(P.n - 1) * q.value;
}

double interaction_faraway(double l1, double l3, const Point& x2, int mode, const ProblemParams& P, double tol,
                           Normalization nrm) {
    if (!(l1 > 0.0 && l3 > 0.0)) throw ParamError("interaction_faraway: scales must be positive");
    if (static_cast<int>(x2.size()) != P.n) throw ParamError("interaction_faraway: x2 must lie in R^n");
    if (mode < 0 || mode > P.n) throw ParamError("interaction_faraway: mode out of range");
    double d = norm(x2);
    if (!(d > 0.0)) throw ParamError("interaction_faraway: centers coincide");
    double dir = 1.0;
    if (mode >= 1) {
        dir = x2[mode - 1] / d;
        if (dir == 0.0) return 0.0;  // angular factor integrates to zero
    }
    static thread_local std::unique_ptr<CylKernel> K;
    if (!K || K->params().n != P.n || K->params().sigma != P.sigma)
        K = std::make_unique<CylKernel>(P, KernelKind::riesz, 1, 1e-11);
    Norm N = norm_of(P, nrm);
    int k = mode == 0 ? 0 : 1;
    auto g = [&](double r) {
        double w = mode == 0 ? dbub_dl(r, l1, P, N) : dbub_dr(r, l1, P, N);
        w *= fprime(bub(r, l1, P, N), P, N);
        double delta = (l3 * l3 + (r - d) * (r - d)) / (2.0 * r * d);
        // |S^{n-2}| int w U3 = (kb l3)^gamma (r d)^{-gamma} G_k(delta)
        double ang = std::pow(N.kb * l3 / (r * d), P.gamma_s) * K->value_delta(delta, k);
        return w * ang;
    };
    double a = std::log(l1), ld = std::log(d), w3 = l3 / d;
    std::vector<double> br = around(a, {-30.0, -3.0, -1.0, 0.0, 1.0, 3.0});
    for (double x : around(ld, {-1.0, -10 * w3, -w3, 0.0, w3, 10 * w3, 1.0, 40.0})) br.push_back(x);
    QuadResult q = radial_log(P, g, br, tol, 1e-300);
    return dir * q.value;
}

OracleFit oracle_fit(const ProblemParams& P, double d, const std::vector<double>& lambdas, double tol) {
    if (lambdas.size() < 2) throw ParamError("oracle_fit: need two scales");
    OracleFit f;
    f.d = d;
    f.lambdas = lambdas;
    Point x2(P.n, 0.0);
    x2[0] = d;
    double e = 2.0 * P.sigma - P.n;
    for (double l : lambdas) {
        double i0 = interaction_faraway(l, l, x2, 0, P, tol, Normalization::unit);
        double i1 = interaction_faraway(l, l, x2, 1, P, tol, Normalization::unit);
        double lg = std::pow(l * l, P.gamma_s);
        f.A2_samples.push_back(i0 / (std::pow(d, e) * lg / l));
        f.A3_samples.push_back(i1 / (std::pow(d, e - 1.0) * lg));
    }
    // f(l) = A + B l^2 through the two smallest scales
    std::size_t m = lambdas.size();
    double la = lambdas[m - 2] * lambdas[m - 2], lb = lambdas[m - 1] * lambdas[m - 1];
    auto extrap = [&](const std::vector<double>& s) { return (s[m - 1] * la - s[m - 2] * lb) / (la - lb); };
    f.A2 = extrap(f.A2_samples);
    f.A3 = extrap(f.A3_samples);
    double l = lambdas.back();
    double standard = interaction_faraway(l, l, x2, 0, P, tol, Normalization::standard);
    double unit = interaction_faraway(l, l, x2, 0, P, tol, Normalization::unit);
    f.standard_factor = standard / unit;
    return f;
}

InteractionConstants as_constants(const OracleFit& f, double A1) {
    InteractionConstants c;
    c.A1 = A1;
    c.A2 = f.A2;
    c.A3 = f.A3;
    c.method = ConstMethod::oracle_fit;
    double e2 = std::abs(f.A2_samples.back() - f.A2) / std::abs(f.A2);
    double e3 = std::abs(f.A3_samples.back() - f.A3) / std::abs(f.A3);
    c.est_error = std::max(e2, e3);
    return c;
}

ConstantsComparison compare_constants(const InteractionConstants& closed, const OracleFit& fit, double rel) {
    ConstantsComparison c;
    c.rel_A2 = std::abs(fit.A2 - closed.A2) / std::abs(closed.A2);
    c.rel_A3 = std::abs(fit.A3 - closed.A3) / std::abs(closed.A3);
    c.agree = c.rel_A2 <= rel && c.rel_A3 <= rel;
    return c;
}

void certify_constants(const InteractionConstants& closed, const OracleFit& fit, double rel) {
    ConstantsComparison c = compare_constants(closed, fit, rel);
    if (!c.agree)
        throw ConstantsMismatch("closed integral and oracle fit disagree: A2 rel " + std::to_string(c.rel_A2) +
                                ", A3 rel " + std::to_string(c.rel_A3));
}

double fit_A0(const ProblemParams& P, double ratio, double tol) {
    if (!(ratio > 0.0 && ratio < 1.0)) throw ParamError("fit_A0: ratio must lie in (0, 1)");
    Norm N{1.0, 1.0};
    double g = P.gamma_s, n = P.n;
    auto lap = [&](double r) {
        double q = 1.0 + r * r;
        return -2.0 * g * n * std::pow(q, -g - 1.0) + 4.0 * g * (g + 1.0) * r * r * std::pow(q, -g - 2.0);
    };
    auto f = [&](double r) { return std::pow(bub(r, ratio, P, N), P.nonlin_exp) * lap(r); };
    double a = std::log(ratio);
    QuadResult q = radial_log(P, f, {a - 30.0, a - 1.0, a, a + 1.0, 0.0, 40.0}, tol, 1e-300);
    double h2 = sphere_area(P.n - 1) * q.value / n;
    return -h2 / std::pow(ratio, g);
}

double psi(double ell, const ProblemParams& P, double tol) {
    Fn1 f = [&](double t) {
        double v = v_sph(t, P);
        return df_sigma(P, v) * v_sph(t + ell, P) * v_sph_prime(t, P);
    };
    double T = 40.0 / (2.0 * P.sigma) + 10.0;
    std::vector<double> br{-std::abs(ell) - T, -std::abs(ell), 0.0, std::abs(ell), std::abs(ell) + T};
    br.erase(std::unique(br.begin(), br.end()), br.end());
    QuadOptions opt;
    opt.rel_tol = tol;
    opt.abs_tol = 1e-15;
    return integrate_breaks(f, br, opt).value;
}

std::vector<std::vector<double>> gram_cokernels(const TowerConfig& cfg, const ProblemParams& P, double tol) {
    validate_tower(cfg, P);
    if (cfg.J > 6) throw ParamError("gram_cokernels: J must not exceed 6");
    for (const Point& a : cfg.a)
        if (norm(a) != 0.0) throw ParamError("gram_cokernels: tower must be untranslated");
    int J = cfg.J, m = P.n + 1, dim = (J + 1) * m;
    std::vector<std::vector<double>> G(dim, std::vector<double>(dim, 0.0));
    auto at = [&](double r) {
        Point x = cfg.center;
        x[0] += r;
        return x;
    };
    double lo = std::log(cfg.lambda(J)) - 30.0, hi = std::log(cfg.lambda(0)) + 30.0;
    double area = sphere_area(P.n - 1);
    for (int j = 0; j <= J; ++j)
        for (int jp = 0; jp <= J; ++jp) {
            std::vector<double> br{lo, hi};
            for (int q : {j, jp})
                for (double o : {-1.0, 0.0, 1.0}) br.push_back(std::log(cfg.lambda(q)) + o);
            auto g0 = [&](double r) {
                Point x = at(r);
                return cokernel_Zbar(x, {cfg.index, j, 0}, cfg, P) * kernel_Z(x, {cfg.index, jp, 0}, cfg, P);
            };
            auto g1 = [&](double r) {
                Point x = at(r);
                return cokernel_Zbar(x, {cfg.index, j, 1}, cfg, P) * cokernel_Zbar(x, {cfg.index, jp, 1}, cfg, P);
            };
            double v0 = area * radial_log(P, g0, br, tol, 1e-300).value;
            double v1 = area / P.n * radial_log(P, g1, br, tol, 1e-300).value;
            G[j * m][jp * m] = v0;
            for (int l = 1; l <= P.n; ++l) G[j * m + l][jp * m + l] = v1;
        }
    return G;
}

std::string method_name(ConstMethod m) { return m == ConstMethod::closed_integral ? "closed_integral" : "oracle_fit"; }

}  // namespace qcurv
