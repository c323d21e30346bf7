#include "qcurv/kernels.hpp"

#include "qcurv/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <ostream>
#include <tuple>

namespace qcurv {

namespace {

constexpr double kSeriesSwitch = 0.54308063481524377;  // cosh(1) - 1

double e_of(const ProblemParams& P, KernelKind kind) {
    return kind == KernelKind::riesz ? P.gamma_s : P.gamma_s_dual;
}

const CylKernel& cached_kernel(const ProblemParams& P, KernelKind kind) {
    static std::mutex mu;
    static std::map<std::tuple<int, double, int>, std::unique_ptr<CylKernel>> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto key = std::make_tuple(P.n, P.sigma, static_cast<int>(kind));
    auto it = cache.find(key);
    if (it == cache.end()) it = cache.emplace(key, std::make_unique<CylKernel>(P, kind, 0, 1e-12)).first;
    return *it->second;
}

}  // namespace

CylKernel::CylKernel(const ProblemParams& P, KernelKind kind, int kmax, double tol)
    : P_(P), kind_(kind), e_(e_of(P, kind)), kmax_(kmax), tol_(tol) {
    if (P.n < 3) throw ParamError("CylKernel: n must be at least 3");
    if (kmax < 0 || kmax > 96) throw ParamError("CylKernel: kmax out of range");
    a_ = 0.5 * (P.n - 3);
    alpha_ = 0.5 * (P.n - 2);
    pref_ = std::pow(2.0, -e_) * sphere_area(P.n - 2);
    mmax_ = 40 + 14 * static_cast<int>(std::ceil(e_));
    int q = (mmax_ + kmax_) / 2 + 2;
    GaussRule g = gauss_gegenbauer(q, a_);
    coef_.assign((kmax_ + 1) * (mmax_ + 1), 0.0);
    std::vector<double> cm(mmax_ + 1), pk(kmax_ + 1);
    for (int i = 0; i < q; ++i) {
        gegenbauer_c(g.x[i], e_, mmax_, cm.data());
        zonal_polys(g.x[i], alpha_, kmax_, pk.data());
        for (int k = 0; k <= kmax_; ++k)
            for (int m = k; m <= mmax_; m += 2) coef_[k * (mmax_ + 1) + m] += g.w[i] * cm[m] * pk[k];
    }
}

double CylKernel::series(double E, int k) const {
    const double* c = &coef_[k * (mmax_ + 1)];
    double sum = 0.0, Em = std::pow(E, k);
    for (int m = k; m <= mmax_; m += 2) {
        sum += Em * c[m];
        Em *= E * E;
        if (Em == 0.0) break;
    }
    return pref_ * std::pow(2.0 * E, e_) * sum;
}

double CylKernel::direct(double delta, int k, double* err) const {
    std::vector<double> pk(k + 1);
    const double a = a_, e = e_;
    auto pk_at = [&](double z) {
        zonal_polys(z, alpha_, k, pk.data());
        return pk[k];
    };
    // z = 1 - u^2 on [0,1], z = w^2 - 1 on [-1,0]
    Fn1 fa = [&](double u) {
        double u2 = u * u;
        double w = std::pow(u2 * (2.0 - u2), a);
        double p = k == 0 ? 1.0 : pk_at(1.0 - u2);
        return 2.0 * u * w * std::pow(delta + u2, -e) * p;
    };
    Fn1 fb = [&](double v) {
        double v2 = v * v;
        double w = std::pow(v2 * (2.0 - v2), a);
        double p = k == 0 ? 1.0 : pk_at(v2 - 1.0);
        return 2.0 * v * w * std::pow(delta + 2.0 - v2, -e) * p;
    };
    std::vector<double> br{0.0};
    double s = std::sqrt(delta);
    for (double f : {1.0 / 64, 1.0 / 16, 0.25, 1.0, 4.0}) {
        double b = s * f;
        if (b > br.back() * 1.0000001 && b < 1.0) br.push_back(b);
    }
    br.push_back(1.0);
    QuadOptions opt;
    opt.rel_tol = tol_;
    opt.max_intervals = 20000;
    if (k > 0) {
        // cancellation between lobes: measure tolerance against the k = 0 size
        QuadOptions o0;
        o0.rel_tol = 1e-6;
        Fn1 ga = [&](double u) {
            double u2 = u * u;
            return 2.0 * u * std::pow(u2 * (2.0 - u2), a) * std::pow(delta + u2, -e);
        };
        double scale = integrate_breaks(ga, br, o0).value;
        opt.abs_tol = tol_ * scale;
    }
    QuadResult ra = integrate_breaks(fa, br, opt);
    QuadResult rb = integrate_breaks(fb, {0.0, 0.5, 1.0}, opt);
    if (err) *err = pref_ * (ra.error + rb.error);
    return pref_ * (ra.value + rb.value);
}

double CylKernel::value_delta(double delta, int k) const {
    if (k < 0 || k > kmax_) throw ParamError("CylKernel: mode out of range");
    if (delta >= kSeriesSwitch) {
        double ch = 1.0 + delta;
        double E = 1.0 / (ch + std::sqrt(delta * (delta + 2.0)));
        return series(E, k);
    }
    return direct(delta, k, nullptr);
}

double CylKernel::value_with_error(double t, int k, double* err) const {
    if (k < 0 || k > kmax_) throw ParamError("CylKernel: mode out of range");
    t = std::abs(t);
    if (t >= 1.0) {
        if (err) *err = 0.0;
        return series(std::exp(-t), k);
    }
    double sh = std::sinh(0.5 * t);
    return direct(2.0 * sh * sh, k, err);
}

double CylKernel::value(double t, int k) const { return value_with_error(t, k, nullptr); }

double CylKernel::asymptotic_constant() const { return pref_ * std::pow(2.0, e_) * coef_[0]; }

double riesz_kernel_cyl(double t, const ProblemParams& P, double tol) {
    if (tol >= 1e-12) return cached_kernel(P, KernelKind::riesz).value(t);
    CylKernel K(P, KernelKind::riesz, 0, tol);
    return K.value(t);
}

double singular_kernel_cyl(double t, const ProblemParams& P, double tol, double t_min) {
    if (!(t_min > 0.0)) throw ParamError("singular_kernel_cyl: t_min must be positive");
    if (std::abs(t) < t_min) throw ParamError("singular_kernel_cyl: |t| below t_min");
    if (tol >= 1e-12) return cached_kernel(P, KernelKind::singular).value(t);
    CylKernel K(P, KernelKind::singular, 0, tol);
    return K.value(t);
}

PeriodizedValue periodize(const std::function<double(double)>& kernel, double t, double L, int J,
                          double decay_exponent) {
    if (!(L > 0.0) || J < 1) throw ParamError("periodize: need L > 0 and J >= 1");
    PeriodizedValue r;
    for (int j = -J; j <= J; ++j) r.value += kernel(t - 2.0 * j * L);
    double first = kernel(t - 2.0 * (J + 1) * L) + kernel(t + 2.0 * (J + 1) * L);
    double q = std::exp(-2.0 * decay_exponent * L);
    r.tail_bound = first / (1.0 - q);
    return r;
}

double riesz_kernel_rn(const std::vector<double>& x, const std::vector<double>& y, const ProblemParams& P) {
    if (x.size() != y.size()) throw ParamError("riesz_kernel_rn: dimension mismatch");
    double d2 = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) d2 += (x[i] - y[i]) * (x[i] - y[i]);
    if (d2 == 0.0) throw ParamError("riesz_kernel_rn: coincident points");
    return P.riesz_const * std::pow(d2, P.sigma - 0.5 * P.n);
}

double v_sph(double t, const ProblemParams& P) {
    double E = std::exp(-std::abs(t));
    return std::pow(2.0 * E / (1.0 + E * E), P.gamma_s);
}

double v_sph_prime(double t, const ProblemParams& P) { return -P.gamma_s * std::tanh(t) * v_sph(t, P); }

namespace {

QuadResult sph_convolution(const ProblemParams& P, double t) {
    const CylKernel& K = cached_kernel(P, KernelKind::riesz);
    double T = 40.0 / P.gamma_s_dual + 2.0;
    Fn1 f = [&](double tau) {
        return K.value(t - tau) * P.c_ns * std::pow(v_sph(tau, P), P.nonlin_exp);
    };
    std::vector<double> br{-T, T, 0.0, t - 1.0, t, t + 1.0};
    std::sort(br.begin(), br.end());
    br.erase(std::unique(br.begin(), br.end()), br.end());
    std::vector<double> pts;
    for (double b : br)
        if (b >= -T && b <= T) pts.push_back(b);
    QuadOptions opt;
    opt.rel_tol = 1e-12;
    return integrate_breaks(f, pts, opt);
}

}  // namespace

Calibration calibrate_cyl_kernel(const ProblemParams& P, double t0) {
    QuadResult r = sph_convolution(P, t0);
    Calibration c;
    c.kappa = v_sph(t0, P) / r.value;
    c.error_estimate = r.error / std::abs(r.value);
    if (!(c.kappa > 0.0) || c.error_estimate > 1e-6)
        throw QuadratureError("calibrate_cyl_kernel: fixed-point identity not resolved to 1e-6");
    return c;
}

double calibration_identity_error(const ProblemParams& P, double kappa, double t) {
    QuadResult r = sph_convolution(P, t);
    double v = v_sph(t, P);
    return (kappa * r.value - v) / v;
}

double kappa_closed_form(const ProblemParams& P) { return P.riesz_const * P.q_ns / P.c_ns; }

std::vector<double> kernel_table(const CylKernel& K, int k, double h, int count) {
    std::vector<double> out(count);
    for (int m = 0; m < count; ++m) out[m] = K.value(m * h, k);
    return out;
}

CylKernelTable make_kernel_table(const ProblemParams& P, KernelKind kind, const std::vector<double>& grid,
                                 double calibration, double tol) {
    for (std::size_t i = 1; i < grid.size(); ++i)
        if (!(grid[i] > grid[i - 1])) throw ParamError("make_kernel_table: grid must increase");
    if (kind == KernelKind::singular)
        for (double t : grid)
            if (std::abs(t) < 1e-3) throw ParamError("make_kernel_table: singular kernel needs |t| >= 1e-3");
    CylKernel K(P, kind, 0, tol);
    CylKernelTable tab;
    tab.params = P;
    tab.kind = kind;
    tab.grid = grid;
    tab.calibration = calibration;
    for (double t : grid) {
        double err = 0.0;
        double v = K.value_with_error(t, 0, &err);
        tab.values.push_back(calibration * v);
        tab.est_error.push_back(calibration * err);
    }
    return tab;
}

void write_kernel_csv(std::ostream& os, const CylKernelTable& table) {
    os << "t,value,est_error\n";
    os.precision(17);
    for (std::size_t i = 0; i < table.grid.size(); ++i)
        os << table.grid[i] << ',' << table.values[i] << ',' << table.est_error[i] << '\n';
}

}  // namespace qcurv
