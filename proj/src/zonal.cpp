#include "qcurv/zonal.hpp"

#include "qcurv/kernels.hpp"
#include "qcurv/parallel.hpp"
#include "qcurv/quadrature.hpp"

#include <unsupported/Eigen/FFT>

#include <algorithm>
#include <cmath>
#include <complex>
#include <map>
#include <mutex>
#include <tuple>

namespace qcurv {

double calibrated_kappa(const ProblemParams& P) {
    static std::mutex mu;
    static std::map<std::pair<int, double>, double> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto key = std::make_pair(P.n, P.sigma);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
    double k = calibrate_cyl_kernel(P).kappa;
    cache[key] = k;
    return k;
}

Point perpendicular(const Point& axis) {
    int n = static_cast<int>(axis.size());
    int lo = 0;
    for (int l = 1; l < n; ++l)
        if (std::abs(axis[l]) < std::abs(axis[lo])) lo = l;
    Point e(n, 0.0);
    e[lo] = 1.0;
    double d = e[lo] * axis[lo];
    for (int l = 0; l < n; ++l) e[l] -= d * axis[l];
    double s = norm(e);
    for (double& v : e) v /= s;
    return e;
}

double dual_apply_radial(const RadialFn& u, const Point& center, const Point& x, const ProblemParams& P,
                         double tol) {
    if (x.size() != center.size() || static_cast<int>(x.size()) != P.n)
        throw ParamError("dual_apply_radial: dimension mismatch");
    const double g = P.gamma_s, p = P.nonlin_exp, c = P.c_ns;
    const double kappa = calibrated_kappa(P);
    auto src = [&](double tau) {
        double v = std::exp(-g * tau) * u(std::exp(-tau));
        return c * std::pow(v, p);
    };
    QuadOptions opt;
    opt.rel_tol = tol;
    opt.abs_tol = 1e-300;
    opt.max_intervals = 20000;
    double r = dist(x, center);
    if (r == 0.0) {
        double T = 40.0 / std::min(g, 2.0 * P.sigma);
        auto f = [&](double tau) { return std::exp(g * tau) * src(tau); };
        QuadResult q = integrate_breaks(f, {-T, -1.0, 0.0, 1.0, T}, opt);
        return kappa * sphere_area(P.n - 1) * q.value;
    }
    double t = -std::log(r);
    double T = 40.0 / g;
    auto f = [&](double tau) { return riesz_kernel_cyl(t - tau, P) * src(tau); };
    QuadResult q = integrate_breaks(f, {t - T, t - 4.0, t - 1.0, t, t + 1.0, t + 4.0, t + T}, opt);
    return std::pow(r, -g) * kappa * q.value;
}

namespace {

struct TableKey {
    int n;
    double sigma;
    double h;
    int kmax;
    bool operator<(const TableKey& o) const {
        return std::tie(n, sigma, h, kmax) < std::tie(o.n, o.sigma, o.h, o.kmax);
    }
};

struct ModeTable {
    int count = 0;  // entries per mode, G_k(m h) for m = 0..count-1
    std::vector<double> g;
};

std::shared_ptr<const ModeTable> mode_table(const ProblemParams& P, double h, int kmax, int count) {
    static std::mutex mu;
    static std::map<TableKey, std::shared_ptr<const ModeTable>> cache;
    TableKey key{P.n, P.sigma, h, kmax};
    {
        std::lock_guard<std::mutex> lock(mu);
        auto it = cache.find(key);
        if (it != cache.end() && it->second->count >= count) return it->second;
    }
    auto tab = std::make_shared<ModeTable>();
    tab->count = count;
    tab->g.resize(static_cast<std::size_t>(kmax + 1) * count);
    CylKernel K(P, KernelKind::riesz, kmax, 1e-12);
    parallel_for(count, [&](int m) {
        for (int k = 0; k <= kmax; ++k) tab->g[static_cast<std::size_t>(k) * count + m] = K.value(m * h, k);
    });
    std::lock_guard<std::mutex> lock(mu);
    cache[key] = tab;
    return tab;
}

std::size_t fft_size(std::size_t n) {
    std::size_t s = 1;
    while (s < n) s <<= 1;
    return s;
}

}  // namespace

ZonalPotential::ZonalPotential(const ProblemParams& P, const Point& center, const Point& axis, const EfSource& W,
                               const ZonalOptions& opt)
    : P_(P), center_(center), axis_(axis), h_(opt.h), t_lo_(opt.t_lo), kmax_(opt.kmax) {
    if (static_cast<int>(center.size()) != P.n || static_cast<int>(axis.size()) != P.n)
        throw ParamError("ZonalPotential: dimension mismatch");
    if (!(opt.h > 0.0) || opt.kmax < 0 || opt.nodes < opt.kmax + 1 || !(opt.t_hi > opt.t_lo))
        throw ParamError("ZonalPotential: bad options");
    double an = norm(axis);
    if (!(an > 0.0)) throw ParamError("ZonalPotential: zero axis");
    for (double& v : axis_) v /= an;
    kappa_ = calibrated_kappa(P);

    const double g = P.gamma_s;
    const int Mk = static_cast<int>(std::ceil(40.0 / (g * h_)));
    nt_ = static_cast<int>(std::ceil((opt.t_hi - opt.t_lo) / h_)) + 1;
    t_hi_ = t_lo_ + (nt_ - 1) * h_;
    const int ntau = nt_ + 2 * Mk;
    const double tau0 = t_lo_ - Mk * h_;

    // zonal projection of W on the tau grid
    const double a = 0.5 * (P.n - 3), alpha = 0.5 * (P.n - 2);
    GaussRule rule = gauss_gegenbauer(opt.nodes, a);
    std::vector<double> pk(static_cast<std::size_t>(opt.nodes) * (kmax_ + 1));
    std::vector<double> nrm(kmax_ + 1, 0.0);
    for (int q = 0; q < opt.nodes; ++q) {
        zonal_polys(rule.x[q], alpha, kmax_, &pk[static_cast<std::size_t>(q) * (kmax_ + 1)]);
        for (int k = 0; k <= kmax_; ++k) {
            double v = pk[static_cast<std::size_t>(q) * (kmax_ + 1) + k];
            nrm[k] += rule.w[q] * v * v;
        }
    }
    std::vector<double> Wk(static_cast<std::size_t>(kmax_ + 1) * ntau, 0.0);
    parallel_for(
        ntau,
        [&](int m) {
            double tau = tau0 + m * h_;
            for (int q = 0; q < opt.nodes; ++q) {
                double w = W(tau, rule.x[q]) * rule.w[q];
                if (w == 0.0) continue;
                for (int k = 0; k <= kmax_; ++k)
                    Wk[static_cast<std::size_t>(k) * ntau + m] += w * pk[static_cast<std::size_t>(q) * (kmax_ + 1) + k];
            }
            for (int k = 0; k <= kmax_; ++k) Wk[static_cast<std::size_t>(k) * ntau + m] /= nrm[k];
        },
        opt.threads);

    auto tab = mode_table(P, h_, kmax_, Mk + 1);
    const std::size_t nf = fft_size(static_cast<std::size_t>(ntau + 2 * Mk + 1));
    Eigen::FFT<double> fft;
    conv_.assign(static_cast<std::size_t>(kmax_ + 1) * nt_, 0.0);
    std::vector<std::complex<double>> A(nf), B(nf), FA, FB, out;
    double top = 0.0, base = 0.0;
    for (int k = 0; k <= kmax_; ++k) {
        std::fill(A.begin(), A.end(), 0.0);
        std::fill(B.begin(), B.end(), 0.0);
        bool any = false;
        for (int m = 0; m < ntau; ++m) {
            A[m] = Wk[static_cast<std::size_t>(k) * ntau + m];
            any = any || A[m] != 0.0;
        }
        if (!any) continue;
        for (int j = 0; j <= 2 * Mk; ++j)
            B[j] = tab->g[static_cast<std::size_t>(k) * tab->count + std::abs(j - Mk)];
        fft.fwd(FA, A);
        fft.fwd(FB, B);
        for (std::size_t i = 0; i < nf; ++i) FA[i] *= FB[i];
        fft.inv(out, FA);
        double mx = 0.0;
        for (int m = 0; m < nt_; ++m) {
            double v = kappa_ * h_ * out[m + 2 * Mk].real();
            conv_[static_cast<std::size_t>(k) * nt_ + m] = v;
            mx = std::max(mx, std::abs(v));
        }
        if (k == 0) base = mx;
        if (k >= kmax_ - 1) top = std::max(top, mx);
    }
    tail_ = base > 0.0 ? top / base : 0.0;
}

double ZonalPotential::eval_ef(double t, double z) const {
    if (!(t >= t_lo_ && t <= t_hi_)) throw ParamError("ZonalPotential: point outside the evaluation window");
    double x = (t - t_lo_) / h_;
    int i0 = static_cast<int>(std::floor(x)) - 2;
    i0 = std::clamp(i0, 0, nt_ - 6);
    double l[6];
    for (int a = 0; a < 6; ++a) {
        double v = 1.0;
        for (int b = 0; b < 6; ++b)
            if (b != a) v *= (x - (i0 + b)) / static_cast<double>(a - b);
        l[a] = v;
    }
    std::vector<double> pk(kmax_ + 1);
    zonal_polys(std::clamp(z, -1.0, 1.0), 0.5 * (P_.n - 2), kmax_, pk.data());
    double s = 0.0;
    for (int k = 0; k <= kmax_; ++k) {
        const double* c = &conv_[static_cast<std::size_t>(k) * nt_ + i0];
        double ck = 0.0;
        for (int a = 0; a < 6; ++a) ck += l[a] * c[a];
        s += pk[k] * ck;
    }
    return s;
}

double ZonalPotential::eval(const Point& x) const {
    Point d(P_.n);
    double zs = 0.0;
    for (int l = 0; l < P_.n; ++l) {
        d[l] = x[l] - center_[l];
        zs += d[l] * axis_[l];
    }
    double r = norm(d);
    if (r == 0.0) throw ParamError("ZonalPotential: evaluation at the center");
    return std::pow(r, -P_.gamma_s) * eval_ef(-std::log(r), zs / r);
}

double riesz_on_axis(const std::function<double(const Point&)>& g, const Point& center, const Point& axis, double s,
                     const ProblemParams& P, double tol, const std::vector<double>& breaks) {
    const int n = P.n;
    if (static_cast<int>(center.size()) != n || static_cast<int>(axis.size()) != n)
        throw ParamError("riesz_on_axis: dimension mismatch");
    const double a = 0.5 * (n - 3), gam = P.gamma_s;
    Point e = axis;
    double an = norm(e);
    for (double& v : e) v /= an;
    Point perp = perpendicular(e);
    const double kappa = calibrated_kappa(P);
    const double ax = std::abs(s), sg = s < 0.0 ? -1.0 : 1.0;

    QuadOptions inner;
    inner.rel_tol = tol * 0.1;
    inner.abs_tol = 1e-300;
    inner.max_intervals = 4000;

    auto shell = [&](double lr) {
        double r = std::exp(-lr);
        // u = 1 - sg z, clustered toward u = 0 where the target sits
        auto f = [&](double u) {
            double z = sg * (1.0 - u);
            double w = std::pow(std::max(u * (2.0 - u), 0.0), a);
            double d2 = (r - ax) * (r - ax) + 2.0 * r * ax * u;
            if (ax == 0.0) d2 = r * r;
            double sz = std::sqrt(std::max(1.0 - z * z, 0.0));
            Point dy(n);
            for (int l = 0; l < n; ++l) dy[l] = r * (z * e[l] + sz * perp[l]);
            return w * std::pow(d2, -gam) * g(dy);
        };
        std::vector<double> pts{0.0};
        if (ax > 0.0) {
            double eps = std::max((r - ax) * (r - ax) / (2.0 * r * ax), 1e-14);
            for (double b = eps; b < 2.0; b *= 4.0) pts.push_back(b);
        }
        pts.push_back(2.0);
        return std::exp(-n * lr) * sphere_area(n - 2) * integrate_breaks(f, pts, inner).value;
    };

    std::vector<double> sb{-40.0 / gam - std::log(1.0 + ax), 25.0 / gam};
    if (ax > 0.0) sb.push_back(-std::log(ax));
    for (double b : breaks)
        if (b > 0.0) sb.push_back(-std::log(b));
    std::sort(sb.begin(), sb.end());
    sb.erase(std::unique(sb.begin(), sb.end()), sb.end());
    QuadOptions outer;
    outer.rel_tol = tol;
    outer.abs_tol = 1e-300;
    outer.max_intervals = 8000;
    return kappa * integrate_breaks(shell, sb, outer).value;
}

}  // namespace qcurv
