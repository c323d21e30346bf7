#include "qcurv/bubbles.hpp"

#include <cmath>

namespace qcurv {

double norm(const Point& x) {
    double s = 0.0;
    for (double v : x) s += v * v;
    return std::sqrt(s);
}

double dist(const Point& x, const Point& y) {
    if (x.size() != y.size()) throw ParamError("dist: dimension mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) s += (x[i] - y[i]) * (x[i] - y[i]);
    return std::sqrt(s);
}

namespace {

double dist2(const Point& x, const Point& y) {
    if (x.size() != y.size()) throw ParamError("bubble: dimension mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) s += (x[i] - y[i]) * (x[i] - y[i]);
    return s;
}

}  // namespace

double bubble_eval(const Point& x, const Bubble& b, const ProblemParams& P) {
    double l = b.lambda;
    return std::pow(2.0 * l / (l * l + dist2(x, b.center)), P.gamma_s);
}

double bubble_dlambda(const Point& x, const Bubble& b, const ProblemParams& P) {
    double l = b.lambda, r2 = dist2(x, b.center);
    double d = l * l + r2;
    return bubble_eval(x, b, P) * P.gamma_s * (r2 - l * l) / (l * d);
}

double bubble_dx(const Point& x, const Bubble& b, int l, const ProblemParams& P) {
    double lam = b.lambda, r2 = dist2(x, b.center);
    return -2.0 * P.gamma_s * (x[l] - b.center[l]) / (lam * lam + r2) * bubble_eval(x, b, P);
}

double u_sph(const Point& x, const ProblemParams& P) {
    return bubble_eval(x, {1.0, Point(x.size(), 0.0)}, P);
}

double ef_forward(const RadialFn& u, double t, const ProblemParams& P) {
    return std::exp(-P.gamma_s * t) * u(std::exp(-t));
}

double ef_inverse(const RadialFn& v, const Point& x, const ProblemParams& P) {
    double r = norm(x);
    if (r == 0.0) throw ParamError("ef_inverse: x = 0");
    return std::pow(r, -P.gamma_s) * v(-std::log(r));
}

double TowerConfig::lambda(int j) const { return R * (1.0 + r_at(j)) * std::exp(-t_level(j)); }

Point TowerConfig::level_center(int j) const {
    Point c = center;
    if (j >= 0 && j < static_cast<int>(a.size()))
        for (std::size_t k = 0; k < c.size(); ++k) c[k] += a[j][k];
    return c;
}

int default_truncation(double L, const ProblemParams& P) {
    double need = 14.0 * std::log(10.0) / (L * P.gamma_s);
    int J = static_cast<int>(std::ceil(0.5 * (need - 1.0)));
    return std::max(J, 1);
}

TowerConfig make_tower(int index, const Point& center, double L, double R, const ProblemParams& P, int J) {
    TowerConfig c;
    c.index = index;
    c.center = center;
    c.L = L;
    c.R = R;
    c.J = J < 0 ? default_truncation(L, P) : J;
    validate_tower(c, P);
    return c;
}

void validate_tower(const TowerConfig& cfg, const ProblemParams& P) {
    if (static_cast<int>(cfg.center.size()) != P.n) throw ParamError("tower: center dimension must be n");
    if (!(cfg.L > 0.0)) throw ParamError("tower: L must be positive");
    if (!(cfg.R > 0.0)) throw ParamError("tower: R must be positive");
    if (cfg.J < 0) throw ParamError("tower: J must be nonnegative");
    if (!cfg.r.empty() && static_cast<int>(cfg.r.size()) != cfg.J + 1)
        throw ParamError("tower: r needs J+1 entries");
    if (!cfg.a.empty() && static_cast<int>(cfg.a.size()) != cfg.J + 1)
        throw ParamError("tower: a needs J+1 entries");
    for (int j = 0; j <= cfg.J; ++j) {
        if (std::abs(cfg.r_at(j)) > std::exp(-cfg.tau * cfg.t_level(j)))
            throw ParamError("tower: |r_j| exceeds e^{-tau t_j}");
        if (!cfg.a.empty()) {
            if (static_cast<int>(cfg.a[j].size()) != P.n) throw ParamError("tower: translation dimension");
            double lam = cfg.lambda(j);
            if (norm(cfg.a[j]) > cfg.a_bound * lam * lam) throw ParamError("tower: |a_j| exceeds bound");
        }
        if (j > 0 && !(cfg.lambda(j) < cfg.lambda(j - 1))) throw ParamError("tower: scales must decrease");
    }
}

double tower_eval(const Point& x, const TowerConfig& cfg, bool half, const ProblemParams& P) {
    double s = 0.0;
    for (int j = half ? 0 : -cfg.J; j <= cfg.J; ++j) s += bubble_eval(x, cfg.bubble(j), P);
    return s;
}

double tower_ef(double t, double L, int J, double R, bool half, const ProblemParams& P) {
    double s = 0.0, lr = std::log(R);
    for (int j = half ? 0 : -J; j <= J; ++j) {
        double d = std::abs(t - (1.0 + 2.0 * j) * L + lr);
        double E = std::exp(-d);
        s += std::pow(2.0 * E / (1.0 + E * E), P.gamma_s);
    }
    return s;
}

double kernel_Z(const Point& x, const KernelIndex& idx, const TowerConfig& cfg, const ProblemParams& P) {
    if (idx.j < 0 || idx.j > cfg.J) throw ParamError("kernel_Z: level out of range");
    if (idx.ell < 0 || idx.ell > P.n) throw ParamError("kernel_Z: mode out of range");
    Bubble b = cfg.bubble(idx.j);
    if (idx.ell == 0) {
        double dl_dr = cfg.R * std::exp(-cfg.t_level(idx.j));
        return bubble_dlambda(x, b, P) * dl_dr;
    }
    return -b.lambda * bubble_dx(x, b, idx.ell - 1, P);
}

double cokernel_Zbar(const Point& x, const KernelIndex& idx, const TowerConfig& cfg, const ProblemParams& P) {
    Bubble b = cfg.bubble(idx.j);
    return df_sigma(P, bubble_eval(x, b, P)) * kernel_Z(x, idx, cfg, P);
}

}  // namespace qcurv
