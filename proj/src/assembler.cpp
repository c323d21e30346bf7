#include "qcurv/assembler.hpp"

#include "qcurv/parallel.hpp"
#include "qcurv/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>

namespace qcurv {

double Cutoff::operator()(double r) const {
    if (!active || r <= inner) return 1.0;
    if (r >= outer) return 0.0;
    double s = (r - inner) / (outer - inner);
    double a = std::exp(-1.0 / s), b = std::exp(-1.0 / (1.0 - s));
    return b / (a + b);
}

namespace {

Point sub(const Point& a, const Point& b) {
    Point d(a.size());
    for (std::size_t l = 0; l < a.size(); ++l) d[l] = a[l] - b[l];
    return d;
}

Point add(const Point& a, const Point& b) {
    Point d(a.size());
    for (std::size_t l = 0; l < a.size(); ++l) d[l] = a[l] + b[l];
    return d;
}

double dot(const Point& a, const Point& b) {
    double s = 0.0;
    for (std::size_t l = 0; l < a.size(); ++l) s += a[l] * b[l];
    return s;
}

// sum_j U(dx - a_j; lambda_j) for the tower, displacements relative to its center
double tower_local(const TowerConfig& t, const Point& dx, const ProblemParams& P) {
    double r2 = dot(dx, dx), s = 0.0;
    for (int j = 0; j <= t.J; ++j) {
        double l = t.lambda(j);
        double d2 = r2;
        if (j < static_cast<int>(t.a.size())) {
            d2 = 0.0;
            for (std::size_t k = 0; k < dx.size(); ++k) d2 += (dx[k] - t.a[j][k]) * (dx[k] - t.a[j][k]);
        }
        s += std::pow(2.0 * l / (l * l + d2), P.gamma_s);
    }
    return s;
}

// deformed minus standard tower, term by term
double tower_diff_local(const TowerConfig& t, const TowerConfig& b, const Point& dx, const ProblemParams& P) {
    if (t.a.empty() && t.r.empty()) return 0.0;
    double r2 = dot(dx, dx), s = 0.0;
    for (int j = 0; j <= t.J; ++j) {
        double l = t.lambda(j), l0 = b.lambda(j);
        double d2 = r2;
        if (j < static_cast<int>(t.a.size())) {
            d2 = 0.0;
            for (std::size_t k = 0; k < dx.size(); ++k) d2 += (dx[k] - t.a[j][k]) * (dx[k] - t.a[j][k]);
        }
        // U_def - U_0 = U_0 expm1(gamma ln(U_def / U_0)), with the ratio formed from differences
        double rj = t.r_at(j);
        double num = -l0 * l0 * rj * (2.0 + rj);
        if (j < static_cast<int>(t.a.size())) {
            double ad = 0.0, aa = 0.0;
            for (std::size_t k = 0; k < dx.size(); ++k) {
                ad += dx[k] * t.a[j][k];
                aa += t.a[j][k] * t.a[j][k];
            }
            num += 2.0 * ad - aa;
        }
        double lr = std::log1p(rj) + std::log1p(num / (l * l + d2));
        s += std::pow(2.0 * l0 / (l0 * l0 + r2), P.gamma_s) * std::expm1(P.gamma_s * lr);
    }
    return s;
}

Point common_axis(const std::vector<Point>& pts, const std::vector<TowerConfig>& towers, int n) {
    Point axis(n, 0.0);
    if (pts.size() >= 2) {
        axis = sub(pts[1], pts[0]);
    } else {
        for (const TowerConfig& t : towers)
            for (const Point& a : t.a)
                if (norm(a) > 0.0 && norm(axis) == 0.0) axis = a;
    }
    if (norm(axis) == 0.0) axis[0] = 1.0;
    double an = norm(axis);
    for (double& v : axis) v /= an;
    auto off_axis = [&](const Point& v) {
        double c = dot(v, axis);
        double s = 0.0;
        for (int l = 0; l < n; ++l) s += (v[l] - c * axis[l]) * (v[l] - c * axis[l]);
        return std::sqrt(s);
    };
    for (const Point& p : pts)
        if (off_axis(sub(p, pts[0])) > 1e-12 * (1.0 + norm(sub(p, pts[0]))))
            throw ParamError("assemble: singular points are not collinear");
    for (const TowerConfig& t : towers)
        for (const Point& a : t.a)
            if (off_axis(a) > 1e-12 * (1e-300 + norm(a)) && norm(a) > 0.0)
                throw ParamError("assemble: translations must be parallel to the common axis");
    return axis;
}

std::shared_ptr<const CylSolution> delaunay_for(double L, const ProblemParams& P, const AssembleOptions& opt,
                                                std::map<double, std::shared_ptr<const CylSolution>>& cache) {
    auto it = cache.find(L);
    if (it != cache.end()) return it->second;
    auto s = std::make_shared<const CylSolution>(solve_periodic(L, P, opt.M, opt.solver_tol));
    cache[L] = s;
    return s;
}

}  // namespace

double ApproxSolution::delaunay_local(int i, const Point& dx) const {
    double r = norm(dx);
    if (r == 0.0) throw ParamError("ApproxSolution: evaluation at a singular point");
    return std::pow(r, -P.gamma_s) * delaunay[i]->eval(-std::log(r) + std::log(towers[i].R));
}

double ApproxSolution::eval(const Point& x) const {
    double s = 0.0;
    for (int k = 0; k < size(); ++k) {
        Point dx = sub(x, sigma.points[k]);
        s += tower_local(towers[k], dx, P);
        double c = cutoff(norm(dx));
        if (c > 0.0) s += c * (delaunay_local(k, dx) - tower_local(base[k], dx, P));
    }
    return s;
}

double ApproxSolution::raw_sum(int i, const Point& x) const {
    double s = 0.0;
    for (int k = 0; k < size(); ++k) {
        Point dx = sub(x, sigma.points[k]);
        s += tower_local(towers[k], dx, P);
        if (k == i) s += delaunay_local(k, dx) - tower_local(base[k], dx, P);
    }
    return s;
}

double ApproxSolution::remainder_local(int i, const Point& dx) const {
    double s = tower_diff_local(towers[i], base[i], dx, P);
    double c = cutoff(norm(dx));
    if (c < 1.0) s += (1.0 - c) * (tower_local(base[i], dx, P) - delaunay_local(i, dx));
    Point y = add(sigma.points[i], dx);
    for (int k = 0; k < size(); ++k) {
        if (k == i) continue;
        Point dk = sub(y, sigma.points[k]);
        s += tower_local(towers[k], dk, P);
        double ck = cutoff(norm(dk));
        if (ck > 0.0) s += ck * (delaunay_local(k, dk) - tower_local(base[k], dk, P));
    }
    return s;
}

double ApproxSolution::excess(const Point& x) const {
    double s = 0.0;
    for (int k = 0; k < size(); ++k) {
        Point dx = sub(x, sigma.points[k]);
        s += tower_diff_local(towers[k], base[k], dx, P);
        double c = cutoff(norm(dx));
        if (c < 1.0) s += (1.0 - c) * (tower_local(base[k], dx, P) - delaunay_local(k, dx));
    }
    return s;
}

void ApproxSolution::partition_local(int i, const Point& dx, double* psi, double* comp) const {
    double r = norm(dx), S = 0.0;
    Point y = add(sigma.points[i], dx);
    for (int k = 0; k < size(); ++k) {
        if (k == i) continue;
        double dk = dist(y, sigma.points[k]);
        if (dk == 0.0) {
            *psi = 0.0;
            *comp = 1.0;
            return;
        }
        S += std::pow(r / dk, partition_power);
    }
    *psi = 1.0 / (1.0 + S);
    *comp = S / (1.0 + S);
}

double ApproxSolution::dist_to_sigma(const Point& x) const {
    double d = 1e300;
    for (const Point& p : sigma.points) d = std::min(d, dist(x, p));
    return d;
}

ApproxSolution assemble(const SingularSet& sigma, const BalancedConfig& B, const std::vector<Perturbation>& perturb,
                        const ProblemParams& P, const AssembleOptions& opt) {
    int N = sigma.size();
    if (N < 1) throw ParamError("assemble: empty singular set");
    if (static_cast<int>(B.R.size()) != N || static_cast<int>(B.L_i.size()) != N ||
        static_cast<int>(B.a0_hat.size()) != N)
        throw ParamError("assemble: balanced configuration does not match the singular set");
    if (!perturb.empty() && static_cast<int>(perturb.size()) != N)
        throw ParamError("assemble: one perturbation per singular point");
    for (int i = 0; i < N; ++i) {
        if (static_cast<int>(sigma.points[i].size()) != P.n) throw ParamError("assemble: points must lie in R^n");
        for (int k = i + 1; k < N; ++k)
            if (sigma.distance(i, k) < 2.0) throw ParamError("assemble: unit balls overlap");
    }
    if (opt.cutoff.active && !(opt.cutoff.inner > 0.0 && opt.cutoff.outer > opt.cutoff.inner))
        throw ParamError("assemble: bad cutoff radii");
    if (opt.partition_power < 2) throw ParamError("assemble: partition power must be at least 2");

    ApproxSolution u;
    u.P = P;
    u.sigma = sigma;
    u.cutoff = opt.cutoff;
    u.partition_power = opt.partition_power;
    std::map<double, std::shared_ptr<const CylSolution>> cache;
    for (int i = 0; i < N; ++i) {
        TowerConfig t = make_tower(i, sigma.points[i], B.L_i[i], B.R[i], P, opt.J);
        TowerConfig b = t;
        if (static_cast<int>(B.a0_hat[i].size()) != P.n) throw ParamError("assemble: a0_hat has wrong dimension");
        if (!perturb.empty()) {
            const Perturbation& pt = perturb[i];
            if (pt.r.K > 0 && pt.r.dim != 1) throw ParamError("assemble: r perturbation must be scalar");
            if (pt.a.K > 0 && pt.a.dim != P.n) throw ParamError("assemble: a perturbation must be n-dimensional");
            t.r.assign(t.J + 1, 0.0);
            for (int j = 0; j <= t.J && j < pt.r.K; ++j) t.r[j] = pt.r.at(j);
        }
        bool translate = norm(B.a0_hat[i]) > 0.0;
        if (!perturb.empty() && perturb[i].a.K > 0) translate = true;
        if (translate) {
            t.a.assign(t.J + 1, Point(P.n, 0.0));
            for (int j = 0; j <= t.J; ++j) {
                double l = t.lambda(j);
                for (int c = 0; c < P.n; ++c) {
                    double ah = B.a0_hat[i][c];
                    if (!perturb.empty() && j < perturb[i].a.K) ah += perturb[i].a.at(j, c);
                    t.a[j][c] = l * l * ah;
                }
            }
        }
        validate_tower(t, P);
        u.towers.push_back(t);
        u.base.push_back(b);
        u.delaunay.push_back(delaunay_for(B.L_i[i], P, opt, cache));
    }
    u.axis = common_axis(sigma.points, u.towers, P.n);
    return u;
}

ApproxSolution assemble_single(const Point& center, double L, double R, const ProblemParams& P,
                               const AssembleOptions& opt) {
    if (static_cast<int>(center.size()) != P.n) throw ParamError("assemble_single: center must lie in R^n");
    SingularSet S;
    S.points = {center};
    BalancedConfig B;
    B.q = {1.0};
    B.R = {R};
    B.L = L;
    B.L_i = {L};
    B.a0_hat = {Point(P.n, 0.0)};
    return assemble(S, B, {}, P, opt);
}

ResidualField::ResidualField(std::shared_ptr<const ApproxSolution> u, const ZonalOptions& opt) : u_(std::move(u)) {
    const ApproxSolution& s = *u_;
    const ProblemParams& P = s.P;
    Point c(P.n, 0.0);
    for (const Point& p : s.sigma.points)
        for (int l = 0; l < P.n; ++l) c[l] += p[l] / s.size();
    double spread = 0.0;
    for (const Point& p : s.sigma.points) spread = std::max(spread, dist(p, c));
    for (int i = 0; i < s.size(); ++i) {
        ZonalOptions o = opt;
        o.t_lo = std::min(opt.t_lo, -std::log(100.0 + 2.0 * spread));
        o.t_hi = std::max(opt.t_hi, 2.0 * s.towers[i].L + std::abs(std::log(s.towers[i].R)) + 16.0);
        pots_.push_back(std::make_unique<ZonalPotential>(
            P, s.sigma.points[i], s.axis, [this, i](double tau, double z) { return source_ef(i, tau, z); }, o));
    }
}

double ResidualField::source_ef(int i, double tau, double z) const {
    const ApproxSolution& s = *u_;
    const ProblemParams& P = s.P;
    Point perp = perpendicular(s.axis);
    double r = std::exp(-tau), sz = std::sqrt(std::max(1.0 - z * z, 0.0));
    Point dx(P.n);
    for (int l = 0; l < P.n; ++l) dx[l] = r * (z * s.axis[l] + sz * perp[l]);
    double psi, comp;
    s.partition_local(i, dx, &psi, &comp);
    double v = s.delaunay[i]->eval(tau + std::log(s.towers[i].R));
    double delta = s.remainder_local(i, dx);
    double rel = std::max(delta * std::pow(r, P.gamma_s) / v, -1.0);
    double p = P.nonlin_exp;
    double fv = P.c_ns * std::pow(v, p);
    double inc = rel == -1.0 ? -1.0 : std::expm1(p * std::log1p(rel));
    return fv * (psi * inc - comp);
}

double ResidualField::source_local(int i, const Point& dx) const {
    double r = norm(dx);
    if (r == 0.0) throw ParamError("source_local: singular point");
    const ProblemParams& P = u_->P;
    double z = dot(dx, u_->axis) / r;
    double tau = -std::log(r);
    return std::exp(P.gamma_s_dual * tau) * source_ef(i, tau, std::clamp(z, -1.0, 1.0));
}

double ResidualField::dual(const Point& x) const {
    const ApproxSolution& s = *u_;
    double d = 0.0;
    for (int i = 0; i < s.size(); ++i) {
        d += s.delaunay_local(i, sub(x, s.sigma.points[i]));
        d += pots_[i]->eval(x);
    }
    return d;
}

double ResidualField::residual(const Point& x) const {
    double d = u_->excess(x);
    for (const auto& p : pots_) d -= p->eval(x);
    return d;
}

ResidualField::SpotCheck ResidualField::spot_check(double s, double tol) const {
    const ApproxSolution& u = *u_;
    SpotCheck sc;
    sc.x = u.sigma.points[0];
    for (int l = 0; l < u.P.n; ++l) sc.x[l] += s * u.axis[l];
    for (const auto& p : pots_) sc.zonal += p->eval(sc.x);
    for (int i = 0; i < u.size(); ++i) {
        double si = dot(sub(sc.x, u.sigma.points[i]), u.axis);
        std::vector<double> br{u.cutoff.inner, u.cutoff.outer};
        for (int k = 0; k < u.size(); ++k)
            if (k != i) br.push_back(u.sigma.distance(i, k));
        for (int j = 0; j <= std::min(u.towers[i].J, 3); ++j) br.push_back(u.towers[i].lambda(j));
        sc.oracle += riesz_on_axis([this, i](const Point& dx) { return source_local(i, dx); }, u.sigma.points[i],
                                   u.axis, si, u.P, tol, br);
    }
    double den = std::abs(sc.oracle);
    sc.rel = den > 0.0 ? std::abs(sc.zonal - sc.oracle) / den : std::abs(sc.zonal);
    return sc;
}

double dual_apply(const ResidualField& F, const Point& x) { return F.dual(x); }

double WeightSpec::zeta_near(const ProblemParams& P) const {
    return kind == WeightKind::star ? std::min(zeta1, -P.gamma_s + tau) : P.n + tau;
}

double WeightSpec::zeta_far(const ProblemParams& P) const {
    return kind == WeightKind::star ? -P.n - 2.0 * P.sigma : -P.n + 2.0 * P.sigma;
}

WeightSpec default_weight(const ProblemParams& P, WeightKind kind, double tau) {
    double lo = -P.gamma_s, hi = std::min(-P.gamma_s + 2.0 * P.sigma, 0.0);
    if (!(hi > lo)) throw ParamError("default_weight: empty zeta1 window");
    WeightSpec w;
    w.zeta1 = 0.5 * (lo + hi);
    w.tau = tau;
    w.kind = kind;
    return w;
}

void validate_weight(const WeightSpec& w, const ProblemParams& P) {
    double lo = -P.gamma_s, hi = std::min(-P.gamma_s + 2.0 * P.sigma, 0.0);
    if (!(w.zeta1 > lo && w.zeta1 < hi)) throw ParamError("weight: zeta1 outside (-gamma, min(-gamma + 2 sigma, 0))");
    if (!(w.tau > 0.0)) throw ParamError("weight: tau must be positive");
}

Region region_of(double d) {
    if (d < 0.5) return Region::near;
    if (d < 1.0) return Region::transition;
    return Region::far;
}

const char* region_name(Region r) {
    switch (r) {
        case Region::near: return "near";
        case Region::transition: return "transition";
        default: return "far";
    }
}

std::vector<Sample> make_samples(const ApproxSolution& u, std::uint64_t seed, int per_ray, int extra) {
    if (per_ray < 2) throw ParamError("make_samples: need at least two radii per ray");
    const int n = u.P.n;
    Point c(n, 0.0);
    for (const Point& p : u.sigma.points)
        for (int l = 0; l < n; ++l) c[l] += p[l] / u.size();
    double spread = 0.0;
    for (const Point& p : u.sigma.points) spread = std::max(spread, dist(p, c));
    const Point& e = u.axis;
    Point f = perpendicular(e);
    auto combo = [&](double a, double b) {
        Point d(n);
        for (int l = 0; l < n; ++l) d[l] = a * e[l] + b * f[l];
        double s = norm(d);
        for (double& v : d) v /= s;
        return d;
    };
    std::vector<Point> dirs{combo(1, 0), combo(-1, 0), combo(0, 1), combo(1, 1), combo(-1, 1)};
    std::vector<Sample> out;
    auto push = [&](const Point& x) {
        Sample s;
        s.x = x;
        s.dist = u.dist_to_sigma(x);
        s.radius = dist(x, c);
        s.region = region_of(s.dist);
        out.push_back(s);
    };
    for (int i = 0; i < u.size(); ++i) {
        std::vector<Point> di = dirs;
        std::mt19937_64 rng(seed + 0x9e3779b97f4a7c15ULL * static_cast<std::uint64_t>(i + 1));
        std::normal_distribution<double> nd;
        for (int k = 0; k < extra; ++k) {
            Point d(n);
            for (double& v : d) v = nd(rng);
            double s = norm(d);
            for (double& v : d) v /= s;
            di.push_back(d);
        }
        double smax = 2.0 * u.towers[i].L, smin = std::log(2.0);
        std::vector<double> radii;
        for (int k = 0; k < per_ray; ++k) radii.push_back(std::exp(-(smin + (smax - smin) * k / (per_ray - 1))));
        for (double r : {0.6, 0.75, 0.9}) radii.push_back(r);
        for (const Point& d : di)
            for (double r : radii) {
                Point x = u.sigma.points[i];
                for (int l = 0; l < n; ++l) x[l] += r * d[l];
                push(x);
            }
    }
    for (double rho : {spread + 2.0, spread + 4.0, 8.0 + spread, 16.0, 32.0, 50.0})
        for (const Point& d : {dirs[0], dirs[2], dirs[3], dirs[4]}) {
            Point x = c;
            for (int l = 0; l < n; ++l) x[l] += rho * d[l];
            if (u.dist_to_sigma(x) >= 1.0) push(x);
        }
    return out;
}

double weighted_fn_norm(const std::vector<Sample>& samples, const std::vector<double>& values, const WeightSpec& w,
                        const ProblemParams& P) {
    if (samples.size() != values.size()) throw ParamError("weighted_fn_norm: size mismatch");
    double zn = w.zeta_near(P), zf = w.zeta_far(P), m = 0.0;
    for (std::size_t k = 0; k < samples.size(); ++k) {
        const Sample& s = samples[k];
        double wt = s.region == Region::far ? std::pow(s.radius, -zf) : std::pow(s.dist, -zn);
        m = std::max(m, wt * std::abs(values[k]));
    }
    return m;
}

ResidualReport residual(const ResidualField& F, const WeightSpec& w, const std::vector<Sample>& samples,
                        int spot_checks, double tol) {
    const ApproxSolution& u = F.solution();
    const ProblemParams& P = u.P;
    ResidualReport rep;
    rep.weight = w;
    rep.L = u.towers.empty() ? 0.0 : u.towers[0].L;
    rep.samples = samples;
    rep.values.assign(samples.size(), 0.0);
    parallel_for(static_cast<int>(samples.size()), [&](int k) { rep.values[k] = F.residual(samples[k].x); });
    double zn = w.zeta_near(P), zf = w.zeta_far(P);
    for (std::size_t k = 0; k < samples.size(); ++k) {
        const Sample& s = samples[k];
        double a = std::abs(rep.values[k]);
        rep.sup_abs = std::max(rep.sup_abs, a);
        int r = static_cast<int>(s.region);
        ++rep.counts[r];
        double wt = s.region == Region::far ? std::pow(s.radius, -zf) : std::pow(s.dist, -zn);
        double* slot = s.region == Region::near ? &rep.near : s.region == Region::transition ? &rep.transition : &rep.far;
        *slot = std::max(*slot, wt * a);
    }
    rep.weighted = std::max({rep.near, rep.transition, rep.far});
    double d = u.size() > 1 ? u.sigma.distance(0, 1) : 2.0;
    std::vector<double> where{-0.3, 0.5 * d, -6.0};
    for (int k = 0; k < spot_checks && k < static_cast<int>(where.size()); ++k)
        rep.spot_checks.push_back(F.spot_check(where[k], tol));
    for (int i = 0; i < u.size(); ++i) rep.zonal_tail = std::max(rep.zonal_tail, F.potential(i).tail_indicator());
    return rep;
}

double beta_projection(const ResidualField& F, const KernelIndex& idx, double h, int nodes) {
    const ApproxSolution& u = F.solution();
    const ProblemParams& P = u.P;
    if (idx.i < 0 || idx.i >= u.size()) throw ParamError("beta_projection: point index out of range");
    const TowerConfig& t = u.towers[idx.i];
    if (idx.j < 0 || idx.j > t.J) throw ParamError("beta_projection: level outside the truncation");
    if (idx.ell < 0 || idx.ell > P.n) throw ParamError("beta_projection: mode out of range");
    const int n = P.n;
    const ZonalPotential& Zi = F.potential(idx.i);
    double tc = -std::log(t.lambda(idx.j));
    double lo = std::max(tc - 14.0, -std::log(60.0)), hi = std::min(tc + 14.0, Zi.t_hi());
    int nt = static_cast<int>(std::ceil((hi - lo) / h));
    double ht = (hi - lo) / nt;
    GaussRule rule = gauss_gegenbauer(nodes, 0.5 * (n - 3));
    const Point& e = u.axis;
    Point f = perpendicular(e);
    const Point& xi = u.sigma.points[idx.i];
    std::vector<double> row(nt + 1, 0.0);
    parallel_for(nt + 1, [&](int m) {
        double tau = std::min(lo + m * ht, hi);
        double r = std::exp(-tau), s = 0.0;
        for (int q = 0; q < nodes; ++q) {
            double z = rule.x[q], sz = std::sqrt(std::max(1.0 - z * z, 0.0));
            Point dx(n), y(n), y2(n);
            for (int l = 0; l < n; ++l) {
                dx[l] = r * (z * e[l] + sz * f[l]);
                y[l] = xi[l] + dx[l];
                y2[l] = xi[l] + r * (z * e[l] - sz * f[l]);
            }
            double N = u.excess(y) - std::pow(r, -P.gamma_s) * Zi.eval_ef(tau, z);
            for (int k = 0; k < u.size(); ++k)
                if (k != idx.i) N -= F.potential(k).eval(y);
            double zb = 0.5 * (cokernel_Zbar(y, idx, t, P) + cokernel_Zbar(y2, idx, t, P));
            s += rule.w[q] * N * zb;
        }
        double wt = (m == 0 || m == nt) ? 0.5 : 1.0;
        row[m] = wt * ht * std::exp(-n * tau) * sphere_area(n - 2) * s;
    });
    double beta = 0.0;
    for (double v : row) beta += v;
    return beta;
}

double beta00_leading(const SingularSet& sigma, const std::vector<double>& q, const std::vector<double>& R, double A2,
                      double L, int i, const ProblemParams& P) {
    double s = 0.0;
    for (int k = 0; k < sigma.size(); ++k)
        if (k != i) s += A2 * std::pow(sigma.distance(i, k), -2.0 * P.gamma_s) * std::pow(R[i] * R[k], P.gamma_s) * q[k];
    return -P.c_ns * q[i] * (s - q[i]) * std::exp(-P.gamma_s * L);
}

}  // namespace qcurv
