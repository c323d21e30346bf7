#include "qcurv/delaunay.hpp"

#include "qcurv/balancing.hpp"
#include "qcurv/bubbles.hpp"
#include "qcurv/fit.hpp"
#include "qcurv/kernels.hpp"
#include "qcurv/parallel.hpp"
#include "qcurv/zonal.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <ostream>

namespace qcurv {

namespace {

// value at half-grid index i of an even, 2S-periodic sequence w_0..w_S
double reflect(const std::vector<double>& w, int i) {
    int S = static_cast<int>(w.size()) - 1;
    int P = 2 * S;
    i %= P;
    if (i < 0) i += P;
    if (i > S) i = P - i;
    return w[i];
}

double lagrange6(const std::vector<double>& w, double h, double t) {
    double x = t / h;
    int i0 = static_cast<int>(std::floor(x)) - 2;
    double s = 0.0;
    for (int a = 0; a < 6; ++a) {
        double l = 1.0;
        for (int b = 0; b < 6; ++b)
            if (b != a) l *= (x - (i0 + b)) / static_cast<double>(a - b);
        s += l * reflect(w, i0 + a);
    }
    return s;
}

std::vector<double> half(const std::vector<double>& full, int M) {
    return std::vector<double>(full.begin() + M / 2, full.end());
}

}  // namespace

double CylSolution::eval(double t) const {
    double h = 2.0 * L / M;
    return lagrange6(half(v, M), h, std::abs(t));
}

double CylSolution::eval_psi(double t) const {
    double h = 2.0 * L / M;
    return lagrange6(half(psi, M), h, std::abs(t));
}

double periodic_tower(double t, double L, const ProblemParams& P) {
    // reduce into [-L, L], then add the images that matter to 1e-16
    double T = 2.0 * L;
    t = std::remainder(t, T);
    int J = static_cast<int>(std::ceil(40.0 / (P.gamma_s * T))) + 1;
    double s = 0.0;
    for (int j = -J; j < J; ++j) s += v_sph(t - (2.0 * j + 1.0) * L, P);
    return s;
}

CylSolution solve_periodic(double L, const ProblemParams& P, int M, double tol, const DelaunayOptions& opt) {
    if (!(L >= 1.5)) throw ParamError("solve_periodic: L must be at least 1.5");
    if (M < 200 || M % 2 != 0) throw ParamError("solve_periodic: M must be even and at least 200");
    if (!(tol > 0.0)) throw ParamError("solve_periodic: tol must be positive");
    const double h = 2.0 * L / M;
    const double kappa = calibrated_kappa(P);
    const int S = M / 2;

    // circulant kernel K_m = R_per(m h), images until the tail is below 1e-16
    CylKernel R(P, KernelKind::riesz, 0, 1e-13);
    int J = static_cast<int>(std::ceil(37.0 / (2.0 * L * P.gamma_s))) + 1;
    std::vector<double> K(M);
    for (int m = 0; m < M; ++m) {
        double t = m * h;
        if (t > L) t -= 2.0 * L;
        double s = 0.0;
        for (int j = -J; j <= J; ++j) s += R.value(t - 2.0 * j * L);
        K[m] = s;
    }

    // even reduction: A(s, s') collects the grid points q with |q - S| = s'
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(S + 1, S + 1);
    double w = kappa * P.c_ns * h;
    for (int s = 0; s <= S; ++s)
        for (int q = 0; q < M; ++q) {
            int sp = std::abs(q - S);
            int m = ((s - (q - S)) % M + M) % M;
            A(s, sp) += w * K[m];
        }

    Eigen::VectorXd v(S + 1);
    for (int s = 0; s <= S; ++s) v[s] = opt.initial_scale * periodic_tower(s * h, L, P);
    const double p = P.nonlin_exp;
    auto residual = [&](const Eigen::VectorXd& x) -> Eigen::VectorXd {
        Eigen::VectorXd fp = x.array().pow(p).matrix();
        return x - A * fp;
    };
    Eigen::VectorXd G = residual(v);
    int it = 0;
    double res = G.cwiseAbs().maxCoeff();
    while (res > tol) {
        if (it >= opt.max_iter)
            throw SolverError("solve_periodic: Newton budget exhausted (residual " + std::to_string(res) + ")");
        Eigen::VectorXd d = (p * v.array().pow(p - 1.0)).matrix();
        Eigen::MatrixXd Jm = -A * d.asDiagonal();
        Jm.diagonal().array() += 1.0;
        Eigen::VectorXd step = Jm.partialPivLu().solve(-G);
        double t = 1.0;
        bool accepted = false;
        for (int b = 0; b < 12 && !accepted; ++b, t *= 0.5) {
            Eigen::VectorXd vn = v + t * step;
            if (vn.minCoeff() <= 0.0) continue;
            Eigen::VectorXd Gn = residual(vn);
            double rn = Gn.cwiseAbs().maxCoeff();
            if (rn < res) {
                v = vn;
                G = Gn;
                res = rn;
                accepted = true;
            }
        }
        if (!accepted)
            throw SolverError("solve_periodic: damped Newton step failed (residual " + std::to_string(res) + ")");
        ++it;
    }

    CylSolution sol;
    sol.L = L;
    sol.M = M;
    sol.kappa = kappa;
    sol.iters = it;
    sol.residual_norm = res;
    sol.grid.resize(M + 1);
    sol.v.resize(M + 1);
    sol.psi.resize(M + 1);
    for (int k = 0; k <= M; ++k) {
        double t = -L + k * h;
        sol.grid[k] = t;
        sol.v[k] = v[std::abs(k - S)];
        sol.psi[k] = sol.v[k] - periodic_tower(t, L, P);
    }
    sol.neck = v[0];
    return sol;
}

double delaunay_to_rn(const CylSolution& sol, const Point& x, const ProblemParams& P, double R) {
    double r = norm(x);
    if (r == 0.0) throw ParamError("delaunay_to_rn: x = 0");
    return std::pow(r, -P.gamma_s) * sol.eval(-std::log(r) + std::log(R));
}

bool is_constant_solution(const CylSolution& sol, double rel) {
    double m = 0.0;
    for (double x : sol.v) m = std::max(m, std::abs(x - sol.neck));
    return m <= rel * sol.neck;
}

NeckSweep neck_sweep(const std::vector<double>& L_list, const ProblemParams& P, int M, double tol, int threads) {
    if (L_list.size() < 3) throw ParamError("neck_sweep: need at least three periods");
    for (std::size_t i = 1; i < L_list.size(); ++i)
        if (!(L_list[i] > L_list[i - 1])) throw ParamError("neck_sweep: periods must increase");
    NeckSweep sw;
    sw.rows.resize(L_list.size());
    calibrated_kappa(P);
    parallel_for(
        static_cast<int>(L_list.size()),
        [&](int i) {
            SweepRow& row = sw.rows[i];
            row.L = L_list[i];
            try {
                CylSolution s = solve_periodic(row.L, P, M, tol);
                row.eps = s.neck;
                for (double x : s.psi) row.psi_sup = std::max(row.psi_sup, std::abs(x));
                row.resid = s.residual_norm;
                row.iters = s.iters;
                row.constant = is_constant_solution(s);
                row.ok = true;
            } catch (const std::exception& e) {
                row.error = e.what();
            }
        },
        threads);
    std::vector<double> Ls, le, lp;
    for (const SweepRow& r : sw.rows)
        if (r.ok) {
            Ls.push_back(r.L);
            le.push_back(r.eps);
            lp.push_back(r.psi_sup);
        }
    if (Ls.size() >= 2) {
        sw.slope_eps = fit_log(Ls, le).slope;
        sw.slope_psi = fit_log(Ls, lp).slope;
        sw.fitted = true;
    }
    return sw;
}

void write_sweep_csv(std::ostream& os, const NeckSweep& sweep) {
    os << "L,eps,psi_sup,resid,iters,constant\n";
    os.precision(17);
    for (const SweepRow& r : sweep.rows) {
        if (r.ok)
            os << r.L << ',' << r.eps << ',' << r.psi_sup << ',' << r.resid << ',' << r.iters << ','
               << (r.constant ? 1 : 0) << '\n';
        else
            os << r.L << ",nan,nan,nan,-1,0\n";
    }
}

}  // namespace qcurv
