#include "qcurv/balancing.hpp"

#include "qcurv/bubbles.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>

namespace qcurv {

double SingularSet::distance(int i, int k) const { return dist(points[i], points[k]); }

SingularSet make_singular_set(const std::vector<Point>& points, const ProblemParams& P) {
    if (points.size() < 2) throw ParamError("singular set: need at least two points");
    for (const Point& p : points)
        if (static_cast<int>(p.size()) != P.n) throw ParamError("singular set: points must lie in R^n");
    SingularSet S{points};
    for (int i = 0; i < S.size(); ++i)
        for (int k = i + 1; k < S.size(); ++k)
            if (S.distance(i, k) < 2.0) throw ParamError("singular set: pairwise distances must be at least 2");
    return S;
}

namespace {

void check_q(const SingularSet& S, const std::vector<double>& q) {
    if (static_cast<int>(q.size()) != S.size()) throw ParamError("balancing: q has wrong length");
    for (double v : q)
        if (!(v > 0.0)) throw ParamError("balancing: q must be positive");
}

double coupling(const SingularSet& S, int i, int k, const std::vector<double>& R, double A2, const ProblemParams& P) {
    double g = P.gamma_s;
    return A2 * std::pow(S.distance(i, k), -2.0 * g) * std::pow(R[i] * R[k], g);
}

}  // namespace

std::vector<double> balance_F(const SingularSet& S, const std::vector<double>& q, const std::vector<double>& R,
                              double A2, const ProblemParams& P) {
    int N = S.size();
    std::vector<double> F(N);
    for (int i = 0; i < N; ++i) {
        double s = 0.0;
        for (int k = 0; k < N; ++k)
            if (k != i) s += coupling(S, i, k, R, A2, P) * q[k];
        F[i] = s - q[i];
    }
    return F;
}

std::vector<double> solve_B1(const SingularSet& S, const std::vector<double>& q, const InteractionConstants& C,
                             const ProblemParams& P, double tol, int* iterations) {
    check_q(S, q);
    if (!(C.A2 > 0.0)) throw ParamError("solve_B1: A2 must be positive");
    int N = S.size();
    double dmin = 1e300;
    for (int i = 0; i < N; ++i)
        for (int k = i + 1; k < N; ++k) dmin = std::min(dmin, S.distance(i, k));
    double g = P.gamma_s;
    Eigen::VectorXd y = Eigen::VectorXd::Constant(N, std::log(dmin * std::pow(C.A2, -0.5 / g)));
    auto residual = [&](const Eigen::VectorXd& yy) {
        std::vector<double> R(N);
        for (int i = 0; i < N; ++i) R[i] = std::exp(yy[i]);
        std::vector<double> F = balance_F(S, q, R, C.A2, P);
        return Eigen::Map<Eigen::VectorXd>(F.data(), N).eval();
    };
    Eigen::VectorXd F = residual(y);
    int it = 0;
    for (; it < 100 && F.cwiseAbs().maxCoeff() > tol; ++it) {
        std::vector<double> R(N);
        for (int i = 0; i < N; ++i) R[i] = std::exp(y[i]);
        Eigen::MatrixXd Jm(N, N);
        for (int i = 0; i < N; ++i) {
            double diag = 0.0;
            for (int k = 0; k < N; ++k) {
                if (k == i) continue;
                double c = g * coupling(S, i, k, R, C.A2, P) * q[k];
                Jm(i, k) = c;
                diag += c;
            }
            Jm(i, i) = diag;
        }
        Eigen::VectorXd step = Jm.completeOrthogonalDecomposition().solve(-F);
        double t = 1.0, f0 = F.norm();
        Eigen::VectorXd Fn;
        for (int b = 0; b < 40; ++b, t *= 0.5) {
            Fn = residual(y + t * step);
            if (Fn.allFinite() && Fn.norm() < f0) break;
        }
        if (!(Fn.allFinite() && Fn.norm() < f0)) throw SolverError("solve_B1: line search failed (residual " +
                                                                    std::to_string(F.cwiseAbs().maxCoeff()) + ")");
        y += t * step;
        F = Fn;
    }
    if (F.cwiseAbs().maxCoeff() > tol)
        throw SolverError("solve_B1: no convergence (residual " + std::to_string(F.cwiseAbs().maxCoeff()) + ")");
    if (iterations) *iterations = it;
    std::vector<double> R(N);
    for (int i = 0; i < N; ++i) R[i] = std::exp(y[i]);
    return R;
}

std::vector<Point> solve_B2(const SingularSet& S, const std::vector<double>& q, const std::vector<double>& R,
                            const InteractionConstants& C, const ProblemParams& P) {
    check_q(S, q);
    if (!(C.A1 > 0.0)) throw ParamError("solve_B2: A1 must be positive");
    int N = S.size();
    double g = P.gamma_s;
    std::vector<Point> a(N, Point(P.n, 0.0));
    for (int i = 0; i < N; ++i)
        for (int k = 0; k < N; ++k) {
            if (k == i) continue;
            double d = S.distance(i, k);
            double w = -(C.A3 / C.A1) * std::pow(d, -2.0 * g - 2.0) * (q[k] / q[i]) * std::pow(R[i] * R[k], g);
            for (int l = 0; l < P.n; ++l) a[i][l] += w * (S.points[k][l] - S.points[i][l]);
        }
    return a;
}

std::vector<double> periods_from_q(const std::vector<double>& q, double L, const ProblemParams& P) {
    if (!(L > 0.0)) throw ParamError("periods_from_q: L must be positive");
    std::vector<double> Li;
    for (double v : q) {
        if (!(v > 0.0)) throw ParamError("periods_from_q: q must be positive");
        double l = L - std::log(v) / P.gamma_s;
        if (!(l > 1.0)) throw ParamError("periods_from_q: period below the solver floor 1");
        Li.push_back(l);
    }
    return Li;
}

std::vector<double> q_from_periods(const std::vector<double>& L_i, double L, const ProblemParams& P) {
    std::vector<double> q;
    for (double l : L_i) q.push_back(std::exp(P.gamma_s * (L - l)));
    return q;
}

BalancedConfig balance(const SingularSet& S, const std::vector<double>& q, double L, const InteractionConstants& C,
                       const ProblemParams& P, double tol) {
    BalancedConfig B;
    B.q = q;
    B.L = L;
    B.L_i = periods_from_q(q, L, P);
    B.R = solve_B1(S, q, C, P, tol, &B.iterations);
    B.a0_hat = solve_B2(S, q, B.R, C, P);
    std::vector<double> F = balance_F(S, q, B.R, C.A2, P);
    for (double f : F) B.residual_B1 = std::max(B.residual_B1, std::abs(f));
    // (B2) in the a_0 / lambda_0^2 form
    for (int i = 0; i < S.size(); ++i) {
        double lam = B.R[i] * std::exp(-B.L_i[i]);
        for (int l = 0; l < P.n; ++l) {
            double a0 = B.a0_hat[i][l] * lam * lam;
            double rhs = 0.0;
            for (int k = 0; k < S.size(); ++k) {
                if (k == i) continue;
                double d = S.distance(i, k);
                rhs += -(C.A3 / C.A1) * (S.points[k][l] - S.points[i][l]) * std::pow(d, -2.0 * P.gamma_s - 2.0) *
                       (q[k] / q[i]) * std::pow(B.R[i] * B.R[k], P.gamma_s);
            }
            B.residual_B2 = std::max(B.residual_B2, std::abs(a0 / (lam * lam) - rhs));
        }
    }
    return B;
}

JacobianReport balance_jacobian(const SingularSet& S, const std::vector<double>& q, const std::vector<double>& R,
                                const InteractionConstants& C, const ProblemParams& P, double kernel_tol) {
    check_q(S, q);
    int N = S.size();
    double g = P.gamma_s;
    JacobianReport rep;
    Eigen::MatrixXd Q(N, N), Rm(N, N);
    for (int i = 0; i < N; ++i) {
        double diag = 0.0;
        for (int k = 0; k < N; ++k) {
            if (k == i) continue;
            double c = coupling(S, i, k, R, C.A2, P);
            Q(i, k) = c;
            Rm(i, k) = g / R[k] * c * q[k];
            diag += g / R[i] * c * q[k];
        }
        Q(i, i) = -1.0;
        Rm(i, i) = diag;
    }
    Eigen::JacobiSVD<Eigen::MatrixXd> sq(Q, Eigen::ComputeFullV);
    Eigen::VectorXd sv = sq.singularValues();
    rep.q_block_singular.assign(sv.data(), sv.data() + N);
    double scale = sv(0);
    for (int i = 0; i < N; ++i)
        if (sv(i) <= kernel_tol * scale) ++rep.q_kernel_dim;
    Eigen::VectorXd nul = sq.matrixV().col(N - 1);
    Eigen::Map<const Eigen::VectorXd> qv(q.data(), N);
    Eigen::VectorXd qh = qv / qv.norm();
    Eigen::VectorXd nh = nul / nul.norm();
    Eigen::VectorXd perp = nh - nh.dot(qh) * qh;
    rep.kernel_angle = std::atan2(perp.norm(), std::abs(nh.dot(qh)));
    Eigen::Map<const Eigen::VectorXd> Rv(R.data(), N);
    Eigen::VectorXd full = Rm * Rv;
    Eigen::VectorXd diag = Rm.diagonal().cwiseProduct(Rv);
    rep.dF_R_of_R.assign(full.data(), full.data() + N);
    rep.dF_R_diag_of_R.assign(diag.data(), diag.data() + N);
    rep.homogeneity_error = (full - g * qv).cwiseAbs().maxCoeff();
    rep.diag_homogeneity_error = (diag - g * qv).cwiseAbs().maxCoeff();
    Eigen::MatrixXd M(N, 2 * N);
    M << Q, Rm;
    Eigen::JacobiSVD<Eigen::MatrixXd> sm(M);
    rep.min_singular = sm.singularValues()(N - 1);
    rep.ill_conditioned = rep.min_singular < 1e-10;
    rep.dF_q.assign(N, std::vector<double>(N));
    rep.dF_R.assign(N, std::vector<double>(N));
    for (int i = 0; i < N; ++i)
        for (int k = 0; k < N; ++k) {
            rep.dF_q[i][k] = Q(i, k);
            rep.dF_R[i][k] = Rm(i, k);
        }
    return rep;
}

}  // namespace qcurv
