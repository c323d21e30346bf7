#pragma once

#include "qcurv/constants.hpp"
#include "qcurv/interactions.hpp"

#include <vector>

namespace qcurv {

class SolverError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct SingularSet {
    std::vector<Point> points;

    int size() const { return static_cast<int>(points.size()); }
    double distance(int i, int k) const;
};

// Requires N >= 2, a common dimension n and pairwise distances >= 2.
SingularSet make_singular_set(const std::vector<Point>& points, const ProblemParams& P);

struct BalancedConfig {
    std::vector<double> q;
    std::vector<double> R;
    std::vector<Point> a0_hat;
    double L = 0.0;
    std::vector<double> L_i;
    double residual_B1 = 0.0;
    double residual_B2 = 0.0;
    int iterations = 0;
};

// F_i(q, R) = A2 sum_{k != i} |x_k - x_i|^{-2 gamma} (R_i R_k)^gamma q_k - q_i
std::vector<double> balance_F(const SingularSet& S, const std::vector<double>& q, const std::vector<double>& R,
                              double A2, const ProblemParams& P);

// Newton in ln R (minimum-norm steps, backtracking). Throws SolverError.
std::vector<double> solve_B1(const SingularSet& S, const std::vector<double>& q, const InteractionConstants& C,
                             const ProblemParams& P, double tol = 1e-12, int* iterations = nullptr);

// a0_hat_i = -(A3/A1) sum_{k != i} (x_k - x_i) |x_k - x_i|^{-2 gamma - 2} (q_k / q_i) (R_i R_k)^gamma
std::vector<Point> solve_B2(const SingularSet& S, const std::vector<double>& q, const std::vector<double>& R,
                            const InteractionConstants& C, const ProblemParams& P);

// L_i = L - ln(q_i) / gamma; rejects L_i <= 1.
std::vector<double> periods_from_q(const std::vector<double>& q, double L, const ProblemParams& P);
std::vector<double> q_from_periods(const std::vector<double>& L_i, double L, const ProblemParams& P);

BalancedConfig balance(const SingularSet& S, const std::vector<double>& q, double L, const InteractionConstants& C,
                       const ProblemParams& P, double tol = 1e-12);

struct JacobianReport {
    std::vector<std::vector<double>> dF_q;     // N x N
    std::vector<std::vector<double>> dF_R;     // N x N
    std::vector<double> q_block_singular;      // descending
    int q_kernel_dim = 0;
    double kernel_angle = 0.0;                 // between the q-block null vector and q
    std::vector<double> dF_R_of_R;             // dF_R applied to R
    std::vector<double> dF_R_diag_of_R;        // its own-coordinate part
    double homogeneity_error = 0.0;            // |dF_R(R) - gamma q|_inf
    double diag_homogeneity_error = 0.0;       // |diag part - gamma q|_inf
    double min_singular = 0.0;                 // of the full N x 2N map
    bool ill_conditioned = false;
};

JacobianReport balance_jacobian(const SingularSet& S, const std::vector<double>& q, const std::vector<double>& R,
                                const InteractionConstants& C, const ProblemParams& P, double kernel_tol = 1e-8);

}  // namespace qcurv
