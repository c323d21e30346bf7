#pragma once

#include "qcurv/bubbles.hpp"
#include "qcurv/constants.hpp"

#include <string>
#include <vector>

namespace qcurv {

enum class ConstMethod { closed_integral, oracle_fit };

struct InteractionConstants {
    double A1 = 0.0, A2 = 0.0, A3 = 0.0;
    ConstMethod method = ConstMethod::closed_integral;
    double est_error = 0.0;
};

class ConstantsMismatch : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A1 as printed. A2 and A3 with the decay exponent -(gamma' + 1):
//   A2 = (n+2s)/2 int (|x|^2-1)(1+|x|^2)^{-gamma'-1},  A3 = -(n-2s)^2/n int |x|^2 (1+|x|^2)^{-gamma'-1}
double const_A1(const ProblemParams& P, double tol = 1e-10);
double const_A2(const ProblemParams& P, double tol = 1e-10);
double const_A3(const ProblemParams& P, double tol = 1e-10);
InteractionConstants interaction_constants(const ProblemParams& P, double tol = 1e-10);

// Bubble normalization used by the interaction integrals.
//   standard: U = (2 l/(l^2+r^2))^gamma, f'(u) = c p u^{p-1}
//   unit:  U = (l/(l^2+r^2))^gamma,   f'(u) = p u^{p-1}
enum class Normalization { standard, unit };

// int f'(U1) U2 d_{l1} U1 dx, both bubbles centered at 0.
double interaction_lambda(double l1, double l2, const ProblemParams& P, double tol = 1e-10,
                          Normalization nrm = Normalization::standard);

// U1 at 0 with scale l1, U3 at x2 with scale l3. mode 0 pairs with d_{l1} U1,
// mode l >= 1 with the spatial derivative d_{x_l} U1.
double interaction_faraway(double l1, double l3, const Point& x2, int mode, const ProblemParams& P,
                           double tol = 1e-9, Normalization nrm = Normalization::standard);

struct OracleFit {
    double A2 = 0.0, A3 = 0.0;            // extrapolated, unit normalization
    std::vector<double> lambdas;
    std::vector<double> A2_samples, A3_samples;
    double standard_factor = 0.0;            // standard / unit ratio of the raw integral
    double d = 2.0;
};

// Fits I ~ A2 d^{2s-n} (l1 l3)^gamma / l1 and I ~ A3 d^{2s-n-1} (l1 l3)^gamma
// on x2 = d e_1 at l1 = l3 in lambdas, extrapolated in l^2.
OracleFit oracle_fit(const ProblemParams& P, double d = 2.0, const std::vector<double>& lambdas = {1e-2, 1e-3},
                     double tol = 1e-9);

InteractionConstants as_constants(const OracleFit& f, double A1);

struct ConstantsComparison {
    double rel_A2 = 0.0, rel_A3 = 0.0;
    bool agree = false;
};
ConstantsComparison compare_constants(const InteractionConstants& closed, const OracleFit& fit, double rel = 0.02);
// Throws ConstantsMismatch when compare_constants fails.
void certify_constants(const InteractionConstants& closed, const OracleFit& fit, double rel = 0.02);

// Same-point coefficient A0 between two scales, fitted at scale ratio l1/l2 (unit normalization).
double fit_A0(const ProblemParams& P, double ratio, double tol = 1e-10);

// Psi(l) = int f'(v(t)) v(t+l) v'(t) dt with v = v_sph (odd in l).
double psi(double ell, const ProblemParams& P, double tol = 1e-11);

// Gram matrix over the (j, l) pairs of one undeformed tower, index j (n+1) + l.
// l = l' = 0: int Zbar_{j,0} Z_{j',0};  l, l' >= 1: int Zbar_{j,l} Zbar_{j',l'}.
// Mixed dilation/translation pairs vanish exactly.
std::vector<std::vector<double>> gram_cokernels(const TowerConfig& cfg, const ProblemParams& P,
                                                double tol = 1e-9);

std::string method_name(ConstMethod m);

}  // namespace qcurv
