#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace qcurv {

using Point = std::vector<double>;

class ParamError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Exponents and normalizing constants derived from (n, sigma).
struct ProblemParams {
    int n = 0;
    double sigma = 0.0;
    int m = 0;
    double s = 0.0;
    double gamma_s = 0.0;       // (n - 2 sigma) / 2
    double gamma_s_dual = 0.0;  // (n + 2 sigma) / 2
    double crit_exp = 0.0;      // 2n / (n - 2 sigma)
    double nonlin_exp = 0.0;    // (n + 2 sigma) / (n - 2 sigma)
    double c_ns = 0.0;
    double q_ns = 0.0;
    double riesz_const = 0.0;   // C_{n,sigma}, standard Riesz normalization
    double kappa_ns = 0.0;      // only meaningful for 0 < s < 1
};

// Accepts sigma in (0, 1] only when allow_low_order is set.
ProblemParams derive_params(int n, double sigma, bool allow_low_order = false);

// Lanczos approximation (g = 7, 9 terms) with reflection below 1/2.
double gamma_fn(double z);
double lgamma_fn(double z);

// Surface measure of the unit k-sphere in R^{k+1}.
double sphere_area(int k);

double riesz_constant(int n, double sigma);
double kappa_constant(int n, double s);

// f(xi) = c xi^p and f'(xi) = c p xi^(p-1) for xi >= 0.
double f_sigma(const ProblemParams& P, double xi);
double df_sigma(const ProblemParams& P, double xi);

}  // namespace qcurv
