#pragma once

#include <functional>
#include <stdexcept>
#include <vector>

namespace qcurv {

class QuadratureError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct QuadResult {
    double value = 0.0;
    double error = 0.0;
    int evaluations = 0;
};

struct QuadOptions {
    double rel_tol = 1e-10;
    double abs_tol = 0.0;
    int max_intervals = 4000;
};

using Fn1 = std::function<double(double)>;

// Globally adaptive Gauss-Kronrod (10/21) with bisection of the worst interval.
// Throws QuadratureError when the interval budget runs out before the target.
QuadResult integrate(const Fn1& f, double a, double b, const QuadOptions& opt = {});

// Same, with the range pre-split at the given interior points.
QuadResult integrate_breaks(const Fn1& f, const std::vector<double>& points,
                            const QuadOptions& opt = {});

// Integral over [a, inf) through x = a + s/(1-s).
QuadResult integrate_to_inf(const Fn1& f, double a, const QuadOptions& opt = {});

struct GaussRule {
    std::vector<double> x;
    std::vector<double> w;
};

// Nodes and weights for the weight (1-x^2)^a on [-1, 1], a > -1 (Golub-Welsch).
GaussRule gauss_gegenbauer(int npts, double a);

// Gegenbauer polynomials normalized by their value at 1:
// P_k(x) = C_k^{(alpha)}(x) / C_k^{(alpha)}(1), k = 0..kmax. alpha = 0 gives Chebyshev T.
void zonal_polys(double x, double alpha, int kmax, double* out);

// C_m^{(lambda)}(x) for m = 0..mmax (unnormalized generating-function convention).
void gegenbauer_c(double x, double lambda, int mmax, double* out);

}  // namespace qcurv
