#pragma once

#include "qcurv/constants.hpp"

#include <functional>
#include <iosfwd>
#include <memory>
#include <vector>

namespace qcurv {

enum class KernelKind { singular, riesz };

// Zonal angular integrals behind the cylindrical kernels:
//   G_k(t) = 2^{-e} |S^{n-2}| int_{-1}^{1} (1-z^2)^{(n-3)/2} |cosh t - z|^{-e} P_k(z) dz
// with P_k the normalized Gegenbauer polynomial of degree k for R^n.
// k = 0 with e = gamma_s is the Riesz kernel, with e = gamma_s_dual the singular one.
class CylKernel {
public:
    CylKernel(const ProblemParams& P, KernelKind kind, int kmax = 0, double tol = 1e-12);

    const ProblemParams& params() const { return P_; }
    KernelKind kind() const { return kind_; }
    double exponent() const { return e_; }
    int kmax() const { return kmax_; }

    // Mode-k kernel at t. The cosh t - 1 argument may be given directly as delta.
    double value(double t, int k = 0) const;
    double value_delta(double delta, int k = 0) const;
    // Error estimate attached to the most recent direct quadrature (0 on the series branch).
    double value_with_error(double t, int k, double* err) const;

    // lim_{|t|->inf} e^{e|t|} G_0(t).
    double asymptotic_constant() const;

private:
    double direct(double delta, int k, double* err) const;
    double series(double E, int k) const;

    ProblemParams P_;
    KernelKind kind_;
    double e_;
    int kmax_;
    double tol_;
    double a_;       // (n-3)/2
    double alpha_;   // (n-2)/2
    double pref_;    // 2^{-e} |S^{n-2}|
    int mmax_;
    std::vector<double> coef_;  // coef_[k*(mmax+1)+m] = int w C_m^{(e)} P_k
};

// Free-function forms. t_min guards the singular kernel near 0.
double riesz_kernel_cyl(double t, const ProblemParams& P, double tol = 1e-10);
double singular_kernel_cyl(double t, const ProblemParams& P, double tol = 1e-10, double t_min = 1e-3);

struct PeriodizedValue {
    double value = 0.0;
    double tail_bound = 0.0;
};

// sum_{|j|<=J} k(t - 2jL). The tail bound extrapolates the first omitted images
// geometrically with ratio e^{-2 e L} (e the kernel decay exponent).
PeriodizedValue periodize(const std::function<double(double)>& kernel, double t, double L, int J,
                          double decay_exponent);

// C_{n,sigma} |x - y|^{2 sigma - n}.
double riesz_kernel_rn(const std::vector<double>& x, const std::vector<double>& y, const ProblemParams& P);

// Spherical profile in cylindrical coordinates.
double v_sph(double t, const ProblemParams& P);
double v_sph_prime(double t, const ProblemParams& P);

struct Calibration {
    double kappa = 0.0;
    double error_estimate = 0.0;
};

// kappa with v_sph(t0) = kappa * int R(t0 - tau) c v_sph(tau)^p dtau, default t0 = 0.
Calibration calibrate_cyl_kernel(const ProblemParams& P, double t0 = 0.0);

// kappa * int R(t - tau) c v_sph^p dtau - v_sph(t), relative to v_sph(t).
double calibration_identity_error(const ProblemParams& P, double kappa, double t);

// The standard-normalization prediction: kappa = C_{n,sigma} Q_{n,sigma} / c_{n,sigma}.
double kappa_closed_form(const ProblemParams& P);

// R_k(m h) for m = 0..count-1.
std::vector<double> kernel_table(const CylKernel& K, int k, double h, int count);

struct CylKernelTable {
    ProblemParams params;
    KernelKind kind = KernelKind::riesz;
    std::vector<double> grid;
    std::vector<double> values;
    std::vector<double> est_error;
    double calibration = 1.0;
};

CylKernelTable make_kernel_table(const ProblemParams& P, KernelKind kind, const std::vector<double>& grid,
                                 double calibration = 1.0, double tol = 1e-10);
void write_kernel_csv(std::ostream& os, const CylKernelTable& table);

}  // namespace qcurv
