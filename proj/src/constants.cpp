#include "qcurv/constants.hpp"

#include <array>
#include <cmath>
#include <numbers>

namespace qcurv {

namespace {

constexpr double kLanczosG = 7.0;
constexpr std::array<double, 9> kLanczos = {
    0.99999999999980993,     676.5203681218851,     -1259.1392167224028,
    771.32342877765313,      -176.61502916214059,   12.507343278686905,
    -0.13857109526572012,    9.9843695780195716e-6, 1.5056327351493116e-7};

}  // namespace

double gamma_fn(double z) {
    if (!(z > 0.0)) throw ParamError("gamma_fn: argument must be positive");
    if (z < 0.5) {
        // reflection keeps the series in its accurate range
        return std::numbers::pi / (std::sin(std::numbers::pi * z) * gamma_fn(1.0 - z));
    }
    if (z > 20.0) return std::exp(lgamma_fn(z));
    // push small arguments up with the recurrence, the series is most
    // accurate for z in [8, 20]
    double shift = 1.0;
    while (z < 8.0) {
        shift *= z;
        z += 1.0;
    }
    double x = z - 1.0;
    double a = kLanczos[0];
    double t = x + kLanczosG + 0.5;
    for (int i = 1; i < 9; ++i) a += kLanczos[i] / (x + i);
    double g = std::sqrt(2.0 * std::numbers::pi) * std::pow(t, x + 0.5) * std::exp(-t) * a;
    return g / shift;
}

double lgamma_fn(double z) {
    if (!(z > 0.0)) throw ParamError("lgamma_fn: argument must be positive");
    if (z < 20.0) return std::log(gamma_fn(z));
    double x = z - 1.0;
    double a = kLanczos[0];
    double t = x + kLanczosG + 0.5;
    for (int i = 1; i < 9; ++i) a += kLanczos[i] / (x + i);
    return 0.5 * std::log(2.0 * std::numbers::pi) + (x + 0.5) * std::log(t) - t + std::log(a);
}

double sphere_area(int k) {
    if (k < 0) throw ParamError("sphere_area: negative dimension");
    double h = 0.5 * (k + 1);
    return 2.0 * std::pow(std::numbers::pi, h) / gamma_fn(h);
}

double riesz_constant(int n, double sigma) {
    double g = 0.5 * (n - 2.0 * sigma);
    return gamma_fn(g) / (std::pow(4.0, sigma) * std::pow(std::numbers::pi, 0.5 * n) * gamma_fn(sigma));
}

double kappa_constant(int n, double s) {
    if (!(s > 0.0 && s < 1.0)) return 0.0;
    return std::pow(std::numbers::pi, -0.5 * n) * std::pow(2.0, 2.0 * s) * s *
           gamma_fn(0.5 * n + s) / gamma_fn(1.0 - s);
}

ProblemParams derive_params(int n, double sigma, bool allow_low_order) {
    if (n < 2) throw ParamError("derive_params: n must be at least 2");
    if (!(sigma > 0.0)) throw ParamError("derive_params: sigma must be positive");
    if (!(n > 2.0 * sigma)) throw ParamError("derive_params: need n > 2 sigma");
    if (sigma <= 1.0 && !allow_low_order)
        throw ParamError("derive_params: sigma <= 1 requires the low-order flag");

    ProblemParams P;
    P.n = n;
    P.sigma = sigma;
    P.m = static_cast<int>(std::floor(sigma));
    P.s = sigma - P.m;
    P.gamma_s = 0.5 * (n - 2.0 * sigma);
    P.gamma_s_dual = 0.5 * (n + 2.0 * sigma);
    P.crit_exp = 2.0 * n / (n - 2.0 * sigma);
    P.nonlin_exp = (n + 2.0 * sigma) / (n - 2.0 * sigma);
    double gp = gamma_fn(0.25 * (n + 2.0 * sigma));
    double gm = gamma_fn(0.25 * (n - 2.0 * sigma));
    P.c_ns = std::pow(2.0, 2.0 * sigma) * gp * gp / (gm * gm);
    P.q_ns = gamma_fn(P.gamma_s_dual) / gamma_fn(P.gamma_s);
    P.riesz_const = riesz_constant(n, sigma);
    P.kappa_ns = kappa_constant(n, P.s);
    return P;
}

double f_sigma(const ProblemParams& P, double xi) {
    return P.c_ns * std::pow(std::abs(xi), P.nonlin_exp);
}

double df_sigma(const ProblemParams& P, double xi) {
    return P.c_ns * P.nonlin_exp * std::pow(std::abs(xi), P.nonlin_exp - 1.0);
}

}  // namespace qcurv
