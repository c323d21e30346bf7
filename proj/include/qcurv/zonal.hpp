#pragma once

#include "qcurv/bubbles.hpp"
#include "qcurv/constants.hpp"

#include <functional>
#include <memory>
#include <vector>

namespace qcurv {

// Calibrated dual operator for u radial about `center`:
//   kappa * int |x - y|^{2 sigma - n} c u(y)^p dy
// evaluated as |x - center|^{-gamma} kappa (R * c v^p)(t) in cylindrical coordinates.
// u is passed as a function of |y - center|.
double dual_apply_radial(const RadialFn& u, const Point& center, const Point& x, const ProblemParams& P,
                         double tol = 1e-9);

// Source density in cylindrical coordinates about a center:
//   W(tau, z) = e^{-gamma' tau} g(center + e^{-tau} omega),  z = omega . axis.
using EfSource = std::function<double(double tau, double z)>;

struct ZonalOptions {
    double h = 0.01;      // tau grid step, also the kernel table step
    int kmax = 24;        // highest zonal mode
    int nodes = 40;       // Gauss-Gegenbauer nodes in z
    double t_lo = -6.0;   // evaluation window in t = -ln|x - center|
    double t_hi = 20.0;
    int threads = 0;
};

// kappa * int |x - y|^{2 sigma - n} g(y) dy for g axisymmetric about the line
// center + R axis. Each zonal mode is a 1-D convolution with the mode kernel G_k.
class ZonalPotential {
public:
    ZonalPotential(const ProblemParams& P, const Point& center, const Point& axis, const EfSource& W,
                   const ZonalOptions& opt = {});

    // Throws ParamError outside the evaluation window.
    double eval(const Point& x) const;
    // e^{-gamma t} eval, at t and z = cos(angle to the axis).
    double eval_ef(double t, double z) const;

    const Point& center() const { return center_; }
    const Point& axis() const { return axis_; }
    double t_lo() const { return t_lo_; }
    double t_hi() const { return t_hi_; }
    int kmax() const { return kmax_; }
    // Largest |mode| over the window for the top two modes, a truncation indicator.
    double tail_indicator() const { return tail_; }

private:
    ProblemParams P_;
    Point center_;
    Point axis_;
    double kappa_ = 0.0;
    double h_ = 0.0;
    double t_lo_ = 0.0;
    double t_hi_ = 0.0;
    int kmax_ = 0;
    int nt_ = 0;
    std::vector<double> conv_;  // conv_[k * nt_ + m], t_m = t_lo + m h
    double tail_ = 0.0;
};

// The same potential at a point center + s axis on the axis, by direct adaptive
// quadrature in (ln r, z) about the center. g takes the displacement y - center.
// `breaks` lists extra radii where g is not smooth.
double riesz_on_axis(const std::function<double(const Point&)>& g, const Point& center, const Point& axis, double s,
                     const ProblemParams& P, double tol = 1e-7, const std::vector<double>& breaks = {});

// Unit vector perpendicular to `axis`.
Point perpendicular(const Point& axis);

// Calibrated kappa, cached per (n, sigma).
double calibrated_kappa(const ProblemParams& P);

}  // namespace qcurv
