#pragma once

#include "qcurv/constants.hpp"

#include <functional>
#include <vector>

namespace qcurv {

double norm(const Point& x);
double dist(const Point& x, const Point& y);

struct Bubble {
    double lambda = 1.0;
    Point center;
};

// U(x) = (2 lambda / (lambda^2 + |x - x0|^2))^{gamma_s}
double bubble_eval(const Point& x, const Bubble& b, const ProblemParams& P);
double bubble_dlambda(const Point& x, const Bubble& b, const ProblemParams& P);
// d U / d x_l, l = 0..n-1
double bubble_dx(const Point& x, const Bubble& b, int l, const ProblemParams& P);

// u_sph = U_{1,0}
double u_sph(const Point& x, const ProblemParams& P);

using RadialFn = std::function<double(double)>;

// e^{-gamma t} u(e^{-t})
double ef_forward(const RadialFn& u, double t, const ProblemParams& P);
// |x|^{-gamma} v(-ln|x|)
double ef_inverse(const RadialFn& v, const Point& x, const ProblemParams& P);

// Deformed tower at one singular point. Level j has
//   lambda_j = R (1 + r_j) e^{-(1+2j) L},  center x_i + a_j.
struct TowerConfig {
    int index = 0;
    Point center;
    double L = 0.0;
    int J = 0;
    double R = 1.0;
    std::vector<double> r;    // J+1 entries (empty = zero)
    std::vector<Point> a;     // J+1 translations (empty = zero)
    double tau = 0.5;         // admissibility weight
    double a_bound = 1e3;     // |a_j| <= a_bound lambda_j^2

    double t_level(int j) const { return (1.0 + 2.0 * j) * L; }
    double r_at(int j) const { return j >= 0 && j < static_cast<int>(r.size()) ? r[j] : 0.0; }
    double lambda(int j) const;
    Point level_center(int j) const;
    Bubble bubble(int j) const { return {lambda(j), level_center(j)}; }
};

// Smallest J with lambda_J^{gamma_s} < 1e-14 at unit R.
int default_truncation(double L, const ProblemParams& P);

TowerConfig make_tower(int index, const Point& center, double L, double R, const ProblemParams& P, int J = -1);

// Throws ParamError on inadmissible data.
void validate_tower(const TowerConfig& cfg, const ProblemParams& P);

// Sum over j = 0..J (half) or j = -J..J (full, with r = a = 0 for j < 0).
double tower_eval(const Point& x, const TowerConfig& cfg, bool half, const ProblemParams& P);

// Sum_j cosh(t - t_j + ln R)^{-gamma}, the EF picture of the undeformed tower.
double tower_ef(double t, double L, int J, double R, bool half, const ProblemParams& P);

struct KernelIndex {
    int i = 0;
    int j = 0;
    int ell = 0;  // 0 dilation, 1..n translations
};

// Z_{j,0} = d U / d r_j, Z_{j,l} = -lambda_j d U / d x_l.
double kernel_Z(const Point& x, const KernelIndex& idx, const TowerConfig& cfg, const ProblemParams& P);
// f'(U_j) Z
double cokernel_Zbar(const Point& x, const KernelIndex& idx, const TowerConfig& cfg, const ProblemParams& P);

}  // namespace qcurv
