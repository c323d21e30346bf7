#pragma once

#include "qcurv/constants.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace qcurv {

// Even 2L-periodic solution of v = kappa R_per * (c v^p) on the uniform grid
// t_k = -L + k h, h = 2L/M, k = 0..M (t_M = L repeats t_0).
struct CylSolution {
    double L = 0.0;
    int M = 0;
    std::vector<double> grid;
    std::vector<double> v;
    std::vector<double> psi;     // v minus the periodic tower with bubbles at (2j+1)L
    double neck = 0.0;           // v(0)
    double residual_norm = 0.0;
    int iters = 0;
    double kappa = 0.0;

    // v at any real t (periodic reduction, even reflection, 6-point Lagrange).
    double eval(double t) const;
    double eval_psi(double t) const;
};

struct DelaunayOptions {
    double initial_scale = 1.0;  // Newton starts from initial_scale * tower
    int max_iter = 50;
};

// Throws SolverError (from balancing.hpp) on Newton failure and ParamError on bad input.
CylSolution solve_periodic(double L, const ProblemParams& P, int M = 800, double tol = 1e-10,
                           const DelaunayOptions& opt = {});

// Periodic tower sum_j v_sph(t - (2j+1)L) over all images.
double periodic_tower(double t, double L, const ProblemParams& P);

// |x|^{-gamma} v(-ln|x| + ln R); the neck sits at |x| = R.
double delaunay_to_rn(const CylSolution& sol, const Point& x, const ProblemParams& P, double R = 1.0);

struct SweepRow {
    double L = 0.0;
    double eps = 0.0;
    double psi_sup = 0.0;
    double resid = 0.0;
    int iters = 0;
    bool constant = false;  // converged to the t-independent cylinder solution
    bool ok = false;
    std::string error;
};

struct NeckSweep {
    std::vector<SweepRow> rows;
    double slope_eps = 0.0;
    double slope_psi = 0.0;
    bool fitted = false;
};

// max_t |v(t) - v(0)| <= rel * v(0)
bool is_constant_solution(const CylSolution& sol, double rel = 1e-6);

NeckSweep neck_sweep(const std::vector<double>& L_list, const ProblemParams& P, int M = 800, double tol = 1e-10,
                     int threads = 0);

void write_sweep_csv(std::ostream& os, const NeckSweep& sweep);

}  // namespace qcurv
