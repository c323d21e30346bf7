#pragma once

#include "qcurv/balancing.hpp"
#include "qcurv/bubbles.hpp"
#include "qcurv/constants.hpp"
#include "qcurv/delaunay.hpp"
#include "qcurv/toda.hpp"
#include "qcurv/zonal.hpp"

#include <cstdint>
#include <memory>
#include <string>
#include <utility>
#include <vector>

namespace qcurv {

// Smooth monotone bump: 1 on [0, inner], 0 on [outer, inf).
struct Cutoff {
    double inner = 0.5;
    double outer = 1.0;
    bool active = true;

    double operator()(double r) const;
    static Cutoff none() { return {0.5, 1.0, false}; }
};

struct AssembleOptions {
    int M = 800;                // Delaunay grid
    double solver_tol = 1e-10;  // Delaunay Newton tolerance
    int J = -1;                 // tower truncation, -1 for default_truncation
    Cutoff cutoff;
    int partition_power = 12;   // psi_i ~ |y - x_i|^{-m} partition of the source
};

// Per point: translation perturbation a~ (dim n) and dilation perturbation r (dim 1).
struct Perturbation {
    WeightedSeq a;
    WeightedSeq r;
};

// u = sum_i [ deformed half tower_i + chi_i (u_D,i - standard half tower_i) ]
struct ApproxSolution {
    ProblemParams P;
    SingularSet sigma;
    std::vector<TowerConfig> towers;  // deformed
    std::vector<TowerConfig> base;    // r = a = 0, same R, L, J
    std::vector<std::shared_ptr<const CylSolution>> delaunay;
    Cutoff cutoff;
    int partition_power = 12;
    Point axis;                       // common symmetry axis

    int size() const { return sigma.size(); }
    double eval(const Point& x) const;
    // u_D,i at x = x_i + dx
    double delaunay_local(int i, const Point& dx) const;
    // Deformed towers plus phi_i without any cutoff (valid where chi_i = 1).
    double raw_sum(int i, const Point& x) const;
    // u - u_D,i at x = x_i + dx
    double remainder_local(int i, const Point& dx) const;
    // u - sum_i u_D,i
    double excess(const Point& x) const;
    // Partition weight psi_i at x_i + dx and its complement 1 - psi_i.
    void partition_local(int i, const Point& dx, double* psi, double* comp) const;
    double dist_to_sigma(const Point& x) const;
};

// Builds the towers of the balanced configuration with a_j = lambda_j^2 (a0_hat + a~_j).
// Rejects inadmissible perturbations, overlapping unit balls and configurations
// without a common axis.
ApproxSolution assemble(const SingularSet& sigma, const BalancedConfig& B, const std::vector<Perturbation>& perturb,
                        const ProblemParams& P, const AssembleOptions& opt = {});

// One singular point with undeformed tower.
ApproxSolution assemble_single(const Point& center, double L, double R, const ProblemParams& P,
                               const AssembleOptions& opt = {});

// dual(f(u)) = sum_i u_D,i + sum_i dual(S_i) with S_i = psi_i f(u) - f(u_D,i); the
// Delaunay identity removes the singular part, the S_i are zonal potentials about x_i.
class ResidualField {
public:
    ResidualField(std::shared_ptr<const ApproxSolution> u, const ZonalOptions& opt = {});

    const ApproxSolution& solution() const { return *u_; }
    // e^{-gamma' tau} S_i(x_i + e^{-tau} omega), z = omega . axis
    double source_ef(int i, double tau, double z) const;
    // S_i at x_i + dx
    double source_local(int i, const Point& dx) const;
    // kappa int |x - y|^{2 sigma - n} f(u(y)) dy
    double dual(const Point& x) const;
    // N(u)(x) = u(x) - dual(f(u))(x)
    double residual(const Point& x) const;
    const ZonalPotential& potential(int i) const { return *pots_[i]; }

    struct SpotCheck {
        Point x;
        double zonal = 0.0;
        double oracle = 0.0;
        double rel = 0.0;
    };
    // Direct on-axis quadrature of sum_i dual(S_i) at x_1 + s axis.
    SpotCheck spot_check(double s, double tol = 1e-7) const;

private:
    std::shared_ptr<const ApproxSolution> u_;
    std::vector<std::unique_ptr<ZonalPotential>> pots_;
};

// dual_apply for an assembled solution.
double dual_apply(const ResidualField& F, const Point& x);

enum class WeightKind { star, starstar };

struct WeightSpec {
    double zeta1 = 0.0;
    double tau = 0.1;
    WeightKind kind = WeightKind::starstar;

    // Exponents (zeta_near, zeta_far) of the norm ||dist^{-zeta_near} u|| + |||x|^{-zeta_far} u||.
    double zeta_near(const ProblemParams& P) const;
    double zeta_far(const ProblemParams& P) const;
};

// zeta1 at the midpoint of (-gamma, min(-gamma + 2 sigma, 0)). Throws on an empty window.
WeightSpec default_weight(const ProblemParams& P, WeightKind kind = WeightKind::starstar, double tau = 0.1);
void validate_weight(const WeightSpec& w, const ProblemParams& P);

enum class Region { near, transition, far };

struct Sample {
    Point x;
    Region region = Region::near;
    double dist = 0.0;    // to the singular set
    double radius = 0.0;  // |x - centroid|
};

// Graded grid: per point, rays along, against, across and oblique to the axis plus
// `extra` seeded random directions, radii e^{-s} for s up to 2 L_i, transition radii,
// and far points around the centroid out to |x| = 50.
std::vector<Sample> make_samples(const ApproxSolution& u, std::uint64_t seed = 1, int per_ray = 16, int extra = 2);

Region region_of(double dist);
const char* region_name(Region r);

// max over near and transition samples of dist^{-zeta_near}|v| and over far samples of
// |x|^{-zeta_far}|v|.
double weighted_fn_norm(const std::vector<Sample>& samples, const std::vector<double>& values, const WeightSpec& w,
                        const ProblemParams& P);

struct ResidualReport {
    double L = 0.0;
    WeightSpec weight;
    std::uint64_t seed = 0;
    double near = 0.0;        // weighted sup per region
    double transition = 0.0;
    double far = 0.0;
    double weighted = 0.0;    // max of the three
    double sup_abs = 0.0;     // unweighted sup
    int counts[3] = {0, 0, 0};
    std::vector<Sample> samples;
    std::vector<double> values;  // N(u) at the samples
    std::vector<ResidualField::SpotCheck> spot_checks;
    double zonal_tail = 0.0;
};

ResidualReport residual(const ResidualField& F, const WeightSpec& w, const std::vector<Sample>& samples,
                        int spot_checks = 3, double tol = 1e-7);

// beta = int N(u) Zbar_{j,ell}^i dx in cylindrical coordinates about x_i.
double beta_projection(const ResidualField& F, const KernelIndex& idx, double h = 0.01, int nodes = 40);

// -c q_i [A2 sum_{k != i} |x_k - x_i|^{2 sigma - n} (R_i R_k)^gamma q_k - q_i] e^{-gamma L}
double beta00_leading(const SingularSet& sigma, const std::vector<double>& q, const std::vector<double>& R, double A2,
                      double L, int i, const ProblemParams& P);

}  // namespace qcurv
