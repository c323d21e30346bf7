#pragma once

#include <cstdint>
#include <vector>

namespace qcurv {

// b_0..b_{K-1}, each entry of dimension dim, stored level-major.
struct WeightedSeq {
    int K = 0;
    int dim = 1;
    double tau = 0.0;
    std::vector<double> v;

    WeightedSeq() = default;
    WeightedSeq(int K_, int dim_, double tau_) : K(K_), dim(dim_), tau(tau_), v(static_cast<std::size_t>(K_) * dim_, 0.0) {}
    double& at(int j, int c = 0) { return v[static_cast<std::size_t>(j) * dim + c]; }
    double at(int j, int c = 0) const { return v[static_cast<std::size_t>(j) * dim + c]; }
};

// max_j e^{(2j+1) tau} |b_j|_inf
double weighted_norm(const WeightedSeq& b);

enum class TodaKind { translation, dilation };

// Row j acts as -a_j + (1+q) a_{j+1} - q a_{j+2}, with q = e^{-2L} (translation)
// or q = 1 (dilation, the (-1, 2, -1) band). Indices >= K are zero.
struct TodaOperator {
    TodaKind kind = TodaKind::translation;
    double L = 0.0;
    int K = 0;

    double q() const;
};

TodaOperator make_toda(TodaKind kind, int K, double L = 0.0);

WeightedSeq apply(const TodaOperator& op, const WeightedSeq& a);

// a_j = -sum_{k>=j} (sum_{s=0}^{k-j} q^s) b_k, the exact inverse on the truncation.
WeightedSeq invert(const TodaOperator& op, const WeightedSeq& b, double tau);

// Dense K x K matrix of the truncated operator (row-major).
std::vector<double> dense_matrix(const TodaOperator& op);

// Operator norm of the inverse on the tau-weighted sup space:
// max_j sum_k |T^{-1}_{jk}| e^{(2j+1)tau - (2k+1)tau}.
double inverse_amplification(const TodaOperator& op, double tau);

// Largest |invert(b)|_tau over `samples` random b normalized to |b|_tau = 1.
double sampled_amplification(const TodaOperator& op, double tau, int samples, std::uint64_t seed);

}  // namespace qcurv
