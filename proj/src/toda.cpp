#include "qcurv/toda.hpp"

#include "qcurv/constants.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace qcurv {

double weighted_norm(const WeightedSeq& b) {
    double m = 0.0;
    for (int j = 0; j < b.K; ++j)
        for (int c = 0; c < b.dim; ++c) m = std::max(m, std::exp((2.0 * j + 1.0) * b.tau) * std::abs(b.at(j, c)));
    return m;
}

double TodaOperator::q() const { return kind == TodaKind::dilation ? 1.0 : std::exp(-2.0 * L); }

TodaOperator make_toda(TodaKind kind, int K, double L) {
    if (K < 1) throw ParamError("toda: K must be positive");
    if (kind == TodaKind::translation && !(L >= 0.0)) throw ParamError("toda: L must be nonnegative");
    return {kind, L, K};
}

WeightedSeq apply(const TodaOperator& op, const WeightedSeq& a) {
    if (a.K != op.K) throw ParamError("toda apply: dimension mismatch");
    double q = op.q();
    WeightedSeq out(a.K, a.dim, a.tau);
    for (int j = 0; j < a.K; ++j)
        for (int c = 0; c < a.dim; ++c) {
            double s = -a.at(j, c);
            if (j + 1 < a.K) s += (1.0 + q) * a.at(j + 1, c);
            if (j + 2 < a.K) s -= q * a.at(j + 2, c);
            out.at(j, c) = s;
        }
    return out;
}

WeightedSeq invert(const TodaOperator& op, const WeightedSeq& b, double tau) {
    if (b.K != op.K) throw ParamError("toda invert: dimension mismatch");
    if (!(tau > 0.0)) throw ParamError("toda invert: tau must be positive");
    double q = op.q();
    int K = b.K;
    // geometric inner sums S_m = sum_{s=0}^m q^s
    std::vector<double> S(K);
    double pw = 1.0, acc = 0.0;
    for (int m = 0; m < K; ++m) {
        acc += pw;
        S[m] = acc;
        pw *= q;
    }
    WeightedSeq a(K, b.dim, tau);
    for (int j = 0; j < K; ++j)
        for (int c = 0; c < b.dim; ++c) {
            double s = 0.0;
            for (int k = j; k < K; ++k) s += S[k - j] * b.at(k, c);
            a.at(j, c) = -s;
        }
    return a;
}

std::vector<double> dense_matrix(const TodaOperator& op) {
    int K = op.K;
    double q = op.q();
    std::vector<double> M(static_cast<std::size_t>(K) * K, 0.0);
    for (int j = 0; j < K; ++j) {
        M[j * K + j] = -1.0;
        if (j + 1 < K) M[j * K + j + 1] = 1.0 + q;
        if (j + 2 < K) M[j * K + j + 2] = -q;
    }
    return M;
}

double inverse_amplification(const TodaOperator& op, double tau) {
    double q = op.q();
    int K = op.K;
    double best = 0.0, S = 0.0, pw = 1.0, row = 0.0;
    // the weighted row sum depends only on K - j, and grows with it
    for (int m = 0; m < K; ++m) {
        S += pw;
        pw *= q;
        row += S * std::exp(-2.0 * m * tau);
        best = std::max(best, row);
    }
    return best;
}

double sampled_amplification(const TodaOperator& op, double tau, int samples, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    double best = 0.0;
    for (int s = 0; s < samples; ++s) {
        WeightedSeq b(op.K, 1, tau);
        for (int j = 0; j < op.K; ++j) b.at(j) = U(rng) * std::exp(-(2.0 * j + 1.0) * tau);
        double nb = weighted_norm(b);
        for (double& x : b.v) x /= nb;
        best = std::max(best, weighted_norm(invert(op, b, tau)));
    }
    return best;
}

}  // namespace qcurv
