#include "mmtc/sparse_rls.hpp"

#include <cmath>

namespace mmtc {

AdaptiveFilter::AdaptiveFilter(Index length, double lambda_, double p_init) : lambda(lambda_) {
    require(length >= 1, "AdaptiveFilter: length must be positive");
    require(lambda_ > 0.0 && lambda_ <= 1.0, "AdaptiveFilter: lambda must lie in (0, 1]");
    require(p_init > 0.0, "AdaptiveFilter: initial P scale must be positive");
    w = CVector::Zero(length);
    p_scaled_ = CMatrix::Identity(length, length) * p_init;
    py_.resize(length);
    nz_.reserve(length);
    support_.reserve(length);
}

void AdaptiveFilter::set_P(const CMatrix& P) {
    require(P.rows() == length() && P.cols() == length(), "set_P: dimension mismatch");
    p_scaled_ = P;
    scale_ = 1.0;
}

namespace {

double checked_denominator(cd denom) {
    if (!std::isfinite(denom.real()) || denom.real() <= 0.0)
        throw NumericalBreakdown("gain_vector: non-positive or non-finite denominator");
    return denom.real();
}

// Keeps scale_ within a range where P_scaled neither overflows nor underflows.
constexpr double kScaleLimit = 1e64;

}  // namespace

CVector gain_vector(const AdaptiveFilter& filter, const CVector& y) {
    require(y.size() == filter.length(), "gain_vector: dimension mismatch");
    const CVector Py = filter.P() * y;
    return Py / checked_denominator(filter.lambda + y.dot(Py));  // dot() conjugates its left operand
}

void update_inverse(AdaptiveFilter& filter, const CVector& k, const CVector& y) {
    require(k.size() == filter.length() && y.size() == filter.length(), "update_inverse: dimension mismatch");
    CMatrix P = filter.P();
    const Eigen::RowVectorXcd yHP = y.adjoint() * P;
    P.noalias() -= k * yHP;
    P /= filter.lambda;
    filter.set_P(0.5 * (P + P.adjoint()));
}

cd complex_sign(cd w) {
    const double mag = std::abs(w);
    return mag == 0.0 ? cd{0.0, 0.0} : w / mag;
}

double f_beta(double mag, double beta) {
    return mag <= 1.0 / beta ? beta * beta * mag - beta : 0.0;
}

cd zero_attract(cd w, const AttractorParams& params) {
    const double mag = std::abs(w);
    if (mag == 0.0 || params.gamma == 0.0) return w;
    const double shrink = -params.gamma * f_beta(mag, params.beta);  // >= 0
    if (shrink >= mag) return {0.0, 0.0};
    return w * ((mag - shrink) / mag);
}

void zero_attract(CVector& w, const AttractorParams& params) {
    if (params.gamma == 0.0) return;
    for (Index p = 0; p < w.size(); ++p) w[p] = zero_attract(w[p], params);
}

RlsStepResult rls_step(AdaptiveFilter& filter, const CVector& y, cd desired, const AttractorParams& params,
                       OpCounter* ops) {
    const Index L = filter.length();
    require(y.size() == L, "rls_step: dimension mismatch");
    CMatrix& Ps = filter.p_scaled_;
    CVector& Py = filter.py_;

    // Zero inputs contribute nothing to P y, w^H y or y^H P y.
    auto& nz = filter.nz_;
    nz.clear();
    for (Index k = 0; k < L; ++k)
        if (y[k] != cd{0.0, 0.0}) nz.push_back(k);

    Py.setZero();
    cd estimate{0.0, 0.0};
    for (Index k : nz) {
        Py.noalias() += Ps.col(k) * y[k];
        estimate += std::conj(filter.w[k]) * y[k];
    }
    Py *= filter.scale_;
    cd yPy{0.0, 0.0};
    for (Index k : nz) yPy += std::conj(y[k]) * Py[k];
    const double denom = checked_denominator(filter.lambda + yPy);

    const cd error = desired - estimate;
    auto& support = filter.support_;
    support.clear();
    for (Index k = 0; k < L; ++k)
        if (Py[k] != cd{0.0, 0.0}) support.push_back(k);

    const cd step = std::conj(error) / denom;
    for (Index k : support) filter.w[k] += Py[k] * step;
    zero_attract(filter.w, params);

    // P <- (P - P y (P y)^H / denom) / lambda. The rank-one term only reaches
    // the support of P y; the division by lambda goes into the scale.
    // Entries are written in Hermitian pairs so P stays exactly Hermitian.
    const double c = 1.0 / (denom * filter.scale_);
    for (std::size_t b = 0; b < support.size(); ++b) {
        const Index jb = support[b];
        const cd pb = std::conj(Py[jb]) * c;
        Ps(jb, jb) = Ps(jb, jb).real() - (Py[jb] * pb).real();
        for (std::size_t a = b + 1; a < support.size(); ++a) {
            const Index ja = support[a];
            const cd v = Ps(ja, jb) - Py[ja] * pb;
            Ps(ja, jb) = v;
            Ps(jb, ja) = std::conj(v);
        }
    }
    filter.scale_ /= filter.lambda;
    if (filter.scale_ > kScaleLimit) {
        Ps *= filter.scale_;
        filter.scale_ = 1.0;
    }

    const auto s = static_cast<std::uint64_t>(support.size());
    count(ops, static_cast<std::uint64_t>(L * nz.size()) + 2 * nz.size() + s + s * (s + 1) / 2);
    return {error, estimate};
}

}  // namespace mmtc
