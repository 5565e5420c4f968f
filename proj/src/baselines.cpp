#include "mmtc/baselines.hpp"

namespace mmtc {

CMatrix invert_hpd(const CMatrix& A, OpCounter* ops) {
    require(A.rows() == A.cols(), "invert_hpd: matrix must be square");
    const auto n = static_cast<std::uint64_t>(A.rows());
    Eigen::LLT<CMatrix> llt(A);
    if (llt.info() != Eigen::Success) throw NumericalBreakdown("invert_hpd: matrix is not positive definite");
    // n^3/6 for the factorization, n^3/2 for the solves against I.
    if (ops) ops->add_inversion(2 * n * n * n / 3);
    return llt.solve(CMatrix::Identity(A.rows(), A.cols()));
}

CMatrix lmmse_filter(const CMatrix& H_hat, double sigma_v2, double sigma_x2, OpCounter* ops) {
    require(sigma_v2 > 0.0 && sigma_x2 > 0.0, "lmmse_filter: variances must be positive");
    const Index N = H_hat.cols();
    const auto n = static_cast<std::uint64_t>(N);
    const auto m = static_cast<std::uint64_t>(H_hat.rows());
    CMatrix gram = H_hat.adjoint() * H_hat;
    gram.diagonal().array() += sigma_v2 / sigma_x2;
    count(ops, n * n * m);
    CMatrix W = invert_hpd(gram, ops) * H_hat.adjoint();
    count(ops, n * n * m);
    return W;
}

CMatrix lmmse_soft(const CMatrix& H_hat, const CMatrix& received, double sigma_v2, double sigma_x2,
                   OpCounter* ops) {
    require(received.rows() == H_hat.rows(), "lmmse_soft: observation length must equal M");
    const CMatrix W = lmmse_filter(H_hat, sigma_v2, sigma_x2, ops);
    count(ops, static_cast<std::uint64_t>(W.rows() * W.cols() * received.cols()));
    return W * received;
}

namespace {

DetectionOutput quantize_all(CMatrix soft, const AugmentedConstellation& constellation) {
    DetectionOutput out;
    out.labels.resize(soft.rows(), soft.cols());
    for (Index t = 0; t < soft.cols(); ++t)
        for (Index n = 0; n < soft.rows(); ++n) out.labels(n, t) = quantize(soft(n, t), constellation);
    out.soft = std::move(soft);
    return out;
}

}  // namespace

DetectionOutput lmmse_detect(const CMatrix& H_hat, const CMatrix& received, double sigma_v2, double sigma_x2,
                             const AugmentedConstellation& constellation, OpCounter* ops) {
    return quantize_all(lmmse_soft(H_hat, received, sigma_v2, sigma_x2, ops), constellation);
}

DetectionOutput oracle_lmmse(const CMatrix& H, std::span<const std::uint8_t> support, const CMatrix& received,
                             double sigma_v2, double sigma_x2, const AugmentedConstellation& constellation,
                             OpCounter* ops) {
    require(static_cast<Index>(support.size()) == H.cols(), "oracle_lmmse: support length must equal N");
    require(received.rows() == H.rows(), "oracle_lmmse: observation length must equal M");
    const Index N = H.cols();
    const Index T = received.cols();
    DetectionOutput out;
    out.soft = CMatrix::Zero(N, T);
    out.labels = Eigen::MatrixXi::Constant(N, T, kZeroLabel);

    std::vector<Index> active;
    for (Index n = 0; n < N; ++n)
        if (support[n]) active.push_back(n);
    if (active.empty()) return out;

    CMatrix Hs(H.rows(), static_cast<Index>(active.size()));
    for (std::size_t k = 0; k < active.size(); ++k) Hs.col(static_cast<Index>(k)) = H.col(active[k]);
    const CMatrix soft = lmmse_soft(Hs, received, sigma_v2, sigma_x2, ops);
    for (std::size_t k = 0; k < active.size(); ++k) {
        const Index n = active[k];
        for (Index t = 0; t < T; ++t) {
            out.soft(n, t) = soft(static_cast<Index>(k), t);
            out.labels(n, t) = quantize(out.soft(n, t), constellation, /*include_zero=*/false);
        }
    }
    return out;
}

DetectionOutput sa_sic_unsorted(const CMatrix& H_hat, const CMatrix& received, double sigma_v2, double sigma_x2,
                                const AugmentedConstellation& constellation, OpCounter* ops) {
    require(received.rows() == H_hat.rows(), "sa_sic_unsorted: observation length must equal M");
    require(sigma_x2 > 0.0 && sigma_v2 >= 0.0, "sa_sic_unsorted: invalid variances");
    const Index N = H_hat.cols();
    const Index M = H_hat.rows();
    const Index T = received.cols();
    const double alpha = sigma_v2 / sigma_x2;
    DetectionOutput out;
    out.soft = CMatrix::Zero(N, T);
    out.labels = Eigen::MatrixXi::Constant(N, T, kZeroLabel);

    RVector col_energy(N);
    for (Index n = 0; n < N; ++n) col_energy[n] = H_hat.col(n).squaredNorm();

    for (Index t = 0; t < T; ++t) {
        CVector residual = received.col(t);
        for (Index n = 0; n < N; ++n) {
            if (col_energy[n] == 0.0) continue;
            const cd soft = H_hat.col(n).dot(residual) / (col_energy[n] + alpha);
            const int label = quantize(soft, constellation);
            out.soft(n, t) = soft;
            out.labels(n, t) = label;
            if (label != kZeroLabel) residual -= H_hat.col(n) * constellation.value(label);
        }
        count(ops, static_cast<std::uint64_t>(2 * N * M));
    }
    return out;
}

}  // namespace mmtc
