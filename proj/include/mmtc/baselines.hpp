#pragma once

#include <span>
#include <vector>

#include "mmtc/aa_detector.hpp"
#include "mmtc/system_model.hpp"
#include "mmtc/types.hpp"

namespace mmtc {

/// Hermitian positive definite inverse via Cholesky; charges (2/3) n^3 MACs
/// to the inversion counter.
CMatrix invert_hpd(const CMatrix& A, OpCounter* ops = nullptr);

/// N x M LMMSE filter (H^H H + (sigma_v2/sigma_x2) I)^-1 H^H. Equal to
/// H^H (H H^H + (sigma_v2/sigma_x2) I)^-1 by the push-through identity.
CMatrix lmmse_filter(const CMatrix& H_hat, double sigma_v2, double sigma_x2, OpCounter* ops = nullptr);

/// Soft LMMSE estimates for every column of `received` (N x T).
CMatrix lmmse_soft(const CMatrix& H_hat, const CMatrix& received, double sigma_v2, double sigma_x2,
                   OpCounter* ops = nullptr);

/// LMMSE followed by per-entry quantization over A0.
DetectionOutput lmmse_detect(const CMatrix& H_hat, const CMatrix& received, double sigma_v2, double sigma_x2,
                             const AugmentedConstellation& constellation, OpCounter* ops = nullptr);

/// LMMSE over the true support with the true channel; quantizes over A on
/// the support and outputs zero elsewhere.
DetectionOutput oracle_lmmse(const CMatrix& H, std::span<const std::uint8_t> support, const CMatrix& received,
                             double sigma_v2, double sigma_x2, const AugmentedConstellation& constellation,
                             OpCounter* ops = nullptr);

/// Successive interference cancellation in natural device order with
/// normalized matched filtering and A0 decisions.
DetectionOutput sa_sic_unsorted(const CMatrix& H_hat, const CMatrix& received, double sigma_v2, double sigma_x2,
                                const AugmentedConstellation& constellation, OpCounter* ops = nullptr);

}  // namespace mmtc
