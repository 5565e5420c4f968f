#pragma once

#include <span>
#include <vector>

#include "mmtc/system_model.hpp"
#include "mmtc/types.hpp"

namespace mmtc {

inline constexpr double kLlrClamp = 50.0;
inline constexpr double kEta2Floor = 1e-8;

inline double clamp_llr(double l) { return l > kLlrClamp ? kLlrClamp : (l < -kLlrClamp ? -kLlrClamp : l); }

/// Prior distribution over A0: `zero` is Pr(0), `points[label]` is Pr(a).
struct SymbolPriors {
    double zero = 0.0;
    std::vector<double> points;

    double total() const;
};

/// Equivalent AWGN model d = mu x + b, b ~ CN(0, eta2).
struct GaussianChannelApprox {
    double mu = 0.0;
    double eta2 = kEta2Floor;
    bool degenerate = false;  // no active training pairs were available
};

/// Pr(a) = prod_z [1 + exp(-x^z(a) L_e^z)]^-1 over the modulation points.
/// Positive LLRs favour bit 0 (antipodal +1).
std::vector<double> priors_from_llr(std::span<const double> l_e, const AugmentedConstellation& constellation);

/// Mixes in inactivity: Pr(0) = 1 - rho, Pr(a) = rho Pr_dec(a).
SymbolPriors activity_adjust(std::span<const double> priors_over_a, double rho);

struct MuEstimate {
    double mu = 0.0;
    bool degenerate = false;
};

/// mu = Re{ w^H sum_p lambda^(i-p) y[p] conj(x[p]) / sum_p lambda^(i-p) } over
/// active training pairs. `observations` is L x T, `pilots` has length T.
MuEstimate estimate_mu(const CVector& w, const CMatrix& observations, const CVector& pilots, double lambda);

/// eta2 = max(w^H Rbar w - mu^2, floor), Rbar the normalized weighted
/// correlation of the active training observations.
double estimate_eta2(const CVector& w, const CMatrix& observations, const CVector& pilots, double lambda,
                     double mu);

/// Convenience: both moments at once.
GaussianChannelApprox estimate_gaussian(const CVector& w, const CMatrix& observations, const CVector& pilots,
                                        double lambda);

/// Extrinsic bit LLRs of one soft estimate. The zero symbol enters both
/// hypothesis sums. `priors` must have been built from the same `l_e`; for
/// bit z the factor that l_e[z] contributes to the point priors is removed
/// before the ratio is formed, which equals "total LLR minus l_e[z]" when
/// Pr(0) = 0. Evaluated in log-sum-exp form and clamped to +-50.
std::vector<double> extrinsic_llr(cd soft, const GaussianChannelApprox& approx, const SymbolPriors& priors,
                                  std::span<const double> l_e, const AugmentedConstellation& constellation);

}  // namespace mmtc
