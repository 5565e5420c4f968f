#pragma once

#include <vector>

#include "mmtc/types.hpp"

namespace mmtc {

/// Zero-attraction parameters: 1/beta is the radius of the attraction zone,
/// gamma the regularization weight.
struct AttractorParams {
    double beta = 10.0;
    double gamma = 0.001;
};

struct RlsStepResult {
    cd error;     // a priori error desired - w^H y
    cd estimate;  // a priori soft output w^H y
};

class AdaptiveFilter;

/// One l0-regularized RLS iteration: gain, error, weight update, zero
/// attraction, inverse-correlation update. With gamma = 0 this is plain RLS.
RlsStepResult rls_step(AdaptiveFilter& filter, const CVector& y, cd desired, const AttractorParams& params,
                       OpCounter* ops = nullptr);

/// Exponentially weighted RLS state: weights w, inverse correlation P and
/// forgetting factor lambda. Soft output convention is w^H y.
///
/// P is stored as scale * P_scaled, so the division by lambda in each update
/// is a scalar operation and rls_step only touches the rows and columns of P
/// reached by the nonzero entries of the observation.
class AdaptiveFilter {
public:
    AdaptiveFilter() = default;
    AdaptiveFilter(Index length, double lambda, double p_init = 100.0);

    Index length() const { return w.size(); }

    /// Materialized inverse correlation matrix.
    CMatrix P() const { return scale_ * p_scaled_; }
    /// Replaces P; the argument must be square of size length().
    void set_P(const CMatrix& P);

    CVector w;
    double lambda = 1.0;

private:
    friend RlsStepResult rls_step(AdaptiveFilter&, const CVector&, cd, const AttractorParams&, OpCounter*);

    CMatrix p_scaled_;
    double scale_ = 1.0;
    // scratch buffers reused across steps
    std::vector<Index> nz_, support_;
    CVector py_;
};

/// k = P y / (lambda + y^H P y).
CVector gain_vector(const AdaptiveFilter& filter, const CVector& y);

/// P <- (P - k y^H P) / lambda, followed by Hermitian symmetrization.
void update_inverse(AdaptiveFilter& filter, const CVector& k, const CVector& y);

/// w / |w|, or 0 at the origin.
cd complex_sign(cd w);

/// beta^2 * mag - beta inside the attraction zone [0, 1/beta], else 0.
double f_beta(double mag, double beta);

/// Polar shrinkage w + gamma f_beta(|w|) sgn(w), clamped to 0 instead of crossing the origin.
cd zero_attract(cd w, const AttractorParams& params);
void zero_attract(CVector& w, const AttractorParams& params);

}  // namespace mmtc
