#include "mmtc/soft_info.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace mmtc {

double SymbolPriors::total() const {
    double s = zero;
    for (double p : points) s += p;
    return s;
}

std::vector<double> priors_from_llr(std::span<const double> l_e, const AugmentedConstellation& constellation) {
    const int mc = constellation.bits_per_symbol();
    require(static_cast<int>(l_e.size()) == mc, "priors_from_llr: need one LLR per bit");
    std::vector<double> probs(constellation.size());
    double total = 0.0;
    for (int a = 0; a < constellation.size(); ++a) {
        double p = 1.0;
        for (int z = 0; z < mc; ++z) {
            const double l = clamp_llr(l_e[z]);
            p /= 1.0 + std::exp(-constellation.antipodal(a, z) * l);
        }
        probs[a] = p;
        total += p;
    }
    // The product form is already normalized; this removes rounding drift.
    for (auto& p : probs) p /= total;
    return probs;
}

SymbolPriors activity_adjust(std::span<const double> priors_over_a, double rho) {
    require(rho >= 0.0 && rho <= 1.0, "activity_adjust: rho must lie in [0, 1]");
    SymbolPriors out;
    out.points.resize(priors_over_a.size());
    for (std::size_t a = 0; a < priors_over_a.size(); ++a) out.points[a] = rho * priors_over_a[a];
    out.zero = 1.0 - rho;
    return out;
}

namespace {

// lambda^(T-1-p) for active pairs, zero otherwise.
RVector active_weights(const CVector& pilots, double lambda) {
    const Index T = pilots.size();
    RVector wts = RVector::Zero(T);
    double f = 1.0;
    for (Index p = T - 1; p >= 0; --p) {
        if (pilots[p] != cd{0.0, 0.0}) wts[p] = f;
        f *= lambda;
    }
    return wts;
}

}  // namespace

MuEstimate estimate_mu(const CVector& w, const CMatrix& observations, const CVector& pilots, double lambda) {
    require(observations.cols() == pilots.size(), "estimate_mu: history length mismatch");
    require(observations.rows() == w.size(), "estimate_mu: observation length mismatch");
    const RVector wts = active_weights(pilots, lambda);
    const double norm = wts.sum();
    if (norm <= 0.0) return {0.0, true};
    cd acc{0.0, 0.0};
    for (Index p = 0; p < pilots.size(); ++p) {
        if (wts[p] == 0.0) continue;
        acc += wts[p] * w.dot(observations.col(p)) * std::conj(pilots[p]);
    }
    return {(acc / norm).real(), false};
}

double estimate_eta2(const CVector& w, const CMatrix& observations, const CVector& pilots, double lambda,
                     double mu) {
    require(observations.cols() == pilots.size(), "estimate_eta2: history length mismatch");
    require(observations.rows() == w.size(), "estimate_eta2: observation length mismatch");
    const RVector wts = active_weights(pilots, lambda);
    const double norm = wts.sum();
    if (norm <= 0.0) return kEta2Floor;
    // w^H (sum wts y y^H) w = sum wts |w^H y|^2
    double acc = 0.0;
    for (Index p = 0; p < pilots.size(); ++p)
        if (wts[p] != 0.0) acc += wts[p] * std::norm(w.dot(observations.col(p)));
    return std::max(acc / norm - mu * mu, kEta2Floor);
}

GaussianChannelApprox estimate_gaussian(const CVector& w, const CMatrix& observations, const CVector& pilots,
                                        double lambda) {
    const auto m = estimate_mu(w, observations, pilots, lambda);
    GaussianChannelApprox g;
    g.mu = m.mu;
    g.degenerate = m.degenerate;
    g.eta2 = estimate_eta2(w, observations, pilots, lambda, m.mu);
    return g;
}

namespace {

double log_sum_exp(const std::vector<double>& terms) {
    double hi = -std::numeric_limits<double>::infinity();
    for (double t : terms) hi = std::max(hi, t);
    if (!std::isfinite(hi)) return hi;
    double s = 0.0;
    for (double t : terms) s += std::exp(t - hi);
    return hi + std::log(s);
}

}  // namespace

std::vector<double> extrinsic_llr(cd soft, const GaussianChannelApprox& approx, const SymbolPriors& priors,
                                  std::span<const double> l_e, const AugmentedConstellation& constellation) {
    const int mc = constellation.bits_per_symbol();
    require(static_cast<int>(l_e.size()) == mc, "extrinsic_llr: need one prior LLR per bit");
    require(static_cast<int>(priors.points.size()) == constellation.size(), "extrinsic_llr: prior size mismatch");
    const double eta2 = std::max(approx.eta2, kEta2Floor);
    constexpr double kNegInf = -std::numeric_limits<double>::infinity();

    // log f(x) + log Pr(x); 1/(pi eta2) cancels in the ratio.
    auto log_term = [&](cd x, double prob) {
        if (prob <= 0.0) return kNegInf;
        return -std::norm(soft - approx.mu * x) / eta2 + std::log(prob);
    };
    const double zero_term = log_term({0.0, 0.0}, priors.zero);
    std::vector<double> point_terms(constellation.size());
    for (int a = 0; a < constellation.size(); ++a)
        point_terms[a] = log_term(constellation.value(a), priors.points[a]);

    // Bit z's own prior factor is divided out of every point term (replaced
    // by 1/2) rather than subtracted from the total. Without the zero symbol
    // both are the same; with it, subtracting L_e^z from a total that the
    // zero term keeps bounded would flip confident bits.
    std::vector<double> out(mc);
    std::vector<double> plus, minus;
    for (int z = 0; z < mc; ++z) {
        const double lz = clamp_llr(l_e[z]);
        plus.assign(1, zero_term);
        minus.assign(1, zero_term);
        for (int a = 0; a < constellation.size(); ++a) {
            const int x = constellation.antipodal(a, z);
            // log sigma(x lz) = -log(1 + exp(-x lz))
            const double own = -std::log1p(std::exp(-x * lz));
            const double t = point_terms[a] == kNegInf ? kNegInf : point_terms[a] - own + std::log(0.5);
            (x > 0 ? plus : minus).push_back(t);
        }
        const double num = log_sum_exp(plus);
        const double den = log_sum_exp(minus);
        double l;
        if (!std::isfinite(num) && !std::isfinite(den))
            l = 0.0;
        else if (!std::isfinite(den))
            l = kLlrClamp;
        else if (!std::isfinite(num))
            l = -kLlrClamp;
        else
            l = num - den;
        out[z] = clamp_llr(l);
    }
    return out;
}

}  // namespace mmtc
