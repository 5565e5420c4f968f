#include "mmtc/aa_detector.hpp"

#include <limits>

namespace mmtc {

DetectionState::DetectionState(int n_devices) : remaining_(n_devices, 1), cost_(n_devices, 0.0) {
    require(n_devices >= 1, "DetectionState: need at least one device");
    phi_.reserve(n_devices);
}

void DetectionState::begin_pass() {
    phi_.clear();
    std::fill(remaining_.begin(), remaining_.end(), 1);
}

void DetectionState::update_costs(std::span<const cd> errors, double lambda) {
    require(errors.size() == cost_.size(), "update_costs: one error per device expected");
    for (std::size_t j = 0; j < cost_.size(); ++j)
        if (remaining_[j]) cost_[j] = lambda * cost_[j] + std::norm(errors[j]);
}

int DetectionState::select_next() {
    int best = -1;
    double best_cost = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < cost_.size(); ++j) {
        if (!remaining_[j]) continue;
        if (best < 0 || cost_[j] < best_cost) {
            best = static_cast<int>(j);
            best_cost = cost_[j];
        }
    }
    require(best >= 0, "select_next: no undetected device left");
    remaining_[best] = 0;
    phi_.push_back(best);
    return best;
}

void DetectionState::assign_order(std::span<const int> order) {
    require(order.size() == cost_.size(), "assign_order: order must cover every device");
    begin_pass();
    for (int j : order) {
        require(j >= 0 && j < static_cast<int>(cost_.size()) && remaining_[j], "assign_order: not a permutation");
        remaining_[j] = 0;
        phi_.push_back(j);
    }
}

CVector augment_observation(const CVector& y, const CVector& d_hat, int stage, DetectorMode mode) {
    require(stage >= 1, "augment_observation: stages are 1-based");
    if (mode == DetectorMode::linear) return y;
    CVector out(y.size() + d_hat.size());
    out.head(y.size()) = y;
    if (stage == 1)
        out.tail(d_hat.size()).setZero();
    else
        out.tail(d_hat.size()) = d_hat;
    return out;
}

cd soft_estimate(const AdaptiveFilter& filter, const CVector& y) {
    require(y.size() == filter.length(), "soft_estimate: dimension mismatch");
    return filter.w.dot(y);
}

int quantize(cd soft, const AugmentedConstellation& constellation, bool include_zero) {
    int best = kZeroLabel;
    double best_d = include_zero ? std::norm(soft) : std::numeric_limits<double>::infinity();
    for (int a = 0; a < constellation.size(); ++a) {
        const double d = std::norm(soft - constellation.value(a));
        if (d < best_d) {
            best_d = d;
            best = a;
        }
    }
    return best;
}

AaRlsDetector::AaRlsDetector(int M, int N, const DetectorConfig& config,
                             const AugmentedConstellation& constellation, std::span<const double> rho)
    : M_(M), N_(N), config_(config), constellation_(constellation), state_(N) {
    require(M >= 1 && N >= 1, "AaRlsDetector: dimensions must be positive");
    require(config.attractor.beta > 0.0 && config.attractor.gamma >= 0.0, "AaRlsDetector: invalid attractor");
    if (config.p_init_mode == PInit::activity)
        require(static_cast<int>(rho.size()) == N, "AaRlsDetector: activity P init needs rho for every device");
    const Index L = observation_length();
    filters_.reserve(N);
    for (int n = 0; n < N; ++n) {
        const double p0 = config.p_init_mode == PInit::activity ? rho[n] : config.p_init;
        filters_.emplace_back(L, config.lambda, p0);
    }
    refresh_order();
}

Index AaRlsDetector::observation_length() const {
    return config_.mode == DetectorMode::decision_feedback ? M_ + N_ : M_;
}

void AaRlsDetector::refresh_order() {
    state_.begin_pass();
    for (int n = 0; n < N_; ++n) state_.select_next();
}

void AaRlsDetector::train(const CMatrix& pilots, const CMatrix& received, OpCounter* ops) {
    require(pilots.rows() == N_ && received.rows() == M_, "train: shape mismatch");
    require(pilots.cols() == received.cols(), "train: pilot and observation counts differ");
    require(pilots.cols() >= 1, "train: at least one pilot instant is required");
    const Index T = pilots.cols();
    const Index L = observation_length();
    if (config_.keep_history) {
        history_obs_.assign(N_, CMatrix::Zero(L, T));
        history_pilots_.assign(N_, CVector::Zero(T));
    }

    CVector feedback(N_);
    std::vector<cd> errors(N_);
    for (Index i = 0; i < T; ++i) {
        const CVector y = received.col(i);
        feedback.setZero();
        const std::vector<int> order = state_.order();
        for (int n = 0; n < N_; ++n) {
            const int j = order[n];
            const CVector obs = augment_observation(y, feedback, n + 1, config_.mode);
            const auto res = rls_step(filters_[j], obs, pilots(j, i), config_.attractor, ops);
            errors[j] = res.error;
            if (config_.keep_history) {
                history_obs_[j].col(i) = obs;
                history_pilots_[j][i] = pilots(j, i);
            }
            feedback[j] = pilots(j, i);
        }
        state_.begin_pass();
        state_.update_costs(errors, config_.lambda);
        if (config_.reorder_per_pilot || i == T - 1)
            refresh_order();
        else
            state_.assign_order(order);
    }
    trained_ = true;
}

DetectionOutput AaRlsDetector::detect(const CMatrix& received, OpCounter* ops, const CMatrix* genie) {
    if (!trained_) throw ContractError("detect: detector has not been trained");
    require(received.rows() == M_, "detect: observation length must be M");
    if (genie) require(genie->rows() == N_ && genie->cols() == received.cols(), "detect: genie shape mismatch");
    const Index T = received.cols();
    const Index L = observation_length();
    DetectionOutput out;
    out.soft.resize(N_, T);
    out.labels.resize(N_, T);

    const std::vector<int> order = state_.order();
    CVector feedback(N_);
    for (Index t = 0; t < T; ++t) {
        const CVector y = received.col(t);
        feedback.setZero();
        for (int n = 0; n < N_; ++n) {
            const int j = order[n];
            const CVector obs = augment_observation(y, feedback, n + 1, config_.mode);
            const cd soft = filters_[j].w.dot(obs);
            const int label = quantize(soft, constellation_);
            out.soft(j, t) = soft;
            out.labels(j, t) = label;
            const cd decided = genie ? (*genie)(j, t) : constellation_.value(label);
            if (config_.dd_adapt)
                rls_step(filters_[j], obs, decided, config_.attractor, ops);
            else
                count(ops, static_cast<std::uint64_t>(L));
            feedback[j] = decided;
        }
    }
    return out;
}

GaussianChannelApprox AaRlsDetector::gaussian_approx(int device) const {
    require(config_.keep_history, "gaussian_approx: detector was built without keep_history");
    require(trained_, "gaussian_approx: detector has not been trained");
    require(device >= 0 && device < N_, "gaussian_approx: device out of range");
    return estimate_gaussian(filters_[device].w, history_obs_[device], history_pilots_[device], config_.lambda);
}

}  // namespace mmtc
