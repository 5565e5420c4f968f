#pragma once

#include <optional>
#include <vector>

#include "mmtc/soft_info.hpp"
#include "mmtc/sparse_rls.hpp"
#include "mmtc/system_model.hpp"
#include "mmtc/types.hpp"

namespace mmtc {

enum class DetectorMode { decision_feedback, linear };

enum class PInit {
    fixed,     // P = p_init * I
    activity,  // P = rho_n * I, the literal reading of the initialization step
};

struct DetectorConfig {
    DetectorMode mode = DetectorMode::decision_feedback;
    double lambda = 0.92;
    AttractorParams attractor{};
    PInit p_init_mode = PInit::fixed;
    double p_init = 100.0;
    bool dd_adapt = true;             // keep adapting on hard decisions during data
    bool reorder_per_pilot = true;    // refresh ordering after every pilot instant
    bool keep_history = false;        // retain training pairs for the Gaussian approximation
};

/// Ordering bookkeeping: order phi, remaining set S and per-device cost J.
class DetectionState {
public:
    explicit DetectionState(int n_devices);

    /// Starts a new ordering pass: phi cleared, S = all devices, J kept.
    void begin_pass();

    /// J_j <- lambda J_j + |e_j|^2 for j in S. `errors` is indexed by device.
    void update_costs(std::span<const cd> errors, double lambda);

    /// argmin_{j in S} J_j with lowest-index tie-break; appends to phi and removes from S.
    int select_next();

    /// Installs a complete ordering without consulting the costs.
    void assign_order(std::span<const int> order);

    const std::vector<int>& order() const { return phi_; }
    const std::vector<double>& costs() const { return cost_; }
    bool remaining(int j) const { return remaining_[j] != 0; }
    int stage() const { return static_cast<int>(phi_.size()); }

private:
    std::vector<int> phi_;
    std::vector<std::uint8_t> remaining_;
    std::vector<double> cost_;
};

/// Observation seen by stage `stage` (1-based): y itself for the first stage
/// or in linear mode, otherwise [y; d_hat] with feedback slot M + j holding
/// device j's decision (zero while undetected).
CVector augment_observation(const CVector& y, const CVector& d_hat, int stage,
                            DetectorMode mode = DetectorMode::decision_feedback);

/// w^H y
cd soft_estimate(const AdaptiveFilter& filter, const CVector& y);

/// Nearest point of A0 (or of A when include_zero is false); ties go to
/// zero first, then to the lowest label.
int quantize(cd soft, const AugmentedConstellation& constellation, bool include_zero = true);

struct DetectionOutput {
    CMatrix soft;           // N x T, device order
    Eigen::MatrixXi labels; // N x T, kZeroLabel for zero decisions
};

/// Activity-aware l0-regularized RLS detector with optional decision feedback.
/// One adaptive filter per device; the device's stage is its position in the
/// current ordering.
class AaRlsDetector {
public:
    AaRlsDetector(int M, int N, const DetectorConfig& config, const AugmentedConstellation& constellation,
                  std::span<const double> rho = {});

    /// Training on metadata. `pilots` is N x T_p (known at the receiver,
    /// zeros for inactive devices), `received` is M x T_p.
    void train(const CMatrix& pilots, const CMatrix& received, OpCounter* ops = nullptr);

    /// Decision-directed detection. When `genie` (N x T_d) is given, true
    /// symbols replace hard decisions in the feedback path.
    DetectionOutput detect(const CMatrix& received, OpCounter* ops = nullptr, const CMatrix* genie = nullptr);

    /// Equivalent-AWGN parameters of device j from the retained training pairs.
    GaussianChannelApprox gaussian_approx(int device) const;

    bool trained() const { return trained_; }
    const std::vector<int>& order() const { return state_.order(); }
    const DetectionState& state() const { return state_; }
    const AdaptiveFilter& filter(int device) const { return filters_.at(device); }
    const DetectorConfig& config() const { return config_; }
    Index observation_length() const;

private:
    void refresh_order();

    int M_;
    int N_;
    DetectorConfig config_;
    AugmentedConstellation constellation_;
    std::vector<AdaptiveFilter> filters_;
    DetectionState state_;
    bool trained_ = false;

    // Training pairs per device: observations (L x T_p) and pilots (T_p).
    std::vector<CMatrix> history_obs_;
    std::vector<CVector> history_pilots_;
};

}  // namespace mmtc
