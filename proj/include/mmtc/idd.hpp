#pragma once

#include <span>
#include <vector>

#include "mmtc/ldpc.hpp"
#include "mmtc/soft_info.hpp"
#include "mmtc/system_model.hpp"

namespace mmtc {

struct IddConfig {
    int outer_iterations = 2;
    int inner_ldpc_iterations = 2;
    bool reestimate_gaussian = false;
};

/// Maps a codeword onto t_data symbols, Mc bits per symbol; slots past the
/// codeword are zero padding. Returns symbol labels.
std::vector<int> map_codeword(const Bits& codeword, const AugmentedConstellation& constellation, int t_data);

/// Coded frame: active devices send uniform QPSK pilots and one encoded
/// random info word as data.
TransmissionFrame draw_coded_frame(const ActivityProfile& profile, const AugmentedConstellation& constellation,
                                   const LdpcCode& code, int t_pilot, int t_data, Rng& rng);

struct IddDeviceInput {
    CVector soft;                  // T_d soft estimates
    Eigen::VectorXi labels;        // T_d hard decisions (for activity gating)
    GaussianChannelApprox approx;
    double rho = 0.2;
};

struct IddDeviceResult {
    bool decoded = false;                 // passed the activity gate
    std::vector<Bits> info_per_iteration; // k info bits after each outer iteration
    std::vector<bool> parity_per_iteration;
    std::vector<std::vector<double>> detector_llrs;  // L_c fed to the decoder per iteration
};

/// Frame-level activity gate: a majority of the hard decisions are nonzero.
bool frame_active(const Eigen::VectorXi& labels);

/// Detector/decoder loop for one device, without gating.
IddDeviceResult run_idd_device(const CVector& soft, const GaussianChannelApprox& approx, double rho,
                               const LdpcCode& code, const IddConfig& config,
                               const AugmentedConstellation& constellation);

/// Applies the activity gate and runs the loop for every gated-active
/// device. Devices that fail the gate report all-zero info words.
std::vector<IddDeviceResult> run_idd(std::span<const IddDeviceInput> devices, const LdpcCode& code,
                                     const IddConfig& config, const AugmentedConstellation& constellation);

}  // namespace mmtc
