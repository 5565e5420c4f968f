#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "mmtc/rng.hpp"
#include "mmtc/types.hpp"

namespace mmtc {

/// QPSK plus the zero symbol. Modulation points are indexed by their bit
/// label (b0 << 1 | b1); bit 0 maps to the +1 antipodal level, b0 drives the
/// real axis and b1 the imaginary axis (Gray mapping).
class AugmentedConstellation {
public:
    static AugmentedConstellation qpsk();

    int bits_per_symbol() const { return bits_per_symbol_; }
    int size() const { return static_cast<int>(points_.size()); }
    std::span<const cd> points() const { return points_; }

    /// Symbol value for a label; kZeroLabel gives 0.
    cd value(int label) const { return label == kZeroLabel ? cd{0.0, 0.0} : points_.at(label); }

    /// Antipodal level (+1 for bit 0, -1 for bit 1) of bit z of a label.
    int antipodal(int label, int z) const { return bit(label, z) ? -1 : +1; }
    int bit(int label, int z) const { return (label >> (bits_per_symbol_ - 1 - z)) & 1; }

    int label_of_bits(std::span<const std::uint8_t> bits) const;

private:
    int bits_per_symbol_ = 2;
    std::vector<cd> points_;
};

struct ActivityProfile {
    std::vector<double> rho;
};

/// Per-device activity probabilities drawn uniformly in [lo, hi].
ActivityProfile draw_activity(int n_devices, double lo, double hi, Rng& rng);

enum class SpreadingKind { complex_gaussian, binary };

struct ChannelRealization {
    CMatrix H;
    Index M() const { return H.rows(); }
    Index N() const { return H.cols(); }
};

/// M x N matrix of unit-norm spreading sequences.
CMatrix draw_spreading(int M, int N, Rng& rng, SpreadingKind spreading = SpreadingKind::complex_gaussian);

/// Scales each spreading column by an independent CN(0,1) fading coefficient.
ChannelRealization apply_fading(const CMatrix& spreading, Rng& rng);

/// Column n = h_n * s_n with h_n ~ CN(0,1) and s_n a unit-norm spreading sequence.
ChannelRealization generate_channel(int M, int N, Rng& rng,
                                    SpreadingKind spreading = SpreadingKind::complex_gaussian);

/// H + E with E i.i.d. CN(0, sigma_e2).
ChannelRealization perturb_channel(const ChannelRealization& h, double sigma_e2, Rng& rng);

struct TransmissionFrame {
    std::vector<std::uint8_t> support;  // 1 = active for the whole frame
    Eigen::MatrixXi pilot_labels;       // N x T_p, kZeroLabel for inactive devices
    Eigen::MatrixXi data_labels;        // N x T_d
    CMatrix metadata;                   // N x T_p symbol values
    CMatrix data;                       // N x T_d symbol values
    std::vector<std::vector<std::uint8_t>> info_bits;  // coded frames only; empty for inactive

    Index devices() const { return metadata.rows(); }
    Index pilot_length() const { return metadata.cols(); }
    Index data_length() const { return data.cols(); }
    int active_count() const;
};

/// Uncoded frame: active devices send uniform QPSK pilots and data.
TransmissionFrame draw_frame(const ActivityProfile& profile, const AugmentedConstellation& constellation,
                             int t_pilot, int t_data, Rng& rng);

/// Fills symbol values from labels.
void fill_symbol_values(TransmissionFrame& frame, const AugmentedConstellation& constellation);

struct NoiseSpec {
    double sigma_v2 = 1.0;
};

/// y = H x + v with v ~ CN(0, sigma_v2 I).
CVector transmit(const ChannelRealization& h, const CVector& x, const NoiseSpec& noise, Rng& rng);

/// Block version with pre-drawn unit-variance noise: Y = H X + sqrt(sigma_v2) V.
CMatrix transmit_block(const ChannelRealization& h, const CMatrix& x, double sigma_v2, const CMatrix& unit_noise);

/// sigma_v^2 = N R sigma_x^2 10^(-snr/10).
double snr_to_noise_variance(double snr_db, int n_devices, double rate = 1.0, double sigma_x2 = 1.0);

CMatrix draw_unit_noise(Index rows, Index cols, Rng& rng);

}  // namespace mmtc
