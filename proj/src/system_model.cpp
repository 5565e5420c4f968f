#include "mmtc/system_model.hpp"

#include <cmath>

namespace mmtc {

AugmentedConstellation AugmentedConstellation::qpsk() {
    AugmentedConstellation c;
    c.bits_per_symbol_ = 2;
    const double a = 1.0 / std::sqrt(2.0);
    c.points_.resize(4);
    for (int label = 0; label < 4; ++label) {
        const double re = (label & 0b10) ? -a : a;
        const double im = (label & 0b01) ? -a : a;
        c.points_[label] = {re, im};
    }
    return c;
}

int AugmentedConstellation::label_of_bits(std::span<const std::uint8_t> bits) const {
    require(static_cast<int>(bits.size()) == bits_per_symbol_, "label_of_bits: wrong bit count");
    int label = 0;
    for (auto b : bits) label = (label << 1) | (b & 1);
    return label;
}

ActivityProfile draw_activity(int n_devices, double lo, double hi, Rng& rng) {
    require(n_devices >= 1, "draw_activity: need at least one device");
    require(0.0 <= lo && lo <= hi && hi <= 1.0, "draw_activity: invalid rho range");
    ActivityProfile p;
    p.rho.resize(n_devices);
    for (auto& r : p.rho) r = lo == hi ? lo : rng.uniform(lo, hi);
    return p;
}

CMatrix draw_spreading(int M, int N, Rng& rng, SpreadingKind spreading) {
    require(M >= 1 && N >= 1, "draw_spreading: dimensions must be positive");
    CMatrix S(M, N);
    for (int n = 0; n < N; ++n) {
        for (int m = 0; m < M; ++m) {
            if (spreading == SpreadingKind::binary)
                S(m, n) = rng.bernoulli(0.5) ? 1.0 : -1.0;
            else
                S(m, n) = rng.complex_normal(1.0);
        }
        const double norm = S.col(n).norm();
        if (norm == 0.0) {
            S.col(n).setZero();
            S(0, n) = 1.0;
        } else {
            S.col(n) /= norm;
        }
    }
    return S;
}

ChannelRealization apply_fading(const CMatrix& spreading, Rng& rng) {
    ChannelRealization ch;
    ch.H = spreading;
    for (Index n = 0; n < ch.H.cols(); ++n) ch.H.col(n) *= rng.complex_normal(1.0);
    return ch;
}

ChannelRealization generate_channel(int M, int N, Rng& rng, SpreadingKind spreading) {
    require(M >= 1 && N >= 1, "generate_channel: dimensions must be positive");
    const CMatrix S = draw_spreading(M, N, rng, spreading);
    return apply_fading(S, rng);
}

ChannelRealization perturb_channel(const ChannelRealization& h, double sigma_e2, Rng& rng) {
    require(sigma_e2 >= 0.0, "perturb_channel: negative error variance");
    ChannelRealization out = h;
    if (sigma_e2 == 0.0) return out;
    for (Index n = 0; n < out.H.cols(); ++n)
        for (Index m = 0; m < out.H.rows(); ++m) out.H(m, n) += rng.complex_normal(sigma_e2);
    return out;
}

int TransmissionFrame::active_count() const {
    int k = 0;
    for (auto a : support) k += a ? 1 : 0;
    return k;
}

void fill_symbol_values(TransmissionFrame& frame, const AugmentedConstellation& constellation) {
    frame.metadata.resize(frame.pilot_labels.rows(), frame.pilot_labels.cols());
    frame.data.resize(frame.data_labels.rows(), frame.data_labels.cols());
    for (Index n = 0; n < frame.pilot_labels.rows(); ++n) {
        for (Index t = 0; t < frame.pilot_labels.cols(); ++t)
            frame.metadata(n, t) = constellation.value(frame.pilot_labels(n, t));
        for (Index t = 0; t < frame.data_labels.cols(); ++t)
            frame.data(n, t) = constellation.value(frame.data_labels(n, t));
    }
}

TransmissionFrame draw_frame(const ActivityProfile& profile, const AugmentedConstellation& constellation,
                             int t_pilot, int t_data, Rng& rng) {
    require(t_pilot >= 1 && t_data >= 0, "draw_frame: need t_pilot >= 1 and t_data >= 0");
    const int N = static_cast<int>(profile.rho.size());
    TransmissionFrame f;
    f.support.assign(N, 0);
    f.pilot_labels.setConstant(N, t_pilot, kZeroLabel);
    f.data_labels.setConstant(N, t_data, kZeroLabel);
    const int q = constellation.size() - 1;
    for (int n = 0; n < N; ++n) {
        f.support[n] = rng.bernoulli(profile.rho[n]) ? 1 : 0;
        if (!f.support[n]) continue;
        for (int t = 0; t < t_pilot; ++t) f.pilot_labels(n, t) = rng.uniform_int(0, q);
        for (int t = 0; t < t_data; ++t) f.data_labels(n, t) = rng.uniform_int(0, q);
    }
    fill_symbol_values(f, constellation);
    return f;
}

CVector transmit(const ChannelRealization& h, const CVector& x, const NoiseSpec& noise, Rng& rng) {
    require(x.size() == h.N(), "transmit: symbol vector length must equal N");
    require(noise.sigma_v2 >= 0.0, "transmit: negative noise variance");
    CVector y = h.H * x;
    if (noise.sigma_v2 > 0.0)
        for (Index m = 0; m < y.size(); ++m) y[m] += rng.complex_normal(noise.sigma_v2);
    return y;
}

CMatrix draw_unit_noise(Index rows, Index cols, Rng& rng) {
    CMatrix v(rows, cols);
    for (Index c = 0; c < cols; ++c)
        for (Index r = 0; r < rows; ++r) v(r, c) = rng.complex_normal(1.0);
    return v;
}

CMatrix transmit_block(const ChannelRealization& h, const CMatrix& x, double sigma_v2, const CMatrix& unit_noise) {
    require(x.rows() == h.N(), "transmit_block: symbol matrix must have N rows");
    require(unit_noise.rows() == h.M() && unit_noise.cols() == x.cols(), "transmit_block: noise shape mismatch");
    return h.H * x + std::sqrt(sigma_v2) * unit_noise;
}

double snr_to_noise_variance(double snr_db, int n_devices, double rate, double sigma_x2) {
    require(std::isfinite(snr_db), "snr_to_noise_variance: SNR must be finite");
    require(n_devices >= 1, "snr_to_noise_variance: N must be positive");
    require(rate > 0.0 && rate <= 1.0, "snr_to_noise_variance: rate must lie in (0, 1]");
    return n_devices * rate * sigma_x2 * std::pow(10.0, -snr_db / 10.0);
}

}  // namespace mmtc
