#include "mmtc/idd.hpp"

#include <algorithm>

namespace mmtc {

std::vector<int> map_codeword(const Bits& codeword, const AugmentedConstellation& constellation, int t_data) {
    const int mc = constellation.bits_per_symbol();
    require(t_data * mc >= static_cast<int>(codeword.size()), "map_codeword: data block too short for the codeword");
    std::vector<int> labels(t_data);
    Bits sym_bits(mc);
    for (int s = 0; s < t_data; ++s) {
        for (int z = 0; z < mc; ++z) {
            const std::size_t slot = static_cast<std::size_t>(s * mc + z);
            sym_bits[z] = slot < codeword.size() ? codeword[slot] : 0;
        }
        labels[s] = constellation.label_of_bits(sym_bits);
    }
    return labels;
}

TransmissionFrame draw_coded_frame(const ActivityProfile& profile, const AugmentedConstellation& constellation,
                                   const LdpcCode& code, int t_pilot, int t_data, Rng& rng) {
    require(t_pilot >= 1, "draw_coded_frame: need at least one pilot");
    const int N = static_cast<int>(profile.rho.size());
    TransmissionFrame f;
    f.support.assign(N, 0);
    f.pilot_labels.setConstant(N, t_pilot, kZeroLabel);
    f.data_labels.setConstant(N, t_data, kZeroLabel);
    f.info_bits.assign(N, {});
    const int q = constellation.size() - 1;
    for (int n = 0; n < N; ++n) {
        f.support[n] = rng.bernoulli(profile.rho[n]) ? 1 : 0;
        if (!f.support[n]) continue;
        for (int t = 0; t < t_pilot; ++t) f.pilot_labels(n, t) = rng.uniform_int(0, q);
        Bits info(code.k());
        for (auto& b : info) b = rng.bernoulli(0.5) ? 1 : 0;
        const auto labels = map_codeword(code.encode(info), constellation, t_data);
        for (int t = 0; t < t_data; ++t) f.data_labels(n, t) = labels[t];
        f.info_bits[n] = std::move(info);
    }
    fill_symbol_values(f, constellation);
    return f;
}

bool frame_active(const Eigen::VectorXi& labels) {
    const auto nonzero = (labels.array() != kZeroLabel).count();
    return 2 * nonzero > labels.size();
}

namespace {

// Re-estimates (mu, eta2) treating the decoded codeword as known symbols.
GaussianChannelApprox reestimate(const CVector& soft, const Bits& codeword,
                                 const AugmentedConstellation& constellation, const GaussianChannelApprox& prior) {
    const auto labels = map_codeword(codeword, constellation, static_cast<int>(soft.size()));
    CVector symbols(soft.size());
    for (Index s = 0; s < soft.size(); ++s) symbols[s] = constellation.value(labels[s]);
    const CVector unit = CVector::Ones(1);
    const CMatrix obs = soft.transpose();
    auto g = estimate_gaussian(unit, obs, symbols, 1.0);
    return g.degenerate || g.mu <= 0.0 ? prior : g;
}

}  // namespace

IddDeviceResult run_idd_device(const CVector& soft, const GaussianChannelApprox& approx, double rho,
                               const LdpcCode& code, const IddConfig& config,
                               const AugmentedConstellation& constellation) {
    require(config.outer_iterations >= 1 && config.inner_ldpc_iterations >= 1, "run_idd: iteration counts must be >= 1");
    const int mc = constellation.bits_per_symbol();
    const int T = static_cast<int>(soft.size());
    const int slots = T * mc;
    require(slots >= code.n(), "run_idd: data block too short for one codeword");

    // Decoder extrinsics per bit slot; pad slots are known zeros.
    std::vector<double> l_e(slots, 0.0);
    for (int s = code.n(); s < slots; ++s) l_e[s] = kLlrClamp;

    IddDeviceResult out;
    out.decoded = true;
    GaussianChannelApprox g = approx;
    std::vector<double> l_c(code.n());
    for (int it = 0; it < config.outer_iterations; ++it) {
        for (int s = 0; s < T; ++s) {
            const std::span<const double> le(l_e.data() + s * mc, mc);
            const auto priors = activity_adjust(priors_from_llr(le, constellation), rho);
            const auto llr = extrinsic_llr(soft[s], g, priors, le, constellation);
            for (int z = 0; z < mc; ++z) {
                const int slot = s * mc + z;
                if (slot < code.n()) l_c[slot] = llr[z];
            }
        }
        const auto dec = decode_spa(code, l_c, config.inner_ldpc_iterations);
        out.detector_llrs.push_back(l_c);
        out.info_per_iteration.push_back(code.extract_info(dec.hard_bits));
        out.parity_per_iteration.push_back(dec.parity_ok);
        for (int v = 0; v < code.n(); ++v) l_e[v] = clamp_llr(dec.extrinsic_llrs[v]);
        if (config.reestimate_gaussian) g = reestimate(soft, dec.hard_bits, constellation, g);
    }
    return out;
}

std::vector<IddDeviceResult> run_idd(std::span<const IddDeviceInput> devices, const LdpcCode& code,
                                     const IddConfig& config, const AugmentedConstellation& constellation) {
    std::vector<IddDeviceResult> out;
    out.reserve(devices.size());
    for (const auto& d : devices) {
        if (frame_active(d.labels)) {
            out.push_back(run_idd_device(d.soft, d.approx, d.rho, code, config, constellation));
        } else {
            IddDeviceResult r;
            r.info_per_iteration.assign(config.outer_iterations, Bits(code.k(), 0));
            r.parity_per_iteration.assign(config.outer_iterations, false);
            out.push_back(std::move(r));
        }
    }
    return out;
}

}  // namespace mmtc
