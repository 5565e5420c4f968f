#pragma once

#include <atomic>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mmtc/aa_detector.hpp"
#include "mmtc/idd.hpp"
#include "mmtc/ldpc.hpp"
#include "mmtc/system_model.hpp"

namespace mmtc {

enum class Algorithm {
    aa_rls_df,
    aa_rls_linear,
    lmmse,
    oracle_lmmse,
    sa_sic_unsorted,
    genie,  // returns the transmitted symbols; plumbing checks only
    // Reserved tags for detectors that are not implemented here.
    a_sqrd,
    aa_mf_sic,
    lmmse_pic,
};

std::string_view to_string(Algorithm a);
/// Throws ContractError for unknown tags and for reserved, unimplemented ones.
Algorithm parse_algorithm(std::string_view tag);
bool is_implemented(Algorithm a);
std::vector<Algorithm> parse_algorithm_list(std::string_view comma_list);

struct SimConfig {
    int schema_version = 1;
    int N = 32;
    int M = 16;
    double rho_lo = 0.1;
    double rho_hi = 0.3;
    int t_pilot = 60;
    int t_data = 68;
    int block_length = 128;
    std::vector<double> snr_grid{8.0, 12.0, 16.0};
    std::uint64_t trials = 2000;
    std::vector<Algorithm> algorithms{Algorithm::aa_rls_df, Algorithm::aa_rls_linear, Algorithm::lmmse,
                                      Algorithm::oracle_lmmse, Algorithm::sa_sic_unsorted};
    bool coded = false;

    double lambda = 0.92;
    double beta = 10.0;
    double gamma = 0.001;
    PInit p_init_mode = PInit::fixed;
    double p_init = 100.0;
    bool dd_adapt = true;
    bool reorder_per_pilot = true;

    std::uint64_t base_seed = 1;
    double csi_error_div = 5.0;
    SpreadingKind spreading = SpreadingKind::complex_gaussian;
    bool freeze_spreading = false;
    int frames_per_channel = 1;

    int ldpc_n = 128;
    int ldpc_k = 64;
    int ldpc_column_weight = 3;
    std::uint64_t ldpc_seed = 2024;
    IddConfig idd{};

    int workers = 1;

    /// Throws ContractError naming the first violated constraint.
    void validate() const;
    DetectorConfig detector_config(DetectorMode mode) const;
};

/// Named presets: "desk", "desk-coded", "paper", "paper-coded".
std::vector<std::string> preset_names();
SimConfig preset(std::string_view name);

/// Integer tallies of one trial (or a sum of trials).
struct TrialCounts {
    std::uint64_t trials = 0;
    std::uint64_t active_symbols = 0;
    std::uint64_t symbol_errors = 0;
    std::uint64_t inactive_symbols = 0;
    std::uint64_t false_alarms = 0;
    std::uint64_t bits = 0;
    std::vector<std::uint64_t> bit_errors;  // per outer IDD iteration
    std::uint64_t macs = 0;
    std::uint64_t inversion_macs = 0;

    TrialCounts& operator+=(const TrialCounts& other);
};

/// Everything random in one trial, drawn once and shared across algorithms
/// and SNR points. Noise and CSI error are stored at unit variance.
struct Scenario {
    ActivityProfile profile;
    ChannelRealization channel;
    TransmissionFrame frame;
    CMatrix unit_noise;      // M x (t_pilot + t_data)
    CMatrix unit_csi_error;  // M x N
};

std::uint64_t trial_seed(std::uint64_t base_seed, std::uint64_t trial_index);

Scenario make_scenario(const SimConfig& config, std::uint64_t trial_index, const LdpcCode* code);

/// Runs one detector on a scenario at one SNR point.
TrialCounts evaluate(const SimConfig& config, const Scenario& scenario, Algorithm algorithm, double snr_db,
                     const LdpcCode* code, const CMatrix* genie_feedback = nullptr);

/// One trial end to end; deterministic in (config.base_seed, trial_index).
TrialCounts run_trial(const SimConfig& config, Algorithm algorithm, double snr_db, std::uint64_t trial_index);

struct MetricsRecord {
    std::string algorithm;
    double snr_db = 0.0;
    std::uint64_t trials = 0;
    std::uint64_t active_symbols = 0;
    std::uint64_t symbol_errors = 0;
    std::uint64_t false_alarms = 0;
    double nser = 0.0;
    std::uint64_t bits = 0;
    std::optional<std::uint64_t> bit_errors_iter1;
    std::optional<std::uint64_t> bit_errors_iter2;
    std::optional<double> ber;
    std::uint64_t seed = 0;
    double wall_time_s = 0.0;
    std::uint64_t macs = 0;

    static MetricsRecord from_counts(std::string algorithm, double snr_db, const TrialCounts& counts,
                                     std::uint64_t seed, double wall_time_s);
};

struct SweepOptions {
    const std::atomic<bool>* cancel = nullptr;  // stop early, keeping finished trials
    std::function<void(std::uint64_t done, std::uint64_t total)> progress;
};

/// Aggregates trials for every (algorithm, snr) pair. Output is independent
/// of the worker count apart from wall_time_s.
std::vector<MetricsRecord> sweep(const SimConfig& config, const SweepOptions& options = {});

inline constexpr std::string_view kCsvHeader =
    "algorithm,snr_db,trials,active_symbols,symbol_errors,nser,bits,bit_errors_iter1,bit_errors_iter2,ber,seed,"
    "wall_time_s";

std::string format_csv(const std::vector<MetricsRecord>& records);
void emit_csv(const std::vector<MetricsRecord>& records, const std::string& path);
std::vector<MetricsRecord> parse_csv(std::string_view text);
std::vector<MetricsRecord> read_csv(const std::string& path);

}  // namespace mmtc
