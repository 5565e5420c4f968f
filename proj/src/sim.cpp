#include "mmtc/sim.hpp"

#include <array>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include "mmtc/baselines.hpp"

namespace mmtc {

namespace {

struct AlgorithmName {
    Algorithm algorithm;
    std::string_view tag;
};

constexpr std::array<AlgorithmName, 9> kAlgorithmNames{{
    {Algorithm::aa_rls_df, "aa-rls-df"},
    {Algorithm::aa_rls_linear, "aa-rls-linear"},
    {Algorithm::lmmse, "lmmse"},
    {Algorithm::oracle_lmmse, "oracle-lmmse"},
    {Algorithm::sa_sic_unsorted, "sa-sic-unsorted"},
    {Algorithm::genie, "genie"},
    {Algorithm::a_sqrd, "a-sqrd"},
    {Algorithm::aa_mf_sic, "aa-mf-sic"},
    {Algorithm::lmmse_pic, "lmmse-pic"},
}};

}  // namespace

std::string_view to_string(Algorithm a) {
    for (const auto& n : kAlgorithmNames)
        if (n.algorithm == a) return n.tag;
    return "unknown";
}

bool is_implemented(Algorithm a) {
    return a != Algorithm::a_sqrd && a != Algorithm::aa_mf_sic && a != Algorithm::lmmse_pic;
}

Algorithm parse_algorithm(std::string_view tag) {
    for (const auto& n : kAlgorithmNames) {
        if (n.tag != tag) continue;
        if (!is_implemented(n.algorithm))
            throw ContractError("algorithm '" + std::string(tag) +
                                "' is a reserved identifier for an externally published detector and is not "
                                "implemented; choose one of aa-rls-df, aa-rls-linear, lmmse, oracle-lmmse, "
                                "sa-sic-unsorted");
        return n.algorithm;
    }
    throw ContractError("unknown algorithm '" + std::string(tag) + "'");
}

std::vector<Algorithm> parse_algorithm_list(std::string_view comma_list) {
    std::vector<Algorithm> out;
    std::size_t start = 0;
    while (start <= comma_list.size()) {
        auto end = comma_list.find(',', start);
        if (end == std::string_view::npos) end = comma_list.size();
        auto item = comma_list.substr(start, end - start);
        while (!item.empty() && item.front() == ' ') item.remove_prefix(1);
        while (!item.empty() && item.back() == ' ') item.remove_suffix(1);
        if (!item.empty()) out.push_back(parse_algorithm(item));
        start = end + 1;
    }
    require(!out.empty(), "algorithm list is empty");
    return out;
}

void SimConfig::validate() const {
    require(schema_version == 1, "schema_version must be 1");
    require(N >= 1 && M >= 1, "N and M must be at least 1");
    require(0.0 <= rho_lo && rho_lo <= rho_hi && rho_hi <= 1.0, "rho range must satisfy 0 <= rho_lo <= rho_hi <= 1");
    require(t_pilot >= 1 && t_data >= 0, "t_pilot must be >= 1 and t_data >= 0");
    require(t_pilot + t_data == block_length, "t_pilot + t_data must equal block_length");
    require(!snr_grid.empty(), "snr_grid must not be empty");
    for (double s : snr_grid) require(std::isfinite(s), "snr_grid entries must be finite");
    require(trials >= 1, "trials must be at least 1");
    require(!algorithms.empty(), "algorithms must not be empty");
    for (auto a : algorithms)
        require(is_implemented(a), "algorithm '" + std::string(to_string(a)) + "' is reserved and not implemented");
    require(lambda > 0.0 && lambda <= 1.0, "lambda must lie in (0, 1]");
    require(beta > 0.0, "beta must be positive");
    require(gamma >= 0.0, "gamma must be non-negative");
    require(p_init > 0.0, "p_init must be positive");
    require(csi_error_div > 0.0, "csi_error_div must be positive");
    require(frames_per_channel >= 1, "frames_per_channel must be at least 1");
    require(workers >= 1, "workers must be at least 1");
    if (coded) {
        require(ldpc_n > ldpc_k && ldpc_k >= 1, "ldpc_n must exceed ldpc_k >= 1");
        require(ldpc_column_weight >= 2, "ldpc_column_weight must be at least 2");
        require(2 * t_data >= ldpc_n, "t_data QPSK symbols must hold one codeword");
        require(idd.outer_iterations >= 1 && idd.inner_ldpc_iterations >= 1, "IDD iteration counts must be >= 1");
    }
}

DetectorConfig SimConfig::detector_config(DetectorMode mode) const {
    DetectorConfig c;
    c.mode = mode;
    c.lambda = lambda;
    c.attractor = {beta, gamma};
    c.p_init_mode = p_init_mode;
    c.p_init = p_init;
    c.dd_adapt = dd_adapt;
    c.reorder_per_pilot = reorder_per_pilot;
    c.keep_history = coded;
    return c;
}

std::vector<std::string> preset_names() { return {"desk", "desk-coded", "paper", "paper-coded"}; }

SimConfig preset(std::string_view name) {
    SimConfig c;
    if (name == "desk") {
        c.snr_grid = {0, 4, 8, 12, 16, 20};
    } else if (name == "desk-coded") {
        c.coded = true;
        c.trials = 500;
        c.snr_grid = {4, 8, 10, 12, 16};
    } else if (name == "paper" || name == "paper-coded") {
        c.N = 128;
        c.M = 64;
        c.trials = 100000;
        c.snr_grid = {0, 5, 10, 15, 20, 25, 30};
        c.coded = name == "paper-coded";
    } else {
        throw ContractError("unknown preset '" + std::string(name) + "'");
    }
    return c;
}

TrialCounts& TrialCounts::operator+=(const TrialCounts& o) {
    trials += o.trials;
    active_symbols += o.active_symbols;
    symbol_errors += o.symbol_errors;
    inactive_symbols += o.inactive_symbols;
    false_alarms += o.false_alarms;
    bits += o.bits;
    if (bit_errors.size() < o.bit_errors.size()) bit_errors.resize(o.bit_errors.size(), 0);
    for (std::size_t i = 0; i < o.bit_errors.size(); ++i) bit_errors[i] += o.bit_errors[i];
    macs += o.macs;
    inversion_macs += o.inversion_macs;
    return *this;
}

std::uint64_t trial_seed(std::uint64_t base_seed, std::uint64_t trial_index) {
    return derive_seed(base_seed, trial_index);
}

Scenario make_scenario(const SimConfig& config, std::uint64_t trial_index, const LdpcCode* code) {
    const std::uint64_t seed = trial_seed(config.base_seed, trial_index);
    const auto constellation = AugmentedConstellation::qpsk();
    Scenario sc;
    Rng activity_rng(seed, Stream::activity);
    sc.profile = draw_activity(config.N, config.rho_lo, config.rho_hi, activity_rng);

    const std::uint64_t channel_seed =
        trial_seed(config.base_seed ^ 0xC4A77E1ULL, trial_index / static_cast<std::uint64_t>(config.frames_per_channel));
    Rng spreading_rng(config.freeze_spreading ? config.base_seed : channel_seed, Stream::channel);
    Rng fading_rng(channel_seed, Stream::fading);
    sc.channel = apply_fading(draw_spreading(config.M, config.N, spreading_rng, config.spreading), fading_rng);

    Rng frame_rng(seed, Stream::frame);
    if (config.coded) {
        require(code != nullptr, "make_scenario: coded configuration needs an LDPC code");
        sc.frame = draw_coded_frame(sc.profile, constellation, *code, config.t_pilot, config.t_data, frame_rng);
    } else {
        sc.frame = draw_frame(sc.profile, constellation, config.t_pilot, config.t_data, frame_rng);
    }
    Rng noise_rng(seed, Stream::noise);
    sc.unit_noise = draw_unit_noise(config.M, config.t_pilot + config.t_data, noise_rng);
    Rng csi_rng(seed, Stream::csi_error);
    sc.unit_csi_error = draw_unit_noise(config.M, config.N, csi_rng);
    return sc;
}

namespace {

// Equivalent-AWGN parameters of a detector from its soft outputs on the pilots.
GaussianChannelApprox calibrate_on_pilots(const CMatrix& pilot_soft, const CMatrix& pilots, int device) {
    const CVector unit = CVector::Ones(1);
    const CMatrix obs = pilot_soft.row(device);
    return estimate_gaussian(unit, obs, pilots.row(device).transpose(), 1.0);
}

}  // namespace

TrialCounts evaluate(const SimConfig& config, const Scenario& sc, Algorithm algorithm, double snr_db,
                     const LdpcCode* code, const CMatrix* genie_feedback) {
    require(is_implemented(algorithm), "algorithm '" + std::string(to_string(algorithm)) + "' is not implemented");
    const auto constellation = AugmentedConstellation::qpsk();
    const int N = config.N;
    const int Tp = config.t_pilot;
    const int Td = config.t_data;
    const double rate = config.coded ? code->rate() : 1.0;
    const double sigma_v2 = snr_to_noise_variance(snr_db, N, rate);
    const double sigma_x2 = 1.0;
    const auto& frame = sc.frame;

    CMatrix X(N, Tp + Td);
    X.leftCols(Tp) = frame.metadata;
    X.rightCols(Td) = frame.data;
    const CMatrix Y = transmit_block(sc.channel, X, sigma_v2, sc.unit_noise);
    const CMatrix Yp = Y.leftCols(Tp);
    const CMatrix Yd = Y.rightCols(Td);
    const CMatrix H_hat = sc.channel.H + std::sqrt(sigma_v2 / config.csi_error_div) * sc.unit_csi_error;

    OpCounter ops;
    DetectionOutput out;
    std::vector<GaussianChannelApprox> approx(N);

    switch (algorithm) {
        case Algorithm::aa_rls_df:
        case Algorithm::aa_rls_linear: {
            const auto mode = algorithm == Algorithm::aa_rls_df ? DetectorMode::decision_feedback : DetectorMode::linear;
            AaRlsDetector det(config.M, N, config.detector_config(mode), constellation, sc.profile.rho);
            det.train(frame.metadata, Yp, &ops);
            out = det.detect(Yd, &ops, genie_feedback);
            if (config.coded)
                for (int n = 0; n < N; ++n) approx[n] = det.gaussian_approx(n);
            break;
        }
        case Algorithm::lmmse:
            out = lmmse_detect(H_hat, Yd, sigma_v2, sigma_x2, constellation, &ops);
            if (config.coded) {
                const CMatrix ps = lmmse_soft(H_hat, Yp, sigma_v2, sigma_x2);
                for (int n = 0; n < N; ++n) approx[n] = calibrate_on_pilots(ps, frame.metadata, n);
            }
            break;
        case Algorithm::oracle_lmmse:
            out = oracle_lmmse(sc.channel.H, frame.support, Yd, sigma_v2, sigma_x2, constellation, &ops);
            if (config.coded) {
                const auto ps = oracle_lmmse(sc.channel.H, frame.support, Yp, sigma_v2, sigma_x2, constellation);
                for (int n = 0; n < N; ++n) approx[n] = calibrate_on_pilots(ps.soft, frame.metadata, n);
            }
            break;
        case Algorithm::sa_sic_unsorted:
            out = sa_sic_unsorted(H_hat, Yd, sigma_v2, sigma_x2, constellation, &ops);
            if (config.coded) {
                const auto ps = sa_sic_unsorted(H_hat, Yp, sigma_v2, sigma_x2, constellation);
                for (int n = 0; n < N; ++n) approx[n] = calibrate_on_pilots(ps.soft, frame.metadata, n);
            }
            break;
        case Algorithm::genie:
            out.soft = frame.data;
            out.labels = frame.data_labels;
            for (auto& g : approx) g = {1.0, 0.01, false};
            break;
        default:
            throw ContractError("unreachable algorithm");
    }

    TrialCounts c;
    c.trials = 1;
    c.macs = ops.macs;
    c.inversion_macs = ops.inversion;
    for (int n = 0; n < N; ++n) {
        for (int t = 0; t < Td; ++t) {
            const int truth = frame.data_labels(n, t);
            const int decided = out.labels(n, t);
            if (frame.support[n]) {
                ++c.active_symbols;
                c.symbol_errors += decided != truth ? 1 : 0;
            } else {
                ++c.inactive_symbols;
                c.false_alarms += decided != kZeroLabel ? 1 : 0;
            }
        }
    }

    if (config.coded) {
        std::vector<IddDeviceInput> inputs(N);
        for (int n = 0; n < N; ++n) {
            inputs[n].soft = out.soft.row(n).transpose();
            inputs[n].labels = out.labels.row(n).transpose();
            inputs[n].approx = approx[n];
            inputs[n].rho = sc.profile.rho[n];
        }
        const auto results = run_idd(inputs, *code, config.idd, constellation);
        c.bit_errors.assign(config.idd.outer_iterations, 0);
        for (int n = 0; n < N; ++n) {
            if (!frame.support[n]) continue;
            c.bits += static_cast<std::uint64_t>(code->k());
            const auto& truth = frame.info_bits[n];
            for (int it = 0; it < config.idd.outer_iterations; ++it) {
                const auto& got = results[n].info_per_iteration[it];
                for (int b = 0; b < code->k(); ++b) c.bit_errors[it] += got[b] != truth[b] ? 1 : 0;
            }
        }
    }
    return c;
}

TrialCounts run_trial(const SimConfig& config, Algorithm algorithm, double snr_db, std::uint64_t trial_index) {
    config.validate();
    std::optional<LdpcCode> code;
    if (config.coded)
        code = LdpcCode::construct(config.ldpc_n, config.ldpc_k, config.ldpc_column_weight, config.ldpc_seed);
    const Scenario sc = make_scenario(config, trial_index, code ? &*code : nullptr);
    return evaluate(config, sc, algorithm, snr_db, code ? &*code : nullptr);
}

MetricsRecord MetricsRecord::from_counts(std::string algorithm, double snr_db, const TrialCounts& c,
                                         std::uint64_t seed, double wall_time_s) {
    MetricsRecord r;
    r.algorithm = std::move(algorithm);
    r.snr_db = snr_db;
    r.trials = c.trials;
    r.active_symbols = c.active_symbols;
    r.symbol_errors = c.symbol_errors;
    r.false_alarms = c.false_alarms;
    r.nser = c.active_symbols ? static_cast<double>(c.symbol_errors) / static_cast<double>(c.active_symbols) : 0.0;
    r.bits = c.bits;
    if (!c.bit_errors.empty()) r.bit_errors_iter1 = c.bit_errors.front();
    if (c.bit_errors.size() >= 2) r.bit_errors_iter2 = c.bit_errors[1];
    if (c.bits > 0 && !c.bit_errors.empty())
        r.ber = static_cast<double>(c.bit_errors.back()) / static_cast<double>(c.bits);
    r.seed = seed;
    r.wall_time_s = wall_time_s;
    r.macs = c.macs;
    return r;
}

std::vector<MetricsRecord> sweep(const SimConfig& config, const SweepOptions& options) {
    config.validate();
    std::optional<LdpcCode> code;
    if (config.coded)
        code = LdpcCode::construct(config.ldpc_n, config.ldpc_k, config.ldpc_column_weight, config.ldpc_seed);
    const LdpcCode* code_ptr = code ? &*code : nullptr;

    const std::size_t n_alg = config.algorithms.size();
    const std::size_t n_snr = config.snr_grid.size();
    const std::size_t cells = n_alg * n_snr;

    struct Partial {
        std::vector<TrialCounts> counts;
        std::vector<double> seconds;
    };
    const int workers = static_cast<int>(std::min<std::uint64_t>(config.workers, config.trials));
    std::vector<Partial> partial(workers, Partial{std::vector<TrialCounts>(cells), std::vector<double>(cells, 0.0)});

    std::atomic<std::uint64_t> next{0};
    std::atomic<std::uint64_t> done{0};
    std::mutex progress_mutex;
    std::exception_ptr failure;
    std::mutex failure_mutex;

    auto work = [&](int w) {
        try {
            for (;;) {
                if (options.cancel && options.cancel->load()) return;
                const std::uint64_t trial = next.fetch_add(1);
                if (trial >= config.trials) return;
                const Scenario sc = make_scenario(config, trial, code_ptr);
                for (std::size_t s = 0; s < n_snr; ++s)
                    for (std::size_t a = 0; a < n_alg; ++a) {
                        const auto t0 = std::chrono::steady_clock::now();
                        const auto c = evaluate(config, sc, config.algorithms[a], config.snr_grid[s], code_ptr);
                        const auto t1 = std::chrono::steady_clock::now();
                        partial[w].counts[a * n_snr + s] += c;
                        partial[w].seconds[a * n_snr + s] += std::chrono::duration<double>(t1 - t0).count();
                    }
                const auto d = done.fetch_add(1) + 1;
                if (options.progress) {
                    std::lock_guard lock(progress_mutex);
                    options.progress(d, config.trials);
                }
            }
        } catch (...) {
            std::lock_guard lock(failure_mutex);
            if (!failure) failure = std::current_exception();
            next.store(config.trials);
        }
    };

    if (workers == 1) {
        work(0);
    } else {
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (int w = 0; w < workers; ++w) pool.emplace_back(work, w);
        for (auto& t : pool) t.join();
    }
    if (failure) std::rethrow_exception(failure);

    std::vector<MetricsRecord> records;
    records.reserve(cells);
    for (std::size_t a = 0; a < n_alg; ++a)
        for (std::size_t s = 0; s < n_snr; ++s) {
            TrialCounts total;
            double seconds = 0.0;
            for (const auto& p : partial) {
                total += p.counts[a * n_snr + s];
                seconds += p.seconds[a * n_snr + s];
            }
            if (config.coded && total.bit_errors.empty()) total.bit_errors.assign(config.idd.outer_iterations, 0);
            records.push_back(MetricsRecord::from_counts(std::string(to_string(config.algorithms[a])),
                                                         config.snr_grid[s], total, config.base_seed, seconds));
        }
    return records;
}

namespace {

std::string fmt_g6(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

std::string fmt_fixed3(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.3f", v);
    return buf;
}

std::vector<std::string_view> split(std::string_view line, char sep) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    for (;;) {
        const auto end = line.find(sep, start);
        out.push_back(line.substr(start, end == std::string_view::npos ? std::string_view::npos : end - start));
        if (end == std::string_view::npos) break;
        start = end + 1;
    }
    return out;
}

template <typename T>
T parse_number(std::string_view field, const char* name) {
    T value{};
    const auto* first = field.data();
    const auto* last = field.data() + field.size();
    const auto res = std::from_chars(first, last, value);
    if (res.ec != std::errc{} || res.ptr != last)
        throw std::runtime_error(std::string("CSV: cannot parse field '") + name + "' from '" + std::string(field) + "'");
    return value;
}

}  // namespace

std::string format_csv(const std::vector<MetricsRecord>& records) {
    std::ostringstream out;
    out << kCsvHeader << '\n';
    for (const auto& r : records) {
        out << r.algorithm << ',' << fmt_g6(r.snr_db) << ',' << r.trials << ',' << r.active_symbols << ','
            << r.symbol_errors << ',' << fmt_g6(r.nser) << ',' << r.bits << ',';
        if (r.bit_errors_iter1) out << *r.bit_errors_iter1;
        out << ',';
        if (r.bit_errors_iter2) out << *r.bit_errors_iter2;
        out << ',';
        if (r.ber) out << fmt_g6(*r.ber);
        out << ',' << r.seed << ',' << fmt_fixed3(r.wall_time_s) << '\n';
    }
    return out.str();
}

void emit_csv(const std::vector<MetricsRecord>& records, const std::string& path) {
    require(!records.empty(), "emit_csv: no records to write");
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw std::runtime_error("emit_csv: cannot open '" + path + "' for writing");
    f << format_csv(records);
    f.flush();
    if (!f) throw std::runtime_error("emit_csv: write to '" + path + "' failed");
}

std::vector<MetricsRecord> parse_csv(std::string_view text) {
    std::vector<MetricsRecord> out;
    bool header = true;
    for (auto line : split(text, '\n')) {
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        if (line.empty()) continue;
        if (header) {
            if (line != kCsvHeader) throw std::runtime_error("CSV: unexpected header");
            header = false;
            continue;
        }
        const auto f = split(line, ',');
        if (f.size() != 12) throw std::runtime_error("CSV: expected 12 fields, got " + std::to_string(f.size()));
        MetricsRecord r;
        r.algorithm = std::string(f[0]);
        r.snr_db = parse_number<double>(f[1], "snr_db");
        r.trials = parse_number<std::uint64_t>(f[2], "trials");
        r.active_symbols = parse_number<std::uint64_t>(f[3], "active_symbols");
        r.symbol_errors = parse_number<std::uint64_t>(f[4], "symbol_errors");
        r.nser = parse_number<double>(f[5], "nser");
        r.bits = parse_number<std::uint64_t>(f[6], "bits");
        if (!f[7].empty()) r.bit_errors_iter1 = parse_number<std::uint64_t>(f[7], "bit_errors_iter1");
        if (!f[8].empty()) r.bit_errors_iter2 = parse_number<std::uint64_t>(f[8], "bit_errors_iter2");
        if (!f[9].empty()) r.ber = parse_number<double>(f[9], "ber");
        r.seed = parse_number<std::uint64_t>(f[10], "seed");
        r.wall_time_s = parse_number<double>(f[11], "wall_time_s");
        out.push_back(std::move(r));
    }
    if (header) throw std::runtime_error("CSV: missing header");
    return out;
}

std::vector<MetricsRecord> read_csv(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("read_csv: cannot open '" + path + "'");
    std::ostringstream ss;
    ss << f.rdbuf();
    return parse_csv(ss.str());
}

}  // namespace mmtc
