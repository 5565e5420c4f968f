#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "mmtc/types.hpp"

namespace mmtc {

using Bits = std::vector<std::uint8_t>;

/// Binary LDPC code given by a sparse parity-check matrix plus a systematic
/// encoder obtained by GF(2) elimination. Parity-check redundancy (rank below
/// the number of checks) leaves extra free positions; those are frozen to 0
/// and reported by frozen_positions().
class LdpcCode {
public:
    /// Seeded regular construction: every column has `column_weight` ones,
    /// rows are balanced, and 4-cycles are avoided where the sizes allow.
    /// Retries with derived seeds (up to 32) when the matrix is not full rank.
    static LdpcCode construct(int n, int k, int column_weight, std::uint64_t seed);

    /// Builds a code from explicit check rows (column indices per check).
    /// k defaults to n - rank.
    static LdpcCode from_checks(int n, std::vector<std::vector<int>> checks, int k = -1);

    /// alist interchange format (MacKay). Indices are 1-based in the file.
    static LdpcCode read_alist(std::istream& in, int k = -1);
    void write_alist(std::ostream& out) const;

    int n() const { return n_; }
    int k() const { return k_; }
    int checks() const { return static_cast<int>(check_vars_.size()); }
    int rank() const { return rank_; }
    double rate() const { return static_cast<double>(k_) / n_; }

    const std::vector<std::vector<int>>& check_neighbors() const { return check_vars_; }
    const std::vector<std::vector<int>>& variable_neighbors() const { return var_checks_; }
    std::span<const int> info_positions() const { return info_pos_; }
    std::span<const int> frozen_positions() const { return frozen_pos_; }

    Bits encode(std::span<const std::uint8_t> info) const;
    Bits extract_info(std::span<const std::uint8_t> codeword) const;
    bool satisfies_parity(std::span<const std::uint8_t> word) const;

    /// Dense k x n generator (rows are the encodings of unit info vectors).
    std::vector<Bits> generator() const;

    /// Number of length-4 cycles in the Tanner graph.
    int count_four_cycles() const;

private:
    void derive_encoder();

    int n_ = 0;
    int k_ = 0;
    int rank_ = 0;
    std::vector<std::vector<int>> check_vars_;
    std::vector<std::vector<int>> var_checks_;
    std::vector<int> info_pos_;
    std::vector<int> frozen_pos_;
    // For every pivot (parity) position: the free positions it sums over.
    std::vector<int> pivot_pos_;
    std::vector<std::vector<int>> pivot_terms_;
};

struct DecodeResult {
    Bits hard_bits;
    std::vector<double> posterior_llrs;
    std::vector<double> extrinsic_llrs;  // posterior - input
    int iterations_used = 0;
    bool parity_ok = false;
};

/// Sum-product decoding with tanh-rule check updates. Positive LLR favours
/// bit 0. Messages are clamped to +-50; a zero posterior is an erasure and
/// prevents parity_ok. Stops early once all checks are satisfied.
DecodeResult decode_spa(const LdpcCode& code, std::span<const double> channel_llrs, int max_iters = 2);

}  // namespace mmtc
