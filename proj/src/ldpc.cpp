#include "mmtc/ldpc.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <iterator>
#include <numeric>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>

#include "mmtc/rng.hpp"
#include "mmtc/soft_info.hpp"

namespace mmtc {

namespace {

std::optional<std::vector<std::vector<int>>> try_regular(int n, int m, int wc, std::uint64_t seed) {
    Rng rng(seed);
    const int cap = (n * wc + m - 1) / m;
    std::vector<std::vector<int>> checks(m);
    std::vector<std::vector<int>> var_checks(n);

    std::vector<int> columns(n);
    std::iota(columns.begin(), columns.end(), 0);
    std::shuffle(columns.begin(), columns.end(), rng.engine());

    std::vector<int> candidates;
    for (int v : columns) {
        std::set<int> chosen;
        for (int e = 0; e < wc; ++e) {
            // Checks already at distance 2 from v through a chosen check would close a 4-cycle.
            std::set<int> blocked;
            for (int c : chosen)
                for (int u : checks[c])
                    for (int c2 : var_checks[u]) blocked.insert(c2);

            auto pick = [&](bool avoid_cycles) {
                candidates.clear();
                std::size_t best_deg = static_cast<std::size_t>(cap);
                for (int c = 0; c < m; ++c) {
                    if (chosen.count(c) || checks[c].size() >= static_cast<std::size_t>(cap)) continue;
                    if (avoid_cycles && blocked.count(c)) continue;
                    if (checks[c].size() < best_deg) {
                        best_deg = checks[c].size();
                        candidates.clear();
                    }
                    if (checks[c].size() == best_deg) candidates.push_back(c);
                }
                return !candidates.empty();
            };
            if (!pick(true) && !pick(false)) return std::nullopt;
            const int c = candidates[rng.uniform_int(0, static_cast<int>(candidates.size()) - 1)];
            chosen.insert(c);
            checks[c].push_back(v);
            var_checks[v].push_back(c);
        }
    }
    for (auto& row : checks) {
        if (row.empty()) return std::nullopt;
        std::sort(row.begin(), row.end());
    }
    return checks;
}

// Reduced row echelon form over GF(2); returns pivot columns per row.
std::vector<int> rref(std::vector<Bits>& rows, int n) {
    std::vector<int> pivots;
    std::size_t r = 0;
    for (int col = 0; col < n && r < rows.size(); ++col) {
        std::size_t sel = r;
        while (sel < rows.size() && !rows[sel][col]) ++sel;
        if (sel == rows.size()) continue;
        std::swap(rows[r], rows[sel]);
        for (std::size_t i = 0; i < rows.size(); ++i) {
            if (i != r && rows[i][col])
                for (int j = 0; j < n; ++j) rows[i][j] ^= rows[r][j];
        }
        pivots.push_back(col);
        ++r;
    }
    rows.resize(r);
    return pivots;
}

}  // namespace

LdpcCode LdpcCode::construct(int n, int k, int column_weight, std::uint64_t seed) {
    require(n > k && k >= 1, "construct_code: need n > k >= 1");
    require(column_weight >= 2, "construct_code: column weight must be at least 2");
    const int m = n - k;
    require(column_weight <= m, "construct_code: column weight exceeds the number of checks");

    std::optional<LdpcCode> fallback;
    for (std::uint64_t attempt = 0; attempt < 32; ++attempt) {
        auto checks = try_regular(n, m, column_weight, derive_seed(seed, attempt));
        if (!checks) continue;
        LdpcCode code = from_checks(n, std::move(*checks), k);
        if (code.rank() == m) return code;
        if (!fallback) fallback = std::move(code);
    }
    // Even column weights make the checks sum to zero, so full rank is
    // unreachable; keep the first valid matrix and freeze the spare positions.
    if (fallback) return std::move(*fallback);
    throw std::runtime_error("construct_code: no valid parity-check matrix after 32 attempts");
}

LdpcCode LdpcCode::from_checks(int n, std::vector<std::vector<int>> checks, int k) {
    require(n >= 2 && !checks.empty(), "from_checks: empty code");
    LdpcCode code;
    code.n_ = n;
    code.check_vars_ = std::move(checks);
    code.var_checks_.assign(n, {});
    for (int c = 0; c < code.checks(); ++c) {
        auto& row = code.check_vars_[c];
        require(!row.empty(), "from_checks: zero row in parity-check matrix");
        std::sort(row.begin(), row.end());
        require(std::adjacent_find(row.begin(), row.end()) == row.end(), "from_checks: repeated column in a check");
        for (int v : row) {
            require(v >= 0 && v < n, "from_checks: column index out of range");
            code.var_checks_[v].push_back(c);
        }
    }
    for (const auto& col : code.var_checks_) require(!col.empty(), "from_checks: zero column in parity-check matrix");
    code.k_ = k;
    code.derive_encoder();
    return code;
}

void LdpcCode::derive_encoder() {
    std::vector<Bits> rows(checks(), Bits(n_, 0));
    for (int c = 0; c < checks(); ++c)
        for (int v : check_vars_[c]) rows[c][v] ^= 1;
    pivot_pos_ = rref(rows, n_);
    rank_ = static_cast<int>(pivot_pos_.size());

    std::vector<std::uint8_t> is_pivot(n_, 0);
    for (int p : pivot_pos_) is_pivot[p] = 1;
    std::vector<int> free_pos;
    for (int v = 0; v < n_; ++v)
        if (!is_pivot[v]) free_pos.push_back(v);

    if (k_ < 0) k_ = static_cast<int>(free_pos.size());
    require(k_ >= 1 && k_ <= static_cast<int>(free_pos.size()), "LdpcCode: k exceeds the code dimension");
    info_pos_.assign(free_pos.begin(), free_pos.begin() + k_);
    frozen_pos_.assign(free_pos.begin() + k_, free_pos.end());

    pivot_terms_.assign(rank_, {});
    for (int r = 0; r < rank_; ++r)
        for (int v : info_pos_)
            if (rows[r][v]) pivot_terms_[r].push_back(v);
}

Bits LdpcCode::encode(std::span<const std::uint8_t> info) const {
    require(static_cast<int>(info.size()) == k_, "encode: info length must equal k");
    Bits c(n_, 0);
    for (int i = 0; i < k_; ++i) c[info_pos_[i]] = info[i] & 1;
    for (int r = 0; r < rank_; ++r) {
        std::uint8_t acc = 0;
        for (int v : pivot_terms_[r]) acc ^= c[v];
        c[pivot_pos_[r]] = acc;
    }
    return c;
}

Bits LdpcCode::extract_info(std::span<const std::uint8_t> codeword) const {
    require(static_cast<int>(codeword.size()) == n_, "extract_info: length must equal n");
    Bits info(k_);
    for (int i = 0; i < k_; ++i) info[i] = codeword[info_pos_[i]];
    return info;
}

bool LdpcCode::satisfies_parity(std::span<const std::uint8_t> word) const {
    require(static_cast<int>(word.size()) == n_, "satisfies_parity: length must equal n");
    for (const auto& row : check_vars_) {
        std::uint8_t acc = 0;
        for (int v : row) acc ^= word[v];
        if (acc) return false;
    }
    return true;
}

std::vector<Bits> LdpcCode::generator() const {
    std::vector<Bits> g;
    g.reserve(k_);
    Bits unit(k_, 0);
    for (int i = 0; i < k_; ++i) {
        unit[i] = 1;
        g.push_back(encode(unit));
        unit[i] = 0;
    }
    return g;
}

int LdpcCode::count_four_cycles() const {
    int cycles = 0;
    for (int a = 0; a < checks(); ++a)
        for (int b = a + 1; b < checks(); ++b) {
            std::vector<int> common;
            std::set_intersection(check_vars_[a].begin(), check_vars_[a].end(), check_vars_[b].begin(),
                                  check_vars_[b].end(), std::back_inserter(common));
            const int shared = static_cast<int>(common.size());
            cycles += shared * (shared - 1) / 2;
        }
    return cycles;
}

LdpcCode LdpcCode::read_alist(std::istream& in, int k) {
    int n = 0, m = 0, max_col = 0, max_row = 0;
    if (!(in >> n >> m >> max_col >> max_row) || n < 1 || m < 1)
        throw std::runtime_error("read_alist: malformed header");
    std::vector<int> col_w(n), row_w(m);
    for (auto& w : col_w) in >> w;
    for (auto& w : row_w) in >> w;
    // Column lists are redundant with the row lists; read and skip them.
    for (int v = 0; v < n; ++v)
        for (int e = 0; e < max_col; ++e) {
            int idx;
            in >> idx;
        }
    std::vector<std::vector<int>> checks(m);
    for (int c = 0; c < m; ++c)
        for (int e = 0; e < max_row; ++e) {
            int idx = 0;
            in >> idx;
            if (idx > 0) checks[c].push_back(idx - 1);
        }
    if (!in) throw std::runtime_error("read_alist: truncated input");
    for (int c = 0; c < m; ++c) {
        std::sort(checks[c].begin(), checks[c].end());
        if (static_cast<int>(checks[c].size()) != row_w[c])
            throw std::runtime_error("read_alist: row weight does not match its index list");
    }
    return from_checks(n, std::move(checks), k);
}

void LdpcCode::write_alist(std::ostream& out) const {
    std::size_t max_col = 0, max_row = 0;
    for (const auto& c : var_checks_) max_col = std::max(max_col, c.size());
    for (const auto& r : check_vars_) max_row = std::max(max_row, r.size());
    out << n_ << ' ' << checks() << '\n' << max_col << ' ' << max_row << '\n';
    auto weights = [&](const std::vector<std::vector<int>>& lists) {
        for (std::size_t i = 0; i < lists.size(); ++i) out << (i ? " " : "") << lists[i].size();
        out << '\n';
    };
    weights(var_checks_);
    weights(check_vars_);
    auto entries = [&](const std::vector<std::vector<int>>& lists, std::size_t width) {
        for (const auto& l : lists) {
            std::vector<int> sorted = l;
            std::sort(sorted.begin(), sorted.end());
            for (std::size_t e = 0; e < width; ++e)
                out << (e ? " " : "") << (e < sorted.size() ? sorted[e] + 1 : 0);
            out << '\n';
        }
    };
    entries(var_checks_, max_col);
    entries(check_vars_, max_row);
}

DecodeResult decode_spa(const LdpcCode& code, std::span<const double> channel_llrs, int max_iters) {
    const int n = code.n();
    require(static_cast<int>(channel_llrs.size()) == n, "decode_spa: need one LLR per code bit");
    require(max_iters >= 1, "decode_spa: max_iters must be at least 1");
    const auto& checks = code.check_neighbors();

    std::vector<double> input(n);
    for (int v = 0; v < n; ++v) input[v] = clamp_llr(channel_llrs[v]);
    for (int v : code.frozen_positions()) input[v] = kLlrClamp;

    // Edge storage by check: msg index = offset[c] + position in the row.
    std::vector<int> offset(checks.size() + 1, 0);
    for (std::size_t c = 0; c < checks.size(); ++c) offset[c + 1] = offset[c] + static_cast<int>(checks[c].size());
    std::vector<double> v2c(offset.back()), c2v(offset.back(), 0.0);
    // For each variable: its edges as indices into the check-ordered arrays.
    std::vector<std::vector<int>> var_edges(n);
    for (std::size_t c = 0; c < checks.size(); ++c)
        for (std::size_t e = 0; e < checks[c].size(); ++e) var_edges[checks[c][e]].push_back(offset[c] + static_cast<int>(e));
    for (int v = 0; v < n; ++v)
        for (int e : var_edges[v]) v2c[e] = input[v];

    DecodeResult res;
    res.hard_bits.assign(n, 0);
    res.posterior_llrs.assign(n, 0.0);
    constexpr double kTanhLimit = 1.0 - 1e-15;

    std::vector<double> t;
    for (int it = 1; it <= max_iters; ++it) {
        for (std::size_t c = 0; c < checks.size(); ++c) {
            const int deg = static_cast<int>(checks[c].size());
            t.resize(deg);
            for (int e = 0; e < deg; ++e) t[e] = std::tanh(0.5 * v2c[offset[c] + e]);
            for (int e = 0; e < deg; ++e) {
                double prod = 1.0;
                for (int f = 0; f < deg; ++f)
                    if (f != e) prod *= t[f];
                prod = std::clamp(prod, -kTanhLimit, kTanhLimit);
                c2v[offset[c] + e] = clamp_llr(2.0 * std::atanh(prod));
            }
        }
        bool erasure = false;
        for (int v = 0; v < n; ++v) {
            double total = input[v];
            for (int e : var_edges[v]) total += c2v[e];
            res.posterior_llrs[v] = clamp_llr(total);
            res.hard_bits[v] = res.posterior_llrs[v] < 0.0 ? 1 : 0;
            erasure |= res.posterior_llrs[v] == 0.0;
            for (int e : var_edges[v]) v2c[e] = clamp_llr(total - c2v[e]);
        }
        res.iterations_used = it;
        res.parity_ok = !erasure && code.satisfies_parity(res.hard_bits);
        if (res.parity_ok) break;
    }
    res.extrinsic_llrs.resize(n);
    for (int v = 0; v < n; ++v) res.extrinsic_llrs[v] = res.posterior_llrs[v] - clamp_llr(channel_llrs[v]);
    return res;
}

}  // namespace mmtc
