#include <cmath>
#include <random>
#include <sstream>

#include "doctest.h"
#include "mmtc/ldpc.hpp"

using namespace mmtc;

namespace {

Bits random_bits(int n, std::mt19937_64& e) {
    Bits b(n);
    for (auto& x : b) x = e() & 1;
    return b;
}

std::vector<double> noiseless_llrs(const Bits& c, double mag) {
    std::vector<double> l(c.size());
    for (std::size_t i = 0; i < c.size(); ++i) l[i] = c[i] ? -mag : mag;
    return l;
}

// H c = 0 evaluated directly from the check rows.
bool parity_by_rows(const LdpcCode& code, const Bits& c) {
    for (const auto& row : code.check_neighbors()) {
        int s = 0;
        for (int v : row) s ^= c[v];
        if (s) return false;
    }
    return true;
}

std::vector<Bits> codebook(const LdpcCode& code) {
    std::vector<Bits> book;
    for (int m = 0; m < (1 << code.k()); ++m) {
        Bits info(code.k());
        for (int b = 0; b < code.k(); ++b) info[b] = (m >> b) & 1;
        book.push_back(code.encode(info));
    }
    return book;
}

// Exhaustive maximum-likelihood codeword for LLRs (positive favours 0).
const Bits& ml_decode(const std::vector<Bits>& book, const std::vector<double>& l) {
    std::size_t best = 0;
    double best_metric = -INFINITY;
    for (std::size_t a = 0; a < book.size(); ++a) {
        double m = 0.0;
        for (std::size_t i = 0; i < l.size(); ++i) m += book[a][i] ? -l[i] : l[i];
        if (m > best_metric) {
            best_metric = m;
            best = a;
        }
    }
    return book[best];
}

}  // namespace

TEST_CASE("small code construction") {
    const auto code = LdpcCode::construct(8, 4, 2, 1);
    CHECK(code.n() == 8);
    CHECK(code.k() == 4);
    REQUIRE(code.checks() == 4);
    for (const auto& row : code.check_neighbors()) CHECK(row.size() == 4);
    for (const auto& col : code.variable_neighbors()) CHECK(col.size() == 2);
    // every generator row satisfies every check (G H^T = 0)
    for (const auto& g : code.generator()) CHECK(parity_by_rows(code, g));
    // an even column weight makes the rows sum to zero, so one check is redundant
    CHECK(code.rank() == 3);
    CHECK(code.frozen_positions().size() == 1);

    const auto again = LdpcCode::construct(8, 4, 2, 1);
    CHECK(again.check_neighbors() == code.check_neighbors());
}

TEST_CASE("default code is regular with weight-3 columns") {
    const auto code = LdpcCode::construct(128, 64, 3, 2024);
    CHECK(code.k() == 64);
    CHECK(code.rate() == doctest::Approx(0.5));
    CHECK(code.checks() == 64);
    for (const auto& col : code.variable_neighbors()) CHECK(col.size() == 3);
    for (const auto& row : code.check_neighbors()) {
        CHECK(row.size() >= 5);
        CHECK(row.size() <= 7);
    }
    CHECK(code.count_four_cycles() == 0);
    CHECK(code.info_positions().size() + code.frozen_positions().size() + code.rank() == 128u);
}

TEST_CASE("encoding") {
    const auto code = LdpcCode::construct(128, 64, 3, 2024);
    std::mt19937_64 e(1);
    CHECK(code.encode(Bits(64, 0)) == Bits(128, 0));
    for (int i = 0; i < 50; ++i) {
        const Bits a = random_bits(64, e), b = random_bits(64, e);
        Bits x(64);
        for (int j = 0; j < 64; ++j) x[j] = a[j] ^ b[j];
        const Bits ca = code.encode(a), cb = code.encode(b), cx = code.encode(x);
        for (int j = 0; j < 128; ++j) CHECK(cx[j] == (ca[j] ^ cb[j]));
        CHECK(parity_by_rows(code, ca));
        CHECK(code.satisfies_parity(ca));
        CHECK(code.extract_info(ca) == a);
    }
    CHECK_THROWS_AS(code.encode(Bits(63, 0)), ContractError);
}

TEST_CASE("decode_spa examples") {
    const auto code = LdpcCode::construct(8, 4, 2, 1);
    const auto book = codebook(code);
    SUBCASE("noiseless fixed point") {
        for (const auto& c : book) {
            const auto r = decode_spa(code, noiseless_llrs(c, 20.0));
            CHECK(r.hard_bits == c);
            CHECK(r.parity_ok);
            CHECK(r.iterations_used == 1);
        }
    }
    SUBCASE("one weak flipped bit is corrected and agrees with ML") {
        for (const auto& c : book) {
            for (int flip = 0; flip < 8; ++flip) {
                auto l = noiseless_llrs(c, 10.0);
                l[flip] = c[flip] ? 2.0 : -2.0;
                const auto r = decode_spa(code, l, 20);
                CHECK(r.hard_bits == ml_decode(book, l));
                CHECK(r.hard_bits == c);
            }
        }
    }
    SUBCASE("all-zero LLRs") {
        const auto r = decode_spa(code, std::vector<double>(8, 0.0));
        CHECK_FALSE(r.parity_ok);
        for (int v = 0; v < 8; ++v) {
            const bool frozen = std::find(code.frozen_positions().begin(), code.frozen_positions().end(), v) !=
                                code.frozen_positions().end();
            if (!frozen) CHECK(r.posterior_llrs[v] == 0.0);
        }
    }
}

TEST_CASE("extrinsic equals posterior minus input and parity flag is consistent") {
    const auto code = LdpcCode::construct(128, 64, 3, 2024);
    std::mt19937_64 e(3);
    std::normal_distribution<double> nd(0.0, 1.0);
    for (int i = 0; i < 100; ++i) {
        const Bits c = code.encode(random_bits(64, e));
        auto l = noiseless_llrs(c, 2.0);
        for (auto& x : l) x += 2.0 * nd(e);
        const auto r = decode_spa(code, l, 2);
        for (int v = 0; v < 128; ++v) {
            CHECK(r.extrinsic_llrs[v] == doctest::Approx(r.posterior_llrs[v] - l[v]).epsilon(1e-12));
        }
        CHECK(r.parity_ok == parity_by_rows(code, r.hard_bits));
    }
}

TEST_CASE("noiseless roundtrip over 1000 words") {
    const auto code = LdpcCode::construct(128, 64, 3, 2024);
    std::mt19937_64 e(4);
    int failures = 0;
    for (int i = 0; i < 1000; ++i) {
        const Bits info = random_bits(64, e);
        const auto r = decode_spa(code, noiseless_llrs(code.encode(info), 20.0));
        failures += code.extract_info(r.hard_bits) != info ? 1 : 0;
    }
    CHECK(failures == 0);
}

TEST_CASE("sum-product agrees with exhaustive ML on the small code") {
    const auto code = LdpcCode::construct(8, 4, 2, 1);
    const auto book = codebook(code);
    const double sigma2 = 1.0 / (2.0 * std::pow(10.0, 0.3));  // Es/N0 = 3 dB
    std::mt19937_64 e(5);
    std::normal_distribution<double> nd(0.0, std::sqrt(sigma2));
    int agree = 0;
    const int draws = 10000;
    for (int t = 0; t < draws; ++t) {
        const Bits& c = book[e() % book.size()];
        std::vector<double> l(8);
        for (int i = 0; i < 8; ++i) l[i] = 2.0 * ((c[i] ? -1.0 : 1.0) + nd(e)) / sigma2;
        agree += decode_spa(code, l, 20).hard_bits == ml_decode(book, l) ? 1 : 0;
    }
    MESSAGE("agreement " << agree / static_cast<double>(draws));
    CHECK(agree >= 0.99 * draws);
}

TEST_CASE("alist roundtrip") {
    const auto code = LdpcCode::construct(128, 64, 3, 2024);
    std::stringstream s;
    code.write_alist(s);
    const auto back = LdpcCode::read_alist(s, 64);
    CHECK(back.check_neighbors() == code.check_neighbors());
    CHECK(back.k() == 64);
    std::mt19937_64 e(6);
    const Bits info = random_bits(64, e);
    CHECK(back.satisfies_parity(back.encode(info)));
}

TEST_CASE("from_checks validation") {
    CHECK_THROWS_AS(LdpcCode::from_checks(4, {{0, 1}, {}}), ContractError);          // zero row
    CHECK_THROWS_AS(LdpcCode::from_checks(4, {{0, 1}, {1, 2}}), ContractError);      // column 3 unused
    CHECK_THROWS_AS(LdpcCode::from_checks(4, {{0, 1, 1}, {2, 3}}), ContractError);   // duplicate entry
    const auto hamming = LdpcCode::from_checks(7, {{0, 1, 2, 4}, {0, 1, 3, 5}, {0, 2, 3, 6}});
    CHECK(hamming.k() == 4);
    CHECK(codebook(hamming).size() == 16u);
    CHECK_THROWS_AS(LdpcCode::construct(8, 8, 2, 1), ContractError);
    CHECK_THROWS_AS(LdpcCode::construct(8, 4, 1, 1), ContractError);
}
