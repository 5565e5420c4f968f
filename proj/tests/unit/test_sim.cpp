#include <cmath>
#include <filesystem>

#include "doctest.h"
#include "mmtc/sim.hpp"

using namespace mmtc;

namespace {

SimConfig small_config() {
    SimConfig c;
    c.N = 8;
    c.M = 8;
    c.t_pilot = 20;
    c.t_data = 20;
    c.block_length = 40;
    c.snr_grid = {10.0, 20.0};
    c.trials = 12;
    return c;
}

}  // namespace

TEST_CASE("algorithm tags") {
    for (auto a : {Algorithm::aa_rls_df, Algorithm::aa_rls_linear, Algorithm::lmmse, Algorithm::oracle_lmmse,
                   Algorithm::sa_sic_unsorted, Algorithm::genie})
        CHECK(parse_algorithm(to_string(a)) == a);
    CHECK(to_string(Algorithm::aa_rls_df) == "aa-rls-df");
    for (auto tag : {"a-sqrd", "aa-mf-sic", "lmmse-pic"}) CHECK_THROWS_AS(parse_algorithm(tag), ContractError);
    CHECK_THROWS_AS(parse_algorithm("magic"), ContractError);
    const auto list = parse_algorithm_list("lmmse, genie");
    REQUIRE(list.size() == 2u);
    CHECK(list[1] == Algorithm::genie);
    CHECK_THROWS_AS(parse_algorithm_list(""), ContractError);
}

TEST_CASE("config validation") {
    auto c = small_config();
    CHECK_NOTHROW(c.validate());
    c.trials = 0;
    CHECK_THROWS_AS(c.validate(), ContractError);
    c = small_config();
    c.block_length = 41;
    CHECK_THROWS_AS(c.validate(), ContractError);
    c = small_config();
    c.algorithms = {Algorithm::a_sqrd};
    CHECK_THROWS_AS(c.validate(), ContractError);
    c = small_config();
    c.coded = true;  // 20 QPSK symbols cannot hold 128 code bits
    CHECK_THROWS_AS(c.validate(), ContractError);
}

TEST_CASE("presets") {
    for (const auto& name : preset_names()) CHECK_NOTHROW(preset(name).validate());
    const auto desk = preset("desk");
    CHECK(desk.N == 32);
    CHECK(desk.M == 16);
    CHECK(desk.t_pilot == 60);
    CHECK(desk.t_data == 68);
    CHECK(desk.lambda == doctest::Approx(0.92));
    CHECK(desk.trials == 2000);
    CHECK(preset("desk-coded").coded);
    CHECK(preset("paper").N == 128);
    CHECK(preset("paper").M == 64);
    CHECK_THROWS_AS(preset("laptop"), ContractError);
}

TEST_CASE("genie detector makes no errors") {
    auto c = small_config();
    for (std::uint64_t t = 0; t < 10; ++t) {
        const auto r = run_trial(c, Algorithm::genie, 0.0, t);
        CHECK(r.symbol_errors == 0);
        CHECK(r.false_alarms == 0);
        CHECK(r.trials == 1);
    }
}

TEST_CASE("trials are deterministic in the seed") {
    auto c = small_config();
    const auto a = run_trial(c, Algorithm::aa_rls_df, 12.0, 3);
    const auto b = run_trial(c, Algorithm::aa_rls_df, 12.0, 3);
    CHECK(a.symbol_errors == b.symbol_errors);
    CHECK(a.active_symbols == b.active_symbols);
    CHECK(a.macs == b.macs);
    c.base_seed = 99;
    const auto s1 = make_scenario(small_config(), 3, nullptr);
    const auto s2 = make_scenario(c, 3, nullptr);
    CHECK((s1.channel.H - s2.channel.H).norm() > 0.0);
}

TEST_CASE("all-inactive frame") {
    auto c = small_config();
    c.rho_lo = 0.0;
    c.rho_hi = 0.0;
    for (auto a : c.algorithms) {
        const auto r = run_trial(c, a, 10.0, 0);
        CHECK(r.active_symbols == 0);
        CHECK(r.symbol_errors == 0);
        CHECK(r.inactive_symbols == static_cast<std::uint64_t>(c.N * c.t_data));
    }
}

TEST_CASE("sweep shape and worker independence") {
    auto c = small_config();
    c.algorithms = {Algorithm::aa_rls_df, Algorithm::lmmse, Algorithm::genie};
    c.snr_grid = {5.0, 15.0};
    const auto one = sweep(c);
    REQUIRE(one.size() == 6u);
    CHECK(one[0].algorithm == "aa-rls-df");
    CHECK(one[1].snr_db == 15.0);
    for (const auto& r : one) CHECK(r.trials == c.trials);
    c.workers = 8;
    const auto eight = sweep(c);
    REQUIRE(eight.size() == one.size());
    for (std::size_t i = 0; i < one.size(); ++i) {
        CHECK(one[i].symbol_errors == eight[i].symbol_errors);
        CHECK(one[i].active_symbols == eight[i].active_symbols);
        CHECK(one[i].false_alarms == eight[i].false_alarms);
        CHECK(one[i].macs == eight[i].macs);
    }
}

TEST_CASE("cancelled sweep keeps finished trials only") {
    auto c = small_config();
    std::atomic<bool> cancel{false};
    SweepOptions opt;
    opt.cancel = &cancel;
    opt.progress = [&](std::uint64_t done, std::uint64_t) {
        if (done == 5) cancel = true;
    };
    const auto r = sweep(c, opt);
    for (const auto& rec : r) CHECK(rec.trials == 5);
}

TEST_CASE("CSV round trip") {
    auto c = small_config();
    c.algorithms = {Algorithm::aa_rls_df, Algorithm::oracle_lmmse};
    const auto records = sweep(c);
    const std::string text = format_csv(records);
    CHECK(text.substr(0, text.find('\n')) == kCsvHeader);
    const auto back = parse_csv(text);
    REQUIRE(back.size() == records.size());
    for (std::size_t i = 0; i < back.size(); ++i) {
        CHECK(back[i].algorithm == records[i].algorithm);
        CHECK(back[i].symbol_errors == records[i].symbol_errors);
        CHECK(back[i].active_symbols == records[i].active_symbols);
        CHECK(back[i].nser == doctest::Approx(static_cast<double>(back[i].symbol_errors) /
                                              static_cast<double>(back[i].active_symbols))
                                  .epsilon(1e-5));
        CHECK_FALSE(back[i].ber.has_value());
    }
    const auto path = (std::filesystem::temp_directory_path() / "mmtc_test_roundtrip.csv").string();
    emit_csv(records, path);
    CHECK(format_csv(read_csv(path)) == text);
    std::filesystem::remove(path);
    CHECK_THROWS(parse_csv("algorithm,snr\n"));
    CHECK_THROWS(parse_csv(std::string(kCsvHeader) + "\nlmmse,1,2\n"));
}

TEST_CASE("coded sweep reports bit errors per iteration") {
    auto c = small_config();
    c.t_pilot = 40;
    c.t_data = 68;
    c.block_length = 108;
    c.coded = true;
    c.trials = 4;
    c.snr_grid = {20.0};
    c.algorithms = {Algorithm::aa_rls_df, Algorithm::genie};
    const auto r = sweep(c);
    REQUIRE(r.size() == 2u);
    for (const auto& rec : r) {
        REQUIRE(rec.bit_errors_iter1.has_value());
        REQUIRE(rec.bit_errors_iter2.has_value());
        REQUIRE(rec.ber.has_value());
        CHECK(rec.bits % 64 == 0);
        CHECK(*rec.ber == doctest::Approx(static_cast<double>(*rec.bit_errors_iter2) / rec.bits));
    }
    CHECK(*r[1].bit_errors_iter1 == 0);
    CHECK(*r[1].bit_errors_iter2 == 0);
}
