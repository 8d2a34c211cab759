#include <catch_amalgamated.hpp>
#include <cmath>
#include <sstream>

#include "skplane/error.hpp"
#include "skplane/ingest.hpp"
#include "skplane/moments.hpp"
#include "skplane/synth.hpp"
#include "test_support.hpp"

using namespace skplane;
using namespace skplane::synth;
using Catch::Approx;

namespace {

SynthConfig quad(std::uint64_t seed) {
    SynthConfig c;
    c.dgp = Dgp::QuadraticSK;
    c.seed = seed;
    return c;
}

}  // namespace

TEST_CASE("the random stream is pinned to its seed", "[synth]") {
    // the standard fixes the 10000th output of a default-seeded mt19937_64
    Rng rng(5489);
    for (int i = 0; i < 9999; ++i) (void)rng.next_u64();
    CHECK(rng.next_u64() == 9981545732273789042ULL);

    Rng a(42);
    Rng b(42);
    for (int i = 0; i < 100; ++i) CHECK(a.normal() == b.normal());
}

TEST_CASE("uniform and normal draws have the right shape", "[synth]") {
    Rng rng(1);
    double sum = 0.0;
    double sum2 = 0.0;
    const int n = 200000;
    for (int i = 0; i < n; ++i) {
        const double u = rng.uniform();
        REQUIRE(u > 0.0);
        REQUIRE(u < 1.0);
        const double z = rng.normal();
        sum += z;
        sum2 += z * z;
    }
    CHECK(sum / n == Approx(0.0).margin(0.01));
    CHECK(sum2 / n == Approx(1.0).margin(0.02));

    double bsum = 0.0;
    for (int i = 0; i < 50000; ++i) bsum += rng.beta(3.25, 3.25);
    CHECK(bsum / 50000 == Approx(0.5).margin(0.005));
    double gsum = 0.0;
    for (int i = 0; i < 50000; ++i) gsum += rng.gamma(0.7);
    CHECK(gsum / 50000 == Approx(0.7).margin(0.02));
}

TEST_CASE("noiseless moment panel sits exactly on the quadratic", "[synth]") {
    auto cfg = quad(3);
    cfg.sigma_u2 = 0.0;
    cfg.sigma_e2 = 0.0;
    const auto gen = generate_moment_panel(cfg);
    CHECK(gen.panel.records.size() == 50u * 78u);
    CHECK(gen.clip_events == 0);
    for (const auto& r : gen.panel.records) {
        REQUIRE(r.kurtosis == cfg.a * (r.skewness * r.skewness) + cfg.b);
        REQUIRE(std::abs(r.skewness) <= 2.0);
    }
}

TEST_CASE("moment panel covid dummy follows covid_week", "[synth]") {
    auto cfg = quad(4);
    cfg.n_assets = 2;
    cfg.n_weeks = 10;
    cfg.covid_week = 6;
    const auto gen = generate_moment_panel(cfg);
    REQUIRE(gen.panel.records.size() == 20);
    CHECK(gen.panel.records[5].covid == 0);
    CHECK(gen.panel.records[6].covid == 1);
    CHECK(gen.panel.records[0].symbol == "SYM0000");
    CHECK(gen.panel.records[10].symbol == "SYM0001");
}

TEST_CASE("generators are deterministic", "[synth]") {
    const auto a = generate_moment_panel(quad(9)).panel.records;
    const auto b = generate_moment_panel(quad(9)).panel.records;
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].skewness == b[i].skewness);
        CHECK(a[i].kurtosis == b[i].kurtosis);
        CHECK(a[i].delta == b[i].delta);
    }
    SynthConfig raw;
    raw.n_assets = 3;
    raw.n_weeks = 5;
    CHECK(generate_raw_csv(raw) == generate_raw_csv(raw));
    auto other = raw;
    other.seed = 43;
    CHECK(generate_raw_csv(raw) != generate_raw_csv(other));
}

TEST_CASE("clip rate stays below 1% under default noise", "[synth][property]") {
    std::size_t clips = 0;
    std::size_t total = 0;
    for (std::uint64_t s = 0; s < 20; ++s) {
        const auto gen = generate_moment_panel(quad(testing::replication_seed(s)));
        clips += gen.clip_events;
        total += gen.panel.records.size();
    }
    CHECK(static_cast<double>(clips) / static_cast<double>(total) < 0.01);
}

TEST_CASE("raw CSV has one row per asset-day", "[synth]") {
    SynthConfig cfg;
    cfg.n_assets = 2;
    cfg.n_weeks = 4;
    const auto text = generate_raw_csv(cfg);
    std::size_t lines = 0;
    for (char c : text) lines += c == '\n';
    CHECK(lines == 2 * 28 + 1);
    CHECK(text.rfind("date,symbol,mcap\n", 0) == 0);

    std::istringstream in(text);
    const auto obs = ingest::parse_observations(in);
    CHECK(obs.size() == 56);
    CHECK(obs.front().date == make_date("2019-04-01"));
    CHECK(obs.back().date == make_date("2019-04-28"));
}

TEST_CASE("raw pipeline over 50 assets x 78 weeks", "[synth]") {
    SynthConfig cfg;
    std::istringstream in(generate_raw_csv(cfg));
    const auto obs = ingest::parse_observations(in);
    const auto series = ingest::compute_all_returns(obs, ingest::ReturnMethod::Simple);
    const auto raw = ingest::assemble_panel(series);
    const auto panel = moments::weekly_moments(raw);
    CHECK(panel.records.size() <= 3900);
    CHECK(panel.records.size() >= 3800);  // only the first week is one return short
}

TEST_CASE("moment oracle examples", "[synth][oracle]") {
    const auto spike = moment_oracle({6, -1, -1, -1, -1, -1, -1});
    CHECK(spike.skewness == Approx(30.0 / std::pow(6.0, 1.5)).epsilon(1e-12));
    CHECK(spike.kurtosis == Approx(31.0 / 6.0).epsilon(1e-12));
    CHECK(spike.delta == Approx(5.0 / std::sqrt(6.0)).epsilon(1e-12));

    const auto two_point = moment_oracle({1, -1, 1, -1});
    CHECK(two_point.skewness == Approx(0.0).margin(1e-15));
    CHECK(two_point.kurtosis == Approx(1.0).epsilon(1e-12));
    CHECK(two_point.delta == 0.0);

    CHECK_THROWS_AS(moment_oracle({2, 2, 2}), Error);
    CHECK_THROWS_AS(moment_oracle({1, 2}), Error);
}

TEST_CASE("OLS oracle", "[synth][oracle]") {
    econ::DesignMatrix d;
    d.x.resize(3, 2);
    d.x << 0, 1, 1, 1, 2, 1;
    d.y.resize(3);
    d.y << 1, 2, 3;
    d.term_names = {"x", "const"};
    d.groups = {0, 0, 0};
    d.group_labels = {"A"};
    const auto b = ols_oracle(d);
    CHECK(b[0] == Approx(1.0).margin(1e-14));
    CHECK(b[1] == Approx(1.0).margin(1e-14));

    Rng rng(12);
    econ::DesignMatrix r;
    r.x.resize(50, 3);
    r.y.resize(50);
    for (int i = 0; i < 50; ++i) {
        r.x(i, 0) = rng.normal();
        r.x(i, 1) = rng.normal();
        r.x(i, 2) = 1.0;
        r.y(i) = 0.3 * r.x(i, 0) - 0.7 * r.x(i, 1) + 2.0 + 0.1 * rng.normal();
        r.groups.push_back(0);
    }
    r.term_names = {"a", "b", "const"};
    r.group_labels = {"A"};
    const auto want = ols_oracle(r);
    const auto got = econ::fit_pooled_ols(r);
    for (std::size_t j = 0; j < 3; ++j) CHECK(got.coefficients[j].estimate == Approx(want[j]).margin(1e-10));

    r.x.col(1) = 2.0 * r.x.col(0);
    try {
        (void)ols_oracle(r);
        FAIL("no throw");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::Singular);
    }
}

TEST_CASE("synth config JSON", "[synth][io]") {
    const auto cfg = config_from_json(nlohmann::json::parse(
        R"({"dgp":"QuadraticSK","n_assets":3,"n_weeks":4,"A":0.5,"B":1.5,"seed":7,"start_date":"2020-01-06"})"));
    CHECK(cfg.dgp == Dgp::QuadraticSK);
    CHECK(cfg.a == 0.5);
    CHECK(cfg.b == 1.5);
    CHECK(cfg.seed == 7);
    CHECK(cfg.start_date == make_date("2020-01-06"));

    const auto back = config_from_json(nlohmann::json::parse(to_json(cfg).dump()));
    CHECK(to_json(back).dump() == to_json(cfg).dump());

    CHECK_THROWS_AS(config_from_json(nlohmann::json::parse(R"({"bogus":1})")), Error);
    CHECK_THROWS_AS(config_from_json(nlohmann::json::parse(R"({"n_assets":0})")), Error);
    CHECK_THROWS_AS(config_from_json(nlohmann::json::parse(R"({"sigma_u2":-1})")), Error);
    CHECK_THROWS_AS(generate_moment_panel(SynthConfig{}), Error);  // RawReturns config
    CHECK_THROWS_AS(generate_raw_csv(quad(1)), Error);
}
