#include <catch_amalgamated.hpp>
#include <cmath>

#include "skplane/econometrics.hpp"
#include "skplane/error.hpp"
#include "skplane/synth.hpp"
#include "test_support.hpp"

using namespace skplane;
using namespace skplane::econ;
using Catch::Approx;
using Catch::Matchers::ContainsSubstring;

namespace {

moments::MomentRecord rec(const std::string& symbol, int week, double s, double k, int covid = 0) {
    moments::MomentRecord r;
    r.symbol = symbol;
    r.week_start = make_date("2019-04-01") + std::chrono::days{7 * week};
    r.week = iso_week(r.week_start);
    r.n_days = 7;
    r.skewness = s;
    r.kurtosis = k;
    r.delta = 1.0;
    r.ln_delta = 0.0;
    r.covid = covid;
    return r;
}

ErrorCode code_of(auto&& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("expected skplane::Error");
    return ErrorCode::Io;
}

// Raw design with an intercept as the last column; x_cols excludes it.
DesignMatrix random_design(synth::Rng& rng, int n, int x_cols, int n_groups) {
    DesignMatrix d;
    d.x.resize(n, x_cols + 1);
    d.y.resize(n);
    for (int c = 0; c < x_cols; ++c) d.term_names.push_back("x" + std::to_string(c));
    d.term_names.emplace_back("const");
    for (int g = 0; g < n_groups; ++g) d.group_labels.push_back("G" + std::to_string(g));
    for (int i = 0; i < n; ++i) {
        for (int c = 0; c < x_cols; ++c) d.x(i, c) = rng.normal() + 0.3 * c;
        d.x(i, x_cols) = 1.0;
        d.y(i) = 0.5 + rng.normal();
        for (int c = 0; c < x_cols; ++c) d.y(i) += (c + 1) * 0.25 * d.x(i, c);
        d.groups.push_back(i % n_groups);
    }
    return d;
}

synth::SynthConfig quad_config(std::uint64_t seed) {
    synth::SynthConfig c;
    c.dgp = synth::Dgp::QuadraticSK;
    c.seed = seed;
    return c;
}

}  // namespace

TEST_CASE("model parsing and regressor lists", "[econ]") {
    CHECK(parse_model("7") == Model::M7);
    CHECK(parse_model("M9") == Model::M9);
    CHECK(parse_model("(11)") == Model::M11);
    CHECK_THROWS_AS(parse_model("10"), Error);
    CHECK(parse_model_list("7,8,9,11") == all_models());

    CHECK(ModelSpec{Model::M7}.regressors() == std::vector<std::string>{"skewness2"});
    CHECK(ModelSpec{Model::M11}.regressors() ==
          std::vector<std::string>{"skewness2", "skewness", "skewness2_x_covid", "covid"});
    CHECK(ModelSpec{Model::M8}.interaction_terms().empty());
    CHECK(ModelSpec{Model::M9}.interaction_terms() == std::vector<std::string>{"skewness2_x_covid"});
}

TEST_CASE("build_design shapes and rows", "[econ]") {
    moments::MomentPanel p;
    p.records = {rec("A", 0, 1.0, 3.0), rec("B", 0, 2.0, 6.0, 1), rec("A", 1, 2.0, 5.0, 0)};

    const auto m7 = build_design(p, {Model::M7});
    CHECK(m7.rows() == 3);
    CHECK(m7.cols() == 2);
    CHECK(m7.term_names.back() == "const");
    CHECK(m7.groups == std::vector<int>{0, 1, 0});
    CHECK(m7.group_labels == std::vector<std::string>{"A", "B"});

    const auto m9 = build_design(p, {Model::M9});
    CHECK(m9.x(1, 0) == 4.0);
    CHECK(m9.x(1, 1) == 2.0);
    CHECK(m9.x(1, 2) == 4.0);
    CHECK(m9.y(1) == 6.0);

    const auto m11 = build_design(p, {Model::M11});
    CHECK(m11.x(2, 2) == 0.0);
    CHECK(m11.x(2, 3) == 0.0);

    CHECK(code_of([] { (void)build_design(moments::MomentPanel{}, {Model::M7}); }) == ErrorCode::EmptyPanel);
    moments::MomentPanel bad;
    bad.records = {rec("A", 0, NAN, 3.0)};
    CHECK(code_of([&] { (void)build_design(bad, {Model::M7}); }) == ErrorCode::NonFiniteValue);
}

TEST_CASE("pooled OLS fits an exact line", "[econ]") {
    // (S^2, K) = (0, 1), (1, 2), (4, 5) lie on K = S^2 + 1
    moments::MomentPanel p;
    p.records = {rec("A", 0, 0.0, 1.0), rec("A", 1, 1.0, 2.0), rec("B", 0, 2.0, 5.0)};
    const auto fit = fit_pooled_ols(build_design(p, {Model::M7}));
    CHECK(fit.coefficient("skewness2").estimate == Approx(1.0).margin(1e-12));
    CHECK(fit.coefficient("const").estimate == Approx(1.0).margin(1e-12));
    CHECK(fit.r2_overall == Approx(1.0).margin(1e-12));
    CHECK(fit.perfect_fit);

    const auto beta = synth::ols_oracle(build_design(p, {Model::M7}));
    CHECK(beta[0] == Approx(1.0).margin(1e-12));
    CHECK(beta[1] == Approx(1.0).margin(1e-12));

    const auto f = f_joint_test(fit, fit.slope_terms());
    CHECK(std::isinf(f.statistic));
    CHECK(f.p_value == 0.0);
    CHECK(f.perfect_fit);
}

TEST_CASE("pooled OLS error paths", "[econ]") {
    synth::Rng rng(1);
    auto d = random_design(rng, 30, 2, 3);
    d.x.col(1) = d.x.col(0);
    try {
        (void)fit_pooled_ols(d);
        FAIL("no throw");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::RankDeficient);
        CHECK_THAT(e.what(), ContainsSubstring("x1"));
    }
    CHECK(collinear_terms(d.x, d.term_names) == std::vector<std::string>{"x1"});

    auto small = random_design(rng, 3, 2, 1);
    CHECK(code_of([&] { (void)fit_pooled_ols(small); }) == ErrorCode::TooFewRows);
}

TEST_CASE("noiseless quadratic panel is recovered by both estimators", "[econ]") {
    auto cfg = quad_config(5);
    cfg.sigma_u2 = 0.0;
    cfg.sigma_e2 = 0.0;
    const auto panel = synth::generate_moment_panel(cfg).panel;
    const auto design = build_design(panel, {Model::M7});
    for (auto est : {Estimator::PooledOLS, Estimator::RandomEffects}) {
        const auto f = fit(design, est);
        CHECK(f.coefficient("skewness2").estimate == Approx(0.88).margin(1e-8));
        CHECK(f.coefficient("const").estimate == Approx(2.0).margin(1e-8));
    }
}

TEST_CASE("OLS residuals are orthogonal to the columns", "[econ][property]") {
    synth::Rng rng(2);
    for (int trial = 0; trial < 100; ++trial) {
        const int n = 10 + static_cast<int>(rng.uniform() * 300);
        const int k = 1 + static_cast<int>(rng.uniform() * 4);
        const auto d = random_design(rng, n, k, 5);
        const auto f = fit_pooled_ols(d);
        Eigen::VectorXd b(d.cols());
        for (std::size_t j = 0; j < d.cols(); ++j) b(j) = f.coefficients[j].estimate;
        const Eigen::VectorXd r = d.y - d.x * b;
        const Eigen::VectorXd g = d.x.transpose() * r;
        const double scale = (d.x.cwiseAbs().transpose() * d.y.cwiseAbs()).maxCoeff();
        CHECK(g.cwiseAbs().maxCoeff() <= 1e-8 * scale);
    }
}

TEST_CASE("OLS matches the normal-equation oracle", "[econ][oracle]") {
    synth::Rng rng(3);
    for (int trial = 0; trial < 200; ++trial) {
        const int n = 10 + static_cast<int>(rng.uniform() * 491);
        const int k = 1 + static_cast<int>(rng.uniform() * 4);  // up to 5 columns with the intercept
        const auto d = random_design(rng, n, k, 7);
        const auto f = fit_pooled_ols(d);
        const auto want = synth::ols_oracle(d);
        for (std::size_t j = 0; j < want.size(); ++j) {
            CHECK(f.coefficients[j].estimate == Approx(want[j]).margin(1e-10));
        }
    }
}

TEST_CASE("t squared equals the single-term F", "[econ][property]") {
    synth::Rng rng(4);
    for (int trial = 0; trial < 50; ++trial) {
        const auto d = random_design(rng, 80, 3, 4);
        const auto f = fit_pooled_ols(d);
        for (const auto& term : f.slope_terms()) {
            const std::vector<std::string> one{term};
            const auto test = f_joint_test(f, one);
            const double t = f.coefficient(term).statistic;
            CHECK(test.statistic == Approx(t * t).epsilon(1e-8));
            CHECK(test.df == 1);
            CHECK(test.df_denominator == 76);
            CHECK(test.p_value == Approx(f.coefficient(term).p_value).epsilon(1e-8));
        }
    }
}

TEST_CASE("shifting y moves only the intercept", "[econ][property]") {
    synth::Rng rng(5);
    for (int trial = 0; trial < 50; ++trial) {
        auto d = random_design(rng, 120, 3, 6);
        const auto base = fit_pooled_ols(d);
        const double c = 10.0 * rng.normal();
        d.y.array() += c;
        const auto shifted = fit_pooled_ols(d);
        for (std::size_t j = 0; j + 1 < d.cols(); ++j) {
            CHECK(shifted.coefficients[j].estimate == Approx(base.coefficients[j].estimate).margin(1e-10));
        }
        CHECK(shifted.coefficient("const").estimate == Approx(base.coefficient("const").estimate + c).margin(1e-10));
    }
}

TEST_CASE("random effects clamp reduces to pooled OLS", "[econ]") {
    SECTION("constructed fixture: group means identical, so between variation is nil") {
        // two groups with the same regressor values and mirrored noise
        moments::MomentPanel p;
        const double s[] = {0.1, 0.7, -0.4, 1.2, -1.1, 0.3};
        const double e[] = {0.05, -0.02, 0.04, -0.06, 0.01, -0.02};
        for (int t = 0; t < 6; ++t) {
            p.records.push_back(rec("A", t, s[t], 2.0 + 0.9 * s[t] * s[t] + e[t]));
            p.records.push_back(rec("B", t, s[t], 2.0 + 0.9 * s[t] * s[t] - e[t]));
        }
        const auto d = build_design(p, {Model::M8});
        const auto re = fit_random_effects(d);
        const auto ols = fit_pooled_ols(d);
        REQUIRE(re.sigma_u2_clamped);
        CHECK(*re.sigma_u2 == 0.0);
        for (std::size_t j = 0; j < d.cols(); ++j) {
            CHECK(re.coefficients[j].estimate == Approx(ols.coefficients[j].estimate).margin(1e-10));
        }
    }
    SECTION("every group of size one") {
        synth::Rng rng(6);
        const auto d = random_design(rng, 40, 2, 40);
        const auto re = fit_random_effects(d);
        const auto ols = fit_pooled_ols(d);
        CHECK(re.sigma_u2_clamped);
        for (std::size_t j = 0; j < d.cols(); ++j) {
            CHECK(re.coefficients[j].estimate == Approx(ols.coefficients[j].estimate).margin(1e-10));
        }
    }
    SECTION("randomized search for clamp cases") {
        synth::Rng rng(7);
        int clamped = 0;
        for (int trial = 0; trial < 400; ++trial) {
            const auto d = random_design(rng, 24, 2, 4);
            const auto re = fit_random_effects(d);
            if (!re.sigma_u2_clamped) continue;
            ++clamped;
            const auto ols = fit_pooled_ols(d);
            for (std::size_t j = 0; j < d.cols(); ++j) {
                CHECK(re.coefficients[j].estimate == Approx(ols.coefficients[j].estimate).margin(1e-10));
            }
        }
        CHECK(clamped > 20);
    }
}

TEST_CASE("random effects recover sigma_u2 on a balanced panel", "[econ][montecarlo]") {
    // 200 groups x 20 periods, sigma_u2 = 0.5, sigma_e2 = 1.0; B is set high so
    // the Pearson floor never binds and the generator stays Gaussian
    double sum_u = 0.0;
    double sum_e = 0.0;
    const int seeds = 20;
    for (int s = 0; s < seeds; ++s) {
        auto cfg = quad_config(testing::replication_seed(static_cast<std::uint64_t>(s)));
        cfg.n_assets = 200;
        cfg.n_weeks = 20;
        cfg.b = 12.0;
        cfg.sigma_u2 = 0.5;
        cfg.sigma_e2 = 1.0;
        const auto gen = synth::generate_moment_panel(cfg);
        REQUIRE(gen.clip_events == 0);
        const auto f = fit_random_effects(build_design(gen.panel, {Model::M8}));
        CHECK(*f.sigma_u2 == Approx(0.5).margin(0.25));
        sum_u += *f.sigma_u2;
        sum_e += *f.sigma_e2;
    }
    CHECK(sum_u / seeds == Approx(0.5).margin(0.1));
    CHECK(sum_e / seeds == Approx(1.0).margin(0.05));
}

TEST_CASE("random effects structural errors", "[econ]") {
    moments::MomentPanel p;
    for (int t = 0; t < 10; ++t) p.records.push_back(rec("A", t, 0.1 * t, 2.0 + 0.01 * t * t));
    CHECK(code_of([&] { (void)fit_random_effects(build_design(p, {Model::M7})); }) == ErrorCode::TooFewGroups);

    // covid is constant inside each group: within step drops it and reports
    moments::MomentPanel q;
    synth::Rng rng(8);
    for (int g = 0; g < 6; ++g) {
        for (int t = 0; t < 8; ++t) {
            const double s = rng.normal();
            q.records.push_back(rec("G" + std::to_string(g), t, s, 2.0 + s * s + 0.1 * rng.normal(), g % 2));
        }
    }
    const auto f = fit_random_effects(build_design(q, {Model::M11}));
    CHECK(f.degenerate_within_terms == std::vector<std::string>{"covid"});
    REQUIRE_FALSE(f.notes.empty());
    CHECK_THAT(f.notes.front(), ContainsSubstring("DegenerateWithin"));
}

TEST_CASE("Wald joint test", "[econ]") {
    FitResult f;
    f.estimator = Estimator::RandomEffects;
    f.coefficients = {{"a", 2.0, 1.0, 2.0, 0.0}, {"b", 0.0, 1.0, 0.0, 1.0}, {"const", 1.0, 1.0, 1.0, 0.3}};
    f.vcov = Eigen::MatrixXd::Identity(3, 3);
    f.nobs = 100;
    f.df_resid = 97;

    const std::vector<std::string> a{"a"};
    const auto w = wald_joint_test(f, a);
    CHECK(w.kind == TestKind::WaldChi2);
    CHECK(w.statistic == Approx(4.0).epsilon(1e-14));
    CHECK(w.df == 1);
    CHECK(w.p_value == Approx(0.04550026389635839).epsilon(1e-10));

    const std::vector<std::string> b{"b"};
    const auto zero = wald_joint_test(f, b);
    CHECK(zero.statistic == 0.0);
    CHECK(zero.p_value == 1.0);

    const std::vector<std::string> missing{"nope"};
    CHECK(code_of([&] { (void)wald_joint_test(f, missing); }) == ErrorCode::UnknownTerm);
    CHECK(code_of([&] { (void)f_joint_test(f, a); }) == ErrorCode::WrongEstimator);

    f.vcov(1, 1) = 0.0;
    const std::vector<std::string> ab{"a", "b"};
    CHECK(code_of([&] { (void)wald_joint_test(f, ab); }) == ErrorCode::SingularSubcovariance);
}

TEST_CASE("F test with a zero estimate", "[econ]") {
    FitResult f;
    f.estimator = Estimator::PooledOLS;
    f.coefficients = {{"a", 0.0, 0.5, 0.0, 1.0}, {"const", 1.0, 1.0, 1.0, 0.3}};
    f.vcov = Eigen::MatrixXd::Identity(2, 2) * 0.25;
    f.nobs = 50;
    f.df_resid = 48;
    const std::vector<std::string> a{"a"};
    const auto t = f_joint_test(f, a);
    CHECK(t.statistic == 0.0);
    CHECK(t.p_value == 1.0);
    CHECK(t.df_denominator == 48);
}

TEST_CASE("F test size under a true null", "[econ][montecarlo]") {
    synth::Rng rng(9);
    int rejections = 0;
    const int reps = 2000;
    for (int r = 0; r < reps; ++r) {
        auto d = random_design(rng, 60, 2, 6);
        for (int i = 0; i < 60; ++i) d.y(i) = 1.0 + 0.25 * d.x(i, 0) + rng.normal();  // x1 has no effect
        const auto f = fit_pooled_ols(d);
        const std::vector<std::string> x1{"x1"};
        if (f_joint_test(f, x1).p_value < 0.05) ++rejections;
    }
    const double rate = static_cast<double>(rejections) / reps;
    CHECK(rate >= 0.035);
    CHECK(rate <= 0.065);
}

TEST_CASE("significance stars", "[econ]") {
    CHECK(significance_stars(0.001) == "***");
    CHECK(significance_stars(0.01) == "**");
    CHECK(significance_stars(0.049) == "**");
    CHECK(significance_stars(0.05) == "*");
    CHECK(significance_stars(0.1) == "");
}

TEST_CASE("model reports and JSON round-trip", "[econ][io]") {
    auto cfg = quad_config(11);
    cfg.n_assets = 10;
    cfg.n_weeks = 52;
    const auto panel = synth::generate_moment_panel(cfg).panel;

    const auto re = report_model(panel, Model::M9, Estimator::RandomEffects);
    REQUIRE(re.zero_interaction.has_value());
    CHECK(re.zero_interaction->kind == TestKind::WaldChi2);
    CHECK(re.zero_total.terms.size() == 3);

    const auto ols = report_model(panel, Model::M11, Estimator::PooledOLS);
    REQUIRE(ols.zero_interaction.has_value());
    CHECK(ols.zero_total.kind == TestKind::F);
    CHECK(ols.zero_total.df == 4);

    const auto m7 = report_model(panel, Model::M7, Estimator::RandomEffects);
    CHECK_FALSE(m7.zero_interaction.has_value());

    for (const auto* r : {&re, &ols, &m7}) {
        const auto j = to_json(*r);
        const auto back = report_from_json(j);
        CHECK(to_json(back).dump() == j.dump());
        CHECK(back.fit.coefficients.size() == r->fit.coefficients.size());
        for (std::size_t i = 0; i < back.fit.coefficients.size(); ++i) {
            CHECK(back.fit.coefficients[i].estimate == r->fit.coefficients[i].estimate);
            CHECK(back.fit.coefficients[i].std_error == r->fit.coefficients[i].std_error);
        }
    }
}
