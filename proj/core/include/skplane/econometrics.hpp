#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <nlohmann/json.hpp>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "skplane/moments.hpp"

namespace skplane::econ {

/// Column names used in designs, fits and serialized output.
namespace term {
inline constexpr std::string_view kSkew2 = "skewness2";
inline constexpr std::string_view kSkew = "skewness";
inline constexpr std::string_view kSkew2Covid = "skewness2_x_covid";
inline constexpr std::string_view kCovid = "covid";
inline constexpr std::string_view kConst = "const";
}  // namespace term

/// The quadratic kurtosis models by their customary labels (there is no M10):
///   M7:  K = a S^2 + c
///   M8:  K = a S^2 + b S + c
///   M9:  K = a S^2 + b S + g S^2 D + c
///   M11: K = a S^2 + b S + g S^2 D + d D + c
enum class Model { M7, M8, M9, M11 };

[[nodiscard]] std::string_view to_string(Model model) noexcept;
/// Accepts "7", "M7", "m7" or "(7)".
[[nodiscard]] Model parse_model(std::string_view text);
/// Comma-separated list, e.g. "7,8,9,11".
[[nodiscard]] std::vector<Model> parse_model_list(std::string_view text);
[[nodiscard]] const std::vector<Model>& all_models();

struct ModelSpec {
    Model model = Model::M7;
    bool include_intercept = true;

    /// Slope terms in column order; the intercept follows them.
    [[nodiscard]] std::vector<std::string> regressors() const;
    /// Terms whose joint nullity is the zero-interaction hypothesis. Empty
    /// for models without the S^2 x D interaction.
    [[nodiscard]] std::vector<std::string> interaction_terms() const;
};

struct DesignMatrix {
    Eigen::VectorXd y;
    Eigen::MatrixXd x;
    std::vector<int> groups;                 // 0-based group index per row
    std::vector<std::string> group_labels;   // symbol for each group index
    std::vector<std::string> term_names;     // one per column of x

    [[nodiscard]] std::size_t rows() const { return static_cast<std::size_t>(x.rows()); }
    [[nodiscard]] std::size_t cols() const { return static_cast<std::size_t>(x.cols()); }
    [[nodiscard]] std::size_t n_groups() const { return group_labels.size(); }
};

/// y = kurtosis; columns per the model, then the intercept; one group per
/// symbol in order of first appearance; rows in panel order.
[[nodiscard]] DesignMatrix build_design(const moments::MomentPanel& panel, const ModelSpec& spec);

/// Names of columns that are linear combinations of the columns before
/// them (an all-zero column counts). Empty when x has full column rank.
[[nodiscard]] std::vector<std::string> collinear_terms(const Eigen::MatrixXd& x,
                                                       const std::vector<std::string>& names);

enum class Estimator { PooledOLS, RandomEffects };

[[nodiscard]] std::string_view to_string(Estimator estimator) noexcept;

struct Coefficient {
    std::string term;
    double estimate = 0.0;
    double std_error = 0.0;
    double statistic = 0.0;  // t for OLS, z for random effects
    double p_value = 1.0;
};

struct FitResult {
    Estimator estimator = Estimator::PooledOLS;
    std::vector<Coefficient> coefficients;
    Eigen::MatrixXd vcov;
    std::size_t nobs = 0;
    std::size_t n_groups = 0;
    std::size_t df_resid = 0;
    double rss = 0.0;
    double r2_overall = 0.0;
    std::optional<double> r2_within;
    std::optional<double> r2_between;
    std::optional<double> sigma_e2;
    std::optional<double> sigma_u2;
    bool sigma_u2_clamped = false;
    /// Regressors that are constant inside every group and so were left out
    /// of the within regression used for the variance components.
    std::vector<std::string> degenerate_within_terms;
    bool perfect_fit = false;
    std::vector<std::string> notes;

    [[nodiscard]] std::vector<std::string> term_names() const;
    /// Throws UnknownTerm.
    [[nodiscard]] std::size_t index_of(std::string_view term) const;
    [[nodiscard]] const Coefficient& coefficient(std::string_view term) const;
    /// Every term except the intercept.
    [[nodiscard]] std::vector<std::string> slope_terms() const;
};

/// Least squares on the stacked panel with homoskedastic standard errors,
/// sigma^2 = RSS / (n - k).
[[nodiscard]] FitResult fit_pooled_ols(const DesignMatrix& design);

/// One-way random effects, Swamy-Arora variance components:
///   sigma_e^2 = SSR_within / (n - G - k_within)
///   sigma_u^2 = SSR_between / (G - k) - sigma_e^2 / T_harmonic, clamped at 0
/// then OLS on rows quasi-demeaned by theta_i = 1 - sqrt(sigma_e^2 / (T_i sigma_u^2 + sigma_e^2)).
/// When either component cannot be estimated (e.g. every group has one row)
/// sigma_u^2 is clamped to 0 and the fit reduces to pooled OLS.
[[nodiscard]] FitResult fit_random_effects(const DesignMatrix& design);

[[nodiscard]] FitResult fit(const DesignMatrix& design, Estimator estimator);

enum class TestKind { WaldChi2, F };

[[nodiscard]] std::string_view to_string(TestKind kind) noexcept;

struct TestResult {
    TestKind kind = TestKind::WaldChi2;
    std::vector<std::string> terms;
    double statistic = 0.0;  // +inf on a perfect fit with non-zero estimates
    int df = 0;              // chi-square df, or F numerator df
    std::optional<int> df_denominator;
    double p_value = 1.0;
    bool perfect_fit = false;
};

/// W = b' V^-1 b on the selected sub-vector; chi-square with |terms| df.
[[nodiscard]] TestResult wald_joint_test(const FitResult& fit, std::span<const std::string> terms);

/// F = W / q with (q, n - k) degrees of freedom. Pooled OLS fits only.
[[nodiscard]] TestResult f_joint_test(const FitResult& fit, std::span<const std::string> terms);

/// "***" below 0.01, "**" below 0.05, "*" below 0.1, otherwise "".
[[nodiscard]] std::string_view significance_stars(double p_value) noexcept;

/// One table column: a fitted model with its joint tests. Random-effects
/// fits get Wald chi-square tests, pooled OLS fits get F tests.
struct ModelReport {
    Model model = Model::M7;
    FitResult fit;
    std::optional<TestResult> zero_interaction;
    TestResult zero_total;
};

[[nodiscard]] ModelReport report_model(const moments::MomentPanel& panel, Model model, Estimator estimator);

[[nodiscard]] nlohmann::ordered_json to_json(const FitResult& fit);
[[nodiscard]] nlohmann::ordered_json to_json(const TestResult& test);
[[nodiscard]] nlohmann::ordered_json to_json(const ModelReport& report);

[[nodiscard]] FitResult fit_from_json(const nlohmann::ordered_json& j);
[[nodiscard]] TestResult test_from_json(const nlohmann::ordered_json& j);
[[nodiscard]] ModelReport report_from_json(const nlohmann::ordered_json& j);

}  // namespace skplane::econ
