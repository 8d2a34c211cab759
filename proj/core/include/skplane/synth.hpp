#pragma once

#include <cstdint>
#include <nlohmann/json.hpp>
#include <random>
#include <string>
#include <vector>

#include "skplane/date.hpp"
#include "skplane/econometrics.hpp"
#include "skplane/moments.hpp"

namespace skplane::synth {

/// Portable random stream. std::mt19937_64 output is fully specified by the
/// standard; every draw is derived from it by the transforms in synth.cpp
/// rather than std:: distributions, so a seed maps to the same numbers on
/// every standard library.
class Rng {
public:
    explicit Rng(std::uint64_t seed);

    std::uint64_t next_u64();
    /// Uniform on the open interval (0, 1), 53-bit resolution.
    double uniform();
    /// Standard normal, Marsaglia polar method.
    double normal();
    /// Gamma(shape, 1), Marsaglia-Tsang.
    double gamma(double shape);
    /// Beta(a, b) as a ratio of gammas.
    double beta(double a, double b);
    /// Student t with `dof` degrees of freedom.
    double student_t(double dof);

private:
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

enum class Dgp { QuadraticSK, RawReturns };

struct SynthConfig {
    int n_assets = 50;
    int n_weeks = 78;
    Dgp dgp = Dgp::RawReturns;
    double a = 0.88;
    double b = 2.0;
    double interaction = 0.0;
    double sigma_u2 = 0.01;
    double sigma_e2 = 0.02;
    int covid_week = 39;
    std::uint64_t seed = 42;
    Date start_date = Date{std::chrono::year{2019} / std::chrono::April / 1};
    /// Beta(shape, shape) on [-2, 2] for QuadraticSK skewness draws.
    double skew_shape = 3.25;
    /// Student-t degrees of freedom and scale for RawReturns daily returns.
    double return_dof = 3.0;
    double return_scale = 0.04;

    /// Throws InvalidConfig.
    void validate() const;
};

[[nodiscard]] SynthConfig config_from_json(const nlohmann::json& j);
[[nodiscard]] nlohmann::ordered_json to_json(const SynthConfig& config);

struct SynthPanel {
    moments::MomentPanel panel;
    std::size_t clip_events = 0;
};

/// Records with K = A S^2 + B + interaction S^2 D + u_i + e_it, clipped up
/// to the Pearson floor S^2 + 1 where noise pushes it below.
[[nodiscard]] SynthPanel generate_moment_panel(const SynthConfig& config);

/// Daily values for n_assets symbols over 7 * n_weeks consecutive days, in
/// the ingest CSV schema (date,symbol,mcap), sorted by symbol then date.
[[nodiscard]] std::string generate_raw_csv(const SynthConfig& config);

struct OracleMoments {
    double skewness = 0.0;
    double kurtosis = 0.0;
    double delta = 0.0;
};

/// Straightforward multi-pass evaluation of S, K and the extreme gap, kept
/// apart from the production estimators for cross-checking.
[[nodiscard]] OracleMoments moment_oracle(const std::vector<double>& window);

/// Normal equations X'X b = X'y solved by Gaussian elimination with partial
/// pivoting. Throws Singular.
[[nodiscard]] std::vector<double> ols_oracle(const econ::DesignMatrix& design);

}  // namespace skplane::synth
