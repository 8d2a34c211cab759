#include <CLI11.hpp>
#include <iostream>

#include "commands.hpp"
#include "skplane/error.hpp"

namespace {

using skplane::cli::RunConfig;

struct RawFlags {
    std::string input;
    std::string synth_config;
    std::string returns = "simple";
    std::string covid_cutoff = "2019-12-31";
    std::string models = "7,8,9,11";
    std::string out = "out";
    std::uint64_t seed = 0;
    std::vector<double> s_range{-2.5, 2.5};
    double s_step = 0.01;
    unsigned threads = 1;
};

void add_common(CLI::App* app, RunConfig& config, RawFlags& raw) {
    app->add_option("--input", raw.input, "Daily value CSV");
    app->add_option("--synth-config", raw.synth_config, "Synthetic data config (JSON)");
    app->add_option("--date-col", config.schema.date_col, "Date column name")->capture_default_str();
    app->add_option("--symbol-col", config.schema.symbol_col, "Symbol column name")->capture_default_str();
    app->add_option("--value-col", config.schema.value_col, "Value column name")->capture_default_str();
    app->add_option("--returns", raw.returns, "Return transform")
        ->check(CLI::IsMember({"simple", "log"}))
        ->capture_default_str();
    app->add_option("--min-days", config.min_days, "Minimum returns per weekly window")
        ->check(CLI::Range(2, 7))
        ->capture_default_str();
    app->add_option("--covid-cutoff", raw.covid_cutoff, "Weeks starting after this date get D = 1")
        ->capture_default_str();
    app->add_option("--models", raw.models, "Comma-separated models from 7, 8, 9, 11")->capture_default_str();
    app->add_option("--out", raw.out, "Output directory")->capture_default_str();
    app->add_option("--seed", raw.seed, "Override the synthetic config seed");
    app->add_option("--s-range", raw.s_range, "Curve S range as lo,hi")->delimiter(',')->expected(2);
    app->add_option("--s-step", raw.s_step, "Curve S step")->capture_default_str();
    app->add_option("--threads", raw.threads, "Worker threads (output does not depend on it)")
        ->check(CLI::Range(1u, 256u))
        ->capture_default_str();
}

void finalize(CLI::App* app, RunConfig& config, const RawFlags& raw) {
    if (!raw.input.empty()) config.input = raw.input;
    if (!raw.synth_config.empty()) config.synth_config = raw.synth_config;
    config.returns = skplane::ingest::parse_return_method(raw.returns);
    config.covid_cutoff = skplane::make_date(raw.covid_cutoff);
    config.models = skplane::econ::parse_model_list(raw.models);
    config.out = raw.out;
    if (app->count("--seed") > 0) config.seed = raw.seed;
    config.grid = skplane::plane::SGrid{raw.s_range.at(0), raw.s_range.at(1), raw.s_step};
    config.threads = raw.threads;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Weekly skewness-kurtosis analytics for daily asset panels"};
    app.require_subcommand(1);

    RunConfig config;
    RawFlags raw;
    auto* moments = app.add_subcommand("moments", "Weekly moments and descriptive statistics");
    auto* fit = app.add_subcommand("fit", "Quadratic kurtosis models, random effects and pooled OLS");
    auto* plane = app.add_subcommand("plane", "Skewness-kurtosis plane and heatmap datasets");
    auto* synth = app.add_subcommand("synth", "Write a synthetic dataset from a config");
    for (auto* sub : {moments, fit, plane, synth}) {
        add_common(sub, config, raw);
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : skplane::cli::kExitError;
    }

    CLI::App* chosen = app.get_subcommands().front();
    try {
        finalize(chosen, config, raw);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return skplane::cli::kExitError;
    }

    if (chosen == moments) return skplane::cli::cmd_moments(config, std::cout, std::cerr);
    if (chosen == fit) return skplane::cli::cmd_fit(config, std::cout, std::cerr);
    if (chosen == plane) return skplane::cli::cmd_plane(config, std::cout, std::cerr);
    return skplane::cli::cmd_synth(config, std::cout, std::cerr);
}
