#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "skplane/econometrics.hpp"
#include "skplane/ingest.hpp"
#include "skplane/moments.hpp"
#include "skplane/plane.hpp"

namespace skplane::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitEmpty = 2;

struct RunConfig {
    std::optional<std::filesystem::path> input;
    std::optional<std::filesystem::path> synth_config;
    ingest::CsvSchema schema;
    ingest::ReturnMethod returns = ingest::ReturnMethod::Simple;
    int min_days = 5;
    Date covid_cutoff = moments::default_covid_cutoff();
    std::vector<econ::Model> models = econ::all_models();
    std::filesystem::path out = "out";
    std::optional<std::uint64_t> seed;
    plane::SGrid grid;
    unsigned threads = 1;
};

/// Moments for the configured source, plus bookkeeping for the summary.
struct PipelineResult {
    moments::MomentPanel panel;
    std::map<std::string, int> dropped_windows;  // short + zero-variance + too-short, per symbol
    std::size_t observations = 0;
    std::size_t clip_events = 0;
};

/// Throws skplane::Error on configuration, I/O or parse failures.
[[nodiscard]] PipelineResult run_pipeline(const RunConfig& config);

/// Each command writes its files under config.out and a short summary to
/// `log`; errors go to `err`. Returns one of the exit codes above.
int cmd_moments(const RunConfig& config, std::ostream& log, std::ostream& err);
int cmd_fit(const RunConfig& config, std::ostream& log, std::ostream& err);
int cmd_plane(const RunConfig& config, std::ostream& log, std::ostream& err);
int cmd_synth(const RunConfig& config, std::ostream& log, std::ostream& err);

}  // namespace skplane::cli
