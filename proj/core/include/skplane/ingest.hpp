#pragma once

#include <cstddef>
#include <istream>
#include <map>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "skplane/date.hpp"

namespace skplane::ingest {

/// One (asset, date, value) row of a daily input file.
struct Observation {
    std::string symbol;
    Date date{};
    double value = 0.0;

    bool operator==(const Observation&) const = default;
};

/// Column names looked up in the CSV header row.
struct CsvSchema {
    std::string date_col = "date";
    std::string symbol_col = "symbol";
    std::string value_col = "mcap";
};

enum class ReturnMethod { Simple, Log };

[[nodiscard]] ReturnMethod parse_return_method(std::string_view text);

/// returns[i] is the change from the previous available date to dates[i].
struct ReturnSeries {
    std::string symbol;
    std::vector<Date> dates;
    std::vector<double> returns;
};

struct Window {
    std::string symbol;
    IsoWeek week;
    Date week_start{};  // Monday of `week`
    std::vector<double> returns;
};

struct RawPanel {
    std::vector<Window> windows;             // sorted by (symbol, week)
    std::map<std::string, int> dropped;      // short windows per symbol, every symbol listed
    std::size_t dropped_returns = 0;         // returns that fell into dropped windows
};

/// Reads every data row, sorted by (symbol, date). Duplicate (symbol, date)
/// pairs are an error rather than being merged.
[[nodiscard]] std::vector<Observation> parse_observations(std::istream& in, const CsvSchema& schema = {});

/// Canonical CSV with 17-significant-digit values; re-parses to identical
/// observations under the same schema.
void write_observations(std::ostream& out, std::span<const Observation> observations,
                        const CsvSchema& schema = {});

/// Returns for a single symbol's observations, which must be in strictly
/// increasing date order.
[[nodiscard]] ReturnSeries compute_returns(std::span<const Observation> observations,
                                           ReturnMethod method = ReturnMethod::Simple);

/// Groups sorted observations by symbol and computes every series.
/// `threads` only changes scheduling; the output is identical for any value.
[[nodiscard]] std::vector<ReturnSeries> compute_all_returns(std::span<const Observation> observations,
                                                            ReturnMethod method = ReturnMethod::Simple,
                                                            unsigned threads = 1);

/// Partitions returns into ISO Monday-Sunday weeks. Weeks holding fewer
/// than `min_days` returns are dropped and counted per symbol.
[[nodiscard]] RawPanel assemble_panel(std::span<const ReturnSeries> series, int min_days = 5);

/// {"SYM": dropped_window_count, ...}
[[nodiscard]] std::string drop_report_json(const std::map<std::string, int>& dropped);

}  // namespace skplane::ingest
