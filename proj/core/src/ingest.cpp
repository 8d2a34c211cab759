#include "skplane/ingest.hpp"

#include <algorithm>
#include <cmath>
#include <nlohmann/json.hpp>

#include "parallel.hpp"
#include "skplane/csv.hpp"
#include "skplane/error.hpp"

namespace skplane::ingest {

ReturnMethod parse_return_method(std::string_view text) {
    if (text == "simple") {
        return ReturnMethod::Simple;
    }
    if (text == "log") {
        return ReturnMethod::Log;
    }
    throw Error(ErrorCode::InvalidArgument, "return method must be 'simple' or 'log', got '" + std::string(text) + "'");
}

std::vector<Observation> parse_observations(std::istream& in, const CsvSchema& schema) {
    std::string line;
    if (!csv::read_line(in, line)) {
        throw Error(ErrorCode::MissingColumn, "input has no header row");
    }
    if (line.size() >= 3 && static_cast<unsigned char>(line[0]) == 0xEF &&
        static_cast<unsigned char>(line[1]) == 0xBB && static_cast<unsigned char>(line[2]) == 0xBF) {
        line.erase(0, 3);
    }
    const auto header = csv::split_record(line);
    const auto require = [&](const std::string& name) {
        auto idx = csv::find_column(header, name);
        if (!idx) {
            throw Error(ErrorCode::MissingColumn, "header lacks column '" + name + "'");
        }
        return *idx;
    };
    const std::size_t date_idx = require(schema.date_col);
    const std::size_t symbol_idx = require(schema.symbol_col);
    const std::size_t value_idx = require(schema.value_col);
    const std::size_t needed = std::max({date_idx, symbol_idx, value_idx}) + 1;

    std::vector<Observation> out;
    std::size_t row = 0;
    while (csv::read_line(in, line)) {
        if (line.empty() || line == "\r") {
            continue;
        }
        ++row;
        const auto fields = csv::split_record(line);
        const auto malformed = [&](const std::string& why) {
            return Error(ErrorCode::MalformedRow, "row " + std::to_string(row) + ": " + why);
        };
        if (fields.size() < needed) {
            throw malformed("expected at least " + std::to_string(needed) + " fields, got " +
                            std::to_string(fields.size()));
        }
        Observation obs;
        obs.symbol = fields[symbol_idx];
        if (obs.symbol.empty()) {
            throw malformed("empty symbol");
        }
        if (!parse_date(fields[date_idx], obs.date)) {
            throw malformed("unparseable date '" + fields[date_idx] + "'");
        }
        const auto value = csv::parse_double(fields[value_idx]);
        if (!value) {
            throw malformed("unparseable value '" + fields[value_idx] + "'");
        }
        obs.value = *value;
        out.push_back(std::move(obs));
    }

    std::stable_sort(out.begin(), out.end(), [](const Observation& a, const Observation& b) {
        return a.symbol != b.symbol ? a.symbol < b.symbol : a.date < b.date;
    });
    for (std::size_t i = 1; i < out.size(); ++i) {
        if (out[i].symbol == out[i - 1].symbol && out[i].date == out[i - 1].date) {
            throw Error(ErrorCode::DuplicateKey,
                        out[i].symbol + " on " + format_date(out[i].date) + " appears more than once");
        }
    }
    return out;
}

void write_observations(std::ostream& out, std::span<const Observation> observations, const CsvSchema& schema) {
    out << schema.date_col << ',' << schema.symbol_col << ',' << schema.value_col << '\n';
    for (const auto& obs : observations) {
        out << format_date(obs.date) << ',' << obs.symbol << ',' << csv::format_double(obs.value) << '\n';
    }
}

ReturnSeries compute_returns(std::span<const Observation> observations, ReturnMethod method) {
    if (observations.size() < 2) {
        throw Error(ErrorCode::InsufficientData, "need at least 2 observations, got " +
                                                     std::to_string(observations.size()));
    }
    ReturnSeries series;
    series.symbol = observations.front().symbol;
    series.dates.reserve(observations.size() - 1);
    series.returns.reserve(observations.size() - 1);
    for (std::size_t i = 0; i < observations.size(); ++i) {
        const auto& obs = observations[i];
        if (!(obs.value > 0.0)) {
            throw Error(ErrorCode::NonPositiveValue,
                        obs.symbol + " on " + format_date(obs.date) + " has value " + csv::format_double(obs.value));
        }
        if (obs.symbol != series.symbol) {
            throw Error(ErrorCode::InvalidArgument, "compute_returns expects one symbol, saw " + series.symbol +
                                                        " and " + obs.symbol);
        }
        if (i == 0) {
            continue;
        }
        const auto& prev = observations[i - 1];
        if (!(prev.date < obs.date)) {
            throw Error(ErrorCode::InvalidArgument, obs.symbol + ": dates must be strictly increasing");
        }
        const double ratio = obs.value / prev.value;
        series.dates.push_back(obs.date);
        series.returns.push_back(method == ReturnMethod::Simple ? ratio - 1.0 : std::log(ratio));
    }
    return series;
}

std::vector<ReturnSeries> compute_all_returns(std::span<const Observation> observations, ReturnMethod method,
                                              unsigned threads) {
    std::vector<std::span<const Observation>> groups;
    std::size_t begin = 0;
    for (std::size_t i = 1; i <= observations.size(); ++i) {
        if (i == observations.size() || observations[i].symbol != observations[begin].symbol) {
            groups.push_back(observations.subspan(begin, i - begin));
            begin = i;
        }
    }
    std::vector<ReturnSeries> out(groups.size());
    detail::parallel_for(groups.size(), threads, [&](std::size_t i) {
        if (groups[i].size() < 2) {
            // a lone observation yields an empty series rather than failing the run
            out[i].symbol = groups[i].front().symbol;
            return;
        }
        out[i] = compute_returns(groups[i], method);
    });
    return out;
}

RawPanel assemble_panel(std::span<const ReturnSeries> series, int min_days) {
    if (min_days < 2 || min_days > 7) {
        throw Error(ErrorCode::InvalidArgument, "min_days must lie in [2, 7], got " + std::to_string(min_days));
    }
    RawPanel panel;
    for (const auto& s : series) {
        panel.dropped.emplace(s.symbol, 0);
        std::vector<Window> windows;
        for (std::size_t i = 0; i < s.returns.size(); ++i) {
            const IsoWeek week = iso_week(s.dates[i]);
            if (windows.empty() || windows.back().week != week) {
                windows.push_back(Window{s.symbol, week, week_monday(s.dates[i]), {}});
            }
            windows.back().returns.push_back(s.returns[i]);
        }
        for (auto& w : windows) {
            if (static_cast<int>(w.returns.size()) < min_days) {
                ++panel.dropped[s.symbol];
                panel.dropped_returns += w.returns.size();
            } else {
                panel.windows.push_back(std::move(w));
            }
        }
    }
    std::stable_sort(panel.windows.begin(), panel.windows.end(), [](const Window& a, const Window& b) {
        return a.symbol != b.symbol ? a.symbol < b.symbol : a.week < b.week;
    });
    for (std::size_t i = 1; i < panel.windows.size(); ++i) {
        if (panel.windows[i].symbol == panel.windows[i - 1].symbol && panel.windows[i].week == panel.windows[i - 1].week) {
            throw Error(ErrorCode::DuplicateKey, panel.windows[i].symbol + " has two series covering " +
                                                     format_iso_week(panel.windows[i].week));
        }
    }
    return panel;
}

std::string drop_report_json(const std::map<std::string, int>& dropped) {
    nlohmann::ordered_json j = nlohmann::ordered_json::object();
    for (const auto& [symbol, count] : dropped) {
        j[symbol] = count;
    }
    return j.dump(2);
}

}  // namespace skplane::ingest
