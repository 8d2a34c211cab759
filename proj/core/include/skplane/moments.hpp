#pragma once

#include <cstddef>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "skplane/date.hpp"
#include "skplane/ingest.hpp"

namespace skplane::moments {

/// Third standardized moment with population (1/N) normalization.
/// Throws TooShort below 3 values and ZeroVariance for a constant window.
[[nodiscard]] double skewness(std::span<const double> window);

/// Fourth standardized moment, non-excess (a normal sample sits near 3).
[[nodiscard]] double kurtosis(std::span<const double> window);

/// Gap between the two largest absolute deviations from the window mean,
/// in units of the population standard deviation. Large values mean one
/// observation dominates the window. Zero when the two extremes tie.
[[nodiscard]] double delta(std::span<const double> window);

struct WindowMoments {
    double skewness = 0.0;
    double kurtosis = 0.0;
    double delta = 0.0;
};

/// All three statistics from one pass over the deviations.
[[nodiscard]] WindowMoments window_moments(std::span<const double> window);

enum class Regime { Gaussian, Intermediate, ExtremeDominated };

[[nodiscard]] std::string_view to_string(Regime regime) noexcept;

/// lnΔ < 0 is Gaussian, lnΔ > 2.3 is extreme-dominated, and the closed
/// band [0, 2.3] in between is intermediate.
[[nodiscard]] Regime delta_regime(double ln_delta);

inline constexpr double kExtremeRegimeThreshold = 2.3;

/// Largest |S| reachable by a window of n values: (n - 2) / sqrt(n - 1).
[[nodiscard]] double max_abs_skewness(int n);
/// Largest K reachable by a window of n values: (n^2 - 3n + 3) / (n - 1).
[[nodiscard]] double max_kurtosis(int n);

struct MomentRecord {
    std::string symbol;
    IsoWeek week;
    Date week_start{};
    int n_days = 0;
    double skewness = 0.0;
    double kurtosis = 0.0;
    double delta = 0.0;
    /// ln(delta); absent when delta is exactly zero (tied extremes).
    std::optional<double> ln_delta;
    int covid = 0;

    bool operator==(const MomentRecord&) const = default;
};

struct MomentPanel {
    std::vector<MomentRecord> records;  // sorted by (symbol, week)
    std::map<std::string, int> dropped_zero_variance;
    std::map<std::string, int> dropped_too_short;
};

/// 2019-12-31: weeks starting after this date carry covid = 1.
[[nodiscard]] Date default_covid_cutoff();

/// One record per window with non-zero variance. Windows that cannot yield
/// moments are dropped and counted. covid = 1 iff week_start > covid_cutoff.
[[nodiscard]] MomentPanel weekly_moments(const ingest::RawPanel& panel, Date covid_cutoff = default_covid_cutoff(),
                                         unsigned threads = 1);

struct Stats {
    std::size_t n = 0;
    double mean = 0.0;
    double sd = 0.0;
    double min = 0.0;
    double max = 0.0;
    double p1 = 0.0;
    double p25 = 0.0;
    double p50 = 0.0;
    double p75 = 0.0;
    double p99 = 0.0;
};

/// Summary row: mean, (n-1)-denominator sd, extremes and percentiles.
/// A single value yields sd = 0.
[[nodiscard]] Stats descriptive_stats(std::span<const double> values);

/// Percentile of already sorted data with linear interpolation between
/// closest ranks: position (n - 1) * q, q in [0, 1].
[[nodiscard]] double percentile_sorted(std::span<const double> sorted, double q);

/// descriptives.json body: skewness / kurtosis / delta blocks keyed by
/// N, mean, sd, min, max, p1, p25, p50, p75, p99. Delta only covers records
/// whose delta is positive.
[[nodiscard]] std::string descriptives_json(const MomentPanel& panel);

/// symbol, week_id, week_start, n_days, skewness, kurtosis, delta, ln_delta, covid
void write_moments_csv(std::ostream& out, const MomentPanel& panel);
[[nodiscard]] MomentPanel read_moments_csv(std::istream& in);

}  // namespace skplane::moments
