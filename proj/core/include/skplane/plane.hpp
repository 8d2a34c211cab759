#pragma once

#include <istream>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "skplane/moments.hpp"

namespace skplane::plane {

/// 186/125, exactly the decimal 1.488.
inline constexpr double kKlaassenConstant = 186.0 / 125.0;
inline constexpr double kBoundTolerance = 1e-9;

/// K >= S^2 + 1 holds for every distribution.
[[nodiscard]] double pearson_lower_bound(double s);

/// Sharper floor S^2 + 186/125 for unimodal distributions.
[[nodiscard]] double klaassen_lower_bound(double s);

/// N^(1/3) * |S|^(4/3). Uses |S| so the curve covers both flanks.
[[nodiscard]] double cristelli_power_law(double s, int n);

/// A * S^2 + B.
[[nodiscard]] double quadratic_curve(double s, double a, double b);

enum class CurveKind { Pearson, Klaassen, Quadratic, PowerLaw };

[[nodiscard]] std::string_view to_string(CurveKind kind) noexcept;

struct QuadraticParams {
    double a = 0.0;
    double b = 0.0;
};

struct Sample {
    double s = 0.0;
    double k = 0.0;
};

struct BoundCurve {
    CurveKind kind = CurveKind::Pearson;
    std::optional<QuadraticParams> quadratic;
    int power_law_n = 0;
    std::vector<Sample> samples;  // ascending in s
};

struct SGrid {
    double lo = -2.5;
    double hi = 2.5;
    double step = 0.01;
};

/// lo, lo + step, ..., up to hi. Points are computed as lo + i * step so the
/// count is floor((hi - lo) / step) + 1 regardless of accumulated rounding.
[[nodiscard]] std::vector<double> grid_points(const SGrid& grid);

struct PlanePoint {
    std::string symbol;
    double s = 0.0;
    double k = 0.0;
    std::optional<double> ln_delta;
    int week_index = 0;
    int covid = 0;
    bool satisfies_pearson = false;
    bool satisfies_klaassen = false;
};

struct PlaneDataset {
    std::vector<PlanePoint> points;  // panel order
    std::vector<BoundCurve> curves;  // Pearson, Klaassen, [Quadratic], PowerLaw
    std::vector<PlanePoint> pre;     // covid == 0
    std::vector<PlanePoint> post;    // covid == 1
};

struct PlaneOptions {
    std::optional<QuadraticParams> quadratic;
    SGrid grid;
    int power_law_n = 7;
};

[[nodiscard]] PlaneDataset export_plane(const moments::MomentPanel& panel, const PlaneOptions& options = {});

struct HeatmapRow {
    double s = 0.0;
    double k = 0.0;
    std::optional<double> ln_delta;
    int week_index = 0;
    std::string symbol;
};

/// Rows ordered by week_index then symbol; week_index counts whole weeks
/// since the earliest week_start in the panel.
[[nodiscard]] std::vector<HeatmapRow> export_heatmap(const moments::MomentPanel& panel);

/// series,symbol,S,K,ln_delta,week_index,covid,satisfies_pearson,satisfies_klaassen
/// Point rows use series "points"; curve rows use the curve name and leave
/// the per-record columns blank.
void write_plane_csv(std::ostream& out, const std::vector<PlanePoint>& points, const std::vector<BoundCurve>& curves);

struct PlaneRow {
    std::string series;
    std::string symbol;
    double s = 0.0;
    double k = 0.0;
    std::optional<double> ln_delta;
    std::optional<int> week_index;
    std::optional<int> covid;
    std::optional<bool> satisfies_pearson;
    std::optional<bool> satisfies_klaassen;
};

[[nodiscard]] std::vector<PlaneRow> read_plane_csv(std::istream& in);

/// S,K,ln_delta,week_index,symbol
void write_heatmap_csv(std::ostream& out, const std::vector<HeatmapRow>& rows);
[[nodiscard]] std::vector<HeatmapRow> read_heatmap_csv(std::istream& in);

}  // namespace skplane::plane
