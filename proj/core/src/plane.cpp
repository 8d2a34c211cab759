#include "skplane/plane.hpp"

#include <algorithm>
#include <cmath>

#include "skplane/csv.hpp"
#include "skplane/error.hpp"

namespace skplane::plane {

double pearson_lower_bound(double s) { return s * s + 1.0; }

double klaassen_lower_bound(double s) { return s * s + kKlaassenConstant; }

double cristelli_power_law(double s, int n) {
    if (n < 1) {
        throw Error(ErrorCode::InvalidArgument, "power-law N must be >= 1, got " + std::to_string(n));
    }
    return std::cbrt(static_cast<double>(n)) * std::pow(std::abs(s), 4.0 / 3.0);
}

double quadratic_curve(double s, double a, double b) { return a * s * s + b; }

std::string_view to_string(CurveKind kind) noexcept {
    switch (kind) {
        case CurveKind::Pearson: return "pearson";
        case CurveKind::Klaassen: return "klaassen";
        case CurveKind::Quadratic: return "quadratic";
        case CurveKind::PowerLaw: return "powerlaw";
    }
    return "unknown";
}

std::vector<double> grid_points(const SGrid& grid) {
    if (!(grid.step > 0.0) || !std::isfinite(grid.lo) || !std::isfinite(grid.hi) || grid.hi < grid.lo) {
        throw Error(ErrorCode::InvalidArgument, "S grid needs finite lo <= hi and step > 0");
    }
    // the epsilon absorbs ratios like 5.0 / 0.01 landing at 499.99999999999994
    const auto count = static_cast<std::size_t>(std::floor((grid.hi - grid.lo) / grid.step + 1e-9)) + 1;
    std::vector<double> out(count);
    for (std::size_t i = 0; i < count; ++i) {
        out[i] = grid.lo + static_cast<double>(i) * grid.step;
    }
    return out;
}

namespace {

int weeks_between(Date from, Date to) { return static_cast<int>((to - from).count() / 7); }

Date earliest_week(const moments::MomentPanel& panel) {
    Date first = panel.records.front().week_start;
    for (const auto& r : panel.records) {
        first = std::min(first, r.week_start);
    }
    return first;
}

BoundCurve sample_curve(CurveKind kind, const std::vector<double>& xs, const PlaneOptions& options) {
    BoundCurve curve;
    curve.kind = kind;
    if (kind == CurveKind::Quadratic) {
        curve.quadratic = options.quadratic;
    }
    if (kind == CurveKind::PowerLaw) {
        curve.power_law_n = options.power_law_n;
    }
    curve.samples.reserve(xs.size());
    for (double s : xs) {
        double k = 0.0;
        switch (kind) {
            case CurveKind::Pearson: k = pearson_lower_bound(s); break;
            case CurveKind::Klaassen: k = klaassen_lower_bound(s); break;
            case CurveKind::Quadratic: k = quadratic_curve(s, options.quadratic->a, options.quadratic->b); break;
            case CurveKind::PowerLaw: k = cristelli_power_law(s, options.power_law_n); break;
        }
        curve.samples.push_back(Sample{s, k});
    }
    return curve;
}

}  // namespace

PlaneDataset export_plane(const moments::MomentPanel& panel, const PlaneOptions& options) {
    if (panel.records.empty()) {
        throw Error(ErrorCode::EmptyPanel, "no moment records to place on the plane");
    }
    const auto xs = grid_points(options.grid);
    const Date origin = earliest_week(panel);

    PlaneDataset out;
    out.points.reserve(panel.records.size());
    for (const auto& r : panel.records) {
        PlanePoint p;
        p.symbol = r.symbol;
        p.s = r.skewness;
        p.k = r.kurtosis;
        p.ln_delta = r.ln_delta;
        p.week_index = weeks_between(origin, r.week_start);
        p.covid = r.covid;
        p.satisfies_pearson = r.kurtosis >= pearson_lower_bound(r.skewness) - kBoundTolerance;
        p.satisfies_klaassen = r.kurtosis >= klaassen_lower_bound(r.skewness) - kBoundTolerance;
        (p.covid ? out.post : out.pre).push_back(p);
        out.points.push_back(std::move(p));
    }

    out.curves.push_back(sample_curve(CurveKind::Pearson, xs, options));
    out.curves.push_back(sample_curve(CurveKind::Klaassen, xs, options));
    if (options.quadratic) {
        out.curves.push_back(sample_curve(CurveKind::Quadratic, xs, options));
    }
    out.curves.push_back(sample_curve(CurveKind::PowerLaw, xs, options));
    return out;
}

std::vector<HeatmapRow> export_heatmap(const moments::MomentPanel& panel) {
    if (panel.records.empty()) {
        throw Error(ErrorCode::EmptyPanel, "no moment records for the heatmap");
    }
    const Date origin = earliest_week(panel);
    std::vector<HeatmapRow> rows;
    rows.reserve(panel.records.size());
    for (const auto& r : panel.records) {
        rows.push_back(HeatmapRow{r.skewness, r.kurtosis, r.ln_delta, weeks_between(origin, r.week_start), r.symbol});
    }
    std::stable_sort(rows.begin(), rows.end(), [](const HeatmapRow& a, const HeatmapRow& b) {
        return a.week_index != b.week_index ? a.week_index < b.week_index : a.symbol < b.symbol;
    });
    return rows;
}

namespace {

constexpr const char* kPlaneHeader =
    "series,symbol,S,K,ln_delta,week_index,covid,satisfies_pearson,satisfies_klaassen";
constexpr const char* kHeatmapHeader = "S,K,ln_delta,week_index,symbol";

std::string optional_double(const std::optional<double>& v) { return v ? csv::format_double(*v) : std::string{}; }

void expect_header(std::istream& in, const char* header) {
    std::string line;
    if (!csv::read_line(in, line)) {
        throw Error(ErrorCode::MissingColumn, "empty file, expected header");
    }
    if (!line.empty() && line.back() == '\r') {
        line.pop_back();
    }
    if (line != header) {
        throw Error(ErrorCode::MissingColumn, "unexpected header '" + line + "'");
    }
}

double required_double(const std::string& field, std::size_t row) {
    const auto v = csv::parse_double(field);
    if (!v) {
        throw Error(ErrorCode::MalformedRow, "row " + std::to_string(row) + ": bad number '" + field + "'");
    }
    return *v;
}

std::optional<double> maybe_double(const std::string& field, std::size_t row) {
    if (field.empty()) {
        return std::nullopt;
    }
    return required_double(field, row);
}

}  // namespace

void write_plane_csv(std::ostream& out, const std::vector<PlanePoint>& points, const std::vector<BoundCurve>& curves) {
    out << kPlaneHeader << '\n';
    for (const auto& p : points) {
        out << "points," << p.symbol << ',' << csv::format_double(p.s) << ',' << csv::format_double(p.k) << ','
            << optional_double(p.ln_delta) << ',' << p.week_index << ',' << p.covid << ','
            << (p.satisfies_pearson ? 1 : 0) << ',' << (p.satisfies_klaassen ? 1 : 0) << '\n';
    }
    for (const auto& c : curves) {
        for (const auto& sample : c.samples) {
            out << to_string(c.kind) << ",," << csv::format_double(sample.s) << ',' << csv::format_double(sample.k)
                << ",,,,,\n";
        }
    }
}

std::vector<PlaneRow> read_plane_csv(std::istream& in) {
    expect_header(in, kPlaneHeader);
    std::vector<PlaneRow> rows;
    std::string line;
    std::size_t row = 0;
    while (csv::read_line(in, line)) {
        if (line.empty()) {
            continue;
        }
        ++row;
        const auto f = csv::split_record(line);
        if (f.size() != 9) {
            throw Error(ErrorCode::MalformedRow, "row " + std::to_string(row) + ": expected 9 fields");
        }
        PlaneRow r;
        r.series = f[0];
        r.symbol = f[1];
        r.s = required_double(f[2], row);
        r.k = required_double(f[3], row);
        r.ln_delta = maybe_double(f[4], row);
        if (auto v = maybe_double(f[5], row)) r.week_index = static_cast<int>(*v);
        if (auto v = maybe_double(f[6], row)) r.covid = static_cast<int>(*v);
        if (auto v = maybe_double(f[7], row)) r.satisfies_pearson = *v != 0.0;
        if (auto v = maybe_double(f[8], row)) r.satisfies_klaassen = *v != 0.0;
        rows.push_back(std::move(r));
    }
    return rows;
}

void write_heatmap_csv(std::ostream& out, const std::vector<HeatmapRow>& rows) {
    out << kHeatmapHeader << '\n';
    for (const auto& r : rows) {
        out << csv::format_double(r.s) << ',' << csv::format_double(r.k) << ',' << optional_double(r.ln_delta) << ','
            << r.week_index << ',' << r.symbol << '\n';
    }
}

std::vector<HeatmapRow> read_heatmap_csv(std::istream& in) {
    expect_header(in, kHeatmapHeader);
    std::vector<HeatmapRow> rows;
    std::string line;
    std::size_t row = 0;
    while (csv::read_line(in, line)) {
        if (line.empty()) {
            continue;
        }
        ++row;
        const auto f = csv::split_record(line);
        if (f.size() != 5) {
            throw Error(ErrorCode::MalformedRow, "row " + std::to_string(row) + ": expected 5 fields");
        }
        rows.push_back(HeatmapRow{required_double(f[0], row), required_double(f[1], row), maybe_double(f[2], row),
                                  static_cast<int>(required_double(f[3], row)), f[4]});
    }
    return rows;
}

}  // namespace skplane::plane
