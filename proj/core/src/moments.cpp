#include "skplane/moments.hpp"

#include <algorithm>
#include <cmath>
#include <nlohmann/json.hpp>

#include "parallel.hpp"
#include "skplane/csv.hpp"
#include "skplane/error.hpp"

namespace skplane::moments {

namespace {

void check_window(std::span<const double> window) {
    if (window.size() < 3) {
        throw Error(ErrorCode::TooShort, "window needs at least 3 values, got " + std::to_string(window.size()));
    }
    if (!std::all_of(window.begin(), window.end(), [](double v) { return std::isfinite(v); })) {
        throw Error(ErrorCode::NonFiniteValue, "window contains a non-finite value");
    }
    const auto [lo, hi] = std::minmax_element(window.begin(), window.end());
    if (*lo == *hi) {
        throw Error(ErrorCode::ZeroVariance, "all window values are equal");
    }
}

// Double-double arithmetic: a value is hi + lo with |lo| <= ulp(hi) / 2.
// Near-symmetric windows cancel almost completely in the third moment, so
// deviations and power sums are carried at about 106 bits.
struct Dd {
    double hi = 0.0;
    double lo = 0.0;
};

Dd quick_two_sum(double a, double b) {
    const double s = a + b;
    return {s, b - (s - a)};
}

Dd two_sum(double a, double b) {
    const double s = a + b;
    const double bb = s - a;
    return {s, (a - (s - bb)) + (b - bb)};
}

Dd operator+(Dd a, Dd b) {
    Dd s = two_sum(a.hi, b.hi);
    const Dd t = two_sum(a.lo, b.lo);
    s.lo += t.hi;
    s = quick_two_sum(s.hi, s.lo);
    s.lo += t.lo;
    return quick_two_sum(s.hi, s.lo);
}

Dd operator-(Dd a) { return {-a.hi, -a.lo}; }

Dd operator*(Dd a, Dd b) {
    const double p = a.hi * b.hi;
    const double e = std::fma(a.hi, b.hi, -p);
    return quick_two_sum(p, e + (a.hi * b.lo + a.lo * b.hi));
}

Dd operator/(Dd a, double b) {
    const double q1 = a.hi / b;
    const double p = q1 * b;
    const double e = std::fma(q1, b, -p);
    const Dd r = a + Dd{-p, -e};
    return quick_two_sum(q1, r.hi / b);
}

Dd abs(Dd a) { return a.hi < 0.0 || (a.hi == 0.0 && a.lo < 0.0) ? -a : a; }

bool operator>(Dd a, Dd b) { return a.hi > b.hi || (a.hi == b.hi && a.lo > b.lo); }

double to_double(Dd a) { return a.hi + a.lo; }

}  // namespace

WindowMoments window_moments(std::span<const double> window) {
    check_window(window);
    const auto n = static_cast<double>(window.size());
    Dd sum;
    for (double r : window) {
        sum = sum + Dd{r, 0.0};
    }
    const Dd mu = sum / n;

    Dd m2;
    Dd m3;
    Dd m4;
    Dd top;
    Dd second;
    for (double r : window) {
        const Dd d = Dd{r, 0.0} + -mu;
        const Dd d2 = d * d;
        m2 = m2 + d2;
        m3 = m3 + d2 * d;
        m4 = m4 + d2 * d2;
        const Dd a = abs(d);
        if (a > top) {
            second = top;
            top = a;
        } else if (a > second) {
            second = a;
        }
    }
    m2 = m2 / n;
    m3 = m3 / n;
    m4 = m4 / n;
    if (!(m2.hi > 0.0)) {
        throw Error(ErrorCode::ZeroVariance, "window variance underflows to zero");
    }
    const double var = to_double(m2);
    const double sigma = std::sqrt(var);
    // the ratios below are well conditioned once the sums are accurate
    return WindowMoments{to_double(m3) / (var * sigma), to_double(m4) / (var * var),
                         to_double(top + -second) / sigma};
}

double skewness(std::span<const double> window) { return window_moments(window).skewness; }

double kurtosis(std::span<const double> window) { return window_moments(window).kurtosis; }

double delta(std::span<const double> window) { return window_moments(window).delta; }

std::string_view to_string(Regime regime) noexcept {
    switch (regime) {
        case Regime::Gaussian: return "Gaussian";
        case Regime::Intermediate: return "Intermediate";
        case Regime::ExtremeDominated: return "ExtremeDominated";
    }
    return "Unknown";
}

Regime delta_regime(double ln_delta) {
    if (std::isnan(ln_delta)) {
        throw Error(ErrorCode::NonFiniteValue, "ln_delta is NaN");
    }
    if (ln_delta < 0.0) {
        return Regime::Gaussian;
    }
    if (ln_delta > kExtremeRegimeThreshold) {
        return Regime::ExtremeDominated;
    }
    return Regime::Intermediate;
}

double max_abs_skewness(int n) { return (n - 2) / std::sqrt(static_cast<double>(n - 1)); }

double max_kurtosis(int n) {
    const double nn = n;
    return (nn * nn - 3.0 * nn + 3.0) / (nn - 1.0);
}

Date default_covid_cutoff() { return Date{std::chrono::year{2019} / std::chrono::December / 31}; }

MomentPanel weekly_moments(const ingest::RawPanel& panel, Date covid_cutoff, unsigned threads) {
    enum class Outcome { Kept, ZeroVariance, TooShort };
    std::vector<MomentRecord> records(panel.windows.size());
    std::vector<Outcome> outcome(panel.windows.size(), Outcome::Kept);

    detail::parallel_for(panel.windows.size(), threads, [&](std::size_t i) {
        const auto& w = panel.windows[i];
        if (w.returns.size() < 3) {
            outcome[i] = Outcome::TooShort;
            return;
        }
        WindowMoments m;
        try {
            m = window_moments(w.returns);
        } catch (const Error& e) {
            if (e.code() != ErrorCode::ZeroVariance) {
                throw;
            }
            outcome[i] = Outcome::ZeroVariance;
            return;
        }
        auto& rec = records[i];
        rec.symbol = w.symbol;
        rec.week = w.week;
        rec.week_start = w.week_start;
        rec.n_days = static_cast<int>(w.returns.size());
        rec.skewness = m.skewness;
        rec.kurtosis = m.kurtosis;
        rec.delta = m.delta;
        if (m.delta > 0.0) {
            rec.ln_delta = std::log(m.delta);
        }
        rec.covid = w.week_start > covid_cutoff ? 1 : 0;
    });

    MomentPanel out;
    for (const auto& [symbol, count] : panel.dropped) {
        out.dropped_zero_variance.emplace(symbol, 0);
        out.dropped_too_short.emplace(symbol, 0);
    }
    for (std::size_t i = 0; i < records.size(); ++i) {
        const auto& symbol = panel.windows[i].symbol;
        switch (outcome[i]) {
            case Outcome::Kept: out.records.push_back(std::move(records[i])); break;
            case Outcome::ZeroVariance: ++out.dropped_zero_variance[symbol]; break;
            case Outcome::TooShort: ++out.dropped_too_short[symbol]; break;
        }
    }
    return out;
}

double percentile_sorted(std::span<const double> sorted, double q) {
    if (sorted.empty()) {
        throw Error(ErrorCode::EmptyInput, "percentile of an empty sample");
    }
    const double pos = q * static_cast<double>(sorted.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

Stats descriptive_stats(std::span<const double> values) {
    if (values.empty()) {
        throw Error(ErrorCode::EmptyInput, "descriptive statistics of an empty sample");
    }
    std::vector<double> sorted(values.begin(), values.end());
    std::sort(sorted.begin(), sorted.end());

    Stats s;
    s.n = sorted.size();
    double sum = 0.0;
    for (double v : sorted) {
        sum += v;
    }
    s.mean = sum / static_cast<double>(s.n);
    if (s.n > 1) {
        double ss = 0.0;
        for (double v : sorted) {
            ss += (v - s.mean) * (v - s.mean);
        }
        s.sd = std::sqrt(ss / static_cast<double>(s.n - 1));
    }
    s.min = sorted.front();
    s.max = sorted.back();
    s.p1 = percentile_sorted(sorted, 0.01);
    s.p25 = percentile_sorted(sorted, 0.25);
    s.p50 = percentile_sorted(sorted, 0.50);
    s.p75 = percentile_sorted(sorted, 0.75);
    s.p99 = percentile_sorted(sorted, 0.99);
    return s;
}

namespace {

nlohmann::ordered_json stats_json(std::span<const double> values) {
    nlohmann::ordered_json j;
    if (values.empty()) {
        j["N"] = 0;
        return j;
    }
    const Stats s = descriptive_stats(values);
    j["N"] = s.n;
    j["mean"] = s.mean;
    j["sd"] = s.sd;
    j["min"] = s.min;
    j["max"] = s.max;
    j["p1"] = s.p1;
    j["p25"] = s.p25;
    j["p50"] = s.p50;
    j["p75"] = s.p75;
    j["p99"] = s.p99;
    return j;
}

}  // namespace

std::string descriptives_json(const MomentPanel& panel) {
    std::vector<double> s;
    std::vector<double> k;
    std::vector<double> d;
    for (const auto& r : panel.records) {
        s.push_back(r.skewness);
        k.push_back(r.kurtosis);
        if (r.delta > 0.0) {
            d.push_back(r.delta);
        }
    }
    nlohmann::ordered_json j;
    j["skewness"] = stats_json(s);
    j["kurtosis"] = stats_json(k);
    j["delta"] = stats_json(d);
    return j.dump(2);
}

namespace {

constexpr const char* kMomentHeader = "symbol,week_id,week_start,n_days,skewness,kurtosis,delta,ln_delta,covid";

}  // namespace

void write_moments_csv(std::ostream& out, const MomentPanel& panel) {
    out << kMomentHeader << '\n';
    for (const auto& r : panel.records) {
        out << r.symbol << ',' << format_iso_week(r.week) << ',' << format_date(r.week_start) << ',' << r.n_days
            << ',' << csv::format_double(r.skewness) << ',' << csv::format_double(r.kurtosis) << ','
            << csv::format_double(r.delta) << ',' << (r.ln_delta ? csv::format_double(*r.ln_delta) : "") << ','
            << r.covid << '\n';
    }
}

MomentPanel read_moments_csv(std::istream& in) {
    std::string line;
    if (!csv::read_line(in, line)) {
        throw Error(ErrorCode::MissingColumn, "moments file has no header");
    }
    if (!line.empty() && line.back() == '\r') {
        line.pop_back();
    }
    if (line != kMomentHeader) {
        throw Error(ErrorCode::MissingColumn, "unexpected moments header '" + line + "'");
    }
    MomentPanel panel;
    std::size_t row = 0;
    while (csv::read_line(in, line)) {
        if (line.empty()) {
            continue;
        }
        ++row;
        const auto f = csv::split_record(line);
        const auto bad = [&](const std::string& what) {
            return Error(ErrorCode::MalformedRow, "row " + std::to_string(row) + ": " + what);
        };
        if (f.size() != 9) {
            throw bad("expected 9 fields");
        }
        MomentRecord r;
        r.symbol = f[0];
        if (!parse_iso_week(f[1], r.week)) {
            throw bad("bad week_id");
        }
        if (!parse_date(f[2], r.week_start)) {
            throw bad("bad week_start");
        }
        const auto n = csv::parse_double(f[3]);
        const auto s = csv::parse_double(f[4]);
        const auto k = csv::parse_double(f[5]);
        const auto d = csv::parse_double(f[6]);
        const auto c = csv::parse_double(f[8]);
        if (!n || !s || !k || !d || !c) {
            throw bad("bad numeric field");
        }
        r.n_days = static_cast<int>(*n);
        r.skewness = *s;
        r.kurtosis = *k;
        r.delta = *d;
        if (!f[7].empty()) {
            const auto ld = csv::parse_double(f[7]);
            if (!ld) {
                throw bad("bad ln_delta");
            }
            r.ln_delta = *ld;
        }
        r.covid = static_cast<int>(*c);
        panel.records.push_back(std::move(r));
    }
    return panel;
}

}  // namespace skplane::moments
