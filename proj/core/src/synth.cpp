#include "skplane/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>
#include <sstream>

#include "skplane/csv.hpp"
#include "skplane/error.hpp"

namespace skplane::synth {

// Seed-to-stream mapping (pinned; fixtures depend on it):
//   engine   std::mt19937_64 seeded with the 64-bit seed
//   uniform  ((word >> 11) + 0.5) * 2^-53
//   normal   Marsaglia polar on 2u - 1 pairs, second value cached
//   gamma    Marsaglia-Tsang; shape < 1 boosted by u^(1/shape)
//   beta     g1 / (g1 + g2)
//   t        normal / sqrt(gamma(dof / 2) * 2 / dof)
// Per-asset streams use seed XOR asset_index.

Rng::Rng(std::uint64_t seed) : engine_(seed) {}

std::uint64_t Rng::next_u64() { return engine_(); }

double Rng::uniform() { return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53; }

double Rng::normal() {
    if (has_spare_) {
        has_spare_ = false;
        return spare_;
    }
    double u = 0.0;
    double v = 0.0;
    double s = 0.0;
    do {
        u = 2.0 * uniform() - 1.0;
        v = 2.0 * uniform() - 1.0;
        s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double f = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v * f;
    has_spare_ = true;
    return u * f;
}

double Rng::gamma(double shape) {
    if (shape < 1.0) {
        const double g = gamma(shape + 1.0);
        return g * std::pow(uniform(), 1.0 / shape);
    }
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
        double x = 0.0;
        double v = 0.0;
        do {
            x = normal();
            v = 1.0 + c * x;
        } while (v <= 0.0);
        v = v * v * v;
        const double u = uniform();
        if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
        if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
    }
}

double Rng::beta(double a, double b) {
    const double x = gamma(a);
    const double y = gamma(b);
    return x / (x + y);
}

double Rng::student_t(double dof) {
    const double z = normal();
    const double chi2 = 2.0 * gamma(0.5 * dof);
    return z / std::sqrt(chi2 / dof);
}

void SynthConfig::validate() const {
    const auto fail = [](const std::string& why) { throw Error(ErrorCode::InvalidConfig, why); };
    if (n_assets < 1 || n_assets > 9999) fail("n_assets must lie in [1, 9999]");
    if (n_weeks < 1) fail("n_weeks must be >= 1");
    if (!(sigma_u2 >= 0.0) || !(sigma_e2 >= 0.0)) fail("variance components must be >= 0");
    if (covid_week < 0) fail("covid_week must be >= 0");
    if (!std::isfinite(a) || !std::isfinite(b) || !std::isfinite(interaction)) fail("A, B, interaction must be finite");
    if (!(skew_shape > 0.0)) fail("skew_shape must be > 0");
    if (!(return_dof > 0.0)) fail("return_dof must be > 0");
    if (!(return_scale > 0.0)) fail("return_scale must be > 0");
}

SynthConfig config_from_json(const nlohmann::json& j) {
    if (!j.is_object()) {
        throw Error(ErrorCode::InvalidConfig, "synth config must be a JSON object");
    }
    static const std::set<std::string> known{"n_assets",     "n_weeks",   "dgp",        "A",
                                             "B",            "interaction", "sigma_u2", "sigma_e2",
                                             "covid_week",   "seed",      "start_date", "skew_shape",
                                             "return_dof",   "return_scale"};
    for (const auto& [key, value] : j.items()) {
        if (!known.contains(key)) {
            throw Error(ErrorCode::InvalidConfig, "unknown synth config key '" + key + "'");
        }
    }
    SynthConfig c;
    try {
        if (j.contains("n_assets")) c.n_assets = j.at("n_assets").get<int>();
        if (j.contains("n_weeks")) c.n_weeks = j.at("n_weeks").get<int>();
        if (j.contains("dgp")) {
            const auto dgp = j.at("dgp").get<std::string>();
            if (dgp == "QuadraticSK") c.dgp = Dgp::QuadraticSK;
            else if (dgp == "RawReturns") c.dgp = Dgp::RawReturns;
            else throw Error(ErrorCode::InvalidConfig, "dgp must be QuadraticSK or RawReturns");
        }
        if (j.contains("A")) c.a = j.at("A").get<double>();
        if (j.contains("B")) c.b = j.at("B").get<double>();
        if (j.contains("interaction")) c.interaction = j.at("interaction").get<double>();
        if (j.contains("sigma_u2")) c.sigma_u2 = j.at("sigma_u2").get<double>();
        if (j.contains("sigma_e2")) c.sigma_e2 = j.at("sigma_e2").get<double>();
        if (j.contains("covid_week")) c.covid_week = j.at("covid_week").get<int>();
        if (j.contains("seed")) c.seed = j.at("seed").get<std::uint64_t>();
        if (j.contains("start_date")) {
            if (!parse_date(j.at("start_date").get<std::string>(), c.start_date)) {
                throw Error(ErrorCode::InvalidConfig, "start_date must be YYYY-MM-DD");
            }
        }
        if (j.contains("skew_shape")) c.skew_shape = j.at("skew_shape").get<double>();
        if (j.contains("return_dof")) c.return_dof = j.at("return_dof").get<double>();
        if (j.contains("return_scale")) c.return_scale = j.at("return_scale").get<double>();
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::InvalidConfig, e.what());
    }
    c.validate();
    return c;
}

nlohmann::ordered_json to_json(const SynthConfig& c) {
    nlohmann::ordered_json j;
    j["n_assets"] = c.n_assets;
    j["n_weeks"] = c.n_weeks;
    j["dgp"] = c.dgp == Dgp::QuadraticSK ? "QuadraticSK" : "RawReturns";
    j["A"] = c.a;
    j["B"] = c.b;
    j["interaction"] = c.interaction;
    j["sigma_u2"] = c.sigma_u2;
    j["sigma_e2"] = c.sigma_e2;
    j["covid_week"] = c.covid_week;
    j["seed"] = c.seed;
    j["start_date"] = format_date(c.start_date);
    j["skew_shape"] = c.skew_shape;
    j["return_dof"] = c.return_dof;
    j["return_scale"] = c.return_scale;
    return j;
}

namespace {

std::string symbol_name(int index) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "SYM%04d", index);
    return buf;
}

}  // namespace

SynthPanel generate_moment_panel(const SynthConfig& config) {
    config.validate();
    if (config.dgp != Dgp::QuadraticSK) {
        throw Error(ErrorCode::InvalidConfig, "generate_moment_panel needs dgp QuadraticSK");
    }
    const double sd_u = std::sqrt(config.sigma_u2);
    const double sd_e = std::sqrt(config.sigma_e2);
    const Date first_monday = week_monday(config.start_date);

    SynthPanel out;
    out.panel.records.reserve(static_cast<std::size_t>(config.n_assets) * static_cast<std::size_t>(config.n_weeks));
    for (int i = 0; i < config.n_assets; ++i) {
        Rng rng(config.seed ^ static_cast<std::uint64_t>(i));
        const std::string symbol = symbol_name(i);
        out.panel.dropped_zero_variance.emplace(symbol, 0);
        out.panel.dropped_too_short.emplace(symbol, 0);
        const double u = sd_u * rng.normal();
        for (int t = 0; t < config.n_weeks; ++t) {
            const double s = 4.0 * rng.beta(config.skew_shape, config.skew_shape) - 2.0;
            const double e = sd_e * rng.normal();
            const double ln_delta = 1.0 + 1.2 * rng.normal();
            const int dummy = t >= config.covid_week ? 1 : 0;
            const double s2 = s * s;
            double k = config.a * s2 + config.b + config.interaction * s2 * dummy + u + e;
            if (k < s2 + 1.0) {
                k = s2 + 1.0;
                ++out.clip_events;
            }
            moments::MomentRecord r;
            r.symbol = symbol;
            r.week_start = first_monday + std::chrono::days{7 * t};
            r.week = iso_week(r.week_start);
            r.n_days = 7;
            r.skewness = s;
            r.kurtosis = k;
            r.delta = std::exp(ln_delta);
            r.ln_delta = ln_delta;
            r.covid = dummy;
            out.panel.records.push_back(std::move(r));
        }
    }
    return out;
}

std::string generate_raw_csv(const SynthConfig& config) {
    config.validate();
    if (config.dgp != Dgp::RawReturns) {
        throw Error(ErrorCode::InvalidConfig, "generate_raw_csv needs dgp RawReturns");
    }
    const Date first_monday = week_monday(config.start_date);
    const int days = 7 * config.n_weeks;
    std::ostringstream out;
    out << "date,symbol,mcap\n";
    for (int i = 0; i < config.n_assets; ++i) {
        Rng rng(config.seed ^ static_cast<std::uint64_t>(i));
        const std::string symbol = symbol_name(i);
        double value = 1e8 * (1.0 + 99.0 * rng.uniform());
        for (int d = 0; d < days; ++d) {
            if (d > 0) {
                value *= std::exp(config.return_scale * rng.student_t(config.return_dof));
            }
            out << format_date(first_monday + std::chrono::days{d}) << ',' << symbol << ','
                << csv::format_double(value) << '\n';
        }
    }
    return out.str();
}

OracleMoments moment_oracle(const std::vector<double>& window) {
    // extended precision throughout, so near-zero skewness keeps its digits
    using real = long double;
    const std::size_t n = window.size();
    if (n < 3) {
        throw Error(ErrorCode::TooShort, "oracle needs at least 3 values");
    }
    real total = 0.0L;
    for (std::size_t i = 0; i < n; ++i) total += window[i];
    const real mu = total / static_cast<real>(n);

    real var = 0.0L;
    for (std::size_t i = 0; i < n; ++i) var += (window[i] - mu) * (window[i] - mu);
    var /= static_cast<real>(n);
    if (!(var > 0.0L)) {
        throw Error(ErrorCode::ZeroVariance, "oracle window has zero variance");
    }
    const real sigma = std::sqrt(var);

    real third = 0.0L;
    for (std::size_t i = 0; i < n; ++i) {
        const real z = (window[i] - mu) / sigma;
        third += z * z * z;
    }
    real fourth = 0.0L;
    for (std::size_t i = 0; i < n; ++i) {
        const real z = (window[i] - mu) / sigma;
        fourth += z * z * z * z;
    }

    std::vector<real> dev(n);
    for (std::size_t i = 0; i < n; ++i) dev[i] = std::abs(window[i] - mu);
    std::sort(dev.begin(), dev.end(), std::greater<>());

    OracleMoments out;
    out.skewness = static_cast<double>(third / static_cast<real>(n));
    out.kurtosis = static_cast<double>(fourth / static_cast<real>(n));
    out.delta = static_cast<double>((dev[0] - dev[1]) / sigma);
    return out;
}

std::vector<double> ols_oracle(const econ::DesignMatrix& design) {
    const auto n = static_cast<std::size_t>(design.x.rows());
    const auto k = static_cast<std::size_t>(design.x.cols());
    // augmented [X'X | X'y]
    std::vector<std::vector<double>> a(k, std::vector<double>(k + 1, 0.0));
    for (std::size_t r = 0; r < k; ++r) {
        for (std::size_t c = 0; c < k; ++c) {
            double sum = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                sum += design.x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(r)) *
                       design.x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c));
            }
            a[r][c] = sum;
        }
        double sum = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            sum += design.x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(r)) *
                   design.y(static_cast<Eigen::Index>(i));
        }
        a[r][k] = sum;
    }
    double scale = 0.0;
    for (std::size_t r = 0; r < k; ++r) scale = std::max(scale, std::abs(a[r][r]));

    for (std::size_t col = 0; col < k; ++col) {
        std::size_t pivot = col;
        for (std::size_t r = col + 1; r < k; ++r) {
            if (std::abs(a[r][col]) > std::abs(a[pivot][col])) pivot = r;
        }
        if (!(std::abs(a[pivot][col]) > 1e-12 * scale)) {
            throw Error(ErrorCode::Singular, "normal equations are singular at column " + std::to_string(col));
        }
        std::swap(a[col], a[pivot]);
        for (std::size_t r = col + 1; r < k; ++r) {
            const double f = a[r][col] / a[col][col];
            for (std::size_t c = col; c <= k; ++c) a[r][c] -= f * a[col][c];
        }
    }
    std::vector<double> beta(k, 0.0);
    for (std::size_t r = k; r-- > 0;) {
        double sum = a[r][k];
        for (std::size_t c = r + 1; c < k; ++c) sum -= a[r][c] * beta[c];
        beta[r] = sum / a[r][r];
    }
    return beta;
}

}  // namespace skplane::synth
