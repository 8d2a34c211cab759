#include "skplane/econometrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "skplane/distributions.hpp"
#include "skplane/error.hpp"

namespace skplane::econ {

namespace {

constexpr double kCollinearTol = 1e-9;
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string join(const std::vector<std::string>& items) {
    std::string out;
    for (const auto& s : items) {
        if (!out.empty()) out += ", ";
        out += s;
    }
    return out;
}

}  // namespace

std::string_view to_string(Model model) noexcept {
    switch (model) {
        case Model::M7: return "M7";
        case Model::M8: return "M8";
        case Model::M9: return "M9";
        case Model::M11: return "M11";
    }
    return "unknown";
}

Model parse_model(std::string_view text) {
    std::string t(text);
    if (t.size() >= 2 && t.front() == '(' && t.back() == ')') {
        t = t.substr(1, t.size() - 2);
    }
    if (!t.empty() && (t.front() == 'M' || t.front() == 'm')) {
        t.erase(0, 1);
    }
    if (t == "7") return Model::M7;
    if (t == "8") return Model::M8;
    if (t == "9") return Model::M9;
    if (t == "11") return Model::M11;
    throw Error(ErrorCode::InvalidArgument, "unknown model '" + std::string(text) + "' (expected 7, 8, 9 or 11)");
}

std::vector<Model> parse_model_list(std::string_view text) {
    std::vector<Model> out;
    std::size_t start = 0;
    while (start <= text.size()) {
        const auto comma = text.find(',', start);
        const auto piece = text.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start);
        if (!piece.empty()) {
            const Model m = parse_model(piece);
            if (std::find(out.begin(), out.end(), m) == out.end()) {
                out.push_back(m);
            }
        }
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    if (out.empty()) {
        throw Error(ErrorCode::InvalidArgument, "model list is empty");
    }
    return out;
}

const std::vector<Model>& all_models() {
    static const std::vector<Model> models{Model::M7, Model::M8, Model::M9, Model::M11};
    return models;
}

std::vector<std::string> ModelSpec::regressors() const {
    std::vector<std::string> out{std::string(term::kSkew2)};
    if (model != Model::M7) out.emplace_back(term::kSkew);
    if (model == Model::M9 || model == Model::M11) out.emplace_back(term::kSkew2Covid);
    if (model == Model::M11) out.emplace_back(term::kCovid);
    return out;
}

std::vector<std::string> ModelSpec::interaction_terms() const {
    if (model == Model::M9 || model == Model::M11) {
        return {std::string(term::kSkew2Covid)};
    }
    return {};
}

DesignMatrix build_design(const moments::MomentPanel& panel, const ModelSpec& spec) {
    if (panel.records.empty()) {
        throw Error(ErrorCode::EmptyPanel, "cannot build a design from an empty panel");
    }
    DesignMatrix d;
    d.term_names = spec.regressors();
    if (spec.include_intercept) {
        d.term_names.emplace_back(term::kConst);
    }
    const auto n = static_cast<Eigen::Index>(panel.records.size());
    const auto k = static_cast<Eigen::Index>(d.term_names.size());
    d.y.resize(n);
    d.x.resize(n, k);
    d.groups.reserve(panel.records.size());

    std::map<std::string, int> group_of;
    for (Eigen::Index i = 0; i < n; ++i) {
        const auto& r = panel.records[static_cast<std::size_t>(i)];
        if (!std::isfinite(r.skewness) || !std::isfinite(r.kurtosis) || (r.covid != 0 && r.covid != 1)) {
            throw Error(ErrorCode::NonFiniteValue, "record " + std::to_string(i) + " (" + r.symbol + " " +
                                                       format_iso_week(r.week) + ") has a non-finite S, K or D");
        }
        const double s = r.skewness;
        const double dummy = r.covid;
        d.y(i) = r.kurtosis;
        for (Eigen::Index c = 0; c < k; ++c) {
            const auto& name = d.term_names[static_cast<std::size_t>(c)];
            double v = 1.0;
            if (name == term::kSkew2) v = s * s;
            else if (name == term::kSkew) v = s;
            else if (name == term::kSkew2Covid) v = s * s * dummy;
            else if (name == term::kCovid) v = dummy;
            d.x(i, c) = v;
        }
        auto [it, inserted] = group_of.emplace(r.symbol, static_cast<int>(d.group_labels.size()));
        if (inserted) {
            d.group_labels.push_back(r.symbol);
        }
        d.groups.push_back(it->second);
    }
    return d;
}

std::vector<std::string> collinear_terms(const Eigen::MatrixXd& x, const std::vector<std::string>& names) {
    std::vector<std::string> out;
    std::vector<Eigen::VectorXd> basis;
    for (Eigen::Index c = 0; c < x.cols(); ++c) {
        const double norm = x.col(c).norm();
        if (!(norm > 0.0)) {
            out.push_back(names[static_cast<std::size_t>(c)]);
            continue;
        }
        Eigen::VectorXd r = x.col(c) / norm;
        // two Gram-Schmidt sweeps keep the residual orthogonal in floating point
        for (int sweep = 0; sweep < 2; ++sweep) {
            for (const auto& q : basis) {
                r -= q.dot(r) * q;
            }
        }
        const double rn = r.norm();
        if (rn <= kCollinearTol) {
            out.push_back(names[static_cast<std::size_t>(c)]);
        } else {
            basis.push_back(r / rn);
        }
    }
    return out;
}

std::string_view to_string(Estimator estimator) noexcept {
    return estimator == Estimator::PooledOLS ? "PooledOLS" : "RandomEffects";
}

std::vector<std::string> FitResult::term_names() const {
    std::vector<std::string> out;
    out.reserve(coefficients.size());
    for (const auto& c : coefficients) out.push_back(c.term);
    return out;
}

std::size_t FitResult::index_of(std::string_view term) const {
    for (std::size_t i = 0; i < coefficients.size(); ++i) {
        if (coefficients[i].term == term) return i;
    }
    throw Error(ErrorCode::UnknownTerm, "fit has no term '" + std::string(term) + "'");
}

const Coefficient& FitResult::coefficient(std::string_view term) const { return coefficients[index_of(term)]; }

std::vector<std::string> FitResult::slope_terms() const {
    std::vector<std::string> out;
    for (const auto& c : coefficients) {
        if (c.term != term::kConst) out.push_back(c.term);
    }
    return out;
}

namespace {

struct LeastSquares {
    Eigen::VectorXd beta;
    Eigen::MatrixXd xtx_inv;
    Eigen::VectorXd residuals;
    double rss = 0.0;
};

// Column-pivoted Householder QR; the caller has already verified full rank.
LeastSquares least_squares(const Eigen::MatrixXd& x, const Eigen::VectorXd& y) {
    const Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(x);
    const Eigen::Index k = x.cols();
    LeastSquares ls;
    ls.beta = qr.solve(y);
    const Eigen::MatrixXd r = qr.matrixQR().topLeftCorner(k, k).triangularView<Eigen::Upper>();
    const Eigen::MatrixXd r_inv = r.triangularView<Eigen::Upper>().solve(Eigen::MatrixXd::Identity(k, k));
    const Eigen::MatrixXd inner = r_inv * r_inv.transpose();
    const auto& perm = qr.colsPermutation();
    Eigen::MatrixXd v = perm * inner * perm.transpose();
    ls.xtx_inv = 0.5 * (v + v.transpose());
    ls.residuals = y - x * ls.beta;
    ls.rss = ls.residuals.squaredNorm();
    return ls;
}

void require_full_rank(const DesignMatrix& design) {
    const auto bad = collinear_terms(design.x, design.term_names);
    if (!bad.empty()) {
        throw Error(ErrorCode::RankDeficient, "collinear columns: " + join(bad));
    }
}

void require_rows(const DesignMatrix& design) {
    if (design.rows() <= design.cols()) {
        throw Error(ErrorCode::TooFewRows, "need more rows than the " + std::to_string(design.cols()) +
                                               " columns, got " + std::to_string(design.rows()));
    }
    if (static_cast<std::size_t>(design.y.size()) != design.rows() || design.groups.size() != design.rows() ||
        design.term_names.size() != design.cols()) {
        throw Error(ErrorCode::InvalidArgument, "design dimensions are inconsistent");
    }
}

double squared_correlation(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
    if (a.size() < 2) return kNaN;
    const Eigen::VectorXd ac = a.array() - a.mean();
    const Eigen::VectorXd bc = b.array() - b.mean();
    const double denom = ac.squaredNorm() * bc.squaredNorm();
    if (!(denom > 0.0)) return kNaN;
    const double num = ac.dot(bc);
    return num * num / denom;
}

bool is_perfect_fit(double rss, const Eigen::VectorXd& y) { return rss <= 1e-20 * std::max(y.squaredNorm(), 1e-300); }

void fill_coefficients(FitResult& fit, const DesignMatrix& design, const Eigen::VectorXd& beta, bool use_t) {
    fit.coefficients.clear();
    for (std::size_t j = 0; j < design.cols(); ++j) {
        Coefficient c;
        c.term = design.term_names[j];
        c.estimate = beta(static_cast<Eigen::Index>(j));
        const double var = fit.vcov(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(j));
        c.std_error = std::sqrt(std::max(var, 0.0));
        if (c.std_error > 0.0) {
            c.statistic = c.estimate / c.std_error;
            c.p_value = use_t ? dist::t_two_sided(c.statistic, static_cast<double>(fit.df_resid))
                              : dist::normal_two_sided(c.statistic);
        } else {
            c.statistic = c.estimate == 0.0 ? 0.0 : std::copysign(std::numeric_limits<double>::infinity(), c.estimate);
            c.p_value = c.estimate == 0.0 ? 1.0 : 0.0;
        }
        fit.coefficients.push_back(std::move(c));
    }
}

struct GroupMeans {
    std::vector<double> count;
    Eigen::VectorXd y;
    Eigen::MatrixXd x;
};

GroupMeans group_means(const DesignMatrix& d) {
    const auto g = static_cast<Eigen::Index>(d.n_groups());
    GroupMeans m;
    m.count.assign(static_cast<std::size_t>(g), 0.0);
    m.y = Eigen::VectorXd::Zero(g);
    m.x = Eigen::MatrixXd::Zero(g, d.x.cols());
    for (Eigen::Index i = 0; i < d.x.rows(); ++i) {
        const int gi = d.groups[static_cast<std::size_t>(i)];
        m.count[static_cast<std::size_t>(gi)] += 1.0;
        m.y(gi) += d.y(i);
        m.x.row(gi) += d.x.row(i);
    }
    for (Eigen::Index gi = 0; gi < g; ++gi) {
        const double t = m.count[static_cast<std::size_t>(gi)];
        if (t == 0.0) {
            throw Error(ErrorCode::InvalidArgument, "group '" + d.group_labels[static_cast<std::size_t>(gi)] +
                                                        "' has no rows");
        }
        m.y(gi) /= t;
        m.x.row(gi) /= t;
    }
    return m;
}

}  // namespace

FitResult fit_pooled_ols(const DesignMatrix& design) {
    require_rows(design);
    require_full_rank(design);
    const LeastSquares ls = least_squares(design.x, design.y);

    FitResult fit;
    fit.estimator = Estimator::PooledOLS;
    fit.nobs = design.rows();
    fit.n_groups = design.n_groups();
    fit.df_resid = design.rows() - design.cols();
    fit.rss = ls.rss;
    fit.perfect_fit = is_perfect_fit(ls.rss, design.y);
    const double sigma2 = ls.rss / static_cast<double>(fit.df_resid);
    fit.vcov = sigma2 * ls.xtx_inv;
    fill_coefficients(fit, design, ls.beta, true);

    const double tss = (design.y.array() - design.y.mean()).square().sum();
    fit.r2_overall = tss > 0.0 ? 1.0 - ls.rss / tss : (ls.rss == 0.0 ? 1.0 : 0.0);
    return fit;
}

FitResult fit_random_effects(const DesignMatrix& design) {
    if (design.n_groups() < 2) {
        throw Error(ErrorCode::TooFewGroups, "random effects need at least 2 groups, got " +
                                                 std::to_string(design.n_groups()));
    }
    require_rows(design);
    require_full_rank(design);

    const auto n = static_cast<Eigen::Index>(design.rows());
    const auto k = static_cast<Eigen::Index>(design.cols());
    const auto g = static_cast<Eigen::Index>(design.n_groups());
    const GroupMeans means = group_means(design);

    FitResult fit;
    fit.estimator = Estimator::RandomEffects;
    fit.nobs = design.rows();
    fit.n_groups = design.n_groups();

    // Within (fixed-effects) regression on group-demeaned data. Columns that
    // vanish after demeaning carry no within variation; the intercept always
    // does, other such columns are reported.
    Eigen::MatrixXd xw(n, k);
    Eigen::VectorXd yw(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const int gi = design.groups[static_cast<std::size_t>(i)];
        xw.row(i) = design.x.row(i) - means.x.row(gi);
        yw(i) = design.y(i) - means.y(gi);
    }
    std::vector<Eigen::Index> within_cols;
    {
        std::vector<std::string> kept_names;
        std::vector<Eigen::VectorXd> basis;
        for (Eigen::Index c = 0; c < k; ++c) {
            const auto& name = design.term_names[static_cast<std::size_t>(c)];
            const double scale = design.x.col(c).norm();
            Eigen::VectorXd r = xw.col(c);
            for (int sweep = 0; sweep < 2; ++sweep) {
                for (const auto& q : basis) r -= q.dot(r) * q;
            }
            if (!(scale > 0.0) || r.norm() <= kCollinearTol * scale) {
                if (name != term::kConst) fit.degenerate_within_terms.push_back(name);
                continue;
            }
            basis.push_back(r / r.norm());
            within_cols.push_back(c);
        }
    }
    if (!fit.degenerate_within_terms.empty()) {
        fit.notes.push_back("DegenerateWithin: no within-group variation in " + join(fit.degenerate_within_terms) +
                            "; excluded from variance-component estimation");
    }

    const auto k_within = static_cast<Eigen::Index>(within_cols.size());
    const Eigen::Index dof_within = n - g - k_within;
    std::optional<double> sigma_e2;
    if (dof_within > 0) {
        double ssr_within = yw.squaredNorm();
        if (k_within > 0) {
            Eigen::MatrixXd xwk(n, k_within);
            for (Eigen::Index j = 0; j < k_within; ++j) xwk.col(j) = xw.col(within_cols[static_cast<std::size_t>(j)]);
            ssr_within = least_squares(xwk, yw).rss;
        }
        sigma_e2 = ssr_within / static_cast<double>(dof_within);
    }

    // Between regression on group means, unweighted.
    std::optional<double> sigma_u2;
    if (sigma_e2 && g > k && collinear_terms(means.x, design.term_names).empty()) {
        const double ssr_between = least_squares(means.x, means.y).rss;
        double inv_t_sum = 0.0;
        for (double t : means.count) inv_t_sum += 1.0 / t;
        const double t_harmonic = static_cast<double>(g) / inv_t_sum;
        sigma_u2 = ssr_between / static_cast<double>(g - k) - *sigma_e2 / t_harmonic;
    }

    double su2 = 0.0;
    if (!sigma_u2) {
        fit.sigma_u2_clamped = true;
        fit.notes.push_back("variance components not estimable (within dof " + std::to_string(dof_within) +
                            ", groups " + std::to_string(g) + "); sigma_u2 clamped to 0");
    } else if (*sigma_u2 < 0.0) {
        fit.sigma_u2_clamped = true;
        fit.notes.push_back("negative sigma_u2 estimate clamped to 0");
    } else {
        su2 = *sigma_u2;
    }

    // Quasi-demeaning. With su2 == 0 every theta is exactly 0 and the
    // transformed data equal the raw data, so the fit matches pooled OLS.
    Eigen::MatrixXd xs = design.x;
    Eigen::VectorXd ys = design.y;
    if (su2 > 0.0) {
        std::vector<double> theta(static_cast<std::size_t>(g));
        for (Eigen::Index gi = 0; gi < g; ++gi) {
            const double t = means.count[static_cast<std::size_t>(gi)];
            theta[static_cast<std::size_t>(gi)] = 1.0 - std::sqrt(*sigma_e2 / (t * su2 + *sigma_e2));
        }
        for (Eigen::Index i = 0; i < n; ++i) {
            const int gi = design.groups[static_cast<std::size_t>(i)];
            const double th = theta[static_cast<std::size_t>(gi)];
            xs.row(i) -= th * means.x.row(gi);
            ys(i) -= th * means.y(gi);
        }
    }
    const LeastSquares ls = least_squares(xs, ys);
    fit.df_resid = design.rows() - design.cols();
    fit.rss = ls.rss;
    fit.perfect_fit = is_perfect_fit(ls.rss, ys);
    const double se2 = sigma_e2 ? *sigma_e2 : ls.rss / static_cast<double>(fit.df_resid);
    fit.sigma_e2 = se2;
    fit.sigma_u2 = su2;
    fit.vcov = se2 * ls.xtx_inv;
    fill_coefficients(fit, design, ls.beta, false);

    const Eigen::VectorXd xb = design.x * ls.beta;
    Eigen::VectorXd xb_within(n);
    Eigen::VectorXd xb_between = Eigen::VectorXd::Zero(g);
    for (Eigen::Index i = 0; i < n; ++i) {
        xb_between(design.groups[static_cast<std::size_t>(i)]) += xb(i);
    }
    for (Eigen::Index gi = 0; gi < g; ++gi) xb_between(gi) /= means.count[static_cast<std::size_t>(gi)];
    for (Eigen::Index i = 0; i < n; ++i) xb_within(i) = xb(i) - xb_between(design.groups[static_cast<std::size_t>(i)]);
    fit.r2_overall = squared_correlation(xb, design.y);
    fit.r2_within = squared_correlation(xb_within, yw);
    fit.r2_between = squared_correlation(xb_between, means.y);
    return fit;
}

FitResult fit(const DesignMatrix& design, Estimator estimator) {
    return estimator == Estimator::PooledOLS ? fit_pooled_ols(design) : fit_random_effects(design);
}

std::string_view to_string(TestKind kind) noexcept { return kind == TestKind::WaldChi2 ? "WaldChi2" : "F"; }

namespace {

TestResult wald_form(const FitResult& fit, std::span<const std::string> terms, TestKind kind) {
    if (terms.empty()) {
        throw Error(ErrorCode::InvalidArgument, "joint test needs at least one term");
    }
    std::vector<std::size_t> idx;
    for (const auto& t : terms) idx.push_back(fit.index_of(t));
    const auto q = static_cast<Eigen::Index>(idx.size());
    Eigen::VectorXd b(q);
    Eigen::MatrixXd v(q, q);
    for (Eigen::Index i = 0; i < q; ++i) {
        b(i) = fit.coefficients[idx[static_cast<std::size_t>(i)]].estimate;
        for (Eigen::Index j = 0; j < q; ++j) {
            v(i, j) = fit.vcov(static_cast<Eigen::Index>(idx[static_cast<std::size_t>(i)]),
                               static_cast<Eigen::Index>(idx[static_cast<std::size_t>(j)]));
        }
    }

    TestResult out;
    out.kind = kind;
    out.terms.assign(terms.begin(), terms.end());
    out.df = static_cast<int>(q);
    if (kind == TestKind::F) out.df_denominator = static_cast<int>(fit.df_resid);

    if (b.isZero(0.0)) {
        out.statistic = 0.0;
        out.p_value = 1.0;
        return out;
    }
    if (fit.perfect_fit) {
        out.perfect_fit = true;
        out.statistic = std::numeric_limits<double>::infinity();
        out.p_value = 0.0;
        return out;
    }
    const Eigen::LDLT<Eigen::MatrixXd> ldlt(v);
    const double vmax = v.diagonal().cwiseAbs().maxCoeff();
    if (ldlt.info() != Eigen::Success || !ldlt.isPositive() || !(vmax > 0.0) ||
        ldlt.vectorD().minCoeff() <= 1e-14 * vmax) {
        throw Error(ErrorCode::SingularSubcovariance, "covariance of the tested terms is singular");
    }
    const double w = b.dot(ldlt.solve(b));
    if (kind == TestKind::WaldChi2) {
        out.statistic = w;
        out.p_value = dist::chi2_sf(w, static_cast<double>(q));
    } else {
        out.statistic = w / static_cast<double>(q);
        out.p_value = dist::f_sf(out.statistic, static_cast<double>(q), static_cast<double>(fit.df_resid));
    }
    return out;
}

}  // namespace

TestResult wald_joint_test(const FitResult& fit, std::span<const std::string> terms) {
    return wald_form(fit, terms, TestKind::WaldChi2);
}

TestResult f_joint_test(const FitResult& fit, std::span<const std::string> terms) {
    if (fit.estimator != Estimator::PooledOLS) {
        throw Error(ErrorCode::WrongEstimator, "F test requires a pooled OLS fit");
    }
    return wald_form(fit, terms, TestKind::F);
}

std::string_view significance_stars(double p_value) noexcept {
    if (p_value < 0.01) return "***";
    if (p_value < 0.05) return "**";
    if (p_value < 0.1) return "*";
    return "";
}

ModelReport report_model(const moments::MomentPanel& panel, Model model, Estimator estimator) {
    const ModelSpec spec{model, true};
    const DesignMatrix design = build_design(panel, spec);
    ModelReport report;
    report.model = model;
    report.fit = fit(design, estimator);
    const auto joint = [&](const std::vector<std::string>& terms) {
        return estimator == Estimator::PooledOLS ? f_joint_test(report.fit, terms)
                                                 : wald_joint_test(report.fit, terms);
    };
    const auto interaction = spec.interaction_terms();
    if (!interaction.empty()) {
        report.zero_interaction = joint(interaction);
    }
    report.zero_total = joint(report.fit.slope_terms());
    return report;
}

namespace {

using json = nlohmann::ordered_json;

json number_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json optional_number(const std::optional<double>& v) { return v ? number_or_null(*v) : json(nullptr); }

double read_number(const json& j, double if_null = kNaN) { return j.is_null() ? if_null : j.get<double>(); }

std::optional<double> read_optional(const json& j, const char* key) {
    if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
    return j.at(key).get<double>();
}

}  // namespace

json to_json(const FitResult& fit) {
    json j;
    j["estimator"] = std::string(to_string(fit.estimator));
    j["nobs"] = fit.nobs;
    j["n_groups"] = fit.n_groups;
    j["df_resid"] = fit.df_resid;
    json coefs = json::array();
    for (const auto& c : fit.coefficients) {
        json cj;
        cj["term"] = c.term;
        cj["estimate"] = number_or_null(c.estimate);
        cj["std_error"] = number_or_null(c.std_error);
        cj["statistic"] = number_or_null(c.statistic);
        cj["p_value"] = number_or_null(c.p_value);
        cj["stars"] = std::string(significance_stars(c.p_value));
        coefs.push_back(std::move(cj));
    }
    j["coefficients"] = std::move(coefs);
    json r2;
    r2["overall"] = number_or_null(fit.r2_overall);
    r2["within"] = optional_number(fit.r2_within);
    r2["between"] = optional_number(fit.r2_between);
    j["r2"] = std::move(r2);
    json vc;
    vc["sigma_e2"] = optional_number(fit.sigma_e2);
    vc["sigma_u2"] = optional_number(fit.sigma_u2);
    vc["sigma_u2_clamped"] = fit.sigma_u2_clamped;
    j["variance_components"] = std::move(vc);
    j["rss"] = number_or_null(fit.rss);
    j["perfect_fit"] = fit.perfect_fit;
    j["degenerate_within_terms"] = fit.degenerate_within_terms;
    j["notes"] = fit.notes;
    json vcov = json::array();
    for (Eigen::Index i = 0; i < fit.vcov.rows(); ++i) {
        json row = json::array();
        for (Eigen::Index c = 0; c < fit.vcov.cols(); ++c) row.push_back(number_or_null(fit.vcov(i, c)));
        vcov.push_back(std::move(row));
    }
    j["vcov"] = std::move(vcov);
    return j;
}

json to_json(const TestResult& test) {
    json j;
    j["kind"] = std::string(to_string(test.kind));
    j["terms"] = test.terms;
    j["statistic"] = number_or_null(test.statistic);
    if (test.df_denominator) {
        j["df"] = json::array({test.df, *test.df_denominator});
    } else {
        j["df"] = test.df;
    }
    j["p_value"] = test.p_value;
    j["stars"] = std::string(significance_stars(test.p_value));
    j["perfect_fit"] = test.perfect_fit;
    return j;
}

json to_json(const ModelReport& report) {
    json j;
    j["model"] = std::string(to_string(report.model));
    j["fit"] = to_json(report.fit);
    json tests;
    tests["zero_interaction"] = report.zero_interaction ? to_json(*report.zero_interaction) : json(nullptr);
    tests["zero_total"] = to_json(report.zero_total);
    j["tests"] = std::move(tests);
    return j;
}

FitResult fit_from_json(const json& j) {
    FitResult fit;
    const auto est = j.at("estimator").get<std::string>();
    if (est == "PooledOLS") fit.estimator = Estimator::PooledOLS;
    else if (est == "RandomEffects") fit.estimator = Estimator::RandomEffects;
    else throw Error(ErrorCode::InvalidArgument, "unknown estimator '" + est + "'");
    fit.nobs = j.at("nobs").get<std::size_t>();
    fit.n_groups = j.at("n_groups").get<std::size_t>();
    fit.df_resid = j.at("df_resid").get<std::size_t>();
    for (const auto& cj : j.at("coefficients")) {
        Coefficient c;
        c.term = cj.at("term").get<std::string>();
        c.estimate = read_number(cj.at("estimate"));
        c.std_error = read_number(cj.at("std_error"));
        c.statistic = read_number(cj.at("statistic"));
        c.p_value = read_number(cj.at("p_value"));
        fit.coefficients.push_back(std::move(c));
    }
    const auto& r2 = j.at("r2");
    fit.r2_overall = read_number(r2.at("overall"));
    fit.r2_within = read_optional(r2, "within");
    fit.r2_between = read_optional(r2, "between");
    const auto& vc = j.at("variance_components");
    fit.sigma_e2 = read_optional(vc, "sigma_e2");
    fit.sigma_u2 = read_optional(vc, "sigma_u2");
    fit.sigma_u2_clamped = vc.at("sigma_u2_clamped").get<bool>();
    fit.rss = read_number(j.at("rss"));
    fit.perfect_fit = j.at("perfect_fit").get<bool>();
    fit.degenerate_within_terms = j.at("degenerate_within_terms").get<std::vector<std::string>>();
    fit.notes = j.at("notes").get<std::vector<std::string>>();
    const auto& vcov = j.at("vcov");
    const auto k = static_cast<Eigen::Index>(vcov.size());
    fit.vcov.resize(k, k);
    for (Eigen::Index r = 0; r < k; ++r) {
        for (Eigen::Index c = 0; c < k; ++c) {
            fit.vcov(r, c) = read_number(vcov.at(static_cast<std::size_t>(r)).at(static_cast<std::size_t>(c)));
        }
    }
    return fit;
}

TestResult test_from_json(const json& j) {
    TestResult t;
    const auto kind = j.at("kind").get<std::string>();
    if (kind == "WaldChi2") t.kind = TestKind::WaldChi2;
    else if (kind == "F") t.kind = TestKind::F;
    else throw Error(ErrorCode::InvalidArgument, "unknown test kind '" + kind + "'");
    t.terms = j.at("terms").get<std::vector<std::string>>();
    t.perfect_fit = j.at("perfect_fit").get<bool>();
    t.statistic = read_number(j.at("statistic"), t.perfect_fit ? std::numeric_limits<double>::infinity() : kNaN);
    const auto& df = j.at("df");
    if (df.is_array()) {
        t.df = df.at(0).get<int>();
        t.df_denominator = df.at(1).get<int>();
    } else {
        t.df = df.get<int>();
    }
    t.p_value = j.at("p_value").get<double>();
    return t;
}

ModelReport report_from_json(const json& j) {
    ModelReport r;
    r.model = parse_model(j.at("model").get<std::string>());
    r.fit = fit_from_json(j.at("fit"));
    const auto& tests = j.at("tests");
    if (!tests.at("zero_interaction").is_null()) {
        r.zero_interaction = test_from_json(tests.at("zero_interaction"));
    }
    r.zero_total = test_from_json(tests.at("zero_total"));
    return r;
}

}  // namespace skplane::econ
