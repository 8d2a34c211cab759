#include "commands.hpp"

#include <fstream>
#include <sstream>

#include "skplane/error.hpp"
#include "skplane/synth.hpp"

namespace skplane::cli {

namespace {

namespace fs = std::filesystem;

synth::SynthConfig load_synth_config(const RunConfig& config) {
    std::ifstream in(*config.synth_config);
    if (!in) {
        throw Error(ErrorCode::Io, "cannot open synth config " + config.synth_config->string());
    }
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::InvalidConfig, config.synth_config->string() + ": " + e.what());
    }
    auto sc = synth::config_from_json(j);
    if (config.seed) {
        sc.seed = *config.seed;
    }
    return sc;
}

void check_source(const RunConfig& config) {
    if (config.input.has_value() == config.synth_config.has_value()) {
        throw Error(ErrorCode::InvalidArgument, "specify exactly one of --input and --synth-config");
    }
}

PipelineResult from_csv(std::istream& in, const RunConfig& config) {
    PipelineResult result;
    const auto observations = ingest::parse_observations(in, config.schema);
    result.observations = observations.size();
    const auto series = ingest::compute_all_returns(observations, config.returns, config.threads);
    const auto raw = ingest::assemble_panel(series, config.min_days);
    result.panel = moments::weekly_moments(raw, config.covid_cutoff, config.threads);
    result.dropped_windows = raw.dropped;
    for (const auto& [symbol, count] : result.panel.dropped_zero_variance) result.dropped_windows[symbol] += count;
    for (const auto& [symbol, count] : result.panel.dropped_too_short) result.dropped_windows[symbol] += count;
    return result;
}

void write_file(const fs::path& path, const std::string& body) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw Error(ErrorCode::Io, "cannot write " + path.string());
    }
    out << body;
    if (!out) {
        throw Error(ErrorCode::Io, "write failed for " + path.string());
    }
}

void prepare_out(const RunConfig& config) {
    std::error_code ec;
    fs::create_directories(config.out, ec);
    if (ec || !fs::is_directory(config.out)) {
        throw Error(ErrorCode::Io, "cannot create output directory " + config.out.string());
    }
}

std::string label(econ::Model m) {
    switch (m) {
        case econ::Model::M7: return "(7)";
        case econ::Model::M8: return "(8)";
        case econ::Model::M9: return "(9)";
        case econ::Model::M11: return "(11)";
    }
    return "?";
}

// Runs `body`, mapping library errors to exit code 1.
template <typename Body>
int guarded(std::ostream& err, Body&& body) {
    try {
        return body();
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return kExitError;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitError;
    }
}

}  // namespace

PipelineResult run_pipeline(const RunConfig& config) {
    check_source(config);
    if (config.input) {
        std::ifstream in(*config.input, std::ios::binary);
        if (!in) {
            throw Error(ErrorCode::Io, "cannot open input " + config.input->string());
        }
        return from_csv(in, config);
    }
    const auto sc = load_synth_config(config);
    if (sc.dgp == synth::Dgp::RawReturns) {
        std::istringstream in(synth::generate_raw_csv(sc));
        return from_csv(in, config);
    }
    PipelineResult result;
    auto generated = synth::generate_moment_panel(sc);
    result.clip_events = generated.clip_events;
    result.observations = generated.panel.records.size();
    // the generator's covid_week defines D here; the date cutoff does not apply
    result.panel = std::move(generated.panel);
    for (const auto& [symbol, count] : result.panel.dropped_zero_variance) result.dropped_windows[symbol] = count;
    return result;
}

int cmd_moments(const RunConfig& config, std::ostream& log, std::ostream& err) {
    return guarded(err, [&] {
        const auto result = run_pipeline(config);
        if (result.panel.records.empty()) {
            err << "no computable weekly windows\n";
            return kExitEmpty;
        }
        prepare_out(config);
        std::ostringstream csv;
        moments::write_moments_csv(csv, result.panel);
        write_file(config.out / "moments.csv", csv.str());
        write_file(config.out / "descriptives.json", moments::descriptives_json(result.panel) + "\n");
        write_file(config.out / "drops.json", ingest::drop_report_json(result.dropped_windows) + "\n");

        int dropped = 0;
        for (const auto& [symbol, count] : result.dropped_windows) dropped += count;
        log << "moments: " << result.panel.records.size() << " weekly records from " << result.observations
            << " observations, " << dropped << " windows dropped\n";
        log << "wrote " << (config.out / "moments.csv").string() << ", descriptives.json, drops.json\n";
        return kExitOk;
    });
}

int cmd_fit(const RunConfig& config, std::ostream& log, std::ostream& err) {
    return guarded(err, [&] {
        const auto result = run_pipeline(config);
        if (result.panel.records.empty()) {
            err << "no computable weekly windows\n";
            return kExitEmpty;
        }
        nlohmann::ordered_json fits = nlohmann::ordered_json::array();
        for (const auto model : config.models) {
            for (const auto estimator : {econ::Estimator::RandomEffects, econ::Estimator::PooledOLS}) {
                econ::ModelReport report;
                try {
                    report = econ::report_model(result.panel, model, estimator);
                } catch (const Error& e) {
                    err << "error: model " << label(model) << " [" << econ::to_string(model) << "] "
                        << econ::to_string(estimator) << ": " << e.what() << '\n';
                    return kExitError;
                }
                const auto& a = report.fit.coefficient(econ::term::kSkew2);
                log << label(model) << ' ' << econ::to_string(estimator) << ": S^2 " << a.estimate
                    << econ::significance_stars(a.p_value) << " (" << a.std_error << "), total-effect p "
                    << report.zero_total.p_value << '\n';
                fits.push_back(econ::to_json(report));
            }
        }
        nlohmann::ordered_json doc;
        doc["nobs"] = result.panel.records.size();
        doc["covid_cutoff"] = format_date(config.covid_cutoff);
        doc["fits"] = std::move(fits);
        prepare_out(config);
        write_file(config.out / "fits.json", doc.dump(2) + "\n");
        log << "wrote " << (config.out / "fits.json").string() << '\n';
        return kExitOk;
    });
}

int cmd_plane(const RunConfig& config, std::ostream& log, std::ostream& err) {
    return guarded(err, [&] {
        const auto result = run_pipeline(config);
        if (result.panel.records.empty()) {
            err << "no computable weekly windows\n";
            return kExitEmpty;
        }
        plane::PlaneOptions options;
        options.grid = config.grid;
        const auto design = econ::build_design(result.panel, econ::ModelSpec{econ::Model::M8, true});
        const auto m8 = econ::fit_random_effects(design);
        options.quadratic = plane::QuadraticParams{m8.coefficient(econ::term::kSkew2).estimate,
                                                   m8.coefficient(econ::term::kConst).estimate};

        const auto data = plane::export_plane(result.panel, options);
        const auto heat = plane::export_heatmap(result.panel);
        prepare_out(config);
        std::ostringstream all;
        std::ostringstream pre;
        std::ostringstream post;
        std::ostringstream hm;
        plane::write_plane_csv(all, data.points, data.curves);
        plane::write_plane_csv(pre, data.pre, {});
        plane::write_plane_csv(post, data.post, {});
        plane::write_heatmap_csv(hm, heat);
        write_file(config.out / "plane.csv", all.str());
        write_file(config.out / "plane_pre.csv", pre.str());
        write_file(config.out / "plane_post.csv", post.str());
        write_file(config.out / "heatmap.csv", hm.str());

        std::size_t samples = 0;
        for (const auto& c : data.curves) samples += c.samples.size();
        log << "plane: " << data.points.size() << " points (" << data.pre.size() << " pre, " << data.post.size()
            << " post), " << data.curves.size() << " curves, " << samples << " curve samples; quadratic K = "
            << options.quadratic->a << " S^2 + " << options.quadratic->b << '\n';
        log << "wrote plane.csv, plane_pre.csv, plane_post.csv, heatmap.csv to " << config.out.string() << '\n';
        return kExitOk;
    });
}

int cmd_synth(const RunConfig& config, std::ostream& log, std::ostream& err) {
    return guarded(err, [&] {
        if (!config.synth_config) {
            throw Error(ErrorCode::InvalidArgument, "synth needs --synth-config");
        }
        const auto sc = load_synth_config(config);
        prepare_out(config);
        if (sc.dgp == synth::Dgp::RawReturns) {
            write_file(config.out / "synth.csv", synth::generate_raw_csv(sc));
            log << "synth: " << sc.n_assets << " assets x " << 7 * sc.n_weeks << " days -> "
                << (config.out / "synth.csv").string() << '\n';
        } else {
            const auto generated = synth::generate_moment_panel(sc);
            std::ostringstream csv;
            moments::write_moments_csv(csv, generated.panel);
            write_file(config.out / "synth_moments.csv", csv.str());
            log << "synth: " << generated.panel.records.size() << " moment records, " << generated.clip_events
                << " Pearson clips -> " << (config.out / "synth_moments.csv").string() << '\n';
        }
        write_file(config.out / "synth_config.json", synth::to_json(sc).dump(2) + "\n");
        return kExitOk;
    });
}

}  // namespace skplane::cli
