#include "annkin/cli.hpp"

#include "annkin/csv.hpp"
#include "annkin/errors.hpp"
#include "annkin/svg.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <sstream>

namespace annkin::cli {

namespace {

constexpr const char* kEmitNames =
    "trajectory_csv,table_csv,order_csv,fit_txt,figure1_svg,figure2_svg";

bool is_halving_ladder(const std::vector<double>& dts) {
    for (std::size_t i = 0; i + 1 < dts.size(); ++i)
        if (2.0 * dts[i + 1] != dts[i]) return false;
    return true;
}

double parse_double(const std::string& text, const char* key) {
    std::size_t idx = 0;
    double v = 0.0;
    try {
        v = std::stod(text, &idx);
    } catch (const std::exception&) {
        idx = 0;
    }
    while (idx < text.size() && std::isspace(static_cast<unsigned char>(text[idx]))) ++idx;
    if (text.empty() || idx != text.size())
        throw std::invalid_argument(std::string(key) + ": cannot parse number '" + text + "'");
    return v;
}

FitWindow parse_fit_window(const std::string& text) {
    const auto colon = text.find(':');
    if (colon == std::string::npos)
        throw std::invalid_argument("--fit-window expects LO:HI, got '" + text + "'");
    FitWindow w;
    w.lo = parse_double(text.substr(0, colon), "--fit-window");
    w.hi = parse_double(text.substr(colon + 1), "--fit-window");
    return w;
}

Artifact artifact_from_name(const std::string& name) {
    if (name == "trajectory_csv") return Artifact::TrajectoryCsv;
    if (name == "table_csv") return Artifact::TableCsv;
    if (name == "order_csv") return Artifact::OrderCsv;
    if (name == "fit_txt") return Artifact::FitTxt;
    if (name == "figure1_svg") return Artifact::Figure1Svg;
    if (name == "figure2_svg") return Artifact::Figure2Svg;
    throw std::invalid_argument("--emit: unknown artifact '" + name + "' (valid: " +
                                kEmitNames + ")");
}

bool wants(const std::vector<Artifact>& artifacts, Artifact a) {
    return std::find(artifacts.begin(), artifacts.end(), a) != artifacts.end();
}

void write_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    out << content;
    out.flush();
    if (!out) throw IoError("write failed for " + path.string());
    std::cout << "wrote " << path.string() << "\n";
}

std::string trajectory_csv(const Trajectory& traj) {
    std::string s = "t,a\n";
    for (std::int64_t k = 0; k <= traj.steps(); ++k) {
        s += fmt_g9(static_cast<double>(k) * traj.dt);
        s += ',';
        s += fmt_g9(traj.values[static_cast<std::size_t>(k)]);
        s += '\n';
    }
    return s;
}

std::string table_csv(const RefinementTable& table) {
    std::string s = "dt";
    for (const double t : table.sample_times) s += ",a(t=" + fmt_g9(t) + ")";
    s += '\n';
    for (std::size_t r = 0; r < table.dts.size(); ++r) {
        s += fmt_g9(table.dts[r]);
        for (const double v : table.values[r]) {
            s += ',';
            s += fmt_g9(v);
        }
        s += '\n';
    }
    return s;
}

std::string order_csv(const std::vector<double>& ts,
                      const std::vector<std::vector<OrderEstimate>>& triples) {
    std::string s = "t";
    for (std::size_t i = 0; i < triples.size(); ++i) s += ",p_triple" + std::to_string(i + 1);
    s += '\n';
    for (std::size_t row = 0; row < ts.size(); ++row) {
        s += fmt_g9(ts[row]);
        for (const auto& series : triples) {
            s += ',';
            if (series[row].defined) s += fmt_g9(series[row].p);
        }
        s += '\n';
    }
    return s;
}

std::string fit_txt(const FitResult& fit) {
    std::string s;
    s += "amplitude = " + fmt_g9(fit.amplitude) + "\n";
    s += "shift = " + fmt_g9(fit.shift) + "\n";
    s += "exponent = " + fmt_g9(fit.exponent) + "\n";
    s += "window = " + fmt_g9(fit.window.lo) + ":" + fmt_g9(fit.window.hi) + "\n";
    s += "max_abs_log10_error = " + fmt_g9(fit.max_abs_log10_error) + "\n";
    s += "max_rel_error = " + fmt_g9(fit.max_rel_error) + "\n";
    return s;
}

std::string figure1_svg(const Trajectory& traj, const FitResult& fit) {
    SvgPanel density;
    density.title = "density decay and power-law fit";
    density.x_label = "t";
    density.y_label = "a(t)";
    density.y_log10 = true;

    SvgSeries computed;
    computed.label = "computed";
    for (std::int64_t k = 0; k <= traj.steps(); ++k) {
        computed.x.push_back(static_cast<double>(k) * traj.dt);
        computed.y.push_back(traj.values[static_cast<std::size_t>(k)]);
    }
    density.series.push_back(std::move(computed));

    SvgSeries fitted;
    fitted.label = "fit";
    SvgSeries residual;
    residual.label.clear();
    const auto k_lo = static_cast<std::int64_t>(std::ceil(fit.window.lo / traj.dt - 1e-7));
    const auto k_hi = static_cast<std::int64_t>(std::floor(fit.window.hi / traj.dt + 1e-7));
    for (std::int64_t k = k_lo; k <= k_hi; ++k) {
        const double t = static_cast<double>(k) * traj.dt;
        const double model = fit.amplitude * std::pow(t - fit.shift, -fit.exponent);
        fitted.x.push_back(t);
        fitted.y.push_back(model);
        residual.x.push_back(t);
        residual.y.push_back(
            std::abs(std::log10(traj.values[static_cast<std::size_t>(k)]) - std::log10(model)));
    }
    density.series.push_back(std::move(fitted));

    SvgPanel error;
    error.title = "fit residual on the window";
    error.x_label = "t";
    error.y_label = "|log10 a - log10 fit|";
    error.series.push_back(std::move(residual));

    const SvgPanel panels[] = {std::move(density), std::move(error)};
    return render_svg(panels);
}

std::string figure2_svg(const std::vector<double>& ts,
                        const std::vector<std::vector<OrderEstimate>>& triples) {
    SvgPanel panel;
    panel.title = "empirical convergence order";
    panel.x_label = "t";
    panel.y_label = "p(t)";
    for (const auto& series : triples) {
        SvgSeries line;
        line.label = "dt=" + fmt_g9(series.front().dts[0]) + " triple";
        for (std::size_t i = 0; i < ts.size(); ++i) {
            line.x.push_back(ts[i]);
            line.y.push_back(series[i].defined ? series[i].p
                                               : std::numeric_limits<double>::quiet_NaN());
        }
        panel.series.push_back(std::move(line));
    }
    const SvgPanel panels[] = {std::move(panel)};
    return render_svg(panels);
}

int run_single(const RunConfig& config, const std::vector<Artifact>& artifacts,
               double horizon) {
    const double dt = *config.dt;
    const std::int64_t total_steps = grid_step_count(dt, horizon);

    ProgressFn progress;
    if (total_steps >= 200000)
        progress = [](std::int64_t k, std::int64_t total) {
            std::fprintf(stderr, "\r  step %lld / %lld", static_cast<long long>(k),
                         static_cast<long long>(total));
            if (k == total) std::fputc('\n', stderr);
        };

    const Trajectory traj = solve_trajectory(config.params, dt, horizon, config.scheme, progress);
    std::cout << "run: dt = " << fmt_g9(dt) << ", steps = " << total_steps << ", scheme = "
              << scheme_order(config.scheme) << ", a(t_end) = " << fmt_g9(traj.values.back())
              << "\n";

    const std::filesystem::path out_dir(config.out_dir);
    if (wants(artifacts, Artifact::TrajectoryCsv))
        write_file(out_dir / "trajectory.csv", trajectory_csv(traj));

    if (wants(artifacts, Artifact::FitTxt) || wants(artifacts, Artifact::Figure1Svg)) {
        const FitResult fit = power_law_fit(traj, *config.fit_window);
        std::cout << "fit: amplitude = " << fmt_g9(fit.amplitude) << ", shift = "
                  << fmt_g9(fit.shift) << ", exponent = " << fmt_g9(fit.exponent)
                  << ", max |log10 residual| = " << fmt_g9(fit.max_abs_log10_error) << "\n";
        if (wants(artifacts, Artifact::FitTxt)) write_file(out_dir / "fit.txt", fit_txt(fit));
        if (wants(artifacts, Artifact::Figure1Svg))
            write_file(out_dir / "figure1.svg", figure1_svg(traj, fit));
    }
    return 0;
}

int run_ladder(const RunConfig& config, const std::vector<Artifact>& artifacts,
               double horizon) {
    const std::vector<Trajectory> runs =
        solve_ladder(config.params, config.dt_ladder, horizon, config.scheme, config.threads);
    std::cout << "ladder: " << runs.size() << " runs to t_end = " << fmt_g9(horizon)
              << ", scheme = " << scheme_order(config.scheme) << ", threads = "
              << config.threads << "\n";

    const std::filesystem::path out_dir(config.out_dir);
    if (wants(artifacts, Artifact::TableCsv))
        write_file(out_dir / "table.csv", table_csv(refinement_values(runs, config.sample_times)));

    if (wants(artifacts, Artifact::OrderCsv) || wants(artifacts, Artifact::Figure2Svg)) {
        std::vector<double> ts;
        const Trajectory& coarse = runs.front();
        ts.reserve(static_cast<std::size_t>(coarse.steps()));
        for (std::int64_t k = 1; k <= coarse.steps(); ++k)
            ts.push_back(static_cast<double>(k) * coarse.dt);

        std::vector<std::vector<OrderEstimate>> triples;
        for (std::size_t i = 0; i + 2 < runs.size(); ++i)
            triples.push_back(order_series(runs[i], runs[i + 1], runs[i + 2], ts));

        if (wants(artifacts, Artifact::OrderCsv))
            write_file(out_dir / "order.csv", order_csv(ts, triples));
        if (wants(artifacts, Artifact::Figure2Svg))
            write_file(out_dir / "figure2.svg", figure2_svg(ts, triples));
    }
    return 0;
}

} // namespace

double RunConfig::effective_t_end() const {
    if (t_end) return *t_end;
    if (ladder_mode() && !sample_times.empty())
        return *std::max_element(sample_times.begin(), sample_times.end());
    return 10.0;
}

std::vector<Artifact> RunConfig::effective_emit() const {
    if (!emit.empty()) return emit;
    std::vector<Artifact> def;
    if (ladder_mode()) {
        def.push_back(Artifact::TableCsv);
        if (dt_ladder.size() >= 3 && is_halving_ladder(dt_ladder))
            def.push_back(Artifact::OrderCsv);
    } else {
        def.push_back(Artifact::TrajectoryCsv);
        if (fit_window) def.push_back(Artifact::FitTxt);
    }
    return def;
}

void RunConfig::validate() const {
    params.validate();

    if (!dt && dt_ladder.empty())
        throw std::invalid_argument("one of --dt or --dt-ladder is required");
    if (dt && !dt_ladder.empty())
        throw std::invalid_argument("--dt and --dt-ladder are mutually exclusive");
    if (dt && (!std::isfinite(*dt) || *dt <= 0.0))
        throw std::invalid_argument("--dt must be positive");
    for (const double d : dt_ladder)
        if (!std::isfinite(d) || d <= 0.0)
            throw std::invalid_argument("--dt-ladder entries must be positive");
    if (t_end && (!std::isfinite(*t_end) || *t_end <= 0.0))
        throw std::invalid_argument("--t-end must be positive");
    if (threads < 1) throw std::invalid_argument("--threads must be >= 1");
    if (out_dir.empty()) throw std::invalid_argument("--out must not be empty");
    for (const double t : sample_times)
        if (!std::isfinite(t) || t < 0.0)
            throw std::invalid_argument("--sample-times entries must be >= 0");
    if (ladder_mode() && sample_times.empty())
        throw std::invalid_argument("--sample-times must not be empty in ladder mode");

    const double horizon = effective_t_end();
    if (dt && horizon < *dt)
        throw std::invalid_argument("--t-end must be at least one --dt step");
    if (ladder_mode())
        for (const double t : sample_times)
            if (t > horizon * (1.0 + 1e-12))
                throw std::invalid_argument("--sample-times entry beyond --t-end");
    if (fit_window) {
        if (!std::isfinite(fit_window->lo) || !std::isfinite(fit_window->hi) ||
            fit_window->lo < 0.0 || fit_window->lo >= fit_window->hi ||
            fit_window->hi > horizon * (1.0 + 1e-12))
            throw std::invalid_argument(
                "--fit-window must satisfy 0 <= LO < HI <= t_end");
    }

    for (const Artifact a : effective_emit()) {
        const bool single_only = a == Artifact::TrajectoryCsv || a == Artifact::FitTxt ||
                                 a == Artifact::Figure1Svg;
        if (single_only && !dt)
            throw std::invalid_argument("--emit: artifact needs single-run mode (--dt)");
        if (!single_only && !ladder_mode())
            throw std::invalid_argument("--emit: artifact needs ladder mode (--dt-ladder)");
        if ((a == Artifact::FitTxt || a == Artifact::Figure1Svg) && !fit_window)
            throw std::invalid_argument("--emit: fit artifacts need --fit-window");
        if ((a == Artifact::OrderCsv || a == Artifact::Figure2Svg) &&
            (dt_ladder.size() < 3 || !is_halving_ladder(dt_ladder)))
            throw std::invalid_argument(
                "--emit: order artifacts need a --dt-ladder of at least 3 exact halvings");
    }
}

RunConfig parse_config(const std::vector<std::string>& args) {
    RunConfig cfg;

    CLI::App app{"Solves the mean-density decay of diffusion-limited pair annihilation\n"
                 "(implicit product-integration scheme) and emits CSV/SVG artifacts."};
    app.option_defaults()->always_capture_default();

    app.add_option("--lambda", cfg.params.lambda, "reaction rate constant");
    app.add_option("--diffusion", cfg.params.diffusion, "diffusion constant");
    app.add_option("--ell", cfg.params.ell, "regularization length");
    app.add_option("--a0", cfg.params.a0, "initial density");

    double dt_value = 0.0;
    auto* dt_opt = app.add_option("--dt", dt_value, "time step (single-run mode)");
    app.add_option("--dt-ladder", cfg.dt_ladder,
                   "comma-separated time steps, coarse to fine (ladder mode)")
        ->delimiter(',');
    double t_end_value = 0.0;
    auto* t_end_opt = app.add_option("--t-end", t_end_value,
                                     "final time (default 10, or the largest sample time "
                                     "in ladder mode)");
    int scheme_order_value = 2;
    app.add_option("--scheme", scheme_order_value, "derivative order")
        ->check(CLI::IsMember({1, 2}));
    app.add_option("--sample-times", cfg.sample_times,
                   "comma-separated table sample times (ladder mode)")
        ->delimiter(',');
    std::string fit_window_text;
    auto* fit_opt = app.add_option("--fit-window", fit_window_text,
                                   "power-law fit window LO:HI");
    app.add_option("--out", cfg.out_dir, "output directory");
    std::vector<std::string> emit_names;
    app.add_option("--emit", emit_names,
                   std::string("comma-separated artifacts among: ") + kEmitNames)
        ->delimiter(',');
    app.add_option("--threads", cfg.threads, "worker threads for ladder runs")
        ->check(CLI::PositiveNumber);
    app.set_config("--config", "", "configuration file with `key = value` lines");
    app.allow_config_extras(CLI::config_extras_mode::error);
    app.footer("Examples:\n"
               "  annkin --dt 0.0003125 --t-end 10 --fit-window 7.5:10 --out results\n"
               "  annkin --dt-ladder 0.01,0.005,0.0025,0.00125,0.000625,0.0003125 \\\n"
               "         --sample-times 0.01,0.1,1,10 --out results");

    std::vector<const char*> argv;
    argv.reserve(args.size() + 1);
    argv.push_back("annkin");
    for (const auto& a : args) argv.push_back(a.c_str());

    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp&) {
        std::cout << app.help();
        throw EarlyExit{0};
    } catch (const CLI::ParseError& e) {
        throw std::invalid_argument(e.what());
    }

    if (dt_opt->count() > 0) cfg.dt = dt_value;
    if (t_end_opt->count() > 0) cfg.t_end = t_end_value;
    cfg.scheme = scheme_from_order(scheme_order_value);
    if (fit_opt->count() > 0) cfg.fit_window = parse_fit_window(fit_window_text);
    for (const auto& name : emit_names) cfg.emit.push_back(artifact_from_name(name));

    cfg.validate();
    return cfg;
}

int run(const RunConfig& config) {
    config.validate();
    const std::vector<Artifact> artifacts = config.effective_emit();
    const double horizon = config.effective_t_end();

    std::error_code ec;
    std::filesystem::create_directories(config.out_dir, ec);
    if (ec)
        throw IoError("cannot create output directory " + config.out_dir + ": " + ec.message());

    return config.ladder_mode() ? run_ladder(config, artifacts, horizon)
                                : run_single(config, artifacts, horizon);
}

int cli_main(int argc, const char* const* argv) {
    std::vector<std::string> args;
    args.reserve(argc > 0 ? static_cast<std::size_t>(argc - 1) : 0);
    for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);

    try {
        return run(parse_config(args));
    } catch (const EarlyExit& e) {
        return e.code;
    } catch (const NumericError& e) {
        std::cerr << "numeric failure: " << e.what() << "\n";
        return 3;
    } catch (const IoError& e) {
        std::cerr << "I/O failure: " << e.what() << "\n";
        return 4;
    } catch (const std::filesystem::filesystem_error& e) {
        std::cerr << "I/O failure: " << e.what() << "\n";
        return 4;
    } catch (const std::invalid_argument& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
}

} // namespace annkin::cli
