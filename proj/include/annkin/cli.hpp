#pragma once

// Command-line harness: flag/config-file parsing into a validated RunConfig,
// then dispatch to the solver and analysis layers with CSV/SVG/text artifacts
// written under the output directory.
//
// Exit codes: 0 success, 2 configuration error, 3 numeric failure, 4 I/O
// failure.

#include "annkin/analysis.hpp"
#include "annkin/model.hpp"
#include "annkin/solver.hpp"

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace annkin::cli {

/// File write/creation failure (mapped to exit code 4).
class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Thrown by parse_config after fully handling a terminating flag (--help);
/// carries the process exit code.
struct EarlyExit {
    int code = 0;
};

enum class Artifact {
    TrajectoryCsv,  ///< trajectory.csv: t,a per grid node (single-run mode)
    TableCsv,       ///< table.csv: one row per dt, one column per sample time
    OrderCsv,       ///< order.csv: t plus p(t) per halving triple
    FitTxt,         ///< fit.txt: power-law parameters and residuals
    Figure1Svg,     ///< density + fit overlay and the fit residual panel
    Figure2Svg,     ///< p(t) curves for all triples
};

struct RunConfig {
    ModelParams params{0.1, 0.4, 0.001, 5000.0};
    std::optional<double> dt;        ///< single-run mode
    std::vector<double> dt_ladder;   ///< ladder mode; mutually exclusive with dt
    std::optional<double> t_end;
    SchemeKind scheme = SchemeKind::SecondOrder;
    std::vector<double> sample_times{0.01, 0.1, 1.0, 10.0};
    std::optional<FitWindow> fit_window;
    std::string out_dir = ".";
    std::vector<Artifact> emit;      ///< empty -> mode-appropriate defaults
    int threads = 1;

    bool ladder_mode() const { return !dt_ladder.empty(); }

    /// Explicit --t-end, else 10 in single-run mode, else the largest sample
    /// time in ladder mode.
    double effective_t_end() const;

    /// Requested artifacts, or the defaults for the active mode.
    std::vector<Artifact> effective_emit() const;

    /// Throws std::invalid_argument naming the offending key.
    void validate() const;
};

/// Parses command-line arguments (program name excluded) plus an optional
/// `key = value` config file given via --config; command-line flags override
/// file values and unknown keys are rejected. Returns a validated RunConfig.
RunConfig parse_config(const std::vector<std::string>& args);

/// Executes the configured run and writes its artifacts. Returns 0 on
/// success; failures propagate as exceptions (std::invalid_argument,
/// NumericError, IoError).
int run(const RunConfig& config);

/// Process entry point: parse, run, and map failures to exit codes with
/// diagnostics on stderr.
int cli_main(int argc, const char* const* argv);

} // namespace annkin::cli
