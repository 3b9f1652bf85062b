#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ergokit/model.hpp"

namespace ergokit::cli {

enum class Experiment { Woff, Spectrum, Rstat, Sff, Otoc, Krylov, Entanglement, Quench, VerifyBch };

const char* experiment_name(Experiment e);
std::optional<Experiment> experiment_from_name(const std::string& name);

struct GridSpec {
    double min = 0.0;
    double max = 0.0;
    int count = 0;
    bool log = false;

    std::vector<double> values() const;
};

/// Parse "min:max:count" or "min:max:count:log".
GridSpec parse_grid(const std::string& text);

struct RunConfig {
    ChainConfig chain;  // N=7, J1=1, Jr=1, hx=1.05, hz=0.5 defaults
    std::optional<Experiment> experiment;
    std::optional<GridSpec> jr_grid;
    std::optional<GridSpec> time_grid;  // per-experiment default when unset
    std::vector<std::uint64_t> seeds{0};
    std::string output_dir = ".";
    enum class Format { Csv, Json, Both } format = Format::Both;

    // spectral knobs
    double eta = 0.5;
    int window = 51;
    int degree = 10;
    double theta = 0.1;
    int sustained = 0;  // 0: use the smoothing window

    // dynamics knobs
    int site_i = 1;
    int site_j = 0;  // 0: use N

    // krylov knobs
    std::string op = "o1";  // o1|o2|random
    double t_sat = 5000.0;
    bool out_of_core = false;

    // entanglement knobs
    int cut = 0;  // 0: use (N-1)/2
    std::string initial_state = "all_down";

    std::string sweep = "jr";  // spectrum experiment: jr|j
    double memory_cap_gb = 8.0;
};

/// Line-oriented key=value text; '#' starts a comment. Unknown keys and
/// malformed values raise ConfigError naming the line and field.
RunConfig parse_config(const std::string& text);

struct ExitReport {
    int code = 0;  // 0 ok, 2 config error, 3 resource refusal
    std::string message;
    std::vector<std::string> files_written;
};

/// Execute one experiment, writing CSV/JSON artifacts into output_dir.
/// Identical config and seeds produce byte-identical files.
ExitReport run(const RunConfig& config);

}  // namespace ergokit::cli
