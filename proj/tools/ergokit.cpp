// Experiment runner for the inhomogeneous transverse-field Ising chain.
// Every diagnostic is a subcommand; outputs are deterministic CSV/JSON files.

#include <cstdio>
#include <fstream>
#include <sstream>

#include "CLI11.hpp"
#include "ergokit/cli.hpp"

namespace {

using ergokit::cli::RunConfig;

struct Flags {
    std::string config_file;
    std::optional<int> n;
    std::optional<double> j1, jr, hx, hz;
    std::optional<std::string> jr_grid, time_grid, seeds, output_dir, format;
    std::optional<double> eta, theta, t_sat, memory_cap_gb, points;
    std::optional<int> window, degree, sustained, site_i, site_j, cut;
    std::optional<std::string> op, initial_state, sweep;
    std::optional<bool> out_of_core;
};

void add_common(CLI::App* cmd, Flags& f) {
    cmd->add_option("--config", f.config_file, "key=value config file (flags override)");
    cmd->add_option("--n", f.n, "number of sites (odd, 3..13)");
    cmd->add_option("--j1", f.j1, "left-half coupling");
    cmd->add_option("--jr", f.jr, "inhomogeneity ratio J2/J1");
    cmd->add_option("--hx", f.hx, "transverse field");
    cmd->add_option("--hz", f.hz, "longitudinal field");
    cmd->add_option("--jr-grid", f.jr_grid, "J_r sweep as min:max:count[:log]");
    cmd->add_option("--time-grid", f.time_grid, "time grid as min:max:count[:log]");
    cmd->add_option("--seeds", f.seeds, "comma-separated RNG seeds");
    cmd->add_option("--output-dir,-o", f.output_dir, "output directory");
    cmd->add_option("--format", f.format, "csv|json|both");
    cmd->add_option("--memory-cap-gb", f.memory_cap_gb, "refuse runs above this estimate");
}

int apply_and_run(ergokit::cli::Experiment experiment, const Flags& f) {
    RunConfig cfg;
    if (!f.config_file.empty()) {
        std::ifstream in(f.config_file);
        if (!in) {
            std::fprintf(stderr, "error: cannot read config file %s\n", f.config_file.c_str());
            return 2;
        }
        std::ostringstream text;
        text << in.rdbuf();
        try {
            cfg = ergokit::cli::parse_config(text.str());
        } catch (const ergokit::ConfigError& e) {
            std::fprintf(stderr, "error: %s\n", e.what());
            return 2;
        }
    }
    cfg.experiment = experiment;

    if (f.n) cfg.chain.n_sites = *f.n;
    if (f.j1) cfg.chain.j1 = *f.j1;
    if (f.jr) cfg.chain.j_ratio = *f.jr;
    if (f.hx) cfg.chain.hx = *f.hx;
    if (f.hz) cfg.chain.hz = *f.hz;
    try {
        if (f.jr_grid) cfg.jr_grid = ergokit::cli::parse_grid(*f.jr_grid);
        if (f.time_grid) cfg.time_grid = ergokit::cli::parse_grid(*f.time_grid);
        if (f.points) {
            // shorthand for the paper's SFF grid with an adjustable density
            ergokit::cli::GridSpec g{1e-6, 100.0, static_cast<int>(*f.points), false};
            cfg.time_grid = g;
        }
    } catch (const ergokit::ConfigError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
    if (f.seeds) {
        cfg.seeds.clear();
        std::istringstream list(*f.seeds);
        std::string item;
        while (std::getline(list, item, ',')) cfg.seeds.push_back(std::stoull(item));
    }
    if (f.output_dir) cfg.output_dir = *f.output_dir;
    if (f.format) {
        if (*f.format == "csv")
            cfg.format = RunConfig::Format::Csv;
        else if (*f.format == "json")
            cfg.format = RunConfig::Format::Json;
        else if (*f.format == "both")
            cfg.format = RunConfig::Format::Both;
        else {
            std::fprintf(stderr, "error: format must be csv|json|both\n");
            return 2;
        }
    }
    if (f.eta) cfg.eta = *f.eta;
    if (f.theta) cfg.theta = *f.theta;
    if (f.window) cfg.window = *f.window;
    if (f.degree) cfg.degree = *f.degree;
    if (f.sustained) cfg.sustained = *f.sustained;
    if (f.site_i) cfg.site_i = *f.site_i;
    if (f.site_j) cfg.site_j = *f.site_j;
    if (f.op) cfg.op = *f.op;
    if (f.t_sat) cfg.t_sat = *f.t_sat;
    if (f.out_of_core) cfg.out_of_core = *f.out_of_core;
    if (f.cut) cfg.cut = *f.cut;
    if (f.initial_state) cfg.initial_state = *f.initial_state;
    if (f.sweep) cfg.sweep = *f.sweep;
    if (f.memory_cap_gb) cfg.memory_cap_gb = *f.memory_cap_gb;

    const auto report = ergokit::cli::run(cfg);
    if (!report.message.empty()) std::fprintf(stderr, "error: %s\n", report.message.c_str());
    for (const auto& file : report.files_written) std::printf("wrote %s\n", file.c_str());
    return report.code;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"ergodicity diagnostics for the inhomogeneous transverse-field Ising chain"};
    app.require_subcommand(1);

    Flags flags;
    int exit_code = 0;

    auto make = [&](const std::string& name, const std::string& help,
                    ergokit::cli::Experiment experiment) {
        CLI::App* cmd = app.add_subcommand(name, help);
        add_common(cmd, flags);
        cmd->callback([&flags, &exit_code, experiment] {
            exit_code = apply_and_run(experiment, flags);
        });
        return cmd;
    };

    make("woff", "off-diagonal weight vs J_r, with the power-law fit",
         ergokit::cli::Experiment::Woff);
    CLI::App* spectrum = make("spectrum", "eigenvalue sweep over J or J_r",
                              ergokit::cli::Experiment::Spectrum);
    spectrum->add_option("--sweep", flags.sweep, "jr|j");
    make("rstat", "mean adjacent-gap ratio over a J_r grid", ergokit::cli::Experiment::Rstat);
    CLI::App* sff = make("sff", "spectral form factor, Thouless time and g",
                         ergokit::cli::Experiment::Sff);
    sff->add_option("--points", flags.points, "points of the default [1e-6,100] grid");
    sff->add_option("--eta", flags.eta, "Gaussian filter width");
    sff->add_option("--window", flags.window, "moving-average window (odd)");
    sff->add_option("--theta", flags.theta, "GOE overlap tolerance");
    sff->add_option("--sustained", flags.sustained, "required overlap run (samples)");
    sff->add_option("--degree", flags.degree, "unfolding polynomial degree");
    CLI::App* otoc = make("otoc", "OTOC series, early-time kappa and b fits",
                          ergokit::cli::Experiment::Otoc);
    otoc->add_option("--site-i", flags.site_i, "first site (default 1)");
    otoc->add_option("--site-j", flags.site_j, "second site (default N)");
    CLI::App* krylov = make("krylov", "Arnoldi coefficients, K_C(t), IPR, S_K",
                            ergokit::cli::Experiment::Krylov);
    krylov->add_option("--op", flags.op, "seed operator: o1|o2|random");
    krylov->add_option("--t-sat", flags.t_sat, "snapshot time for the overlap profile");
    krylov->add_flag("--out-of-core", [&flags](std::int64_t) { flags.out_of_core = true; },
                     "stream the basis through a scratch file");
    CLI::App* ent = make("entanglement", "eigenstate entanglement scan",
                         ergokit::cli::Experiment::Entanglement);
    ent->add_option("--cut", flags.cut, "bond index (default (N-1)/2)");
    CLI::App* quench = make("quench", "entanglement growth from a product state",
                            ergokit::cli::Experiment::Quench);
    quench->add_option("--cut", flags.cut, "bond index (default (N-1)/2)");
    quench->add_option("--initial-state", flags.initial_state, "all_down|neel|all_up");
    make("verify-bch", "check the N=3 nested commutators against closed forms",
         ergokit::cli::Experiment::VerifyBch);

    CLI11_PARSE(app, argc, argv);
    return exit_code;
}
