#include "ergokit/cli.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <sstream>

#include "ergokit/dynamics.hpp"
#include "ergokit/entanglement.hpp"
#include "ergokit/krylov.hpp"
#include "ergokit/spectral.hpp"
#include "json.hpp"

extern "C" void openblas_set_num_threads(int);

namespace ergokit::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct ResourceRefusal : Error {
    using Error::Error;
};

std::string fmt_short(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%g", x);
    return buf;
}

class CsvWriter {
  public:
    CsvWriter(const fs::path& path, const std::vector<std::string>& header) {
        file_ = std::fopen(path.string().c_str(), "wb");
        if (!file_) throw Error("cannot open " + path.string() + " for writing");
        for (std::size_t c = 0; c < header.size(); ++c)
            std::fprintf(file_, "%s%s", header[c].c_str(), c + 1 < header.size() ? "," : "\n");
    }
    ~CsvWriter() {
        if (file_) std::fclose(file_);
    }
    CsvWriter(const CsvWriter&) = delete;
    CsvWriter& operator=(const CsvWriter&) = delete;

    void row(const std::vector<double>& values) {
        for (std::size_t c = 0; c < values.size(); ++c)
            std::fprintf(file_, "%.17g%s", values[c], c + 1 < values.size() ? "," : "\n");
    }

  private:
    std::FILE* file_ = nullptr;
};

void write_text(const fs::path& path, const std::string& text) {
    std::FILE* f = std::fopen(path.string().c_str(), "wb");
    if (!f) throw Error("cannot open " + path.string() + " for writing");
    std::fwrite(text.data(), 1, text.size(), f);
    std::fclose(f);
}

json grid_to_json(const std::optional<GridSpec>& g) {
    if (!g) return nullptr;
    return json{{"min", g->min}, {"max", g->max}, {"count", g->count},
                {"spacing", g->log ? "log" : "linear"}};
}

json config_to_json(const RunConfig& c) {
    json j;
    j["experiment"] = c.experiment ? experiment_name(*c.experiment) : "";
    j["chain"] = {{"n_sites", c.chain.n_sites}, {"j1", c.chain.j1},
                  {"j_ratio", c.chain.j_ratio}, {"j2", c.chain.j2()},
                  {"hx", c.chain.hx},           {"hz", c.chain.hz}};
    j["jr_grid"] = grid_to_json(c.jr_grid);
    j["time_grid"] = grid_to_json(c.time_grid);
    j["seeds"] = c.seeds;
    j["output_dir"] = c.output_dir;
    j["format"] = c.format == RunConfig::Format::Csv    ? "csv"
                  : c.format == RunConfig::Format::Json ? "json"
                                                        : "both";
    j["eta"] = c.eta;
    j["window"] = c.window;
    j["degree"] = c.degree;
    j["theta"] = c.theta;
    j["sustained"] = c.sustained;
    j["site_i"] = c.site_i;
    j["site_j"] = c.site_j;
    j["op"] = c.op;
    j["t_sat"] = c.t_sat;
    j["out_of_core"] = c.out_of_core;
    j["cut"] = c.cut;
    j["initial_state"] = c.initial_state;
    j["sweep"] = c.sweep;
    j["memory_cap_gb"] = c.memory_cap_gb;
    return j;
}

double dense_memory_estimate_gb(int n_sites, int matrices) {
    const double d = std::pow(2.0, n_sites);
    return matrices * d * d * 8.0 / (1024.0 * 1024.0 * 1024.0);
}

void check_memory(double estimate_gb, double cap_gb, const std::string& what) {
    if (estimate_gb > cap_gb) {
        std::ostringstream msg;
        msg << what << " needs an estimated " << estimate_gb << " GB, above the "
            << cap_gb << " GB cap";
        throw ResourceRefusal(msg.str());
    }
}

std::vector<double> resolved_jr_grid(const RunConfig& c) {
    if (c.jr_grid) return c.jr_grid->values();
    return {c.chain.j_ratio};
}

std::vector<double> resolved_time_grid(const RunConfig& c, const GridSpec& fallback) {
    const GridSpec g = c.time_grid ? *c.time_grid : fallback;
    return g.values();
}

int resolved_cut(const RunConfig& c) { return c.cut > 0 ? c.cut : (c.chain.n_sites - 1) / 2; }

ChainConfig with_jr(ChainConfig chain, double jr) {
    chain.j_ratio = jr;
    return chain;
}

}  // namespace

const char* experiment_name(Experiment e) {
    switch (e) {
        case Experiment::Woff: return "woff";
        case Experiment::Spectrum: return "spectrum";
        case Experiment::Rstat: return "rstat";
        case Experiment::Sff: return "sff";
        case Experiment::Otoc: return "otoc";
        case Experiment::Krylov: return "krylov";
        case Experiment::Entanglement: return "entanglement";
        case Experiment::Quench: return "quench";
        case Experiment::VerifyBch: return "verify-bch";
    }
    return "?";
}

std::optional<Experiment> experiment_from_name(const std::string& name) {
    static const std::vector<std::pair<std::string, Experiment>> table = {
        {"woff", Experiment::Woff},       {"spectrum", Experiment::Spectrum},
        {"rstat", Experiment::Rstat},     {"sff", Experiment::Sff},
        {"otoc", Experiment::Otoc},       {"krylov", Experiment::Krylov},
        {"entanglement", Experiment::Entanglement}, {"quench", Experiment::Quench},
        {"verify-bch", Experiment::VerifyBch}};
    for (const auto& [n, e] : table)
        if (n == name) return e;
    return std::nullopt;
}

std::vector<double> GridSpec::values() const {
    if (count < 1) throw ConfigError("grid: count must be >= 1");
    if (log && min <= 0.0) throw ConfigError("grid: log spacing requires min > 0");
    std::vector<double> out(count);
    if (count == 1) {
        out[0] = min;
        return out;
    }
    if (log) {
        const double lmin = std::log10(min), lmax = std::log10(max);
        for (int k = 0; k < count; ++k)
            out[k] = std::pow(10.0, lmin + (lmax - lmin) * k / (count - 1));
    } else {
        for (int k = 0; k < count; ++k) out[k] = min + (max - min) * k / (count - 1);
    }
    return out;
}

GridSpec parse_grid(const std::string& text) {
    GridSpec g;
    std::vector<std::string> parts;
    std::string token;
    std::istringstream in(text);
    while (std::getline(in, token, ':')) parts.push_back(token);
    if (parts.size() != 3 && parts.size() != 4)
        throw ConfigError("grid '" + text + "': expected min:max:count[:log]");
    try {
        g.min = std::stod(parts[0]);
        g.max = std::stod(parts[1]);
        g.count = static_cast<int>(std::stod(parts[2]));
    } catch (const std::exception&) {
        throw ConfigError("grid '" + text + "': numeric fields did not parse");
    }
    if (parts.size() == 4) {
        if (parts[3] == "log")
            g.log = true;
        else if (parts[3] != "linear")
            throw ConfigError("grid '" + text + "': spacing must be linear or log");
    }
    return g;
}

namespace {

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

[[noreturn]] void bad_value(int line, const std::string& key) {
    throw ConfigError("line " + std::to_string(line) + ": invalid value for '" + key + "'");
}

double to_double(const std::string& v, int line, const std::string& key) {
    try {
        std::size_t used = 0;
        const double x = std::stod(v, &used);
        if (used != v.size()) bad_value(line, key);
        return x;
    } catch (const ConfigError&) {
        throw;
    } catch (const std::exception&) {
        bad_value(line, key);
    }
}

int to_int(const std::string& v, int line, const std::string& key) {
    const double x = to_double(v, line, key);
    if (x != std::floor(x)) bad_value(line, key);
    return static_cast<int>(x);
}

bool to_bool(const std::string& v, int line, const std::string& key) {
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    bad_value(line, key);
}

}  // namespace

RunConfig parse_config(const std::string& text) {
    RunConfig cfg;
    std::istringstream in(text);
    std::string raw;
    int line = 0;
    while (std::getline(in, raw)) {
        ++line;
        const auto comment = raw.find('#');
        if (comment != std::string::npos) raw.erase(comment);
        const std::string entry = trim(raw);
        if (entry.empty()) continue;
        const auto eq = entry.find('=');
        if (eq == std::string::npos)
            throw ConfigError("line " + std::to_string(line) + ": expected key=value");
        const std::string key = trim(entry.substr(0, eq));
        const std::string value = trim(entry.substr(eq + 1));
        if (key.empty() || value.empty())
            throw ConfigError("line " + std::to_string(line) + ": expected key=value");

        if (key == "experiment") {
            const auto e = experiment_from_name(value);
            if (!e) bad_value(line, key);
            cfg.experiment = e;
        } else if (key == "n") {
            cfg.chain.n_sites = to_int(value, line, key);
        } else if (key == "j1") {
            cfg.chain.j1 = to_double(value, line, key);
        } else if (key == "jr") {
            cfg.chain.j_ratio = to_double(value, line, key);
        } else if (key == "hx") {
            cfg.chain.hx = to_double(value, line, key);
        } else if (key == "hz") {
            cfg.chain.hz = to_double(value, line, key);
        } else if (key == "jr_grid") {
            try {
                cfg.jr_grid = parse_grid(value);
            } catch (const ConfigError&) {
                bad_value(line, key);
            }
        } else if (key == "time_grid") {
            try {
                cfg.time_grid = parse_grid(value);
            } catch (const ConfigError&) {
                bad_value(line, key);
            }
        } else if (key == "seeds") {
            cfg.seeds.clear();
            std::istringstream list(value);
            std::string item;
            while (std::getline(list, item, ',')) {
                try {
                    cfg.seeds.push_back(std::stoull(trim(item)));
                } catch (const std::exception&) {
                    bad_value(line, key);
                }
            }
            if (cfg.seeds.empty()) bad_value(line, key);
        } else if (key == "output_dir") {
            cfg.output_dir = value;
        } else if (key == "format") {
            if (value == "csv")
                cfg.format = RunConfig::Format::Csv;
            else if (value == "json")
                cfg.format = RunConfig::Format::Json;
            else if (value == "both")
                cfg.format = RunConfig::Format::Both;
            else
                bad_value(line, key);
        } else if (key == "eta") {
            cfg.eta = to_double(value, line, key);
        } else if (key == "window") {
            cfg.window = to_int(value, line, key);
        } else if (key == "degree") {
            cfg.degree = to_int(value, line, key);
        } else if (key == "theta") {
            cfg.theta = to_double(value, line, key);
        } else if (key == "sustained") {
            cfg.sustained = to_int(value, line, key);
        } else if (key == "site_i") {
            cfg.site_i = to_int(value, line, key);
        } else if (key == "site_j") {
            cfg.site_j = to_int(value, line, key);
        } else if (key == "op") {
            if (value != "o1" && value != "o2" && value != "random") bad_value(line, key);
            cfg.op = value;
        } else if (key == "t_sat") {
            cfg.t_sat = to_double(value, line, key);
        } else if (key == "out_of_core") {
            cfg.out_of_core = to_bool(value, line, key);
        } else if (key == "cut") {
            cfg.cut = to_int(value, line, key);
        } else if (key == "initial_state") {
            if (value != "all_down" && value != "neel" && value != "all_up")
                bad_value(line, key);
            cfg.initial_state = value;
        } else if (key == "sweep") {
            if (value != "jr" && value != "j") bad_value(line, key);
            cfg.sweep = value;
        } else if (key == "memory_cap_gb") {
            cfg.memory_cap_gb = to_double(value, line, key);
        } else {
            throw ConfigError("line " + std::to_string(line) + ": unknown key '" + key + "'");
        }
    }
    return cfg;
}

namespace {

struct RunContext {
    const RunConfig& cfg;
    fs::path dir;
    std::vector<std::string> files;
    json summary;

    bool wants_csv() const { return cfg.format != RunConfig::Format::Json; }
    bool wants_json() const { return cfg.format != RunConfig::Format::Csv; }

    fs::path csv_path(const std::string& stem) {
        fs::path p = dir / (stem + ".csv");
        files.push_back(p.string());
        return p;
    }
    void finish(const std::string& stem) {
        if (!wants_json()) return;
        fs::path p = dir / (stem + "_summary.json");
        write_text(p, summary.dump(2) + "\n");
        files.push_back(p.string());
    }
};

std::string run_stem(const RunConfig& cfg) {
    std::ostringstream s;
    s << experiment_name(*cfg.experiment) << "_n" << cfg.chain.n_sites;
    return s.str();
}

void run_woff(RunContext& ctx) {
    const RunConfig& cfg = ctx.cfg;
    if (!cfg.jr_grid) throw ConfigError("woff: jr_grid is required");
    const auto grid = cfg.jr_grid->values();
    check_memory(dense_memory_estimate_gb(cfg.chain.n_sites, 3), cfg.memory_cap_gb, "woff");

    std::vector<ChainConfig> cells;
    for (double jr : grid) cells.push_back(with_jr(cfg.chain, jr));
    std::vector<double> weights(cells.size());
#pragma omp parallel for schedule(dynamic)
    for (std::ptrdiff_t k = 0; k < static_cast<std::ptrdiff_t>(cells.size()); ++k)
        weights[k] = off_diagonal_weight(build_hamiltonian(cells[k]));

    const std::string stem = run_stem(cfg);
    if (ctx.wants_csv()) {
        CsvWriter csv(ctx.csv_path(stem), {"j_ratio", "w_off"});
        for (std::size_t k = 0; k < cells.size(); ++k) csv.row({grid[k], weights[k]});
    }
    json pairs = json::array();
    for (std::size_t k = 0; k < cells.size(); ++k)
        pairs.push_back({{"j_ratio", grid[k]}, {"w_off", weights[k]}});
    ctx.summary["w_off"] = pairs;
    if (grid.size() >= 5) {
        const AlphaFit fit = fit_alpha(cells);
        ctx.summary["alpha"] = fit.alpha;
        ctx.summary["fit_intercept_log10"] = fit.fit.coefficients[0];
        ctx.summary["fit_residual"] = fit.fit.residual;
    }
    ctx.finish(stem);
}

void run_spectrum(RunContext& ctx) {
    const RunConfig& cfg = ctx.cfg;
    if (!cfg.jr_grid) throw ConfigError("spectrum: jr_grid is required (sweep values)");
    check_memory(dense_memory_estimate_gb(cfg.chain.n_sites, 3), cfg.memory_cap_gb, "spectrum");
    const auto grid = cfg.jr_grid->values();

    const std::string stem = run_stem(cfg) + "_" + cfg.sweep;
    std::optional<CsvWriter> csv;
    if (ctx.wants_csv())
        csv.emplace(ctx.csv_path(stem), std::vector<std::string>{cfg.sweep, "index", "eigenvalue"});
    for (double value : grid) {
        ChainConfig chain = cfg.chain;
        if (cfg.sweep == "jr")
            chain.j_ratio = value;
        else {
            chain.j1 = value;
            chain.j_ratio = 1.0;
        }
        const RealVector eigs = eigvals_symmetric(build_hamiltonian(chain).matrix);
        if (csv)
            for (Eigen::Index k = 0; k < eigs.size(); ++k)
                csv->row({value, static_cast<double>(k), eigs(k)});
    }
    ctx.summary["sweep"] = cfg.sweep;
    ctx.summary["points"] = grid;
    ctx.finish(stem);
}

void run_rstat(RunContext& ctx) {
    const RunConfig& cfg = ctx.cfg;
    if (!cfg.jr_grid) throw ConfigError("rstat: jr_grid is required");
    check_memory(dense_memory_estimate_gb(cfg.chain.n_sites, 3), cfg.memory_cap_gb, "rstat");
    const auto grid = cfg.jr_grid->values();

    std::vector<double> rs(grid.size());
    std::vector<double> dropped(grid.size());
    for (std::size_t k = 0; k < grid.size(); ++k) {
        const RealVector eigs =
            eigvals_symmetric(build_hamiltonian(with_jr(cfg.chain, grid[k])).matrix);
        std::size_t zero_pairs = 0;
        rs[k] = r_statistic({eigs.data(), eigs.data() + eigs.size()}, &zero_pairs);
        dropped[k] = static_cast<double>(zero_pairs);
    }

    const std::string stem = run_stem(cfg);
    if (ctx.wants_csv()) {
        CsvWriter csv(ctx.csv_path(stem), {"j_ratio", "r", "dropped_pairs"});
        for (std::size_t k = 0; k < grid.size(); ++k) csv.row({grid[k], rs[k], dropped[k]});
    }
    json pairs = json::array();
    for (std::size_t k = 0; k < grid.size(); ++k)
        pairs.push_back({{"j_ratio", grid[k]}, {"r", rs[k]}});
    ctx.summary["r"] = pairs;
    ctx.finish(stem);
}

void run_sff(RunContext& ctx) {
    const RunConfig& cfg = ctx.cfg;
    check_memory(dense_memory_estimate_gb(cfg.chain.n_sites, 3), cfg.memory_cap_gb, "sff");
    const auto times = resolved_time_grid(cfg, GridSpec{1e-6, 100.0, 100000, false});

    for (double jr : resolved_jr_grid(cfg)) {
        const ChainConfig chain = with_jr(cfg.chain, jr);
        const RealVector eigs = eigvals_symmetric(build_hamiltonian(chain).matrix);
        const UnfoldedSpectrum unfolded =
            unfold({eigs.data(), eigs.data() + eigs.size()}, cfg.degree);
        const SffCurve curve = sff(unfolded, times, cfg.eta, cfg.window);
        std::size_t zero_pairs = 0;
        const double r = r_statistic({eigs.data(), eigs.data() + eigs.size()}, &zero_pairs);

        const std::string stem = run_stem(cfg) + "_jr" + fmt_short(jr);
        if (ctx.wants_csv()) {
            CsvWriter csv(ctx.csv_path(stem),
                          {"t_scaled", "sff_raw", "sff_smoothed", "sff_goe"});
            for (std::size_t k = 0; k < curve.times.size(); ++k)
                csv.row({curve.times[k], curve.raw[k], curve.values[k],
                         sff_goe(curve.times[k])});
        }
        json entry;
        entry["j_ratio"] = jr;
        entry["r"] = r;
        entry["eta"] = cfg.eta;
        entry["window"] = cfg.window;
        try {
            const double t_th = thouless_time(curve, cfg.theta, cfg.sustained);
            entry["t_thouless"] = t_th;
            entry["g"] = g_metric(t_th);
        } catch (const NoIntersection&) {
            entry["t_thouless"] = nullptr;
            entry["g"] = nullptr;
        }
        ctx.summary["curves"].push_back(entry);
    }
    ctx.finish(run_stem(cfg));
}

void run_otoc(RunContext& ctx) {
    const RunConfig& cfg = ctx.cfg;
    check_memory(dense_memory_estimate_gb(cfg.chain.n_sites, 4), cfg.memory_cap_gb, "otoc");
    const int site_i = cfg.site_i;
    const int site_j = cfg.site_j > 0 ? cfg.site_j : cfg.chain.n_sites;
    const auto times = resolved_time_grid(cfg, GridSpec{1e-2, 2000.0, 400, true});
    const auto grid = resolved_jr_grid(cfg);

    std::vector<double> kappas, kappa_jrs;
    for (double jr : grid) {
        const ChainConfig chain = with_jr(cfg.chain, jr);
        const Spectrum spec = eigh_symmetric(build_hamiltonian(chain).matrix);
        const OtocSeries series = otoc_series(spec, chain, site_i, site_j, times);

        const std::string stem = run_stem(cfg) + "_d" + std::to_string(series.d) + "_jr" +
                                 fmt_short(jr);
        if (ctx.wants_csv()) {
            CsvWriter csv(ctx.csv_path(stem), {"t", "c"});
            for (std::size_t k = 0; k < series.times.size(); ++k)
                csv.row({series.times[k], series.values[k]});
        }

        json entry;
        entry["j_ratio"] = jr;
        entry["d"] = series.d;
        const Saturation sat = saturation_value(series);
        entry["saturation_mean"] = sat.mean;
        entry["saturation_stddev"] = sat.stddev;
        try {
            const OtocSeries early = early_window(series, sat.mean);
            const FitResult fit = fit_kappa(early);
            entry["kappa"] = fit.coefficients[0];
            entry["kappa_residual"] = fit.residual;
            entry["window_points"] = early.times.size();
            kappas.push_back(fit.coefficients[0]);
            kappa_jrs.push_back(jr);
        } catch (const WindowTooSmall&) {
            entry["kappa"] = nullptr;
        }
        ctx.summary["series"].push_back(entry);
    }
    if (kappas.size() >= 2) {
        const FitResult bfit = fit_b(kappa_jrs, kappas);
        ctx.summary["b"] = bfit.coefficients[0];
        ctx.summary["b_residual"] = bfit.residual;
    }
    ctx.finish(run_stem(cfg));
}

void run_krylov(RunContext& ctx) {
    const RunConfig& cfg = ctx.cfg;
    const double basis_gb =
        static_cast<double>(arnoldi_memory_estimate(cfg.chain.n_sites)) /
        (1024.0 * 1024.0 * 1024.0);
    check_memory(basis_gb + dense_memory_estimate_gb(cfg.chain.n_sites, 4),
                 cfg.memory_cap_gb, "krylov basis");
    const auto times = resolved_time_grid(cfg, GridSpec{0.1, 5000.0, 200, true});

    for (double jr : resolved_jr_grid(cfg)) {
        const ChainConfig chain = with_jr(cfg.chain, jr);
        const HamiltonianMatrix h = build_hamiltonian(chain);
        const Spectrum spec = eigh_symmetric(h.matrix);

        for (std::uint64_t seed : cfg.seeds) {
            HsVector op;
            if (cfg.op == "o1")
                op = seed_operator_o1(chain.n_sites);
            else if (cfg.op == "o2")
                op = seed_operator_o2(chain.n_sites);
            else
                op = random_product_operator(chain.n_sites, seed);

            ArnoldiOptions opts;
            const std::string stem = run_stem(cfg) + "_jr" + fmt_short(jr) + "_" + cfg.op +
                                     (cfg.op == "random" ? "_seed" + std::to_string(seed) : "");
            if (cfg.out_of_core) opts.scratch_path = (ctx.dir / (stem + ".kryv")).string();
            KrylovDecomposition dec = arnoldi(h, op, opts);

            json entry;
            entry["j_ratio"] = jr;
            entry["op"] = cfg.op;
            entry["seed"] = seed;
            entry["K"] = dec.dim();
            entry["ipr"] = ipr(op, spec);

            const DispersionParams dp = dispersion_params_for(dec.b.size());
            entry["dispersion_n0"] = dp.n0;
            entry["dispersion_w"] = dp.w;
            entry["dispersion_scaled_down"] = dp.scaled_down;
            try {
                const BnDispersion disp = bn_dispersion(dec.b, dp.n0, dp.w);
                entry["sigma_bn"] = disp.sigma;
                entry["sigma_bn_inv"] = disp.sigma_inv;
            } catch (const SequenceTooShort&) {
                entry["sigma_bn"] = nullptr;
            }

            if (ctx.wants_csv()) {
                CsvWriter csv(ctx.csv_path(stem + "_bn"), {"n", "b_n"});
                for (std::size_t n = 0; n < dec.b.size(); ++n)
                    csv.row({static_cast<double>(n), dec.b[n]});
            }

            const HeisenbergEngine engine(spec, op.matrix);
            // Amplitudes at the sample times plus the saturation snapshot.
            std::vector<HsVector> evolved;
            evolved.reserve(times.size() + 1);
            for (double t : times) evolved.push_back(make_hs_vector(engine.at(t)));
            evolved.push_back(make_hs_vector(engine.at(cfg.t_sat)));

            std::vector<AmplitudeResult> amps;
            if (cfg.out_of_core) {
                dec.basis.clear();
                dec.basis.shrink_to_fit();
                amps = krylov_amplitudes_scratch(opts.scratch_path, evolved);
            } else {
                amps.reserve(evolved.size());
                for (const auto& o_t : evolved) amps.push_back(krylov_amplitudes(o_t, dec));
            }

            if (ctx.wants_csv()) {
                CsvWriter csv(ctx.csv_path(stem + "_kc"), {"t", "k_c", "defect"});
                for (std::size_t k = 0; k < times.size(); ++k)
                    csv.row({times[k], krylov_complexity(amps[k].phis), amps[k].defect});
                CsvWriter phi(ctx.csv_path(stem + "_phi"), {"n", "phi_abs2"});
                for (std::size_t n = 0; n < amps.back().phis.size(); ++n)
                    phi.row({static_cast<double>(n), std::norm(amps.back().phis[n])});
            }
            const Eigen::Index d = chain.dim();
            entry["s_k"] = spread_measure(amps.back().phis, d * d - d + 1);
            entry["t_sat"] = cfg.t_sat;
            if (!cfg.out_of_core) {
                const TimeAveragedComplexity avg = time_averaged_complexity(op, spec, dec);
                entry["kbar_c"] = avg.value;
                entry["kbar_completeness"] = avg.completeness;
                entry["kbar_degenerate_groups"] = avg.degenerate_groups;
            }
            ctx.summary["runs"].push_back(entry);
        }
    }
    ctx.finish(run_stem(cfg));
}

void run_entanglement(RunContext& ctx) {
    const RunConfig& cfg = ctx.cfg;
    check_memory(dense_memory_estimate_gb(cfg.chain.n_sites, 4), cfg.memory_cap_gb,
                 "entanglement");
    const int cut = resolved_cut(cfg);

    for (double jr : resolved_jr_grid(cfg)) {
        const ChainConfig chain = with_jr(cfg.chain, jr);
        const Spectrum spec = eigh_symmetric(build_hamiltonian(chain).matrix);
        const EntanglementScan scan = eigenstate_entanglement_scan(spec, cut);

        const std::string stem = run_stem(cfg) + "_jr" + fmt_short(jr);
        if (ctx.wants_csv()) {
            CsvWriter csv(ctx.csv_path(stem), {"energy", "entropy"});
            for (std::size_t k = 0; k < scan.energies.size(); ++k)
                csv.row({scan.energies[k], scan.entropies[k]});
        }
        json entry;
        entry["j_ratio"] = jr;
        entry["cut"] = cut;
        entry["ground_state_entropy"] = scan.entropies.front();
        ctx.summary["scans"].push_back(entry);
    }
    ctx.summary["n"] = cfg.chain.n_sites;
    ctx.finish(run_stem(cfg));
}

void run_quench(RunContext& ctx) {
    const RunConfig& cfg = ctx.cfg;
    check_memory(dense_memory_estimate_gb(cfg.chain.n_sites, 4), cfg.memory_cap_gb, "quench");
    const int cut = resolved_cut(cfg);
    const auto times = resolved_time_grid(cfg, GridSpec{0.0, 50.0, 251, false});

    StateKind kind = StateKind::AllDown;
    if (cfg.initial_state == "neel") kind = StateKind::Neel;
    if (cfg.initial_state == "all_up") kind = StateKind::AllUp;

    for (double jr : resolved_jr_grid(cfg)) {
        const ChainConfig chain = with_jr(cfg.chain, jr);
        const Spectrum spec = eigh_symmetric(build_hamiltonian(chain).matrix);
        const StateVector psi0 = named_state(kind, chain.n_sites);
        const TimeSeries series = quench_entropy_series(psi0, spec, cut, times);

        const std::string stem =
            run_stem(cfg) + "_" + cfg.initial_state + "_jr" + fmt_short(jr);
        if (ctx.wants_csv()) {
            CsvWriter csv(ctx.csv_path(stem), {"t", "entropy"});
            for (std::size_t k = 0; k < series.times.size(); ++k)
                csv.row({series.times[k], series.values[k]});
        }
        json entry;
        entry["j_ratio"] = jr;
        entry["cut"] = cut;
        entry["initial_state"] = cfg.initial_state;
        // Plateau estimate: average over the last fifth of the grid.
        double acc = 0.0;
        std::size_t count = 0;
        for (std::size_t k = series.times.size() - series.times.size() / 5;
             k < series.times.size(); ++k) {
            acc += series.values[k];
            ++count;
        }
        entry["plateau"] = acc / static_cast<double>(count);
        ctx.summary["series"].push_back(entry);
    }
    ctx.finish(run_stem(cfg));
}

int run_verify_bch(RunContext& ctx) {
    const RunConfig& cfg = ctx.cfg;
    ChainConfig chain = cfg.chain;
    chain.n_sites = 3;
    const BchReport report = verify_bch_commutators(chain);
    ctx.summary["max_deviation_order1"] = report.max_deviation[0];
    ctx.summary["max_deviation_order2"] = report.max_deviation[1];
    ctx.summary["max_deviation_order3"] = report.max_deviation[2];
    ctx.summary["pass"] = report.pass();
    std::printf("order 1 max deviation %.3e\n", report.max_deviation[0]);
    std::printf("order 2 max deviation %.3e\n", report.max_deviation[1]);
    std::printf("order 3 max deviation %.3e\n", report.max_deviation[2]);
    std::printf("%s\n", report.pass() ? "all commutator orders verified" : "MISMATCH");
    ctx.finish(run_stem(cfg));
    return report.pass() ? 0 : 1;
}

}  // namespace

ExitReport run(const RunConfig& config) {
    ExitReport report;
    try {
        if (!config.experiment) throw ConfigError("experiment: missing (required)");
        config.chain.validate();
        if (const char* env = std::getenv("ERGOKIT_THREADS")) {
            const int threads = std::atoi(env);
            if (threads > 0) {
                omp_set_num_threads(threads);
                openblas_set_num_threads(threads);
            }
        }

        RunContext ctx{config, fs::path(config.output_dir), {}, {}};
        fs::create_directories(ctx.dir);
        ctx.summary["config"] = config_to_json(config);

        int code = 0;
        switch (*config.experiment) {
            case Experiment::Woff: run_woff(ctx); break;
            case Experiment::Spectrum: run_spectrum(ctx); break;
            case Experiment::Rstat: run_rstat(ctx); break;
            case Experiment::Sff: run_sff(ctx); break;
            case Experiment::Otoc: run_otoc(ctx); break;
            case Experiment::Krylov: run_krylov(ctx); break;
            case Experiment::Entanglement: run_entanglement(ctx); break;
            case Experiment::Quench: run_quench(ctx); break;
            case Experiment::VerifyBch: code = run_verify_bch(ctx); break;
        }
        report.code = code;
        report.files_written = ctx.files;
    } catch (const ConfigError& e) {
        report.code = 2;
        report.message = e.what();
    } catch (const ResourceRefusal& e) {
        report.code = 3;
        report.message = e.what();
    } catch (const Error& e) {
        report.code = 1;
        report.message = e.what();
    }
    return report;
}

}  // namespace ergokit::cli
