#include "rcov/covering.hpp"
#include "rcov/diagnostics.hpp"
#include "rcov/energy.hpp"
#include "rcov/error.hpp"
#include "rcov/estimators.hpp"
#include "rcov/harness.hpp"
#include "rcov/measure.hpp"
#include "rcov/parallel.hpp"
#include "rcov/radii.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

namespace fs = std::filesystem;
using nlohmann::json;
using namespace rcov;

namespace {

constexpr int k_exit_ok = 0;
constexpr int k_exit_failure = 1;
constexpr int k_exit_validation = 2;
constexpr int k_exit_partial = 3;

struct Globals {
    std::uint64_t seed = 1;
    unsigned threads = 0;
    std::string out;
};

std::string slurp(const std::string& path)
{
    // A missing input is a bad argument, not a runtime failure.
    require(std::filesystem::is_regular_file(path), ErrorKind::invalid_parameter, "no such input file: " + path);
    std::ifstream is(path, std::ios::binary);
    require(static_cast<bool>(is), ErrorKind::io_error, "cannot read " + path);
    std::ostringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

json read_json(const std::string& path)
{
    try {
        return json::parse(slurp(path));
    } catch (const json::exception& e) {
        fail(ErrorKind::invalid_parameter, path + ": " + e.what());
    }
}

CantorScheme load_scheme(const std::string& path) { return scheme_from_json(read_json(path)); }

// JSON rule document, or a plain list of radii one per line.
RadiiSequence load_radii(const std::string& path, const CantorScheme* scheme)
{
    const std::string text = slurp(path);
    const json doc = json::parse(text, nullptr, false);
    if (!doc.is_discarded() && doc.is_object()) {
        return RadiiSequence::from_json(doc, scheme);
    }
    std::istringstream is(text);
    return read_radii(is);
}

// Writes to --out when given, stdout otherwise.
void emit(const Globals& g, const std::string& text)
{
    if (g.out.empty()) {
        std::cout << text;
        return;
    }
    const fs::path p(g.out);
    if (p.has_parent_path()) {
        fs::create_directories(p.parent_path());
    }
    std::ofstream os(p, std::ios::binary);
    require(static_cast<bool>(os), ErrorKind::io_error, "cannot write " + g.out);
    os << text;
}

fs::path out_dir(const Globals& g, const std::string& fallback)
{
    const fs::path p = g.out.empty() ? fs::path(fallback) : fs::path(g.out);
    fs::create_directories(p);
    return p;
}

void write_file(const fs::path& p, const std::string& text)
{
    std::ofstream os(p, std::ios::binary);
    require(static_cast<bool>(os), ErrorKind::io_error, "cannot write " + p.string());
    os << text;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Random covering sets: simulation, dimension estimates and energy diagnostics"};
    app.require_subcommand(1);
    Globals g;
    auto add_globals = [&](CLI::App* sub) {
        sub->add_option("--seed", g.seed, "Master seed");
        sub->add_option("--threads", g.threads, "Worker threads (0 = hardware concurrency)");
        sub->add_option("--out", g.out, "Output file or directory");
    };
    int code = k_exit_ok;
    std::function<void()> action;

    // scheme build
    auto* scheme_cmd = app.add_subcommand("scheme", "Construct measure models");
    scheme_cmd->require_subcommand(1);
    auto* build = scheme_cmd->add_subcommand("build", "Build a scheme and print its JSON document");
    add_globals(build);
    std::string kind = "middle";
    double ratio = 1.0 / 3.0, ell0 = 1.0, alpha = 0.25, beta = 0.125, s_par = 0.4, u_par = 0.8, a_par = 0.0,
           b_par = 1.0;
    int depth = -1;
    build->add_option("--kind", kind, "middle | oscillating | spaced | lebesgue")->required();
    build->add_option("--ratio", ratio, "Middle Cantor child ratio");
    build->add_option("--ell0", ell0, "Base length (spaced: admissible first length)");
    build->add_option("--alpha", alpha, "Oscillating: first exponent");
    build->add_option("--beta", beta, "Oscillating: second exponent");
    build->add_option("--s", s_par, "Spaced: lower exponent");
    build->add_option("--u", u_par, "Spaced: upper exponent");
    build->add_option("--a", a_par, "Lebesgue: left endpoint");
    build->add_option("--b", b_par, "Lebesgue: right endpoint");
    build->add_option("--depth", depth, "Construction depth");
    build->callback([&]() {
        action = [&]() {
            CantorScheme sc;
            if (kind == "middle") {
                sc = build_middle_cantor(ratio, ell0, depth < 0 ? 40 : depth);
            } else if (kind == "oscillating") {
                const int d = depth < 0 ? 40 : depth;
                sc = build_oscillating_cantor(alpha, beta, default_block_bounds(d), ell0, d);
            } else if (kind == "spaced") {
                sc = build_spaced_cantor(s_par, u_par, ell0, depth < 0 ? 8 : depth);
            } else if (kind == "lebesgue") {
                sc = build_lebesgue(a_par, b_par, depth < 0 ? 48 : depth);
            } else {
                fail(ErrorKind::invalid_parameter, "unknown scheme kind '" + kind + "'");
            }
            json doc = to_json(sc);
            doc["metadata"] = {{"s", sc.meta.s},
                               {"u", sc.meta.u},
                               {"support_dim", sc.meta.support_dim},
                               {"exponent_order_consistent", sc.meta.exponent_order_consistent}};
            if (sc.meta.depth_requested) {
                doc["metadata"]["depth_requested"] = *sc.meta.depth_requested;
            }
            emit(g, doc.dump(2) + "\n");
        };
    });

    // radii analyze
    auto* radii_cmd = app.add_subcommand("radii", "Radii sequences");
    radii_cmd->require_subcommand(1);
    auto* analyze = radii_cmd->add_subcommand("analyze", "Critical exponent estimates s1, s2, s3");
    add_globals(analyze);
    std::string radii_path, scheme_path;
    double r_alpha = 0.0, window = 0.5;
    std::int64_t K = 100000;
    analyze->add_option("--radii", radii_path, "Radii JSON rule or plain list file");
    analyze->add_option("--alpha", r_alpha, "Power radii k^-alpha instead of a file");
    analyze->add_option("--scheme", scheme_path, "Scheme JSON (needed by block rules)");
    analyze->add_option("-K,--K", K, "Number of terms");
    analyze->add_option("--window", window, "Window fraction");
    analyze->callback([&]() {
        action = [&]() {
            std::optional<CantorScheme> sc;
            if (!scheme_path.empty()) {
                sc = load_scheme(scheme_path);
            }
            require(!radii_path.empty() || r_alpha > 0, ErrorKind::invalid_parameter, "give --radii or --alpha");
            const RadiiSequence r = radii_path.empty() ? power_radii(r_alpha) : load_radii(radii_path, sc ? &*sc : nullptr);
            const std::int64_t k = r.size() ? std::min(K, *r.size()) : K;
            const ExponentEstimate e = critical_exponents(r, k, window);
            const json doc = {{"K", k},
                              {"s1_hat", e.s1_hat},
                              {"s2_hat", e.s2_hat},
                              {"s3_hat", e.s3_hat},
                              {"window", {e.window_from, e.window_to}},
                              {"non_monotone_caveat", e.non_monotone_caveat},
                              {"clamped", e.clamped},
                              {"tail_drift_s1", e.tail_drift_s1},
                              {"tail_drift_s3", e.tail_drift_s3}};
            emit(g, doc.dump(2) + "\n");
        };
    });

    // simulate
    auto* simulate = app.add_subcommand("simulate", "Realize a covering and its limsup approximation");
    add_globals(simulate);
    std::vector<std::int64_t> bounds;
    std::int64_t n0 = 1000;
    int m_blocks = 4;
    simulate->add_option("--scheme", scheme_path, "Scheme JSON")->required();
    simulate->add_option("--radii", radii_path, "Radii JSON rule or plain list file")->required();
    simulate->add_option("-K,--K", K, "Number of balls")->required();
    simulate->add_option("--bounds", bounds, "Explicit block bounds n_0 < ... < n_m");
    simulate->add_option("--n0", n0, "Geometric schedule start");
    simulate->add_option("--blocks", m_blocks, "Geometric schedule block count");
    simulate->callback([&]() {
        action = [&]() {
            const CantorScheme sc = load_scheme(scheme_path);
            const RadiiSequence r = load_radii(radii_path, &sc);
            const CoveringRealization real = realize(sc, r, K, g.seed);
            const std::vector<std::int64_t> b = bounds.empty() ? geometric_schedule(K, n0, m_blocks) : bounds;
            const LimsupApprox la = limsup_approx(real, b);
            const fs::path dir = out_dir(g, "simulate_out");
            std::ostringstream csv;
            write_csv(csv, la.set);
            write_file(dir / "limsup.csv", csv.str());
            const json doc = {{"K", K},
                              {"seed", g.seed},
                              {"bounds", la.bounds},
                              {"degenerate", la.degenerate},
                              {"intervals", la.set.size()},
                              {"total_length", la.set.total_length()}};
            write_file(dir / "simulate.json", doc.dump(2) + "\n");
            std::cout << doc.dump(2) << "\n";
        };
    });

    // dimension
    auto* dimension = app.add_subcommand("dimension", "Band estimate of the limsup set's dimension");
    add_globals(dimension);
    LimsupDimensionOptions lopt;
    dimension->add_option("--scheme", scheme_path, "Scheme JSON")->required();
    dimension->add_option("--radii", radii_path, "Radii JSON rule or plain list file")->required();
    dimension->add_option("-K,--K", K, "Number of balls")->required();
    dimension->add_option("--min-balls", lopt.min_balls, "Minimum balls per band");
    dimension->add_option("--r-min", lopt.r_min, "Smallest radius considered");
    dimension->add_option("--r-max", lopt.r_max, "Largest radius considered");
    dimension->add_option("--band-factor", lopt.band_factor, "Radius ratio per band");
    dimension->callback([&]() {
        action = [&]() {
            const CantorScheme sc = load_scheme(scheme_path);
            const RadiiSequence r = load_radii(radii_path, &sc);
            const DimensionFit fit = limsup_dimension(realize(sc, r, K, g.seed), lopt);
            std::ostringstream csv;
            write_fit_csv(csv, fit);
            if (!g.out.empty()) {
                emit(g, csv.str());
            }
            std::cout << json({{"slope", fit.slope},
                               {"stderr", std::isfinite(fit.stderr_) ? json(fit.stderr_) : json(nullptr)},
                               {"r2", fit.r2},
                               {"points", fit.points.size()},
                               {"delta_min", fit.delta_min},
                               {"delta_max", fit.delta_max},
                               {"degenerate", fit.degenerate}})
                             .dump(2)
                      << "\n";
        };
    });

    // energy
    auto* energy = app.add_subcommand("energy", "t-energies with certified brackets");
    add_globals(energy);
    std::vector<double> ts;
    std::string method = "cylinder-quadrature";
    EnergyOptions eopt;
    std::vector<double> restrict_to;
    bool uniform_bottom = false;
    energy->add_option("--scheme", scheme_path, "Scheme JSON")->required();
    energy->add_option("--t", ts, "Exponent(s)")->required();
    energy->add_option("--method", method, "recursive-exact | cylinder-quadrature | monte-carlo");
    energy->add_option("--pair-tol", eopt.pair_tol, "Relative kernel tolerance for accepting a cylinder pair");
    energy->add_option("--samples", eopt.mc_samples, "Monte-Carlo samples");
    energy->add_option("--precision", eopt.precision, "Requested relative precision (0 = off)");
    energy->add_flag("--strict", eopt.strict, "Fail when the precision is not reached");
    energy->add_flag("--uniform-bottom", uniform_bottom, "Uniform mass on bottom cylinders");
    energy->add_option("--restrict", restrict_to, "Normalized restriction to [lo, hi]")->expected(2);
    energy->callback([&]() {
        action = [&]() {
            const CantorScheme sc = load_scheme(scheme_path);
            eopt.seed = g.seed;
            eopt.bottom = uniform_bottom ? BottomModel::uniform : BottomModel::continuation;
            const EnergyMethod m = energy_method_from_string(method);
            std::vector<EnergyReport> reps;
            for (double t : ts) {
                if (restrict_to.size() == 2) {
                    reps.push_back(t_energy(sc, restricted_normalized(sc, restrict_to[0], restrict_to[1]), t, eopt));
                } else {
                    reps.push_back(t_energy(sc, t, m, eopt));
                }
            }
            std::ostringstream csv;
            write_energy_csv(csv, reps, ts);
            emit(g, csv.str());
        };
    });

    // diagnose
    auto* diagnose = app.add_subcommand("diagnose", "Divergence diagnostics for the lower-bound hypotheses");
    add_globals(diagnose);
    std::string diag_kind = "mass";
    DiagnosticConfig dcfg;
    diagnose->add_option("--scheme", scheme_path, "Scheme JSON")->required();
    diagnose->add_option("--radii", radii_path, "Radii JSON rule or plain list file")->required();
    diagnose->add_option("--kind", diag_kind, "mass | energy");
    diagnose->add_option("--t", dcfg.t, "Exponent t")->required();
    diagnose->add_option("--u", dcfg.u, "Exponent u")->required();
    diagnose->add_option("--s", dcfg.s, "Frostman exponent s")->required();
    diagnose->add_option("--C", dcfg.frostman_C, "Frostman constant (0 = certified)");
    diagnose->add_option("--b-scale", dcfg.b_scale, "Constant c in b_k = c r_k^(tu/s) (0 = Frostman witness)");
    diagnose->add_option("--samples", dcfg.sample_count, "Sample points");
    diagnose->add_option("--horizon", dcfg.horizon, "Partial-sum horizon N");
    diagnose->callback([&]() {
        action = [&]() {
            const CantorScheme sc = load_scheme(scheme_path);
            const RadiiSequence r = load_radii(radii_path, &sc);
            dcfg.seed = g.seed;
            require(diag_kind == "mass" || diag_kind == "energy", ErrorKind::invalid_parameter,
                    "--kind must be mass or energy");
            const GrowthReport rep = diag_kind == "mass" ? mass_divergence_diagnostic(sc, r, dcfg)
                                                         : energy_divergence_diagnostic(sc, r, dcfg);
            const fs::path dir = out_dir(g, "diagnose_out");
            std::ostringstream a;
            write_growth_csv(a, rep);
            write_file(dir / "growth.csv", a.str());
            std::ostringstream b;
            write_growth_summary_csv(b, rep);
            write_file(dir / "growth_summary.csv", b.str());
            std::cout << json({{"kind", rep.kind},
                               {"horizon", rep.horizon},
                               {"b_scale", rep.b_scale},
                               {"divergent_fraction", rep.divergent_fraction},
                               {"mean_final_ratio", rep.mean_final_ratio},
                               {"mean_trend", rep.mean_trend},
                               {"indeterminate", rep.indeterminate}})
                             .dump(2)
                      << "\n";
        };
    });

    // sweep triangle
    auto* sweep = app.add_subcommand("sweep", "Parameter sweeps");
    sweep->require_subcommand(1);
    auto* triangle = sweep->add_subcommand("triangle", "Spaced Cantor block-radii sweep over (gamma, s0)");
    add_globals(triangle);
    TriangleConfig tcfg;
    triangle->add_option("--s", tcfg.s, "Lower exponent");
    triangle->add_option("--u", tcfg.u, "Upper exponent");
    triangle->add_option("--ell0", tcfg.ell0, "Admissible first length");
    triangle->add_option("--gammas", tcfg.gammas, "Gamma grid");
    triangle->add_option("--s0-fractions", tcfg.s0_fractions, "s0 grid as fractions of s/gamma");
    triangle->add_option("--K-cap", tcfg.K_cap, "Largest number of balls per point");
    triangle->add_option("--tolerance", tcfg.tolerance, "Sandwich tolerance");
    triangle->callback([&]() {
        action = [&]() {
            tcfg.seed = g.seed;
            const auto rows = triangle_sweep(tcfg);
            std::ostringstream csv;
            write_triangle_csv(csv, rows);
            emit(g, csv.str());
            for (const auto& r : rows) {
                if (!r.ok) {
                    code = k_exit_partial;
                }
            }
        };
    });

    // run
    auto* run = app.add_subcommand("run", "Run an experiment config (or rerun a manifest)");
    add_globals(run);
    std::string config_path;
    run->add_option("config", config_path, "Config or manifest JSON")->required();
    run->callback([&]() {
        action = [&]() {
            json doc = read_json(config_path);
            if (doc.contains("config") && doc.contains("tool_version")) {
                doc = doc.at("config");
            }
            const ExperimentConfig cfg = ExperimentConfig::from_json(doc);
            const RunManifest man = run_experiment(cfg, g.out);
            std::cout << man.summary.dump(2) << "\n";
            for (const auto& s : man.seeds) {
                if (!s.ok) {
                    std::cerr << "seed " << s.seed << " failed: " << s.error << "\n";
                }
            }
            if (man.partial_failure()) {
                code = k_exit_partial;
            }
        };
    });

    // report
    auto* rep_cmd = app.add_subcommand("report", "Summarize a run directory");
    add_globals(rep_cmd);
    std::string run_dir;
    rep_cmd->add_option("dir", run_dir, "Run directory")->required();
    rep_cmd->callback([&]() {
        action = [&]() {
            const RunReport rep = report(run_dir);
            print_report(std::cout, rep);
            if (!g.out.empty()) {
                std::ostringstream csv;
                write_report_csv(csv, rep);
                emit(g, csv.str());
            }
            if (!rep.warnings.empty()) {
                code = k_exit_partial;
            }
        };
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? k_exit_ok : k_exit_validation;
    }
    try {
        set_thread_count(g.threads);
        if (action) {
            action();
        }
    } catch (const Error& e) {
        std::cerr << "error (" << to_string(e.kind()) << "): " << e.what() << "\n";
        return e.kind() == ErrorKind::invalid_parameter || e.kind() == ErrorKind::construction_degenerate ||
                       e.kind() == ErrorKind::undefined_exponent || e.kind() == ErrorKind::zero_measure_restriction
                   ? k_exit_validation
                   : k_exit_failure;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return k_exit_failure;
    }
    return code;
}
