#include "rcov/harness.hpp"

#include "rcov/covering.hpp"
#include "rcov/error.hpp"
#include "rcov/parallel.hpp"
#include "rcov/rng.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <cmath>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <map>
#include <ostream>
#include <set>
#include <sstream>

namespace rcov {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::vector<double> default_delta_grid()
{
    std::vector<double> out;
    for (int i = 4; i <= 24; ++i) {
        out.push_back(std::ldexp(1.0, -i));
    }
    return out;
}

void check_keys(const json& doc, const std::set<std::string>& allowed, const std::string& where)
{
    require(doc.is_object(), ErrorKind::invalid_parameter, where + " must be a JSON object");
    for (const auto& [key, value] : doc.items()) {
        (void)value;
        require(allowed.count(key) > 0, ErrorKind::invalid_parameter, "unknown key '" + key + "' in " + where);
    }
}

json limsup_to_json(const LimsupDimensionOptions& o)
{
    return {{"r_min", o.r_min},
            {"r_max", o.r_max},
            {"band_factor", o.band_factor},
            {"min_balls", o.min_balls},
            {"first_index", o.first_index},
            {"piece_resolution", o.piece_resolution}};
}

LimsupDimensionOptions limsup_from_json(const json& doc)
{
    check_keys(doc, {"r_min", "r_max", "band_factor", "min_balls", "first_index", "piece_resolution"},
               "estimators.limsup_options");
    LimsupDimensionOptions o;
    o.r_min = doc.value("r_min", o.r_min);
    o.r_max = doc.value("r_max", o.r_max);
    o.band_factor = doc.value("band_factor", o.band_factor);
    o.min_balls = doc.value("min_balls", o.min_balls);
    o.first_index = doc.value("first_index", o.first_index);
    o.piece_resolution = doc.value("piece_resolution", o.piece_resolution);
    return o;
}

std::string utc_timestamp()
{
    const std::time_t now = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

void write_text(const fs::path& path, const std::string& text)
{
    fs::create_directories(path.parent_path());
    std::ofstream os(path, std::ios::binary);
    require(static_cast<bool>(os), ErrorKind::io_error, "cannot write " + path.string());
    os << text;
    require(static_cast<bool>(os), ErrorKind::io_error, "write failed for " + path.string());
}

json finite_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

} // namespace

json ExperimentConfig::to_json() const
{
    json bounds = json::array();
    for (auto b : block_bounds) {
        bounds.push_back(b);
    }
    json acc = json::array();
    for (const AcceptanceSpec& a : acceptance) {
        acc.push_back({{"metric", a.metric}, {"target", a.target}, {"tolerance", a.tolerance}});
    }
    return {{"schema_version", schema_version},
            {"name", name},
            {"scheme", scheme},
            {"radii", radii},
            {"K", K},
            {"seeds", seeds},
            {"block_schedule", {{"bounds", bounds}, {"n0", schedule_n0}, {"m", schedule_m}}},
            {"delta_grid", delta_grid},
            {"estimators",
             {{"limsup_dimension", est_limsup},
              {"surrogate", est_surrogate},
              {"exponents", est_exponents},
              {"limsup_options", limsup_to_json(limsup)}}},
            {"energy",
             {{"enabled", energy.enabled},
              {"t", energy.ts},
              {"method", to_string(energy.method)},
              {"pair_tol", energy.pair_tol},
              {"mc_samples", energy.mc_samples}}},
            {"output_dir", output_dir},
            {"acceptance", acc}};
}

ExperimentConfig ExperimentConfig::from_json(const json& doc)
{
    try {
        check_keys(doc,
                   {"schema_version", "name", "scheme", "radii", "K", "seeds", "block_schedule", "delta_grid",
                    "estimators", "energy", "output_dir", "acceptance"},
                   "config");
        ExperimentConfig c;
        c.schema_version = doc.value("schema_version", k_config_schema_version);
        require(c.schema_version >= 1 && c.schema_version <= k_config_schema_version, ErrorKind::invalid_parameter,
                "unsupported config schema_version " + std::to_string(c.schema_version));
        c.name = doc.value("name", c.name);
        require(doc.contains("scheme"), ErrorKind::invalid_parameter, "config needs a scheme");
        require(doc.contains("radii"), ErrorKind::invalid_parameter, "config needs radii");
        c.scheme = doc.at("scheme");
        c.radii = doc.at("radii");
        c.K = doc.value("K", c.K);
        c.seeds = doc.value("seeds", c.seeds);
        if (doc.contains("block_schedule")) {
            const json& b = doc.at("block_schedule");
            check_keys(b, {"bounds", "n0", "m"}, "block_schedule");
            c.block_bounds = b.value("bounds", c.block_bounds);
            c.schedule_n0 = b.value("n0", c.schedule_n0);
            c.schedule_m = b.value("m", c.schedule_m);
        }
        c.delta_grid = doc.value("delta_grid", default_delta_grid());
        if (doc.contains("estimators")) {
            const json& e = doc.at("estimators");
            check_keys(e, {"limsup_dimension", "surrogate", "exponents", "limsup_options"}, "estimators");
            c.est_limsup = e.value("limsup_dimension", c.est_limsup);
            c.est_surrogate = e.value("surrogate", c.est_surrogate);
            c.est_exponents = e.value("exponents", c.est_exponents);
            if (e.contains("limsup_options")) {
                c.limsup = limsup_from_json(e.at("limsup_options"));
            }
        }
        if (doc.contains("energy")) {
            const json& e = doc.at("energy");
            check_keys(e, {"enabled", "t", "method", "pair_tol", "mc_samples"}, "energy");
            c.energy.enabled = e.value("enabled", !e.value("t", std::vector<double>{}).empty());
            c.energy.ts = e.value("t", c.energy.ts);
            c.energy.method = energy_method_from_string(e.value("method", to_string(c.energy.method)));
            c.energy.pair_tol = e.value("pair_tol", c.energy.pair_tol);
            c.energy.mc_samples = e.value("mc_samples", c.energy.mc_samples);
        }
        c.output_dir = doc.value("output_dir", "runs/" + c.name);
        for (const json& a : doc.value("acceptance", json::array())) {
            check_keys(a, {"metric", "target", "tolerance"}, "acceptance entry");
            c.acceptance.push_back(
                {a.value("metric", "slope"), a.at("target").get<double>(), a.at("tolerance").get<double>()});
        }
        return c;
    } catch (const json::exception& e) {
        fail(ErrorKind::invalid_parameter, std::string("config: ") + e.what());
    }
}

void ExperimentConfig::validate() const
{
    require(!seeds.empty(), ErrorKind::invalid_parameter, "config needs at least one seed");
    require(K >= 1, ErrorKind::invalid_parameter, "K must be positive");
    const CantorScheme sc = scheme_from_json(scheme);
    const RadiiSequence r = RadiiSequence::from_json(radii, &sc);
    if (const auto n = r.size()) {
        require(K <= *n, ErrorKind::invalid_parameter,
                "K = " + std::to_string(K) + " exceeds the " + std::to_string(*n) + " available radii");
    }
    require(limsup.band_factor > 1 && limsup.r_min > 0 && limsup.r_max > limsup.r_min && limsup.min_balls >= 1 &&
                limsup.first_index >= 1 && limsup.piece_resolution > 0,
            ErrorKind::invalid_parameter, "invalid limsup_options");
    if (est_surrogate) {
        require(delta_grid.size() >= 4, ErrorKind::invalid_parameter, "surrogate needs at least 4 grid scales");
        for (double d : delta_grid) {
            require(d > 0, ErrorKind::invalid_parameter, "grid scales must be positive");
        }
        if (!block_bounds.empty()) {
            require(std::is_sorted(block_bounds.begin(), block_bounds.end()) && block_bounds.back() <= K &&
                        block_bounds.front() >= 0,
                    ErrorKind::invalid_parameter, "block bounds must increase within [0, K]");
        } else {
            require(schedule_n0 >= 1 && schedule_n0 < K && schedule_m >= 1, ErrorKind::invalid_parameter,
                    "geometric schedule needs 1 <= n0 < K and m >= 1");
        }
    }
    if (energy.enabled) {
        require(!energy.ts.empty(), ErrorKind::invalid_parameter, "energy needs at least one t");
        for (double t : energy.ts) {
            require(t > 0, ErrorKind::invalid_parameter, "energy exponents must be positive");
        }
        require(energy.pair_tol > 0, ErrorKind::invalid_parameter, "pair_tol must be positive");
    }
    for (const AcceptanceSpec& a : acceptance) {
        require(a.metric == "slope" || a.metric == "s2_hat", ErrorKind::invalid_parameter,
                "acceptance metric must be slope or s2_hat");
        require(a.tolerance >= 0, ErrorKind::invalid_parameter, "acceptance tolerance must be non-negative");
    }
}

bool RunManifest::partial_failure() const
{
    return std::any_of(seeds.begin(), seeds.end(), [](const SeedOutcome& s) { return !s.ok; });
}

json RunManifest::to_json() const
{
    json s = json::array();
    for (const SeedOutcome& o : seeds) {
        s.push_back({{"seed", o.seed}, {"status", o.ok ? "ok" : "failed"}, {"error", o.error}, {"files", o.files}});
    }
    json f = json::array();
    for (const auto& [path, hash] : files) {
        f.push_back({{"path", path}, {"sha256", hash}});
    }
    return {{"tool_version", tool_version}, {"timestamp", timestamp}, {"input_hash", input_hash},
            {"config", config},             {"seeds", s},             {"files", f},
            {"summary", summary}};
}

std::string sha256_hex(const std::string& bytes)
{
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    require(EVP_Digest(bytes.data(), bytes.size(), md, &len, EVP_sha256(), nullptr) == 1, ErrorKind::io_error,
            "SHA-256 failed");
    std::ostringstream os;
    for (unsigned int i = 0; i < len; ++i) {
        os << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(md[i]);
    }
    return os.str();
}

std::string sha256_file(const fs::path& path)
{
    std::ifstream is(path, std::ios::binary);
    require(static_cast<bool>(is), ErrorKind::io_error, "cannot read " + path.string());
    std::ostringstream ss;
    ss << is.rdbuf();
    return sha256_hex(ss.str());
}

RunManifest run_experiment(const ExperimentConfig& cfg, const fs::path& out_arg)
{
    cfg.validate();
    const fs::path out = out_arg.empty() ? fs::path(cfg.output_dir) : out_arg;
    fs::create_directories(out);
    const CantorScheme scheme = scheme_from_json(cfg.scheme);
    const RadiiSequence radii = RadiiSequence::from_json(cfg.radii, &scheme);

    RunManifest man;
    man.config = cfg.to_json();
    man.timestamp = utc_timestamp();
    man.input_hash = sha256_hex(man.config.dump());
    std::vector<std::string> written;

    // Seed-independent outputs.
    json exponents;
    if (cfg.est_exponents && cfg.K >= 100) {
        const ExponentEstimate e = critical_exponents(radii, cfg.K);
        exponents = {{"s1_hat", e.s1_hat},
                     {"s2_hat", e.s2_hat},
                     {"s3_hat", e.s3_hat},
                     {"window_from", e.window_from},
                     {"window_to", e.window_to},
                     {"non_monotone_caveat", e.non_monotone_caveat},
                     {"clamped", e.clamped},
                     {"tail_drift_s1", e.tail_drift_s1},
                     {"tail_drift_s3", e.tail_drift_s3}};
        write_text(out / "exponents.json", exponents.dump(2) + "\n");
        written.push_back("exponents.json");
    }
    if (cfg.energy.enabled) {
        EnergyOptions eo;
        eo.pair_tol = cfg.energy.pair_tol;
        eo.mc_samples = cfg.energy.mc_samples;
        eo.seed = cfg.seeds.front();
        std::vector<EnergyReport> reps;
        for (double t : cfg.energy.ts) {
            reps.push_back(t_energy(scheme, t, cfg.energy.method, eo));
        }
        std::ostringstream os;
        write_energy_csv(os, reps, cfg.energy.ts);
        write_text(out / "energy.csv", os.str());
        written.push_back("energy.csv");
    }

    man.seeds.resize(cfg.seeds.size());
    parallel_for(cfg.seeds.size(), [&](std::size_t i) {
        SeedOutcome o;
        o.seed = cfg.seeds[i];
        const std::string dir = "seed_" + std::to_string(o.seed);
        try {
            const CoveringRealization real = realize(scheme, radii, cfg.K, o.seed);
            json result = {{"seed", o.seed}, {"K", cfg.K}};
            if (cfg.est_limsup) {
                const DimensionFit fit = limsup_dimension(real, cfg.limsup);
                o.slope = fit.slope;
                o.stderr_ = fit.stderr_;
                o.r2 = fit.r2;
                o.points = fit.points.size();
                std::ostringstream os;
                write_fit_csv(os, fit);
                write_text(out / dir / "dimension.csv", os.str());
                o.files.push_back(dir + "/dimension.csv");
                result["slope"] = fit.slope;
                result["stderr"] = finite_or_null(fit.stderr_);
                result["r2"] = finite_or_null(fit.r2);
                result["points"] = fit.points.size();
                result["delta_min"] = fit.delta_min;
                result["delta_max"] = fit.delta_max;
                result["degenerate"] = fit.degenerate;
            }
            if (cfg.est_surrogate) {
                const std::vector<std::int64_t> bounds = cfg.block_bounds.empty()
                                                             ? geometric_schedule(cfg.K, cfg.schedule_n0, cfg.schedule_m)
                                                             : cfg.block_bounds;
                const DimensionFit sf = surrogate_dimension(real, bounds, cfg.delta_grid);
                std::ostringstream os;
                write_fit_csv(os, sf);
                write_text(out / dir / "surrogate.csv", os.str());
                o.files.push_back(dir + "/surrogate.csv");
                result["surrogate_slope"] = sf.slope;
                result["surrogate_degenerate"] = sf.degenerate;
            }
            write_text(out / dir / "result.json", result.dump(2) + "\n");
            o.files.push_back(dir + "/result.json");
            o.ok = true;
        } catch (const std::exception& e) {
            o.ok = false;
            o.error = e.what();
        }
        man.seeds[i] = std::move(o);
    });

    {
        std::ostringstream os;
        os << std::setprecision(17);
        os << "seed,status,slope,stderr,r2,points,error\n";
        for (const SeedOutcome& o : man.seeds) {
            std::string err = o.error;
            std::replace(err.begin(), err.end(), ',', ';');
            std::replace(err.begin(), err.end(), '\n', ' ');
            os << o.seed << ',' << (o.ok ? "ok" : "failed") << ',' << o.slope << ',' << o.stderr_ << ',' << o.r2
               << ',' << o.points << ',' << err << '\n';
        }
        write_text(out / "summary.csv", os.str());
        written.push_back("summary.csv");
    }
    for (const SeedOutcome& o : man.seeds) {
        written.insert(written.end(), o.files.begin(), o.files.end());
    }
    for (const std::string& f : written) {
        man.files.emplace_back(f, sha256_file(out / f));
    }
    double sum = 0.0;
    std::size_t n = 0;
    for (const SeedOutcome& o : man.seeds) {
        if (o.ok && cfg.est_limsup) {
            sum += o.slope;
            ++n;
        }
    }
    man.summary = {{"seeds_ok", n}, {"seeds_failed", man.seeds.size() - n}};
    if (n > 0) {
        man.summary["mean_slope"] = sum / static_cast<double>(n);
    }
    if (!exponents.is_null()) {
        man.summary["s2_hat"] = exponents["s2_hat"];
    }
    write_text(out / "manifest.json", man.to_json().dump(2) + "\n");
    return man;
}

std::vector<TriangleRow> triangle_sweep(const TriangleConfig& cfg)
{
    require(cfg.s > 0 && cfg.s < cfg.u && cfg.u <= 1, ErrorKind::invalid_parameter, "sweep needs 0 < s < u <= 1");
    require(cfg.K_cap >= 100, ErrorKind::invalid_parameter, "sweep needs K_cap >= 100");
    const CantorScheme scheme = build_spaced_cantor(cfg.s, cfg.u, cfg.ell0, cfg.depth);
    for (double g : cfg.gammas) {
        require(g >= cfg.s / cfg.u - 1e-12 && g <= 1 + 1e-12, ErrorKind::invalid_parameter,
                "sweep gammas must lie in [s/u, 1]");
    }
    for (double f : cfg.s0_fractions) {
        require(f > 0 && f <= 1, ErrorKind::invalid_parameter, "s0 fractions must lie in (0, 1]");
    }
    std::vector<TriangleRow> rows;
    for (double g : cfg.gammas) {
        for (double f : cfg.s0_fractions) {
            TriangleRow row;
            row.gamma = g;
            row.s0 = f * cfg.s / g;
            rows.push_back(row);
        }
    }
    parallel_for(rows.size(), [&](std::size_t i) {
        TriangleRow& row = rows[i];
        try {
            const RadiiSequence r = block_radii(scheme, row.gamma, row.s0);
            row.K = std::min(*r.size(), cfg.K_cap);
            require(row.K >= 100, ErrorKind::invalid_parameter, "fewer than 100 radii in the block sequence");
            row.s2_hat = critical_exponents(r, row.K).s2_hat;
            const CoveringRealization real = realize(scheme, r, row.K, derive_seed(cfg.seed, i));
            row.slope = limsup_dimension(real, cfg.limsup).slope;
            row.lower = row.s2_hat * cfg.s / cfg.u;
            row.upper = row.s2_hat;
            row.inside = row.slope >= row.lower - cfg.tolerance && row.slope <= row.upper + cfg.tolerance;
            row.ok = true;
        } catch (const std::exception& e) {
            row.error = e.what();
        }
    });
    return rows;
}

void write_triangle_csv(std::ostream& os, const std::vector<TriangleRow>& rows)
{
    const auto old = os.precision(17);
    os << "gamma,s0,K,s2_hat,slope,lower,upper,inside,status,error\n";
    for (const TriangleRow& r : rows) {
        std::string err = r.error;
        std::replace(err.begin(), err.end(), ',', ';');
        os << r.gamma << ',' << r.s0 << ',' << r.K << ',' << r.s2_hat << ',' << r.slope << ',' << r.lower << ','
           << r.upper << ',' << (r.inside ? 1 : 0) << ',' << (r.ok ? "ok" : "failed") << ',' << err << '\n';
    }
    os.precision(old);
}

namespace {

ReportRow aggregate(const std::string& metric, const std::vector<double>& v)
{
    ReportRow row;
    row.metric = metric;
    row.n = v.size();
    if (v.empty()) {
        return row;
    }
    double sum = 0.0;
    for (double x : v) {
        sum += x;
    }
    row.mean = sum / static_cast<double>(v.size());
    if (v.size() > 1) {
        double ss = 0.0;
        for (double x : v) {
            ss += (x - row.mean) * (x - row.mean);
        }
        const double sd = std::sqrt(ss / static_cast<double>(v.size() - 1));
        row.stderr_ = sd / std::sqrt(static_cast<double>(v.size()));
    }
    return row;
}

} // namespace

RunReport report(const fs::path& dir)
{
    require(fs::is_directory(dir), ErrorKind::io_error, "no run directory at " + dir.string());
    RunReport rep;
    json manifest;
    std::map<std::string, std::string> hashes;
    try {
        std::ifstream is(dir / "manifest.json");
        require(static_cast<bool>(is), ErrorKind::io_error, "manifest.json missing");
        manifest = json::parse(is);
        for (const json& f : manifest.at("files")) {
            hashes[f.at("path").get<std::string>()] = f.at("sha256").get<std::string>();
        }
        rep.name = manifest.at("config").value("name", dir.filename().string());
    } catch (const std::exception& e) {
        rep.warnings.push_back(std::string("manifest unreadable, scanning seed directories: ") + e.what());
        rep.name = dir.filename().string();
    }

    std::vector<std::string> seed_dirs;
    if (manifest.contains("seeds")) {
        for (const json& s : manifest.at("seeds")) {
            const std::string d = "seed_" + std::to_string(s.at("seed").get<std::uint64_t>());
            if (s.value("status", "ok") != "ok") {
                rep.warnings.push_back(d + " failed during the run: " + s.value("error", ""));
                continue;
            }
            seed_dirs.push_back(d);
        }
    } else {
        for (const auto& e : fs::directory_iterator(dir)) {
            if (e.is_directory() && e.path().filename().string().rfind("seed_", 0) == 0) {
                seed_dirs.push_back(e.path().filename().string());
            }
        }
        std::sort(seed_dirs.begin(), seed_dirs.end());
    }

    std::vector<double> slopes;
    std::vector<double> r2s;
    for (const std::string& d : seed_dirs) {
        const std::string rel = d + "/result.json";
        const fs::path p = dir / rel;
        if (!fs::exists(p)) {
            rep.warnings.push_back(rel + " missing; seed excluded");
            continue;
        }
        if (auto it = hashes.find(rel); it != hashes.end() && sha256_file(p) != it->second) {
            rep.warnings.push_back(rel + " does not match its manifest hash; seed excluded");
            continue;
        }
        try {
            std::ifstream is(p);
            const json r = json::parse(is);
            if (r.contains("slope")) {
                const double slope = r.at("slope").get<double>();
                require(std::isfinite(slope), ErrorKind::io_error, "non-finite slope");
                slopes.push_back(slope);
                if (r.contains("r2") && r.at("r2").is_number()) {
                    r2s.push_back(r.at("r2").get<double>());
                }
            }
        } catch (const std::exception& e) {
            rep.warnings.push_back(rel + " corrupted (" + std::string(e.what()) + "); seed excluded");
        }
    }
    rep.rows.push_back(aggregate("slope", slopes));
    rep.rows.push_back(aggregate("r2", r2s));
    std::optional<double> s2;
    if (fs::exists(dir / "exponents.json")) {
        try {
            std::ifstream is(dir / "exponents.json");
            s2 = json::parse(is).at("s2_hat").get<double>();
            rep.rows.push_back(aggregate("s2_hat", {*s2}));
        } catch (const std::exception& e) {
            rep.warnings.push_back(std::string("exponents.json corrupted: ") + e.what());
        }
    }
    for (const ReportRow& r : rep.rows) {
        // s2_hat is seed-independent; one value is all there is.
        if (r.n == 1 && r.metric != "s2_hat") {
            rep.warnings.push_back("metric " + r.metric + " has a single sample; stderr left empty");
        }
    }
    if (manifest.contains("config")) {
        for (const json& a : manifest.at("config").value("acceptance", json::array())) {
            const std::string metric = a.value("metric", "slope");
            const double target = a.value("target", 0.0);
            const double tol = a.value("tolerance", 0.0);
            const auto it = std::find_if(rep.rows.begin(), rep.rows.end(),
                                         [&](const ReportRow& r) { return r.metric == metric; });
            std::ostringstream desc;
            desc << "mean " << metric << " within " << tol << " of " << target;
            const bool pass = it != rep.rows.end() && it->n > 0 && std::abs(it->mean - target) <= tol;
            rep.acceptance.emplace_back(desc.str(), pass);
        }
    }
    return rep;
}

void print_report(std::ostream& os, const RunReport& rep)
{
    os << "run: " << rep.name << '\n';
    os << std::left << std::setw(10) << "metric" << std::setw(14) << "mean" << std::setw(14) << "stderr" << "n\n";
    for (const ReportRow& r : rep.rows) {
        std::ostringstream mean;
        std::ostringstream se;
        mean << std::setprecision(6) << (r.n > 0 ? r.mean : std::nan(""));
        if (r.stderr_) {
            se << std::setprecision(4) << *r.stderr_;
        }
        os << std::setw(10) << r.metric << std::setw(14) << mean.str() << std::setw(14) << se.str() << r.n << '\n';
    }
    for (const auto& [desc, pass] : rep.acceptance) {
        os << (pass ? "PASS " : "FAIL ") << desc << '\n';
    }
    for (const std::string& w : rep.warnings) {
        os << "warning: " << w << '\n';
    }
}

void write_report_csv(std::ostream& os, const RunReport& rep)
{
    const auto old = os.precision(17);
    os << "metric,mean,stderr,n\n";
    for (const ReportRow& r : rep.rows) {
        os << r.metric << ',';
        if (r.n > 0) {
            os << r.mean;
        }
        os << ',';
        if (r.stderr_) {
            os << *r.stderr_;
        }
        os << ',' << r.n << '\n';
    }
    os.precision(old);
}

} // namespace rcov
