#include "rcov/error.hpp"
#include "rcov/harness.hpp"
#include "rcov/parallel.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace rcov;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

fs::path temp_dir(const std::string& name)
{
    const fs::path p = fs::temp_directory_path() / ("rcov_test_" + name);
    fs::remove_all(p);
    return p;
}

json small_config()
{
    return {{"name", "small"},
            {"scheme", {{"kind", "lebesgue"}, {"parameters", {{"a", 0.0}, {"b", 1.0}}}}},
            {"radii", {{"rule", "power"}, {"alpha", 2.0}}},
            {"K", 20000},
            {"seeds", {1, 2, 3}}};
}

} // namespace

TEST_SUITE("harness")
{
    TEST_CASE("sha-256 oracle")
    {
        CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    }

    TEST_CASE("config defaults are materialized and unknown keys rejected")
    {
        const auto cfg = ExperimentConfig::from_json(small_config());
        const json full = cfg.to_json();
        CHECK(full.at("schema_version") == k_config_schema_version);
        CHECK(full.at("estimators").at("limsup_options").contains("min_balls"));
        CHECK(full.at("delta_grid").size() > 4);
        CHECK(ExperimentConfig::from_json(full).to_json() == full);
        json bad = small_config();
        bad["colour"] = "blue";
        CHECK_THROWS_AS(ExperimentConfig::from_json(bad), Error);
        bad = small_config();
        bad["schema_version"] = 99;
        CHECK_THROWS_AS(ExperimentConfig::from_json(bad), Error);
    }

    TEST_CASE("empty seed list is a validation error")
    {
        json doc = small_config();
        doc["seeds"] = json::array();
        CHECK_THROWS_AS(ExperimentConfig::from_json(doc).validate(), Error);
    }

    TEST_CASE("runs are byte-reproducible across thread counts")
    {
        const auto cfg = ExperimentConfig::from_json(small_config());
        const fs::path a = temp_dir("repro_a");
        const fs::path b = temp_dir("repro_b");
        set_thread_count(1);
        const auto ma = run_experiment(cfg, a);
        set_thread_count(3);
        const auto mb = run_experiment(cfg, b);
        set_thread_count(0);
        CHECK_FALSE(ma.partial_failure());
        REQUIRE(ma.files.size() == mb.files.size());
        for (std::size_t i = 0; i < ma.files.size(); ++i) {
            CHECK(ma.files[i] == mb.files[i]);
        }
        CHECK(ma.input_hash == mb.input_hash);
        CHECK(fs::exists(a / "manifest.json"));
        CHECK(fs::exists(a / "seed_2" / "dimension.csv"));
    }

    TEST_CASE("report aggregates seeds and flags damaged files")
    {
        const auto cfg = ExperimentConfig::from_json(small_config());
        const fs::path dir = temp_dir("report");
        run_experiment(cfg, dir);
        auto rep = report(dir);
        REQUIRE(rep.rows.size() >= 2);
        CHECK(rep.rows[0].metric == "slope");
        CHECK(rep.rows[0].n == 3);
        CHECK(rep.rows[0].stderr_.has_value());
        CHECK(rep.warnings.empty());
        std::ofstream(dir / "seed_2" / "result.json") << "{ not json";
        rep = report(dir);
        CHECK(rep.rows[0].n == 2);
        bool flagged = false;
        for (const auto& w : rep.warnings) {
            flagged = flagged || w.find("seed_2/result.json") != std::string::npos;
        }
        CHECK(flagged);
        fs::remove(dir / "seed_3" / "result.json");
        rep = report(dir);
        CHECK(rep.rows[0].n == 1);
        CHECK_FALSE(rep.rows[0].stderr_.has_value());
        bool single = false;
        for (const auto& w : rep.warnings) {
            single = single || w.find("slope has a single sample") != std::string::npos;
        }
        CHECK(single);
        std::ostringstream os;
        print_report(os, rep);
        CHECK(os.str().find("slope") != std::string::npos);
    }

    TEST_CASE("failing seeds are recorded without aborting the run")
    {
        json doc = small_config();
        // No radius band survives, so every seed's estimator fails.
        doc["estimators"] = {{"limsup_options", {{"r_min", 1e-3}, {"r_max", 1.1e-3}}}};
        const auto cfg = ExperimentConfig::from_json(doc);
        const fs::path dir = temp_dir("failing");
        const auto man = run_experiment(cfg, dir);
        CHECK(man.partial_failure());
        CHECK(fs::exists(dir / "manifest.json"));
        for (const auto& s : man.seeds) {
            CHECK_FALSE(s.ok);
            CHECK_FALSE(s.error.empty());
        }
        const auto rep = report(dir);
        CHECK(rep.rows[0].n == 0);
    }

    TEST_CASE("acceptance pins are evaluated by the report")
    {
        json doc = small_config();
        doc["acceptance"] = {{{"metric", "slope"}, {"target", 0.5}, {"tolerance", 0.2}},
                             {{"metric", "s2_hat"}, {"target", 0.9}, {"tolerance", 0.01}}};
        const fs::path dir = temp_dir("pins");
        run_experiment(ExperimentConfig::from_json(doc), dir);
        const auto rep = report(dir);
        REQUIRE(rep.acceptance.size() == 2);
        CHECK(rep.acceptance[0].second);
        CHECK_FALSE(rep.acceptance[1].second);
    }

    TEST_CASE("shipped configs parse and validate")
    {
        for (const auto& e : fs::directory_iterator(fs::path(RCOV_SOURCE_DIR) / "configs")) {
            if (e.path().extension() != ".json") {
                continue;
            }
            std::ifstream is(e.path());
            CAPTURE(e.path().string());
            const auto cfg = ExperimentConfig::from_json(json::parse(is));
            CHECK_NOTHROW(cfg.validate());
        }
    }

    TEST_CASE("small triangle sweep stays in the sandwich")
    {
        TriangleConfig t;
        t.gammas = {0.5, 1.0};
        t.s0_fractions = {1.0};
        const auto rows = triangle_sweep(t);
        REQUIRE(rows.size() == 2);
        for (const auto& r : rows) {
            CHECK(r.ok);
            CHECK(r.inside);
        }
        t.gammas = {0.2};
        CHECK_THROWS_AS(triangle_sweep(t), Error);
    }
}
