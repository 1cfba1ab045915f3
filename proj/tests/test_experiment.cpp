#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "oracles.hpp"
#include "trotter_shuffle/errors.hpp"
#include "trotter_shuffle/experiment.hpp"
#include "trotter_shuffle/row_io.hpp"

using namespace trotter_shuffle;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path &p) {
    std::ifstream      in(p, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

fs::path scratch(const std::string &name) {
    auto dir = fs::temp_directory_path() / "trotter_shuffle_tests" / name;
    fs::remove_all(dir);
    return dir;
}

json base(const char *kind) {
    return {{"kind", kind}, {"n_list", {200, 400}}, {"trials", 3}, {"seed", 12}, {"generator", {{"name", "random_unit"}}}};
}

std::string config_error(const json &doc) {
    try {
        ExperimentConfig::from_json(doc);
    } catch(const ConfigError &e) { return e.what(); }
    return "";
}

} // namespace

TEST_CASE("config validation names the field") {
    auto doc = base("converge");
    doc["trials"] = 0;
    CHECK(config_error(doc).rfind("trials", 0) == 0);
    doc = base("converge");
    doc["n_list"] = json::array();
    CHECK(config_error(doc).rfind("n_list", 0) == 0);
    doc = base("converge");
    doc["sigma_mode"] = "reversed";
    CHECK(config_error(doc).rfind("sigma_mode", 0) == 0);
    doc = base("converge");
    doc["colour"] = 1;
    CHECK(config_error(doc).rfind("colour", 0) == 0);
    doc = base("converge");
    doc["generator"] = {{"name", "two_letter"}};
    doc["n_list"]    = {201};
    CHECK(config_error(doc).rfind("n_list", 0) == 0);
    doc              = base("regime");
    CHECK(config_error(doc).rfind("generator.name", 0) == 0);
    doc = base("converge");
    doc["generator"] = {{"name", "spiked"}, {"regime", "bogus"}};
    CHECK(config_error(doc).rfind("generator.regime", 0) == 0);
    doc = base("converge");
    doc["generator"] = {{"name", "constant"}};
    CHECK(config_error(doc).rfind("generator.matrix", 0) == 0);
    doc = base("converge");
    doc["seed"] = -1;
    CHECK(config_error(doc).rfind("seed", 0) == 0);
    CHECK(config_error(json::array()).rfind("config", 0) == 0);
    CHECK(config_error(base("words")).empty());
}

TEST_CASE("config round-trips through JSON") {
    auto doc = base("tail");
    doc["a_n"]    = 20;
    doc["target"] = "E12";
    const auto cfg  = ExperimentConfig::from_json(doc);
    const auto back = ExperimentConfig::from_json(cfg.to_json());
    CHECK(back.to_json() == cfg.to_json());
    CHECK(back.a_n == std::optional<std::size_t>(20));
}

TEST_CASE("record count and ordering") {
    for(const char *kind : {"converge", "tail", "words"}) {
        auto doc = base(kind);
        if(std::string(kind) == "words") doc["a_n"] = 4;
        const auto rep = run(ExperimentConfig::from_json(doc));
        CHECK(rep.records.rows.size() == 6);
        const auto ns = rep.records.column("n"), trials = rep.records.column("trial");
        for(std::size_t i = 0; i < 6; ++i) {
            CHECK(ns[i] == (i < 3 ? 200 : 400));
            CHECK(trials[i] == static_cast<double>(i % 3));
        }
    }
}

TEST_CASE("converge: constant row stays within the slack") {
    auto doc         = base("converge");
    doc["generator"] = {{"name", "constant"}, {"matrix", {{0.3, -0.7}, {{0.0, 1.0}, 0.2}}}};
    const auto rep   = run(ExperimentConfig::from_json(doc));
    const auto sup = rep.records.column("sup_dev"), slack = rep.records.column("slack");
    for(std::size_t i = 0; i < sup.size(); ++i) CHECK(sup[i] <= slack[i] + 1e-8);
}

TEST_CASE("converge: ordered two-letter row reproduces v*") {
    json doc{{"kind", "converge"},
             {"n_list", {2000}},
             {"trials", 1},
             {"sigma_mode", "identity"},
             {"generator", {{"name", "two_letter"}, {"B", "E12"}, {"C", "E21"}}}};
    const auto rep = run(ExperimentConfig::from_json(doc));
    bool       found = false;
    for(const auto &s : rep.summary)
        if(s.metric == "final_dev") {
            CHECK(std::abs(s.median - oracle::v_star) <= 1e-3);
            found = true;
        }
    CHECK(found);
    const auto *paths = rep.find_extra("paths");
    REQUIRE(paths);
    CHECK(paths->rows.size() == 102);
}

TEST_CASE("converge with a target") {
    auto doc      = base("converge");
    doc["target"] = "zero";
    const auto rep = run(ExperimentConfig::from_json(doc));
    for(double v : rep.records.column("target_sup_dev")) CHECK(v > 0.0);
}

TEST_CASE("emit is deterministic and the sidecar revalidates") {
    const auto dir = scratch("emit");
    auto       doc = base("converge");
    doc["threads"] = 1;
    const auto cfg = ExperimentConfig::from_json(doc);
    emit(run(cfg), dir / "a" / "run1.csv");
    emit(run(cfg), dir / "a" / "run2.csv");
    CHECK(slurp(dir / "a" / "run1.csv") == slurp(dir / "a" / "run2.csv"));
    CHECK(slurp(dir / "a" / "run1.paths.csv") == slurp(dir / "a" / "run2.paths.csv"));

    auto threaded       = doc;
    threaded["threads"] = 3;
    emit(run(ExperimentConfig::from_json(threaded)), dir / "a" / "run3.csv");
    CHECK(slurp(dir / "a" / "run1.csv") == slurp(dir / "a" / "run3.csv"));

    const auto text = slurp(dir / "a" / "run1.csv");
    CHECK(text.find('\r') == std::string::npos);
    CHECK(text.rfind("n,trial,sup_dev,final_dev,slack,target_sup_dev,target_final_dev,l1,linf,norm_mean,tropp_ward\n", 0) == 0);

    const auto sidecar = json::parse(slurp(dir / "a" / "run1.json"));
    CHECK(sidecar["schema_version"] == schema_version);
    CHECK(sidecar["provenance"]["version"] == version);
    CHECK(sidecar["provenance"]["seed"] == 12);
    CHECK(sidecar["columns"].size() == 11);
    const auto reloaded = ExperimentConfig::from_json(sidecar["config"]);
    CHECK(reloaded.to_json() == cfg.to_json());
    CHECK(!sidecar["summary"].empty());
}

TEST_CASE("emit surfaces I/O errors with the path") {
    const auto dir = scratch("blocked");
    fs::create_directories(dir);
    std::ofstream(dir / "file") << "x";
    auto rep = run(ExperimentConfig::from_json(base("words")));
    try {
        emit(rep, dir / "file" / "out.csv");
        FAIL("expected an error");
    } catch(const std::runtime_error &e) { CHECK(std::string(e.what()).find("file") != std::string::npos); }
}

TEST_CASE("tail, regime, words and evolution kinds") {
    SUBCASE("tail") {
        json doc{{"kind", "tail"}, {"n_list", {1000}}, {"trials", 200}, {"a_n", 50}, {"generator", {{"name", "random_unit"}}}};
        const auto rep = run(ExperimentConfig::from_json(doc));
        const auto *t  = rep.find_extra("tail");
        REQUIRE(t);
        CHECK(t->rows.size() == 12);
        for(double f : t->column("empirical_freq")) CHECK((f >= 0.0 && f <= 1.0));
    }
    SUBCASE("regime") {
        json doc{{"kind", "regime"},
                 {"n_list", {100000}},
                 {"trials", 2},
                 {"products", false},
                 {"generator", {{"name", "spiked"}, {"regime", "intermediate"}, {"alpha", 0.5}}}};
        const auto rep = run(ExperimentConfig::from_json(doc));
        const auto k   = rep.records.column("k_n");
        CHECK(k[0] == std::round(0.5 * std::sqrt(1e5)));
        CHECK(std::isnan(rep.records.column("sup_dev")[0]));

        json bad{{"kind", "regime"}, {"n_list", {1000000}}, {"products", false}, {"generator", {{"name", "spiked"}, {"regime", "bounded_log"}, {"delta", 1.0}}}};
        CHECK_THROWS_AS(run(ExperimentConfig::from_json(bad)), InfeasibleRegime);
    }
    SUBCASE("words") {
        json doc{{"kind", "words"}, {"n_list", {42}}, {"trials", 500}, {"a_n", 5}};
        const auto rep = run(ExperimentConfig::from_json(doc));
        for(double w : rep.records.column("within_bound")) CHECK(w == 1.0);
        const auto *t = rep.find_extra("tau");
        REQUIRE(t);
        CHECK(t->rows.size() == 6);
        doc["p_grid"] = {10.0};
        CHECK_THROWS_AS(run(ExperimentConfig::from_json(doc)), ConfigError);
    }
    SUBCASE("evolution") {
        json doc{{"kind", "evolution"},
                 {"n_list", {1000}},
                 {"trials", 3},
                 {"generator", {{"name", "riemann"}, {"fn", "step"}, {"mode", "ordered"}}}};
        const auto rep = run(ExperimentConfig::from_json(doc));
        for(double c : rep.records.column("cocycle_residual")) CHECK(c <= 1e-10);
        for(double d : rep.records.column("dev_ordered")) CHECK(d <= 1e-2);
    }
}

TEST_CASE("row JSON round-trip is bit exact") {
    ExperimentConfig cfg = ExperimentConfig::from_json(base("converge"));
    const auto       row = build_row(cfg, 50, 1);
    const auto       doc = row_to_json(row);
    CHECK(doc["n"] == 50);
    CHECK(doc["d"] == 2);
    const auto back = row_from_json(json::parse(doc.dump()));
    for(std::size_t i = 0; i < row.n(); ++i) CHECK((back[i] - row[i]).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("matrix literals") {
    CHECK(matrix_from_json("sigma_y", 2)(0, 1) == Scalar(0.0, -1.0));
    CHECK(matrix_from_json("identity", 3).isIdentity(0.0));
    CHECK(matrix_from_json(json{{1, 2}, {3, {0, 4}}}, 2)(1, 1) == Scalar(0.0, 4.0));
    CHECK_THROWS(matrix_from_json("E13", 2));
    CHECK_THROWS(matrix_from_json(json{{1, 2}, {3}}, 2));
    CHECK(matrix_from_json(matrix_to_json(matrix_from_json("sigma_y", 2)), 2) == matrix_from_json("sigma_y", 2));
}

TEST_CASE("quantile") {
    CHECK(quantile({3.0, 1.0, 2.0}, 0.5) == 2.0);
    CHECK(quantile({1.0, 2.0, 3.0, 4.0}, 0.5) == 2.5);
    CHECK(quantile({5.0}, 0.95) == 5.0);
    CHECK(quantile({0.0, 10.0}, 0.05) == doctest::Approx(0.5));
}
