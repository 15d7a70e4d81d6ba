#include <catch2/catch.hpp>

#include <cstdio>
#include <fstream>
#include <sstream>

#include "cyclicity/experiments.hpp"

using namespace cyclicity;

TEST_CASE("experiment dispatch and config validation", "[experiments]") {
    REQUIRE_THROWS_AS(experiments::run("no-such-experiment", Config::object()),
                      InvalidInputError);
    Config bad;
    bad["n_min"] = 30;
    bad["n_max"] = 10;
    REQUIRE_THROWS_AS(experiments::run("lambda-limit", bad), InvalidInputError);
}

TEST_CASE("lambda-limit and minors tables carry the reference values", "[experiments]") {
    const ResultTable lam = experiments::run("lambda-limit", Config::object());
    REQUIRE(lam.columns == std::vector<std::string>{"N", "lambda1", "dist_two_over_pi"});
    REQUIRE(lam.rows.size() == 5);
    REQUIRE(lam.rows.front()[0] == 20.0);
    REQUIRE(lam.rows.front()[2] == Approx(2.32513e-5).margin(1e-7));

    const ResultTable minors = experiments::run("minors", Config::object());
    REQUIRE(minors.rows.size() == 10);
    REQUIRE(minors.rows.front()[1] == Approx(0.634179).margin(1e-5));
    REQUIRE(minors.rows.back()[1] == Approx(0.298889).margin(1e-5));
}

TEST_CASE("csv serialization is deterministic and atomic", "[experiments]") {
    Config cfg;
    cfg["n"] = 8;
    const ResultTable a = experiments::run("minors", cfg);
    const ResultTable b = experiments::run("minors", cfg);
    REQUIRE(csv_data_section(a) == csv_data_section(b));

    const std::string path = "experiments_test_output.csv";
    write_csv(a, path);
    std::ifstream in(path);
    REQUIRE(in.good());
    std::string first_line;
    std::getline(in, first_line);
    REQUIRE(first_line.rfind("# ", 0) == 0);
    const Config meta = Config::parse(first_line.substr(2));
    REQUIRE(meta.at("experiment") == "minors");
    REQUIRE(meta.at("rng") == kRngId);
    std::string header;
    std::getline(in, header);
    REQUIRE(header == "j,lambda1_minor");
    in.close();
    std::remove(path.c_str());
    std::remove((path + ".tmp").c_str());
}

TEST_CASE("slln-scatter rows are reproducible for a fixed seed", "[experiments]") {
    Config cfg;
    cfg["k_list"] = std::vector<int>{100, 2000};
    cfg["seeds"] = std::vector<std::uint64_t>{5};
    const ResultTable a = experiments::run("slln-scatter", cfg);
    const ResultTable b = experiments::run("slln-scatter", cfg);
    REQUIRE(csv_data_section(a) == csv_data_section(b));
    REQUIRE(a.rows.size() == 2);
    REQUIRE(a.metadata.contains("step_spectral_product"));
}

TEST_CASE("coom-demo reports a rank-2 recovery", "[experiments]") {
    const ResultTable table = experiments::run("coom-demo", Config::object());
    REQUIRE(table.rows.size() == 10);
    REQUIRE(table.metadata.at("dominance_ratio") == "inf");
    REQUIRE(table.metadata.at("order_matches_offsets") == true);
}

TEST_CASE("regime-sweep runs a reduced configuration end to end", "[experiments]") {
    Config cfg;
    cfg["n"] = 12;
    cfg["k"] = 20001;
    cfg["eps_list"] = std::vector<double>{1e-6, 1.0, 1e3};
    cfg["seed"] = 7;
    cfg["noise"] = {{"kind", "one"}, {"sensor", 12}, {"variance", 1.0}};
    const ResultTable table = experiments::run("regime-sweep", cfg);
    REQUIRE(table.rows.size() == 3 * 12);
    // ratio column is constant within an epsilon block
    REQUIRE(table.rows[0][3] == table.rows[11][3]);
    const ResultTable again = experiments::run("regime-sweep", cfg);
    REQUIRE(csv_data_section(table) == csv_data_section(again));
}

TEST_CASE("CYCLICITY_THREADS caps the worker count", "[experiments]") {
    setenv("CYCLICITY_THREADS", "1", 1);
    REQUIRE(thread_cap() == 1);
    unsetenv("CYCLICITY_THREADS");
    REQUIRE(thread_cap() >= 1);
}

TEST_CASE("conjecture-report flags its required checks", "[experiments]") {
    Config cfg;
    cfg["sizes"] = std::vector<int>{4, 8, 12};
    const ResultTable table = experiments::run("conjecture-report", cfg);
    REQUIRE(table.metadata.at("all_satisfied") == true);
    REQUIRE(table.columns.size() == 5);
}
