#include <doctest.h>

#include <cmath>

#include "kpm/config.hpp"
#include "kpm/report.hpp"
#include "test_util.hpp"

using namespace kpm;
using namespace kpm_test;

TEST_CASE("config parsing: defaults, comments, whitespace") {
    const RunConfig d = RunConfig::parse("");
    CHECK(d.mechanism == RunConfig::Mechanism::Kpm);
    CHECK(d.alpha == 1.0);
    CHECK(d.omega == 0.0);
    CHECK(d.delta == 1e-4);
    CHECK(d.tol == 1e-9);
    CHECK(d.prior == "uniform");
    CHECK(d.inventory.empty());

    const RunConfig c = RunConfig::parse(
        "# clearing run\n"
        "mechanism = cpcam\n"
        "  alpha=2.5   # trailing comment\n"
        "omega = 0.4\n"
        "\n"
        "delta = 1e-3\n"
        "tol = 1e-8\n"
        "prior = exponential(0.5)\n"
        "inventory = 0.1, -0.2, 0\n");
    CHECK(c.mechanism == RunConfig::Mechanism::Cpcam);
    CHECK(c.alpha == 2.5);
    CHECK(c.omega == 0.4);
    CHECK(c.delta == 1e-3);
    CHECK(c.tol == 1e-8);
    CHECK(c.prior == "exponential(0.5)");
    CHECK(c.inventory == "0.1, -0.2, 0");
}

TEST_CASE("config parsing: malformed input raises ParseError") {
    CHECK_THROWS_AS(RunConfig::parse("bogus_key = 1\n"), ParseError);
    CHECK_THROWS_AS(RunConfig::parse("alpha 1\n"), ParseError);
    CHECK_THROWS_AS(RunConfig::parse("alpha = abc\n"), ParseError);
    CHECK_THROWS_AS(RunConfig::parse("mechanism = lmsr\n"), ValidationError);
}

TEST_CASE("prior resolution") {
    RunConfig cfg;
    const VectorXd u = cfg.prior_vector(4);
    for (int i = 0; i < 4; ++i) CHECK(u[i] == doctest::Approx(0.25));

    cfg.prior = "exponential";
    const VectorXd e1 = cfg.prior_vector(5);
    CHECK(e1.sum() == doctest::Approx(1.0).epsilon(1e-14));
    // q_i ~ e^i, so the last state carries ~63.6% of the mass.
    CHECK(e1[4] == doctest::Approx(0.636409).epsilon(1e-5));
    for (int i = 1; i < 5; ++i) CHECK(e1[i] / e1[i - 1] == doctest::Approx(std::exp(1.0)));

    cfg.prior = "exponential(1)";
    CHECK((cfg.prior_vector(5) - e1).cwiseAbs().maxCoeff() <= 1e-15);
    cfg.prior = "exponential(0)";
    CHECK((cfg.prior_vector(4) - VectorXd::Constant(4, 0.25)).cwiseAbs().maxCoeff() <= 1e-15);

    cfg.prior = "2, 1, 1";
    const VectorXd lst = cfg.prior_vector(3);
    CHECK(lst[0] == doctest::Approx(0.5));
    CHECK(lst[1] == doctest::Approx(0.25));

    cfg.prior = "1, 2";
    CHECK_THROWS_AS(cfg.prior_vector(3), ValidationError);
    cfg.prior = "1, 0, 1";
    CHECK_THROWS_AS(cfg.prior_vector(3), ValidationError);
    cfg.prior = "exponential(abc)";
    CHECK_THROWS_AS(cfg.prior_vector(3), ParseError);
    cfg.prior = "exponential(1";
    CHECK_THROWS_AS(cfg.prior_vector(3), ParseError);
}

TEST_CASE("inventory resolution") {
    RunConfig cfg;
    CHECK(cfg.inventory_vector(3).cwiseAbs().maxCoeff() == 0.0);
    cfg.inventory = "1, -2, 0.5";
    const VectorXd w = cfg.inventory_vector(3);
    CHECK(w[1] == -2.0);
    CHECK_THROWS_AS(cfg.inventory_vector(4), ValidationError);
    cfg.inventory = "1,,2";
    CHECK_THROWS_AS(cfg.inventory_vector(3), ParseError);
}

TEST_CASE("parse_vector") {
    const VectorXd v = parse_vector("0.1,2e-3, -4");
    REQUIRE(v.size() == 3);
    CHECK(v[1] == 2e-3);
    CHECK(v[2] == -4.0);
    CHECK_THROWS_AS(parse_vector(""), ParseError);
    CHECK_THROWS_AS(parse_vector("1,x"), ParseError);
}

TEST_CASE("format_number: 12 significant digits, deterministic") {
    CHECK(format_number(0.0) == "0");
    CHECK(format_number(1.0) == "1");
    CHECK(format_number(1.0 / 3.0) == "0.333333333333");
    CHECK(format_number(-1.5e-10) == "-1.5e-10");
    CHECK(format_number(123456789012345.0) == "1.23456789012e+14");
    // Identical inputs give byte-identical output.
    CHECK(format_number(0.1 + 0.2) == format_number(0.30000000000000004));
    CHECK(format_vector(parse_vector("1,0.25,3e-5")) == "1,0.25,3e-05");
}

TEST_CASE("clearing result document: fixed key order, round trip") {
    const OrderBook book = load_book("table3_book.csv", 5);
    const MarketParams params(1.0, VectorXd::Zero(5),
                              AmbiguitySet(VectorXd::Constant(5, 0.2), 0.2));
    const ClearingResult res = clear_market_kpm(book, params);
    const std::string doc = format_clearing_result(res);
    CHECK(doc == format_clearing_result(res));  // deterministic

    const auto kv = parse_key_value(doc);
    const std::vector<std::string> want = {
        "mechanism",     "status",        "region",
        "objective",     "utility",       "state_prices",
        "fills",         "total_fill",    "mu",
        "worst_case_distribution",        "state_pnl",
        "worst_case_pnl", "regions_total", "regions_feasible",
        "solver_iterations"};
    REQUIRE(kv.size() == want.size());
    for (size_t i = 0; i < want.size(); ++i) CHECK(kv[i].first == want[i]);
    CHECK(kv[0].second == "kpm");
    CHECK(kv[1].second == "optimal");
    CHECK(parse_vector(kv[5].second).size() == 5);
    CHECK(parse_vector(kv[6].second).size() == 5);
    // total_fill is consistent with the fills vector at print precision.
    CHECK(parse_vector(kv[6].second).sum() ==
          doctest::Approx(parse_vector(kv[7].second)[0]).epsilon(1e-9));
    CHECK(kv[12].second == "243");
}

TEST_CASE("cpcam result document: fixed key order, invariants") {
    const OrderBook book = load_book("table5_book.csv", 5);
    const CpcamSolution sol = solve_cpcam(book, 1e-4);
    const std::string doc = format_cpcam_result(sol);
    CHECK(doc == format_cpcam_result(sol));

    const auto kv = parse_key_value(doc);
    const std::vector<std::string> want = {
        "mechanism", "status",     "delta",           "objective",
        "fills",     "total_fill", "state_prices",    "state_price_sum",
        "scalar_m",  "slack",      "solver_iterations"};
    REQUIRE(kv.size() == want.size());
    for (size_t i = 0; i < want.size(); ++i) CHECK(kv[i].first == want[i]);
    CHECK(kv[0].second == "cpcam");
    CHECK(parse_vector(kv[6].second).sum() == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("parse_key_value rejects malformed rows") {
    CHECK_THROWS_AS(parse_key_value("mechanism kpm\n"), ParseError);
    CHECK(parse_key_value("\n\n").empty());
}
