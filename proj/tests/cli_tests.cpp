// End-to-end tests of the `kpm` command-line tool: exit codes, deterministic
// result files, and the shape of each command's output. The binary path and
// fixture directory are injected at compile time.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include "kpm/config.hpp"
#include "kpm/report.hpp"

namespace {

std::string data(const std::string& name) {
    return std::string(KPM_DATA_DIR) + "/" + name;
}

std::string tmp_path(const std::string& name) {
    return "cli_test_" + name;
}

int run(const std::string& args) {
    const std::string cmd =
        std::string(KPM_CLI_PATH) + " " + args + " > /dev/null 2>&1";
    const int raw = std::system(cmd.c_str());
    REQUIRE(raw != -1);
    return WEXITSTATUS(raw);
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE_MESSAGE(bool(in), "missing output file " << path);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

}  // namespace

TEST_CASE("clear kpm: exit 0 and a well-formed result document") {
    const std::string out = tmp_path("clear_kpm.txt");
    CHECK(run("clear --book " + data("table3_book.csv") + " --config " +
              data("config_kpm_uniform.cfg") + " --out " + out) == 0);
    const auto kv = kpm::parse_key_value(slurp(out));
    REQUIRE(!kv.empty());
    CHECK(kv[0].first == "mechanism");
    CHECK(kv[0].second == "kpm");
    bool saw_utility = false;
    for (const auto& [k, v] : kv)
        if (k == "utility") {
            saw_utility = true;
            CHECK(std::stod(v) <= 0.0);
        }
    CHECK(saw_utility);
    std::remove(out.c_str());
}

TEST_CASE("clear cpcam via --mechanism override") {
    const std::string out = tmp_path("clear_cpcam.txt");
    CHECK(run("clear --book " + data("table5_book.csv") + " --config " +
              data("config_kpm_uniform.cfg") + " --mechanism cpcam --out " + out) == 0);
    const auto kv = kpm::parse_key_value(slurp(out));
    CHECK(kv[0].second == "cpcam");
    std::remove(out.c_str());
}

TEST_CASE("result files are byte-identical across repeated runs") {
    const std::string a = tmp_path("det_a.txt"), b = tmp_path("det_b.txt");
    const std::string base = "clear --book " + data("table3_book.csv") + " --config " +
                             data("config_kpm_exponential.cfg") + " --out ";
    REQUIRE(run(base + a) == 0);
    REQUIRE(run(base + b) == 0);
    CHECK(slurp(a) == slurp(b));
    std::remove(a.c_str());
    std::remove(b.c_str());
}

TEST_CASE("sweep omega: CSV with one row per value") {
    const std::string out = tmp_path("sweep.csv");
    CHECK(run("sweep --book " + data("table3_book.csv") + " --config " +
              data("config_kpm_uniform.cfg") +
              " --param omega --values 0,0.2,2 --out " + out) == 0);
    std::stringstream ss(slurp(out));
    std::string line;
    REQUIRE(std::getline(ss, line));
    CHECK(line ==
          "value,fill_1,fill_2,fill_3,fill_4,fill_5,total_fill,worst_case_pnl,utility");
    int rows = 0;
    while (std::getline(ss, line))
        if (!line.empty()) ++rows;
    CHECK(rows == 3);
    std::remove(out.c_str());
}

TEST_CASE("regions: partition sizes for the sample books") {
    const std::string out = tmp_path("regions.txt");
    CHECK(run("regions --book " + data("table1_book.csv") + " --out " + out) == 0);
    CHECK(slurp(out) == "regions = 189\n");
    CHECK(run("regions --book " + data("table3_book.csv") + " --out " + out) == 0);
    CHECK(slurp(out) == "regions = 243\n");
    std::remove(out.c_str());
}

TEST_CASE("regions --verbose lists every cell") {
    const std::string out = tmp_path("regions_v.txt");
    CHECK(run("regions --book " + data("table3_book.csv") + " --verbose --out " + out) ==
          0);
    std::stringstream ss(slurp(out));
    std::string line;
    REQUIRE(std::getline(ss, line));
    CHECK(line == "regions = 243");
    int rows = 0;
    while (std::getline(ss, line))
        if (line.rfind("E(", 0) == 0) ++rows;
    CHECK(rows == 243);
    std::remove(out.c_str());
}

TEST_CASE("worst-case query") {
    const std::string out = tmp_path("wc.txt");
    CHECK(run("worst-case --config " + data("config_kpm_uniform.cfg") +
              " --values 1,2,3,4,5 --out " + out) == 0);
    const auto kv = kpm::parse_key_value(slurp(out));
    REQUIRE(kv.size() == 4);
    CHECK(kv[0].first == "value");
    // Omega = 2 lets the adversary concentrate most mass on the smallest
    // payoff, so the value sits well below the uniform mean of 3.
    CHECK(std::stod(kv[0].second) < 1.5);
    CHECK(kv[3].first == "distribution");
    std::remove(out.c_str());
}

TEST_CASE("input errors exit 1") {
    CHECK(run("clear --book /no/such/book.csv --config " +
              data("config_kpm_uniform.cfg")) == 1);
    CHECK(run("clear --book " + data("table3_book.csv") + " --config /no/such.cfg") == 1);
    CHECK(run("clear --book " + data("table3_book.csv") + " --config " +
              data("config_kpm_uniform.cfg") + " --mechanism bogus") == 1);
    CHECK(run("sweep --book " + data("table3_book.csv") + " --config " +
              data("config_kpm_uniform.cfg") + " --param gamma --values 1") == 1);
    // A malformed book: the securities file used as a book has the wrong header.
    CHECK(run("clear --book " + data("securities_ad5.csv") + " --config " +
              data("config_kpm_uniform.cfg")) == 1);
    // Missing required flags are usage errors, also exit 1.
    CHECK(run("clear --book " + data("table3_book.csv")) == 1);
    CHECK(run("unknown-subcommand") == 1);
}

TEST_CASE("--help exits 0") {
    CHECK(run("--help") == 0);
}
