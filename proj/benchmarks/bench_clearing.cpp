#include <benchmark/benchmark.h>

#include <fstream>
#include <sstream>

#include "kpm/ambiguity.hpp"
#include "kpm/cpcam.hpp"
#include "kpm/kpm.hpp"
#include "kpm/partition.hpp"

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

std::vector<kpm::Security> ad_securities(int n) {
    std::vector<kpm::Security> out;
    for (int k = 1; k <= n; ++k) {
        kpm::Security s;
        s.id = k;
        s.payoff = kpm::VectorXd::Zero(n);
        s.payoff[k - 1] = 1.0;
        out.push_back(std::move(s));
    }
    return out;
}

kpm::OrderBook load(const char* name) {
    return kpm::parse_order_book(read_file(std::string(KPM_DATA_DIR) + "/" + name), 5,
                                 ad_securities(5));
}

kpm::VectorXd exp_prior(int n) {
    kpm::VectorXd q(n);
    for (int i = 0; i < n; ++i) q[i] = std::exp(i + 1.0);
    return q / q.sum();
}

void BM_RegionEnumeration(benchmark::State& state) {
    const kpm::OrderBook book = load("table1_book.csv");
    const auto ladders = kpm::price_ladders(book);
    for (auto _ : state) {
        long long feasible = 0;
        kpm::for_each_region(ladders, [&](const kpm::Region& r) {
            if (kpm::region_feasible(r, book.securities, book.num_states())) ++feasible;
            return true;
        });
        benchmark::DoNotOptimize(feasible);
    }
}
BENCHMARK(BM_RegionEnumeration)->Unit(benchmark::kMillisecond);

void BM_WorstCaseInner(benchmark::State& state) {
    const kpm::AmbiguitySet set(exp_prior(5), 1.0);
    kpm::VectorXd d(5);
    d << -1.1, -0.9, -1.0, -0.95, -1.05;
    for (auto _ : state) {
        benchmark::DoNotOptimize(kpm::worst_case_distribution(d, set).value);
    }
}
BENCHMARK(BM_WorstCaseInner);

void BM_ClearKpmTable3(benchmark::State& state) {
    const kpm::OrderBook book = load("table3_book.csv");
    const kpm::MarketParams params(1.0, kpm::VectorXd::Zero(5),
                                   kpm::AmbiguitySet(exp_prior(5), 0.2));
    for (auto _ : state) {
        benchmark::DoNotOptimize(kpm::clear_market_kpm(book, params).utility);
    }
}
BENCHMARK(BM_ClearKpmTable3)->Unit(benchmark::kMillisecond);

void BM_CpcamTable5(benchmark::State& state) {
    const kpm::OrderBook book = load("table5_book.csv");
    for (auto _ : state) {
        benchmark::DoNotOptimize(kpm::solve_cpcam(book, 1e-4).scalar_m);
    }
}
BENCHMARK(BM_CpcamTable5)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
