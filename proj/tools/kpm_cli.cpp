// Command-line front end: load an order book and a run config, clear the
// market with KPM or CPCAM, sweep parameters for plot-ready series, inspect
// the price-ladder partition, and query the inner worst-case problem.
//
// Exit codes: 0 success, 1 input error, 2 solver failure.

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "kpm/config.hpp"
#include "kpm/cpcam.hpp"
#include "kpm/kpm.hpp"
#include "kpm/report.hpp"

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw kpm::ParseError("cannot read file: " + path);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

void write_output(const std::string& out_path, const std::string& content) {
    if (out_path.empty()) {
        std::cout << content;
        return;
    }
    std::ofstream out(out_path, std::ios::binary);
    if (!out) throw kpm::ParseError("cannot write file: " + out_path);
    out << content;
}

/// Load the book; when no securities file is given the securities are
/// Arrow-Debreu claims inferred from the largest security id in the book.
kpm::OrderBook load_book(const std::string& book_path,
                         const std::string& securities_path, int states_flag) {
    const std::string text = read_file(book_path);
    if (!securities_path.empty()) {
        int n = states_flag;
        if (n <= 0) {
            // Infer N from the securities header security_id,p_1,...,p_N.
            std::stringstream ss(read_file(securities_path));
            std::string header;
            std::getline(ss, header);
            n = static_cast<int>(std::count(header.begin(), header.end(), ','));
        }
        const auto securities = kpm::parse_securities(read_file(securities_path), n);
        return kpm::parse_order_book(text, n, securities);
    }
    // Arrow-Debreu default: K securities, N = max(K, states flag).
    int max_id = 0;
    {
        std::stringstream ss(text);
        std::string line;
        std::getline(ss, line);  // header
        while (std::getline(ss, line)) {
            std::stringstream row(line);
            std::string f;
            for (int i = 0; i < 3 && std::getline(row, f, ','); ++i) {
                if (i == 2) max_id = std::max(max_id, std::atoi(f.c_str()));
            }
        }
    }
    const int n = std::max(states_flag, std::max(max_id, 1));
    std::vector<kpm::Security> securities;
    for (int k = 1; k <= std::max(max_id, n); ++k) {
        kpm::Security s;
        s.id = k;
        s.payoff = kpm::VectorXd::Zero(n);
        s.payoff[k - 1] = 1.0;
        securities.push_back(std::move(s));
    }
    return kpm::parse_order_book(text, n, securities);
}

kpm::MarketParams params_from(const kpm::RunConfig& cfg, int n_states) {
    return kpm::MarketParams(cfg.alpha, cfg.inventory_vector(n_states),
                             kpm::AmbiguitySet(cfg.prior_vector(n_states), cfg.omega));
}

int cmd_clear(const std::string& book_path, const std::string& config_path,
              const std::string& securities_path, int states_flag,
              const std::string& mechanism_flag, const std::string& out_path) {
    const kpm::OrderBook book = load_book(book_path, securities_path, states_flag);
    kpm::RunConfig cfg = kpm::RunConfig::parse(read_file(config_path));
    if (mechanism_flag == "kpm") cfg.mechanism = kpm::RunConfig::Mechanism::Kpm;
    else if (mechanism_flag == "cpcam") cfg.mechanism = kpm::RunConfig::Mechanism::Cpcam;
    else if (!mechanism_flag.empty())
        throw kpm::ValidationError("unknown mechanism: " + mechanism_flag);

    std::string doc;
    if (cfg.mechanism == kpm::RunConfig::Mechanism::Kpm) {
        const kpm::ClearingResult result =
            kpm::clear_market_kpm(book, params_from(cfg, book.num_states()));
        if (result.best.report.status == kpm::SolveStatus::MaxIterations)
            throw kpm::SolverError("kpm clear did not converge");
        doc = kpm::format_clearing_result(result);
    } else {
        const kpm::CpcamSolution sol = kpm::solve_cpcam(book, cfg.delta);
        if (sol.report.status == kpm::SolveStatus::MaxIterations)
            throw kpm::SolverError("cpcam clear did not converge");
        doc = kpm::format_cpcam_result(sol);
    }
    write_output(out_path, doc);
    return 0;
}

int cmd_sweep(const std::string& book_path, const std::string& config_path,
              const std::string& securities_path, int states_flag,
              const std::string& param, const std::string& values,
              const std::string& out_path) {
    if (param != "omega" && param != "prior")
        throw kpm::ValidationError("sweep: param must be omega or prior");
    const kpm::OrderBook book = load_book(book_path, securities_path, states_flag);
    const kpm::RunConfig base = kpm::RunConfig::parse(read_file(config_path));

    std::vector<std::string> items;
    {
        std::stringstream ss(values);
        std::string item;
        while (std::getline(ss, item, ',')) items.push_back(item);
    }
    if (items.empty()) throw kpm::ValidationError("sweep: empty values list");

    std::ostringstream os;
    os << "value";
    for (int j = 1; j <= book.num_orders(); ++j) os << ",fill_" << j;
    os << ",total_fill,worst_case_pnl,utility\n";
    for (const std::string& item : items) {
        kpm::RunConfig cfg = base;
        if (param == "omega") cfg.omega = std::stod(item);
        else cfg.prior = item;
        const kpm::ClearingResult result =
            kpm::clear_market_kpm(book, params_from(cfg, book.num_states()));
        os << item;
        for (int j = 0; j < book.num_orders(); ++j)
            os << ',' << kpm::format_number(result.best.fills[j]);
        os << ',' << kpm::format_number(result.best.fills.sum());
        os << ',' << kpm::format_number(kpm::worst_case_pnl(result));
        os << ',' << kpm::format_number(result.utility) << "\n";
    }
    write_output(out_path, os.str());
    return 0;
}

int cmd_regions(const std::string& book_path, const std::string& securities_path,
                int states_flag, bool verbose, const std::string& out_path) {
    const kpm::OrderBook book = load_book(book_path, securities_path, states_flag);
    const auto ladders = kpm::price_ladders(book);
    std::ostringstream os;
    os << "regions = " << kpm::region_count(ladders) << "\n";
    if (verbose) {
        kpm::for_each_region(ladders, [&](const kpm::Region& region) {
            kpm::Region r = region;
            const bool ok = kpm::region_feasible(r, book.securities, book.num_states());
            os << "E(";
            for (size_t i = 0; i < r.indices.size(); ++i)
                os << (i ? "," : "") << r.indices[i];
            os << ") feasible=" << (ok ? "yes" : "no");
            for (size_t k = 0; k < r.cells.size(); ++k) {
                const auto& c = r.cells[k];
                os << " s" << (k + 1);
                if (c.is_point()) os << "={" << kpm::format_number(c.lo) << "}";
                else os << "=[" << kpm::format_number(c.lo) << ","
                        << kpm::format_number(c.hi) << "]";
            }
            if (ok) {
                r.feasible = kpm::Feasibility::Yes;
                const kpm::FillSet fills = kpm::forced_fills(r, book);
                os << " fills=";
                for (size_t j = 0; j < fills.status.size(); ++j) {
                    switch (fills.status[j]) {
                        case kpm::FillStatus::FixedFull: os << 'F'; break;
                        case kpm::FillStatus::FixedZero: os << '0'; break;
                        case kpm::FillStatus::Free: os << '*'; break;
                    }
                }
            }
            os << "\n";
            return true;
        });
    }
    write_output(out_path, os.str());
    return 0;
}

int cmd_worst_case(const std::string& config_path, const std::string& values,
                   const std::string& out_path) {
    const kpm::RunConfig cfg = kpm::RunConfig::parse(read_file(config_path));
    const kpm::VectorXd d = kpm::parse_vector(values);
    const kpm::AmbiguitySet set(cfg.prior_vector(static_cast<int>(d.size())), cfg.omega);
    const kpm::WorstCase wc = kpm::worst_case_distribution(d, set);
    std::ostringstream os;
    os << "value = " << kpm::format_number(wc.value) << "\n";
    os << "mu = " << kpm::format_number(wc.mu) << "\n";
    os << "nu = " << kpm::format_number(wc.nu) << "\n";
    os << "distribution = " << kpm::format_vector(wc.distribution) << "\n";
    write_output(out_path, os.str());
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Pari-mutuel contingent-claims auction clearing (KPM / CPCAM)"};
    app.require_subcommand(1);

    std::string book_path, config_path, securities_path, mechanism, param, values,
        out_path;
    int states = 0;
    bool verbose = false;

    auto* clear = app.add_subcommand("clear", "Clear the market");
    clear->add_option("--book", book_path, "Order book CSV")->required();
    clear->add_option("--config", config_path, "Run config")->required();
    clear->add_option("--securities", securities_path, "Securities CSV (default: Arrow-Debreu)");
    clear->add_option("--states", states, "State count override");
    clear->add_option("--mechanism", mechanism, "kpm|cpcam (overrides config)");
    clear->add_option("--out", out_path, "Output path (default: stdout)");

    auto* sweep = app.add_subcommand("sweep", "Sweep omega or prior");
    sweep->add_option("--book", book_path, "Order book CSV")->required();
    sweep->add_option("--config", config_path, "Run config")->required();
    sweep->add_option("--securities", securities_path, "Securities CSV");
    sweep->add_option("--states", states, "State count override");
    sweep->add_option("--param", param, "omega|prior")->required();
    sweep->add_option("--values", values, "Comma list of sweep values")->required();
    sweep->add_option("--out", out_path, "Output path (default: stdout)");

    auto* regions = app.add_subcommand("regions", "Inspect the simplex partition");
    regions->add_option("--book", book_path, "Order book CSV")->required();
    regions->add_option("--securities", securities_path, "Securities CSV");
    regions->add_option("--states", states, "State count override");
    regions->add_flag("--verbose", verbose, "Print every cell");
    regions->add_option("--out", out_path, "Output path (default: stdout)");

    auto* worst = app.add_subcommand("worst-case", "Inner worst-case query");
    worst->add_option("--config", config_path, "Run config (prior, omega)")->required();
    worst->add_option("--values", values, "Payoff vector d")->required();
    worst->add_option("--out", out_path, "Output path (default: stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        // Collapse CLI11's usage-error codes into the input-error exit code 1
        // while keeping 0 for --help.
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (clear->parsed())
            return cmd_clear(book_path, config_path, securities_path, states, mechanism,
                             out_path);
        if (sweep->parsed())
            return cmd_sweep(book_path, config_path, securities_path, states, param,
                             values, out_path);
        if (regions->parsed())
            return cmd_regions(book_path, securities_path, states, verbose, out_path);
        if (worst->parsed()) return cmd_worst_case(config_path, values, out_path);
    } catch (const kpm::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const kpm::ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const kpm::SolverError& e) {
        std::cerr << "solver error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
