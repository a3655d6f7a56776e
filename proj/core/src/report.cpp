#include "kpm/report.hpp"

#include <cstdio>
#include <sstream>

namespace kpm {

namespace {

const char* status_name(SolveStatus s) {
    switch (s) {
        case SolveStatus::Optimal: return "optimal";
        case SolveStatus::MaxIterations: return "max_iterations";
        case SolveStatus::Infeasible: return "infeasible";
    }
    return "unknown";
}

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    const auto e = s.find_last_not_of(" \t\r");
    return b == std::string::npos ? "" : s.substr(b, e - b + 1);
}

}  // namespace

std::string format_number(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return std::string(buf);
}

std::string format_vector(const VectorXd& v) {
    std::string out;
    for (int i = 0; i < v.size(); ++i) {
        if (i > 0) out += ',';
        out += format_number(v[i]);
    }
    return out;
}

std::string format_clearing_result(const ClearingResult& result) {
    std::ostringstream os;
    os << "mechanism = kpm\n";
    os << "status = " << status_name(result.best.report.status) << "\n";
    std::string region;
    for (size_t i = 0; i < result.best.region.size(); ++i) {
        if (i > 0) region += ',';
        region += std::to_string(result.best.region[i]);
    }
    os << "region = " << region << "\n";
    os << "objective = " << format_number(result.best.objective) << "\n";
    os << "utility = " << format_number(result.utility) << "\n";
    os << "state_prices = " << format_vector(result.best.state_prices) << "\n";
    os << "fills = " << format_vector(result.best.fills) << "\n";
    os << "total_fill = " << format_number(result.best.fills.sum()) << "\n";
    os << "mu = " << format_number(result.best.mu) << "\n";
    os << "worst_case_distribution = " << format_vector(result.worst_case_distribution)
       << "\n";
    os << "state_pnl = " << format_vector(result.state_pnl) << "\n";
    os << "worst_case_pnl = " << format_number(result.state_pnl.minCoeff()) << "\n";
    os << "regions_total = " << result.regions_total << "\n";
    os << "regions_feasible = " << result.regions_feasible << "\n";
    os << "solver_iterations = " << result.best.report.iterations << "\n";
    return os.str();
}

std::string format_cpcam_result(const CpcamSolution& sol) {
    std::ostringstream os;
    os << "mechanism = cpcam\n";
    os << "status = " << status_name(sol.report.status) << "\n";
    os << "delta = " << format_number(sol.delta) << "\n";
    os << "objective = " << format_number(-sol.report.objective) << "\n";
    os << "fills = " << format_vector(sol.fills) << "\n";
    os << "total_fill = " << format_number(sol.fills.sum()) << "\n";
    os << "state_prices = " << format_vector(sol.state_prices) << "\n";
    os << "state_price_sum = " << format_number(sol.state_prices.sum()) << "\n";
    os << "scalar_m = " << format_number(sol.scalar_m) << "\n";
    os << "slack = " << format_vector(sol.slack) << "\n";
    os << "solver_iterations = " << sol.report.iterations << "\n";
    return os.str();
}

std::vector<std::pair<std::string, std::string>> parse_key_value(const std::string& text) {
    std::vector<std::pair<std::string, std::string>> out;
    std::stringstream ss(text);
    std::string line;
    while (std::getline(ss, line)) {
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ParseError("result document: expected key = value, got '" + line + "'");
        out.emplace_back(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }
    return out;
}

}  // namespace kpm
