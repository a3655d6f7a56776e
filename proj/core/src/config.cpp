#include "kpm/config.hpp"

#include <cmath>
#include <sstream>
#include <vector>

namespace kpm {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    const auto e = s.find_last_not_of(" \t\r");
    return b == std::string::npos ? "" : s.substr(b, e - b + 1);
}

double to_double(const std::string& s, const std::string& key) {
    try {
        size_t pos = 0;
        const double v = std::stod(s, &pos);
        if (pos != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw ParseError("config: cannot parse number for key '" + key + "': '" + s + "'");
    }
}

}  // namespace

VectorXd parse_vector(const std::string& text) {
    std::vector<double> vals;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (item.empty()) throw ParseError("vector literal: empty component in '" + text + "'");
        vals.push_back(to_double(item, "vector"));
    }
    if (vals.empty()) throw ParseError("vector literal: no components in '" + text + "'");
    VectorXd out(static_cast<int>(vals.size()));
    for (size_t i = 0; i < vals.size(); ++i) out[static_cast<int>(i)] = vals[i];
    return out;
}

RunConfig RunConfig::parse(const std::string& text) {
    RunConfig cfg;
    std::stringstream ss(text);
    std::string line;
    int row = 0;
    while (std::getline(ss, line)) {
        ++row;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ParseError("config row " + std::to_string(row) + ": expected key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string val = trim(line.substr(eq + 1));
        if (key == "mechanism") {
            if (val == "kpm") cfg.mechanism = Mechanism::Kpm;
            else if (val == "cpcam") cfg.mechanism = Mechanism::Cpcam;
            else throw ValidationError("config: mechanism must be kpm or cpcam, got '" + val + "'");
        } else if (key == "alpha") {
            cfg.alpha = to_double(val, key);
        } else if (key == "omega") {
            cfg.omega = to_double(val, key);
        } else if (key == "delta") {
            cfg.delta = to_double(val, key);
        } else if (key == "tol") {
            cfg.tol = to_double(val, key);
        } else if (key == "prior") {
            cfg.prior = val;
        } else if (key == "inventory") {
            cfg.inventory = val;
        } else {
            throw ParseError("config row " + std::to_string(row) + ": unknown key '" + key + "'");
        }
    }
    return cfg;
}

VectorXd RunConfig::prior_vector(int n_states) const {
    VectorXd q;
    if (prior == "uniform") {
        q = VectorXd::Constant(n_states, 1.0 / n_states);
    } else if (prior.rfind("exponential", 0) == 0) {
        double rate = 1.0;
        const std::string rest = prior.substr(std::string("exponential").size());
        if (!rest.empty()) {
            if (rest.front() != '(' || rest.back() != ')')
                throw ParseError("config: malformed prior spec '" + prior + "'");
            rate = to_double(trim(rest.substr(1, rest.size() - 2)), "prior rate");
        }
        q.resize(n_states);
        for (int i = 0; i < n_states; ++i) q[i] = std::exp(rate * (i + 1));
        q /= q.sum();
    } else {
        q = parse_vector(prior);
        if (q.size() != n_states)
            throw ValidationError("config: prior has " + std::to_string(q.size()) +
                                  " components, book has " + std::to_string(n_states) +
                                  " states");
        if (q.minCoeff() <= 0.0)
            throw ValidationError("config: prior must be strictly positive");
        q /= q.sum();
    }
    return q;
}

VectorXd RunConfig::inventory_vector(int n_states) const {
    if (inventory.empty()) return VectorXd::Zero(n_states);
    VectorXd w = parse_vector(inventory);
    if (w.size() != n_states)
        throw ValidationError("config: inventory has " + std::to_string(w.size()) +
                              " components, book has " + std::to_string(n_states) +
                              " states");
    return w;
}

}  // namespace kpm
