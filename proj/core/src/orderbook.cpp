#include "kpm/orderbook.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <set>
#include <sstream>

namespace kpm {

namespace {

std::vector<std::string> split_csv_row(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    std::stringstream ss(line);
    while (std::getline(ss, field, ',')) {
        // trim surrounding whitespace
        const auto b = field.find_first_not_of(" \t\r");
        const auto e = field.find_last_not_of(" \t\r");
        fields.push_back(b == std::string::npos ? "" : field.substr(b, e - b + 1));
    }
    if (!line.empty() && line.back() == ',') fields.push_back("");
    return fields;
}

double parse_number(const std::string& s, int row, const char* what) {
    try {
        size_t pos = 0;
        const double v = std::stod(s, &pos);
        if (pos != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw ParseError("row " + std::to_string(row) + ": cannot parse " +
                         std::string(what) + " from '" + s + "'");
    }
}

int parse_int(const std::string& s, int row, const char* what) {
    const double v = parse_number(s, row, what);
    const int i = static_cast<int>(std::lround(v));
    if (std::abs(v - i) > 0) {
        throw ParseError("row " + std::to_string(row) + ": " + std::string(what) +
                         " must be an integer, got '" + s + "'");
    }
    return i;
}

std::vector<std::string> non_empty_lines(const std::string& text) {
    std::vector<std::string> lines;
    std::stringstream ss(text);
    std::string line;
    while (std::getline(ss, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.find_first_not_of(" \t") != std::string::npos) lines.push_back(line);
    }
    return lines;
}

}  // namespace

bool Security::is_unit_payoff() const {
    int ones = 0;
    for (int i = 0; i < payoff.size(); ++i) {
        if (payoff[i] == 1.0) ++ones;
        else if (payoff[i] != 0.0) return false;
    }
    return ones == 1;
}

const Security& OrderBook::security(int id) const {
    assert(id >= 1 && id <= num_securities());
    return securities[static_cast<size_t>(id) - 1];
}

bool OrderBook::all_buy() const {
    return std::all_of(orders.begin(), orders.end(),
                       [](const Order& o) { return o.side == Side::Buy; });
}

bool OrderBook::all_unit_payoff() const {
    return std::all_of(securities.begin(), securities.end(),
                       [](const Security& s) { return s.is_unit_payoff(); });
}

OrderBook make_order_book(int n_states, std::vector<Security> securities,
                          const std::vector<Order>& orders) {
    if (n_states <= 0) throw ValidationError("state count must be positive");
    for (size_t k = 0; k < securities.size(); ++k) {
        const Security& s = securities[k];
        if (s.id != static_cast<int>(k) + 1)
            throw ValidationError("security ids must be 1..K in order");
        if (s.payoff.size() != n_states)
            throw ValidationError("security " + std::to_string(s.id) +
                                  ": payoff length != N");
        if (s.payoff.cwiseAbs().maxCoeff() == 0.0)
            throw ValidationError("security " + std::to_string(s.id) +
                                  ": payoff is identically zero");
    }

    OrderBook book;
    book.n_states = n_states;
    book.securities = std::move(securities);

    const bool unit_book = book.all_unit_payoff();
    book.orders.reserve(orders.size());
    for (const Order& o : orders) {
        if (o.security_id < 1 || o.security_id > book.num_securities())
            throw ValidationError("order " + std::to_string(o.id) +
                                  ": unknown security id " + std::to_string(o.security_id));
        if (o.limit_quantity < 0)
            throw ValidationError("order " + std::to_string(o.id) + ": negative quantity");
        if (o.limit_price <= 0)
            throw ValidationError("order " + std::to_string(o.id) + ": nonpositive price");
        // Unit-payoff claims must be bid strictly inside (0,1).
        if (unit_book && o.limit_price >= 1.0)
            throw ValidationError("order " + std::to_string(o.id) +
                                  ": limit price must lie strictly in (0,1)");
        Order stored = o;
        stored.payoff_column = stored.side_sign() * book.security(o.security_id).payoff;
        book.orders.push_back(std::move(stored));
    }
    return book;
}

std::vector<Security> parse_securities(const std::string& text, int n_states) {
    const auto lines = non_empty_lines(text);
    if (lines.empty()) throw ParseError("securities file: missing header row");
    std::vector<Security> out;
    for (size_t r = 1; r < lines.size(); ++r) {
        const auto f = split_csv_row(lines[r]);
        const int row = static_cast<int>(r) + 1;
        if (static_cast<int>(f.size()) != n_states + 1)
            throw ParseError("row " + std::to_string(row) + ": expected " +
                             std::to_string(n_states + 1) + " fields, got " +
                             std::to_string(f.size()));
        Security s;
        s.id = parse_int(f[0], row, "security_id");
        s.payoff.resize(n_states);
        for (int i = 0; i < n_states; ++i)
            s.payoff[i] = parse_number(f[static_cast<size_t>(i) + 1], row, "payoff");
        out.push_back(std::move(s));
    }
    return out;
}

OrderBook parse_order_book(const std::string& text, int n_states,
                           const std::vector<Security>& securities) {
    const auto lines = non_empty_lines(text);
    if (lines.empty()) throw ParseError("order book: missing header row");
    const auto header = split_csv_row(lines[0]);
    const std::vector<std::string> expected = {"order_id", "limit_quantity",
                                              "security_id", "limit_price", "side"};
    if (header != expected)
        throw ParseError("order book: unexpected header '" + lines[0] + "'");

    std::vector<Order> orders;
    for (size_t r = 1; r < lines.size(); ++r) {
        const auto f = split_csv_row(lines[r]);
        const int row = static_cast<int>(r) + 1;
        if (f.size() != 5)
            throw ParseError("row " + std::to_string(row) + ": expected 5 fields, got " +
                             std::to_string(f.size()));
        Order o;
        o.id = parse_int(f[0], row, "order_id");
        o.limit_quantity = parse_number(f[1], row, "limit_quantity");
        o.security_id = parse_int(f[2], row, "security_id");
        o.limit_price = parse_number(f[3], row, "limit_price");
        if (f[4] == "buy") o.side = Side::Buy;
        else if (f[4] == "sell") o.side = Side::Sell;
        else throw ParseError("row " + std::to_string(row) + ": side must be buy or sell");
        if (o.id != static_cast<int>(orders.size()) + 1)
            throw ParseError("row " + std::to_string(row) + ": order ids must be 1..J in order");
        orders.push_back(std::move(o));
    }
    return make_order_book(n_states, securities, orders);
}

std::string serialize_order_book(const OrderBook& book) {
    std::ostringstream os;
    os << "order_id,limit_quantity,security_id,limit_price,side\n";
    os.precision(17);
    for (const Order& o : book.orders) {
        os << o.id << ',' << o.limit_quantity << ',' << o.security_id << ','
           << o.limit_price << ',' << (o.side == Side::Buy ? "buy" : "sell") << '\n';
    }
    return os.str();
}

std::vector<PriceLadder> price_ladders(const OrderBook& book) {
    std::vector<std::set<double>> bids(static_cast<size_t>(book.num_securities()));
    for (const Order& o : book.orders)
        bids[static_cast<size_t>(o.security_id) - 1].insert(o.limit_price);
    std::vector<PriceLadder> ladders;
    ladders.reserve(bids.size());
    for (size_t k = 0; k < bids.size(); ++k) {
        PriceLadder l;
        l.security_id = static_cast<int>(k) + 1;
        l.prices.assign(bids[k].begin(), bids[k].end()); // std::set: ascending, distinct
        ladders.push_back(std::move(l));
    }
    return ladders;
}

MatrixXd payoff_matrix(const OrderBook& book) {
    MatrixXd A(book.n_states, book.num_orders());
    for (int j = 0; j < book.num_orders(); ++j)
        A.col(j) = book.orders[static_cast<size_t>(j)].payoff_column;
    return A;
}

}  // namespace kpm
