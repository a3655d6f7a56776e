#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "kpm/errors.hpp"

namespace kpm {

using Eigen::MatrixXd;
using Eigen::VectorXd;

enum class Side { Buy = +1, Sell = -1 };

/// A traded contingent claim. payoff[i] is the dollar payout of one share
/// in state i; for Arrow-Debreu security k the payoff is the k-th unit vector.
struct Security {
    int id;          // 1-based index k
    VectorXd payoff; // P_k, length N

    bool is_unit_payoff() const;
};

/// One outstanding limit order. The stored payoff_column is sign-adjusted:
/// for a BUY it equals the security payoff, for a SELL its negation. Under
/// this convention the clearing-side price of order j is always (A' xi)_j
/// and the limit order logic reads uniformly as
///     (A' xi)_j > B_j b_j  =>  x_j = 0,
///     (A' xi)_j < B_j b_j  =>  x_j = Q_j,
///     equality              =>  x_j in [0, Q_j].
struct Order {
    int id;                 // 1-based index j
    int security_id;        // k
    Side side;
    double limit_price;     // b_j, dollars per share
    double limit_quantity;  // Q_j >= 0, shares
    VectorXd payoff_column; // A_{.j}, length N, sign-adjusted

    double side_sign() const { return side == Side::Buy ? 1.0 : -1.0; }
    /// B_j b_j: the bid on the sign-adjusted price axis.
    double signed_limit() const { return side_sign() * limit_price; }
};

struct OrderBook {
    int n_states = 0;                  // N
    std::vector<Security> securities;  // indexed by id - 1
    std::vector<Order> orders;         // indexed by id - 1

    int num_states() const { return n_states; }
    int num_orders() const { return static_cast<int>(orders.size()); }
    int num_securities() const { return static_cast<int>(securities.size()); }
    const Security& security(int id) const;
    bool all_buy() const;
    /// True when every security pays $1 on exactly one state (the setting of
    /// the partitioned clearing algorithm and of the (0,1) bid validation).
    bool all_unit_payoff() const;
};

/// The distinct limit prices quoted on one security, ascending:
/// B_k^1 < ... < B_k^{n_k}. Empty when no order references the security.
struct PriceLadder {
    int security_id = 0;
    std::vector<double> prices;

    int n() const { return static_cast<int>(prices.size()); }
};

/// Build a validated OrderBook from already-constructed orders. Orders keep
/// their given ids; payoff columns are derived (and sign-adjusted) from the
/// securities, so callers only supply (id, security_id, side, price, quantity).
OrderBook make_order_book(int n_states, std::vector<Security> securities,
                          const std::vector<Order>& orders);

/// Parse the canonical securities CSV: header `security_id,p_1,...,p_N`,
/// one row per security.
std::vector<Security> parse_securities(const std::string& text, int n_states);

/// Parse the canonical order-book CSV with header
/// `order_id,limit_quantity,security_id,limit_price,side` (side: buy|sell).
/// Row order is preserved as order ids; ids in the file must match position.
OrderBook parse_order_book(const std::string& text, int n_states,
                           const std::vector<Security>& securities);

/// Serialize back to the canonical order-book CSV (round-trips with
/// parse_order_book on the canonical field set).
std::string serialize_order_book(const OrderBook& book);

/// One ladder per security (empty ladders included), duplicates collapsed.
std::vector<PriceLadder> price_ladders(const OrderBook& book);

/// The N x J matrix A whose column j is order j's sign-adjusted payoff.
MatrixXd payoff_matrix(const OrderBook& book);

}  // namespace kpm
