#pragma once

#include <functional>
#include <vector>

#include "kpm/orderbook.hpp"

namespace kpm {

enum class Feasibility { Unknown, Yes, No };

enum class FillStatus { FixedZero, FixedFull, Free };

/// One convex cell E(l_1,...,l_K) of the state-price simplex. Security k's
/// ladder B^1 < ... < B^n splits the clearing price P_k . xi into 2n+1
/// alternating cells, indexed 1-based:
///     l = 1      -> [0, B^1]
///     l = 2m     -> { B^m }          (price pinned to a quoted bid)
///     l = 2m+1   -> [B^m, B^{m+1}]   (with B^{n+1} = 1)
/// A security with an empty ladder contributes the single cell [0, 1].
struct Region {
    struct PriceCell {
        double lo, hi;  // lo == hi encodes a point cell
        bool is_point() const { return lo == hi; }
    };
    std::vector<int> indices;          // l_k, one per security, 1-based
    std::vector<PriceCell> cells;      // one per security
    Feasibility feasible = Feasibility::Unknown;
};

/// The per-order fill statuses forced by a region: within a cell each order's
/// clearing price sits entirely on one side of its bid (or exactly on it), so
/// the limit order logic resolves to a fixed fill or a free box [0, Q_j].
struct FillSet {
    std::vector<FillStatus> status;  // one per order, order-id order
};

/// Exact region count: prod_k (2 n_k + 1).
long long region_count(const std::vector<PriceLadder>& ladders);

/// Visit every region in lexicographic index order (a pure generator; the
/// callback may return false to stop early).
void for_each_region(const std::vector<PriceLadder>& ladders,
                     const std::function<bool(const Region&)>& visit);

/// Materialize all prod_k (2 n_k + 1) regions in lexicographic order.
std::vector<Region> enumerate_regions(const std::vector<PriceLadder>& ladders);

/// True iff some xi >= 0 with sum xi = 1 satisfies every per-security
/// interval/point constraint on P_k . xi (decided by a phase-I max-margin
/// solve; exactly-zero slack counts as feasible, the cells are closed).
bool region_feasible(const Region& region, const std::vector<Security>& securities,
                     int n_states);

/// Classify every order of the book within the region:
///     BUY : cell entirely <= b_j -> FixedFull, entirely >= b_j -> FixedZero,
///           pinned at b_j -> Free;
///     SELL: mirrored (fills when the price exceeds the limit).
/// Bids are ladder points, so no interval cell straddles a bid.
FillSet forced_fills(const Region& region, const OrderBook& book);

}  // namespace kpm
