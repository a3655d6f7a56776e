#include "kpm/partition.hpp"

#include <cassert>
#include <cmath>

#include "kpm/solver.hpp"

namespace kpm {

namespace {

Region::PriceCell cell_for_index(const PriceLadder& ladder, int ell) {
    const int n = ladder.n();
    assert(ell >= 1 && ell <= 2 * n + 1);
    if (n == 0) return {0.0, 1.0};
    if (ell == 1) return {0.0, ladder.prices.front()};
    if (ell % 2 == 0) {  // point cell at B^m, m = ell/2
        const double b = ladder.prices[static_cast<size_t>(ell / 2) - 1];
        return {b, b};
    }
    const int m = (ell - 1) / 2;  // interval [B^m, B^{m+1}], B^{n+1} = 1
    const double lo = ladder.prices[static_cast<size_t>(m) - 1];
    const double hi = (m == n) ? 1.0 : ladder.prices[static_cast<size_t>(m)];
    return {lo, hi};
}

}  // namespace

long long region_count(const std::vector<PriceLadder>& ladders) {
    long long total = 1;
    for (const PriceLadder& l : ladders) total *= 2LL * l.n() + 1;
    return total;
}

void for_each_region(const std::vector<PriceLadder>& ladders,
                     const std::function<bool(const Region&)>& visit) {
    const int K = static_cast<int>(ladders.size());
    Region region;
    region.indices.assign(static_cast<size_t>(K), 1);
    region.cells.resize(static_cast<size_t>(K));
    for (int k = 0; k < K; ++k)
        region.cells[static_cast<size_t>(k)] = cell_for_index(ladders[static_cast<size_t>(k)], 1);

    while (true) {
        region.feasible = Feasibility::Unknown;
        if (!visit(region)) return;
        // Odometer increment, last security fastest (lexicographic order).
        int k = K - 1;
        for (; k >= 0; --k) {
            const int cap = 2 * ladders[static_cast<size_t>(k)].n() + 1;
            if (region.indices[static_cast<size_t>(k)] < cap) {
                ++region.indices[static_cast<size_t>(k)];
                region.cells[static_cast<size_t>(k)] = cell_for_index(
                    ladders[static_cast<size_t>(k)], region.indices[static_cast<size_t>(k)]);
                break;
            }
            region.indices[static_cast<size_t>(k)] = 1;
            region.cells[static_cast<size_t>(k)] =
                cell_for_index(ladders[static_cast<size_t>(k)], 1);
        }
        if (k < 0) return;  // odometer wrapped: all regions visited
    }
}

std::vector<Region> enumerate_regions(const std::vector<PriceLadder>& ladders) {
    std::vector<Region> out;
    out.reserve(static_cast<size_t>(region_count(ladders)));
    for_each_region(ladders, [&](const Region& r) {
        out.push_back(r);
        return true;
    });
    return out;
}

bool region_feasible(const Region& region, const std::vector<Security>& securities,
                     int n_states) {
    assert(region.cells.size() == securities.size());
    const int N = n_states;

    MatrixXd eq_A(1, N);
    eq_A.setOnes();
    VectorXd eq_b(1);
    eq_b[0] = 1.0;

    MatrixXd G(N, N);
    G = -MatrixXd::Identity(N, N);  // xi >= 0
    VectorXd h = VectorXd::Zero(N);

    auto append_eq = [&](const VectorXd& row, double rhs) {
        eq_A.conservativeResize(eq_A.rows() + 1, N);
        eq_A.row(eq_A.rows() - 1) = row.transpose();
        eq_b.conservativeResize(eq_b.size() + 1);
        eq_b[eq_b.size() - 1] = rhs;
    };
    auto append_ineq = [&](const VectorXd& row, double rhs) {
        G.conservativeResize(G.rows() + 1, N);
        G.row(G.rows() - 1) = row.transpose();
        h.conservativeResize(h.size() + 1);
        h[h.size() - 1] = rhs;
    };

    for (size_t k = 0; k < securities.size(); ++k) {
        const VectorXd& P = securities[k].payoff;
        const Region::PriceCell& c = region.cells[k];
        if (c.is_point()) {
            append_eq(P, c.lo);
        } else {
            append_ineq(P, c.hi);    // P . xi <= hi
            append_ineq(-P, -c.lo);  // P . xi >= lo
        }
    }

    const FeasiblePoint fp = max_margin_point(eq_A, eq_b, G, h);
    return fp.eq_consistent && fp.margin >= -1e-9;
}

FillSet forced_fills(const Region& region, const OrderBook& book) {
    if (region.feasible == Feasibility::No)
        throw ValidationError("forced_fills: region is infeasible");
    FillSet fills;
    fills.status.reserve(book.orders.size());
    for (const Order& o : book.orders) {
        const Region::PriceCell& c = region.cells[static_cast<size_t>(o.security_id) - 1];
        const double b = o.limit_price;
        FillStatus s;
        if (c.is_point() && c.lo == b) {
            s = FillStatus::Free;  // price pinned exactly at the bid
        } else if (o.side == Side::Buy) {
            // Buy fills below its bid. Bids are ladder endpoints, so the cell
            // lies entirely on one side of b.
            s = (c.hi <= b) ? FillStatus::FixedFull : FillStatus::FixedZero;
        } else {
            // Sell fills above its limit.
            s = (c.lo >= b) ? FillStatus::FixedFull : FillStatus::FixedZero;
        }
        fills.status.push_back(s);
    }
    return fills;
}

}  // namespace kpm
