#pragma once

#include <vector>

#include "kpm/ambiguity.hpp"
#include "kpm/orderbook.hpp"
#include "kpm/partition.hpp"
#include "kpm/solver.hpp"

namespace kpm {

/// Market-maker parameters of the robust clearing problem: CARA risk
/// aversion u(x) = -e^{-alpha x}, per-state inventory w, and the KL ambiguity
/// ball (q, Omega). The derived constants are z_i = -e^{-alpha w_i} < 0 and
/// theta_i = q_i e^{Omega} > 0.
struct MarketParams {
    double alpha;
    VectorXd inventory;      // w, length N
    AmbiguitySet ambiguity;  // (q, Omega)

    MarketParams(double alpha_, VectorXd inventory_, AmbiguitySet ambiguity_);

    VectorXd z() const;
    VectorXd theta() const;
};

/// Optimum of one region subproblem
///     minimize    L(mu, omega) = mu ln( sum_i theta_i e^{omega_i/mu} )
///     subject to  omega_i = -z_i e^{zeta_i},  mu >= 0,
///                 xi in the region's cell,  x per the region's FillSet,
/// where zeta_i = alpha sum_j x_j (A_ij - (A' xi)_j) is affine within the
/// region: fixed fills substitute their constants and free fills trade at
/// their pinned bid price. By strong duality the region's worst-case expected
/// utility is -L.
struct RegionSolution {
    std::vector<int> region;  // cell indices (l_1, ..., l_K)
    VectorXd state_prices;    // xi, length N
    VectorXd fills;           // x, length J
    double mu = 0.0;
    VectorXd zeta;            // length N
    VectorXd omega;           // length N, omega_i = -d_i at the optimum
    double objective = 0.0;   // L, refined through the ambiguity dual
    SolverReport report;
};

struct ClearingResult {
    RegionSolution best;
    VectorXd worst_case_distribution;  // p* at the optimal wealth profile
    VectorXd state_pnl;                // w_i + sum_j x_j ((A' xi)_j - A_ij)
    double utility = 0.0;              // worst-case expected utility = -L*
    long long regions_total = 0;
    long long regions_feasible = 0;
};

/// Solve the convex subproblem of one feasible region.
RegionSolution solve_region(const OrderBook& book, const Region& region,
                            const FillSet& fills, const MarketParams& params);

/// The global clearing algorithm: enumerate every region of the price-ladder
/// partition, solve the feasible ones, and keep the region of minimum L
/// (worst-case utility is -L, so minimizing L maximizes utility). Ties within
/// 1e-9 break to the lexicographically smallest region index.
ClearingResult clear_market_kpm(const OrderBook& book, const MarketParams& params);

/// min_i PnL_i: with zero inventory and large Omega this is >= 0 up to
/// tolerance (the completely pari-mutuel regime).
double worst_case_pnl(const ClearingResult& result);

/// The primal objective of the robust clearing problem at a candidate (xi, x):
///     min_{p in Psi}  - sum_i p_i exp[-alpha w_i - alpha sum_j x_j((A' xi)_j - A_ij)]
/// evaluated through the ambiguity module's dual.
double evaluate_primal_objective(const OrderBook& book, const VectorXd& xi,
                                 const VectorXd& x, const MarketParams& params);

/// Per-state mark-to-market PnL of the market maker at a clearing (xi, x).
VectorXd state_pnl(const OrderBook& book, const VectorXd& xi, const VectorXd& x,
                   const VectorXd& inventory);

}  // namespace kpm
