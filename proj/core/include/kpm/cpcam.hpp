#pragma once

#include <vector>

#include "kpm/orderbook.hpp"
#include "kpm/solver.hpp"

namespace kpm {

/// Solution of the CPCAM barrier clearing problem
///     maximize    b'x - M + delta * sum_i ln s_i
///     subject to  (A x)_i + s_i = M,   0 <= x <= Q,   s > 0,
/// with uniform starting order delta. The state prices are the multipliers
/// epsilon_i = delta / s_i; stationarity in M forces sum_i epsilon_i = 1.
struct CpcamSolution {
    VectorXd fills;         // x, length J
    VectorXd slack;         // s = M - A x, length N
    double scalar_m = 0.0;  // M
    VectorXd state_prices;  // epsilon = delta / s
    double delta = 0.0;
    SolverReport report;
};

/// Solve the CPCAM for a buy-only book. s is eliminated via s = M - A x,
/// leaving a smooth concave maximization in (x, M) whose s > 0 domain is
/// enforced by the log terms.
CpcamSolution solve_cpcam(const OrderBook& book, double delta);

/// The delta -> 0 limiting LP:  maximize b'x - max_i (A x)_i, 0 <= x <= Q.
/// Solved via a log-sum-exp smoothing of the max (temperature 1e-6) on the
/// generic solver.
VectorXd solve_cpcam_lp(const OrderBook& book);

/// Objective b'x - max_i (A x)_i of the limiting LP at a given fill vector.
double cpcam_lp_value(const OrderBook& book, const VectorXd& x);

/// Central-path convergence diagnostic: for each delta (strictly positive,
/// decreasing) report ||x(delta) - x*_LP||_inf.
std::vector<std::pair<double, double>> delta_path(const OrderBook& book,
                                                  const std::vector<double>& deltas);

}  // namespace kpm
