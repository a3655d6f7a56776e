#pragma once

#include <functional>
#include <optional>

#include <Eigen/Dense>

#include "kpm/errors.hpp"

namespace kpm {

using Eigen::MatrixXd;
using Eigen::VectorXd;

/// A smooth convex program
///     minimize    f(v)
///     subject to  eq_A v = eq_b
///                 ineq_G v <= ineq_h
/// with value/gradient/Hessian oracles for f. The value oracle must return
/// +infinity outside the domain of f (the line search treats that as a
/// rejected step); gradient/Hessian are only queried at domain points.
struct ConvexProgram {
    int dimension = 0;
    std::function<double(const VectorXd&)> value;
    std::function<VectorXd(const VectorXd&)> gradient;
    std::function<MatrixXd(const VectorXd&)> hessian;

    MatrixXd eq_A;   // possibly 0 rows
    VectorXd eq_b;
    MatrixXd ineq_G; // possibly 0 rows
    VectorXd ineq_h;

    /// Optional strictly feasible start; when absent (or not strictly
    /// feasible) a phase-I max-margin solve finds one.
    std::optional<VectorXd> initial_point;

    ConvexProgram() = default;
    explicit ConvexProgram(int dim);

    void add_equality(const VectorXd& row, double rhs);
    void add_inequality(const VectorXd& row, double rhs);  // row . v <= rhs
    void add_lower_bound(int i, double lo);                // v_i >= lo
    void add_upper_bound(int i, double hi);                // v_i <= hi
};

enum class SolveStatus { Optimal, MaxIterations, Infeasible };

struct SolverReport {
    VectorXd solution;
    double objective = 0.0;
    double stationarity = 0.0;     // norm of the projected KKT gradient
    double primal_residual = 0.0;  // max constraint violation
    double complementarity = 0.0;  // max |lambda_i * slack_i| estimate
    int iterations = 0;
    SolveStatus status = SolveStatus::Optimal;
};

/// Log-barrier interior-point minimization: equalities are removed by
/// null-space elimination, a phase-I max-margin solve produces a strictly
/// feasible start (promoting implied equalities when the feasible set has
/// empty interior), then an outer barrier loop (factor 10) wraps damped
/// Newton steps with Armijo backtracking.
SolverReport minimize(const ConvexProgram& program, double tol = 1e-9,
                      int max_iter = 200);

/// Result of the phase-I max-margin solve for the constraint system
/// eq_A v = eq_b, G v <= h: a point maximizing min_i (h - G v)_i (capped at 1).
struct FeasiblePoint {
    VectorXd point;
    double margin;        // min slack at `point`; negative => infeasible system
    bool eq_consistent;   // false when the equalities alone are inconsistent
};

FeasiblePoint max_margin_point(const MatrixXd& eq_A, const VectorXd& eq_b,
                               const MatrixXd& G, const VectorXd& h);

}  // namespace kpm
