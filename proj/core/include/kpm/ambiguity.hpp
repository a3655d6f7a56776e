#pragma once

#include <Eigen/Dense>

#include "kpm/errors.hpp"

namespace kpm {

using Eigen::VectorXd;

/// The KL-divergence ambiguity ball around a pivot prior q:
///     Psi = { p >= 0, sum_i p_i = 1, sum_i p_i ln(p_i/q_i) <= Omega }.
struct AmbiguitySet {
    VectorXd pivot;  // q, strictly positive, sums to 1
    double radius;   // Omega >= 0, in nats

    AmbiguitySet(VectorXd q, double omega);
    int size() const { return static_cast<int>(pivot.size()); }
};

/// Solution of the inner worst-case problem min_{p in Psi} d'p together with
/// the optimal dual variables of its Lagrangian.
struct WorstCase {
    VectorXd distribution; // p*
    double value;          // d'p*
    double mu;             // multiplier of the KL constraint, >= 0
    double nu;             // multiplier of the simplex constraint
};

/// KL divergence sum_i p_i ln(p_i/q_i) in nats, with 0 ln 0 = 0.
double kl_divergence(const VectorXd& p, const VectorXd& q);

/// The negated dual function of the inner problem:
///     l(mu) = mu*Omega + mu*ln( sum_i q_i e^{-d_i/mu} )      for mu > 0,
///     l(0)  = -min_i d_i                                     (continuous limit),
/// so that  min_{p in Psi} d'p = -min_{mu >= 0} l(mu)  by strong duality.
/// Evaluated with max-shift to avoid overflow as mu -> 0.
double dual_objective(double mu, const VectorXd& d, const AmbiguitySet& set);

/// Efficiently computes the solution of:
///     min_p   d'p
///     s.t.    sum_i p_i ln(p_i / q_i) <= Omega
///             sum_i p_i = 1,  p >= 0
/// The minimizer is an exponential tilt p_i(beta) ~ q_i e^{-beta d_i} whose
/// divergence from q increases in beta; beta is found by bisection on the KL
/// constraint. When Omega exceeds the largest divergence any tilt can reach,
/// p* concentrates on argmin_i d_i with weights proportional to q (mu* = 0).
/// Omega = 0 short-circuits to p* = q.
WorstCase worst_case_distribution(const VectorXd& d, const AmbiguitySet& set);

}  // namespace kpm
