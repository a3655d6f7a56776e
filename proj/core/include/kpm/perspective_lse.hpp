#pragma once

#include <Eigen/Dense>

#include "kpm/errors.hpp"

namespace kpm {

using Eigen::MatrixXd;
using Eigen::VectorXd;

/// The perspective of log-sum-exp with positive weights theta:
///     G(omega, mu) = mu * ln( sum_i theta_i e^{omega_i / mu} )   for mu > 0,
///     G(omega, 0)  = max_i omega_i                               (limit).
/// G is jointly convex in (omega, mu) on mu >= 0. Evaluated with max-shift.
double perspective_lse(double mu, const VectorXd& omega, const VectorXd& theta);

/// Gradient and Hessian of G in the N+1 variables (omega_1..omega_N, mu),
/// from the closed forms (with softmax weights p_k = theta_k e^{omega_k/mu} / sum):
///     dG/domega_k       = p_k
///     dG/dmu            = (G - E_p[omega]) / mu
///     d2G/domega^2      = (diag(p) - p p') / mu
///     d2G/domega_k dmu  = p_k (E_p[omega] - omega_k) / mu^2
///     d2G/dmu^2         = Var_p(omega) / mu^3   (always nonnegative)
struct PerspectiveLseDerivatives {
    VectorXd gradient;  // length N+1, mu last
    MatrixXd hessian;   // (N+1) x (N+1)
};

/// Derivatives are only defined on the interior mu > 0.
PerspectiveLseDerivatives perspective_lse_derivatives(double mu, const VectorXd& omega,
                                                      const VectorXd& theta);

}  // namespace kpm
