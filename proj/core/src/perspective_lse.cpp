#include "kpm/perspective_lse.hpp"

#include <cassert>
#include <cmath>

namespace kpm {

namespace {

/// Softmax weights p_k = theta_k e^{omega_k/mu} / sum, max-shifted.
VectorXd softmax_weights(double mu, const VectorXd& omega, const VectorXd& theta) {
    VectorXd s = omega / mu;
    s.array() -= s.maxCoeff();
    VectorXd p = theta.array() * s.array().exp();
    return p / p.sum();
}

}  // namespace

double perspective_lse(double mu, const VectorXd& omega, const VectorXd& theta) {
    assert(omega.size() == theta.size());
    assert(theta.minCoeff() > 0.0);
    assert(mu >= 0.0);
    if (mu == 0.0) return omega.maxCoeff();
    VectorXd s = omega / mu;
    const double m = s.maxCoeff();
    return mu * (m + std::log((theta.array() * (s.array() - m).exp()).sum()));
}

PerspectiveLseDerivatives perspective_lse_derivatives(double mu, const VectorXd& omega,
                                                      const VectorXd& theta) {
    if (!(mu > 0.0))
        throw ValidationError("perspective_lse_derivatives: mu must be strictly positive");
    const int n = static_cast<int>(omega.size());
    const VectorXd p = softmax_weights(mu, omega, theta);
    const double g = perspective_lse(mu, omega, theta);
    const double mean = p.dot(omega);                               // E_p[omega]
    const double var = p.dot((omega.array() - mean).square().matrix());  // Var_p(omega)

    PerspectiveLseDerivatives out;
    out.gradient.resize(n + 1);
    out.gradient.head(n) = p;
    out.gradient[n] = (g - mean) / mu;

    out.hessian.resize(n + 1, n + 1);
    out.hessian.topLeftCorner(n, n) =
        (MatrixXd(p.asDiagonal()) - p * p.transpose()) / mu;
    VectorXd cross = p.array() * (mean - omega.array()) / (mu * mu);
    out.hessian.topRightCorner(n, 1) = cross;
    out.hessian.bottomLeftCorner(1, n) = cross.transpose();
    out.hessian(n, n) = var / (mu * mu * mu);
    return out;
}

}  // namespace kpm
