#include "kpm/ambiguity.hpp"

#include <cassert>
#include <cmath>
#include <limits>

namespace kpm {

namespace {

/// The exponential tilt p_i(beta) proportional to q_i e^{-beta d_i},
/// evaluated with max-shift.
VectorXd tilt(double beta, const VectorXd& d, const VectorXd& q) {
    VectorXd e = -beta * d;
    e.array() -= e.maxCoeff();
    VectorXd p = q.array() * e.array().exp();
    return p / p.sum();
}

}  // namespace

AmbiguitySet::AmbiguitySet(VectorXd q, double omega) : pivot(std::move(q)), radius(omega) {
    if (pivot.size() < 1) throw ValidationError("ambiguity set: empty pivot");
    if (pivot.minCoeff() <= 0.0)
        throw ValidationError("ambiguity set: pivot prior must be strictly positive");
    if (std::abs(pivot.sum() - 1.0) > 1e-12)
        throw ValidationError("ambiguity set: pivot prior must sum to 1");
    if (!(radius >= 0.0)) throw ValidationError("ambiguity set: radius must be >= 0");
}

double kl_divergence(const VectorXd& p, const VectorXd& q) {
    if (p.size() != q.size()) throw ValidationError("kl_divergence: length mismatch");
    double s = 0.0;
    for (int i = 0; i < p.size(); ++i) {
        if (q[i] <= 0.0) throw ValidationError("kl_divergence: q must be strictly positive");
        if (p[i] > 0.0) s += p[i] * std::log(p[i] / q[i]);  // 0 ln 0 = 0
    }
    return std::max(s, 0.0);
}

double dual_objective(double mu, const VectorXd& d, const AmbiguitySet& set) {
    assert(mu >= 0.0);
    if (mu == 0.0) return -d.minCoeff();
    // mu * ln sum_i q_i e^{-d_i/mu}, max-shifted: -d_i/mu is unbounded as mu -> 0.
    VectorXd s = -d / mu;
    const double m = s.maxCoeff();
    const double lse = m + std::log((set.pivot.array() * (s.array() - m).exp()).sum());
    return mu * set.radius + mu * lse;
}

WorstCase worst_case_distribution(const VectorXd& d, const AmbiguitySet& set) {
    if (d.size() != set.pivot.size())
        throw ValidationError("worst_case_distribution: d length mismatch");
    if (!d.allFinite()) throw ValidationError("worst_case_distribution: non-finite d");
    const VectorXd& q = set.pivot;

    WorstCase out;
    // Omega = 0: the ball is the singleton {q}; the dual needs Slater, so bypass.
    if (set.radius == 0.0) {
        out.distribution = q;
        out.value = q.dot(d);
        out.mu = 0.0;
        out.nu = -out.value;
        return out;
    }

    const double dmin = d.minCoeff();
    const double dmax = d.maxCoeff();
    const double scale = std::max(1.0, std::max(std::abs(dmin), std::abs(dmax)));

    // Constant d: every p in Psi has the same objective; break the tie to q.
    if (dmax - dmin <= 1e-15 * scale) {
        out.distribution = q;
        out.value = q.dot(d);
        out.mu = 0.0;
        out.nu = -out.value;
        return out;
    }

    // The largest divergence any tilt can reach: support on argmin_i d_i.
    double q_tied = 0.0;
    for (int i = 0; i < d.size(); ++i)
        if (d[i] <= dmin + 1e-14 * scale) q_tied += q[i];
    const double kl_max = -std::log(q_tied);

    if (set.radius >= kl_max - 1e-12) {
        // mu* = 0: mass concentrates on argmin d, tie-split proportionally to q.
        VectorXd p = VectorXd::Zero(d.size());
        for (int i = 0; i < d.size(); ++i)
            if (d[i] <= dmin + 1e-14 * scale) p[i] = q[i] / q_tied;
        out.distribution = p;
        out.value = d.dot(p);
        out.mu = 0.0;
        out.nu = -dmin;
        return out;
    }

    // KL(p(beta) || q) is increasing in beta >= 0; bracket then bisect on the
    // KL constraint boundary.
    double lo = 0.0, hi = 1.0 / scale;
    while (kl_divergence(tilt(hi, d, q), q) < set.radius) {
        hi *= 2.0;
        assert(std::isfinite(hi));
    }
    for (int it = 0; it < 200 && (hi - lo) > 1e-16 * hi; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (kl_divergence(tilt(mid, d, q), q) < set.radius) lo = mid;
        else hi = mid;
    }
    const double beta = 0.5 * (lo + hi);

    out.distribution = tilt(beta, d, q);
    out.value = d.dot(out.distribution);
    out.mu = 1.0 / beta;  // the tilt parameter is 1/mu in the dual formula
    // nu* = -mu + mu ln sum_i q_i e^{-d_i/mu}
    out.nu = -out.mu + (dual_objective(out.mu, d, set) - out.mu * set.radius);
    return out;
}

}  // namespace kpm
