#include "kpm/solver.hpp"

#include <cassert>
#include <cmath>
#include <limits>
#include <vector>

namespace kpm {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

/// Equality system eq_A v = eq_b reduced to free coordinates: v = v0 + Z y
/// with Z an orthonormal basis of the null space of eq_A.
struct Reduction {
    VectorXd v0;
    MatrixXd Z;       // n x k, k = dim null(eq_A)
    bool consistent;
};

Reduction reduce_equalities(const MatrixXd& eq_A, const VectorXd& eq_b, int n) {
    Reduction r;
    if (eq_A.rows() == 0) {
        r.v0 = VectorXd::Zero(n);
        r.Z = MatrixXd::Identity(n, n);
        r.consistent = true;
        return r;
    }
    r.v0 = eq_A.completeOrthogonalDecomposition().solve(eq_b);
    const double scale = 1.0 + eq_b.cwiseAbs().maxCoeff();
    r.consistent = ((eq_A * r.v0 - eq_b).cwiseAbs().maxCoeff() <= 1e-9 * scale);

    Eigen::FullPivLU<MatrixXd> lu(eq_A);
    lu.setThreshold(1e-10);
    const int k = static_cast<int>(lu.dimensionOfKernel());
    if (k == 0) {
        r.Z.resize(n, 0);
    } else {
        MatrixXd K = lu.kernel();  // n x k, not orthonormal
        Eigen::HouseholderQR<MatrixXd> qr(K);
        r.Z = qr.householderQ() * MatrixXd::Identity(n, k);
    }
    return r;
}

/// Barrier term phi(y) = -sum_i ln(h_i - (G y)_i); +inf outside.
double barrier_value(const MatrixXd& G, const VectorXd& h, const VectorXd& y) {
    if (G.rows() == 0) return 0.0;
    const VectorXd slack = h - G * y;
    if (slack.minCoeff() <= 0.0) return kInf;
    return -slack.array().log().sum();
}

using ValueFn = std::function<double(const VectorXd&)>;
using GradFn = std::function<VectorXd(const VectorXd&)>;
using HessFn = std::function<MatrixXd(const VectorXd&)>;

struct NewtonOutcome {
    VectorXd y;
    int iterations = 0;
    double grad_norm = 0.0;  // gradient norm of t*f + phi at exit
};

/// Damped Newton on F(y) = t*f(y) + phi(y) from a strictly feasible y0.
/// LDLT with a growing ridge fallback; Armijo backtracking (c = 1e-4,
/// halving) rejects steps that leave the barrier or objective domain.
NewtonOutcome newton_barrier(const ValueFn& f_val, const GradFn& f_grad,
                             const HessFn& f_hess, const MatrixXd& G,
                             const VectorXd& h, double t, VectorXd y,
                             int max_newton) {
    const int k = static_cast<int>(y.size());
    NewtonOutcome out;
    auto total = [&](const VectorXd& p) {
        const double fv = f_val(p);
        if (!std::isfinite(fv)) return kInf;
        return t * fv + barrier_value(G, h, p);
    };

    double F = total(y);
    assert(std::isfinite(F));
    VectorXd g(k);
    for (int it = 0; it < max_newton; ++it) {
        g = t * f_grad(y);
        MatrixXd H = t * f_hess(y);
        if (G.rows() > 0) {
            const VectorXd inv = (h - G * y).cwiseInverse();
            g.noalias() += G.transpose() * inv;
            H.noalias() += G.transpose() * inv.array().square().matrix().asDiagonal() * G;
        }
        out.grad_norm = g.norm();
        out.iterations = it;

        // Newton direction with ridge fallback for semidefinite Hessians.
        VectorXd dy;
        double ridge = 0.0;
        for (int attempt = 0; attempt < 40; ++attempt) {
            MatrixXd Hr = H;
            if (ridge > 0.0) Hr.diagonal().array() += ridge;
            Eigen::LDLT<MatrixXd> ldlt(Hr);
            if (ldlt.info() == Eigen::Success) {
                dy = -ldlt.solve(g);
                if (dy.allFinite() && g.dot(dy) < 0.0) break;
            }
            ridge = (ridge == 0.0) ? 1e-12 * (1.0 + H.diagonal().cwiseAbs().maxCoeff())
                                   : ridge * 100.0;
            dy.setZero(k);
        }
        const double descent = g.dot(dy);
        if (!(descent < 0.0)) break;  // no usable direction: stationary or stalled
        // Newton decrement convergence test (scaled by t: F_t itself scales with t).
        if (-descent * 0.5 <= 1e-10 * std::max(1.0, t)) break;

        // Armijo backtracking.
        double step = 1.0;
        bool accepted = false;
        for (int ls = 0; ls < 60; ++ls) {
            const VectorXd yn = y + step * dy;
            const double Fn = total(yn);
            if (std::isfinite(Fn) && Fn <= F + 1e-4 * step * descent) {
                y = yn;
                F = Fn;
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if (!accepted) break;  // line search exhausted: at numerical precision
    }
    out.y = y;
    return out;
}

/// Drop inequality rows whose reduced coefficients vanish: they are constant
/// in the free coordinates. A constant row with negative slack makes the
/// whole system infeasible.
struct FilteredIneq {
    MatrixXd G;
    VectorXd h;
    double fixed_margin = kInf;  // min slack over dropped (constant) rows
};

FilteredIneq filter_constant_rows(const MatrixXd& G, const VectorXd& h) {
    FilteredIneq out;
    std::vector<int> keep;
    for (int i = 0; i < G.rows(); ++i) {
        if (G.cols() == 0 || G.row(i).cwiseAbs().maxCoeff() <= 1e-12)
            out.fixed_margin = std::min(out.fixed_margin, h[i]);
        else
            keep.push_back(i);
    }
    out.G.resize(static_cast<int>(keep.size()), G.cols());
    out.h.resize(static_cast<int>(keep.size()));
    for (size_t r = 0; r < keep.size(); ++r) {
        out.G.row(static_cast<int>(r)) = G.row(keep[r]);
        out.h[static_cast<int>(r)] = h[keep[r]];
    }
    return out;
}

SolverReport minimize_impl(const ConvexProgram& P, double tol, int max_iter, int depth);

/// Phase-I in reduced coordinates: maximize s subject to G y + s 1 <= h,
/// s <= 1, via the same barrier Newton machinery (objective -s is linear).
/// Returns the maximizing y and the achieved margin min_i (h - G y)_i.
struct PhaseIResult {
    VectorXd y;
    double margin;
};

PhaseIResult phase_one(const MatrixXd& G, const VectorXd& h) {
    const int k = static_cast<int>(G.cols());
    const int m = static_cast<int>(G.rows());
    if (m == 0) return {VectorXd::Zero(k), kInf};

    // Variables u = (y, s); constraints [G 1] u <= h, s <= 1, plus a wide box
    // |y_i| <= R that keeps the barrier iterates finite when the feasible set
    // has a recession cone (the box is far outside any tight geometry).
    const double R = 1e6 * (1.0 + h.cwiseAbs().maxCoeff());
    MatrixXd Ge(m + 1 + 2 * k, k + 1);
    Ge.setZero();
    Ge.topLeftCorner(m, k) = G;
    Ge.col(k).head(m).setOnes();
    Ge(m, k) = 1.0;
    Ge.block(m + 1, 0, k, k) = MatrixXd::Identity(k, k);
    Ge.block(m + 1 + k, 0, k, k) = -MatrixXd::Identity(k, k);
    VectorXd he(m + 1 + 2 * k);
    he.head(m) = h;
    he[m] = 1.0;
    he.tail(2 * k).setConstant(R);

    VectorXd u0 = VectorXd::Zero(k + 1);
    u0[k] = std::min(h.minCoeff() - 1.0, 0.0);  // strictly feasible: slacks >= 1

    VectorXd c = VectorXd::Zero(k + 1);
    c[k] = -1.0;  // minimize -s
    auto f_val = [&](const VectorXd& u) { return c.dot(u); };
    auto f_grad = [&](const VectorXd&) { return c; };
    auto f_hess = [&](const VectorXd&) { return MatrixXd::Zero(k + 1, k + 1).eval(); };

    VectorXd u = u0;
    double t = 1.0;
    // Drive the duality gap (m+1)/t below 1e-10 so the margin is certified
    // to the feasibility tolerance.
    while ((m + 1 + 2 * k) / t > 1e-10) {
        u = newton_barrier(f_val, f_grad, f_hess, Ge, he, t, u, 80).y;
        t *= 10.0;
    }
    PhaseIResult out;
    out.y = u.head(k);
    out.margin = (h - G * out.y).minCoeff();
    return out;
}

SolverReport single_point_report(const ConvexProgram& P, const VectorXd& v,
                                 double ineq_margin, bool consistent) {
    SolverReport rep;
    rep.solution = v;
    if (!consistent || ineq_margin < -1e-9) {
        rep.status = SolveStatus::Infeasible;
        rep.objective = kInf;
        rep.primal_residual = std::max(0.0, -ineq_margin);
        return rep;
    }
    rep.objective = P.value(v);
    rep.status = SolveStatus::Optimal;
    rep.primal_residual = std::max(0.0, -ineq_margin);
    return rep;
}

SolverReport minimize_impl(const ConvexProgram& P, double tol, int max_iter, int depth) {
    if (depth > 12)
        throw SolverError("minimize: implied-equality promotion did not terminate");
    const int n = P.dimension;
    assert(P.value && P.gradient && P.hessian);

    const Reduction red = reduce_equalities(P.eq_A, P.eq_b, n);
    if (!red.consistent) {
        SolverReport rep;
        rep.status = SolveStatus::Infeasible;
        rep.objective = kInf;
        rep.solution = red.v0;
        return rep;
    }
    const int k = static_cast<int>(red.Z.cols());

    // Reduced inequalities G' y <= h'.
    MatrixXd Gr = P.ineq_G.rows() > 0 ? MatrixXd(P.ineq_G * red.Z) : MatrixXd(0, k);
    VectorXd hr = P.ineq_G.rows() > 0 ? VectorXd(P.ineq_h - P.ineq_G * red.v0)
                                      : VectorXd(0);
    const FilteredIneq fi = filter_constant_rows(Gr, hr);

    if (k == 0)  // equalities pin the point entirely
        return single_point_report(P, red.v0, std::min(fi.fixed_margin, kInf),
                                   fi.fixed_margin >= -1e-9);
    if (fi.fixed_margin < -1e-9) {
        SolverReport rep;
        rep.status = SolveStatus::Infeasible;
        rep.objective = kInf;
        rep.solution = red.v0;
        return rep;
    }

    // Strictly feasible start: caller-provided if usable, else phase-I.
    VectorXd y0;
    bool have_start = false;
    if (P.initial_point) {
        const VectorXd cand = red.Z.transpose() * (*P.initial_point - red.v0);
        const VectorXd v = red.v0 + red.Z * cand;
        const bool eq_ok = (v - *P.initial_point).cwiseAbs().maxCoeff() <= 1e-8;
        const bool ineq_ok =
            fi.G.rows() == 0 || (fi.h - fi.G * cand).minCoeff() >= 1e-10;
        if (eq_ok && ineq_ok && std::isfinite(P.value(v))) {
            y0 = cand;
            have_start = true;
        }
    }
    if (!have_start) {
        const PhaseIResult p1 = phase_one(fi.G, fi.h);
        if (p1.margin < -1e-9) {
            SolverReport rep;
            rep.status = SolveStatus::Infeasible;
            rep.objective = kInf;
            rep.solution = red.v0 + red.Z * p1.y;
            return rep;
        }
        if (p1.margin < 1e-7 && fi.G.rows() > 0) {
            // Empty (or numerically empty) interior: the near-tight rows are
            // implied equalities. Promote them and re-solve the tightened
            // program; its feasible set is unchanged up to tolerance.
            const VectorXd slack = fi.h - fi.G * p1.y;
            ConvexProgram tightened = P;
            int promoted = 0;
            // Map filtered rows back to original inequality indices.
            int fr = 0;
            for (int i = 0; i < Gr.rows(); ++i) {
                if (Gr.row(i).cwiseAbs().maxCoeff() <= 1e-12) continue;
                if (slack[fr] <= p1.margin + 1e-9) {
                    tightened.add_equality(P.ineq_G.row(i).transpose(), P.ineq_h[i]);
                    ++promoted;
                }
                ++fr;
            }
            if (promoted > 0) return minimize_impl(tightened, tol, max_iter, depth + 1);
            // No identifiable tight row; fall through with the phase-I point.
        }
        y0 = p1.y;
        const VectorXd v = red.v0 + red.Z * y0;
        if (!std::isfinite(P.value(v)))
            throw SolverError("minimize: objective not finite at feasible start");
    }

    // Oracles in reduced coordinates.
    auto f_val = [&](const VectorXd& y) { return P.value(red.v0 + red.Z * y); };
    auto f_grad = [&](const VectorXd& y) {
        return VectorXd(red.Z.transpose() * P.gradient(red.v0 + red.Z * y));
    };
    auto f_hess = [&](const VectorXd& y) {
        return MatrixXd(red.Z.transpose() * P.hessian(red.v0 + red.Z * y) * red.Z);
    };

    const int m = static_cast<int>(fi.G.rows());
    SolverReport rep;
    VectorXd y = y0;
    int total_newton = 0;
    double t = 1.0;
    double grad_norm = 0.0;
    if (m == 0) {
        // Unconstrained (after elimination): one Newton run suffices.
        const NewtonOutcome res =
            newton_barrier(f_val, f_grad, f_hess, fi.G, fi.h, 1.0, y, max_iter);
        y = res.y;
        total_newton = res.iterations;
        grad_norm = res.grad_norm;
        rep.complementarity = 0.0;
    } else {
        while (true) {
            const NewtonOutcome res =
                newton_barrier(f_val, f_grad, f_hess, fi.G, fi.h, t, y, max_iter);
            y = res.y;
            total_newton += std::max(1, res.iterations);
            grad_norm = res.grad_norm / t;
            if (m / t <= tol || total_newton >= max_iter * 10) break;
            t *= 10.0;
        }
        rep.complementarity = m / t;
    }

    const VectorXd v = red.v0 + red.Z * y;
    rep.solution = v;
    rep.objective = P.value(v);
    rep.iterations = total_newton;
    rep.stationarity = grad_norm;
    double viol = 0.0;
    if (P.ineq_G.rows() > 0)
        viol = std::max(viol, (P.ineq_G * v - P.ineq_h).maxCoeff());
    if (P.eq_A.rows() > 0)
        viol = std::max(viol, (P.eq_A * v - P.eq_b).cwiseAbs().maxCoeff());
    rep.primal_residual = std::max(0.0, viol);
    rep.status = (m == 0 || rep.complementarity <= tol) ? SolveStatus::Optimal
                                                        : SolveStatus::MaxIterations;
    return rep;
}

}  // namespace

ConvexProgram::ConvexProgram(int dim) : dimension(dim) {
    eq_A.resize(0, dim);
    eq_b.resize(0);
    ineq_G.resize(0, dim);
    ineq_h.resize(0);
}

void ConvexProgram::add_equality(const VectorXd& row, double rhs) {
    assert(row.size() == dimension);
    eq_A.conservativeResize(eq_A.rows() + 1, dimension);
    eq_A.row(eq_A.rows() - 1) = row.transpose();
    eq_b.conservativeResize(eq_b.size() + 1);
    eq_b[eq_b.size() - 1] = rhs;
}

void ConvexProgram::add_inequality(const VectorXd& row, double rhs) {
    assert(row.size() == dimension);
    ineq_G.conservativeResize(ineq_G.rows() + 1, dimension);
    ineq_G.row(ineq_G.rows() - 1) = row.transpose();
    ineq_h.conservativeResize(ineq_h.size() + 1);
    ineq_h[ineq_h.size() - 1] = rhs;
}

void ConvexProgram::add_lower_bound(int i, double lo) {
    VectorXd row = VectorXd::Zero(dimension);
    row[i] = -1.0;
    add_inequality(row, -lo);
}

void ConvexProgram::add_upper_bound(int i, double hi) {
    VectorXd row = VectorXd::Zero(dimension);
    row[i] = 1.0;
    add_inequality(row, hi);
}

SolverReport minimize(const ConvexProgram& program, double tol, int max_iter) {
    return minimize_impl(program, tol, max_iter, 0);
}

FeasiblePoint max_margin_point(const MatrixXd& eq_A, const VectorXd& eq_b,
                               const MatrixXd& G, const VectorXd& h) {
    const int n = static_cast<int>(std::max(eq_A.cols(), G.cols()));
    const Reduction red = reduce_equalities(eq_A, eq_b, n);
    FeasiblePoint out;
    out.eq_consistent = red.consistent;
    if (!red.consistent) {
        out.point = red.v0;
        out.margin = -kInf;
        return out;
    }
    const int k = static_cast<int>(red.Z.cols());
    MatrixXd Gr = G.rows() > 0 ? MatrixXd(G * red.Z) : MatrixXd(0, k);
    VectorXd hr = G.rows() > 0 ? VectorXd(h - G * red.v0) : VectorXd(0);
    const FilteredIneq fi = filter_constant_rows(Gr, hr);
    if (k == 0 || fi.G.rows() == 0) {
        out.point = red.v0;
        out.margin = fi.fixed_margin;
        return out;
    }
    const PhaseIResult p1 = phase_one(fi.G, fi.h);
    out.point = red.v0 + red.Z * p1.y;
    out.margin = std::min(p1.margin, fi.fixed_margin);
    return out;
}

}  // namespace kpm
