#include "kpm/cpcam.hpp"

#include <cassert>
#include <cmath>
#include <limits>

namespace kpm {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

/// Indices of orders that can actually trade (Q_j > 0); zero-quantity orders
/// are substituted out before the solve.
std::vector<int> active_orders(const OrderBook& book) {
    std::vector<int> idx;
    for (int j = 0; j < book.num_orders(); ++j)
        if (book.orders[static_cast<size_t>(j)].limit_quantity > 0.0) idx.push_back(j);
    return idx;
}

}  // namespace

CpcamSolution solve_cpcam(const OrderBook& book, double delta) {
    if (!(delta > 0.0)) throw ValidationError("solve_cpcam: delta must be positive");
    if (!book.all_buy()) throw ValidationError("solve_cpcam: only buy orders are accepted");

    const int N = book.num_states();
    const std::vector<int> act = active_orders(book);
    const int Ja = static_cast<int>(act.size());

    MatrixXd A(N, Ja);
    VectorXd b(Ja), Q(Ja);
    for (int t = 0; t < Ja; ++t) {
        const Order& o = book.orders[static_cast<size_t>(act[static_cast<size_t>(t)])];
        A.col(t) = o.payoff_column;
        b[t] = o.limit_price;
        Q[t] = o.limit_quantity;
    }

    // Variables v = (x, M); s = M - A x stays positive inside the log domain.
    const int dim = Ja + 1;
    auto slack_of = [&](const VectorXd& v) {
        return VectorXd(VectorXd::Constant(N, v[Ja]) - A * v.head(Ja));
    };

    ConvexProgram P(dim);
    P.value = [&](const VectorXd& v) {
        const VectorXd s = slack_of(v);
        if (s.minCoeff() <= 0.0) return kInf;
        return -(b.dot(v.head(Ja)) - v[Ja] + delta * s.array().log().sum());
    };
    P.gradient = [&](const VectorXd& v) {
        const VectorXd s = slack_of(v);
        const VectorXd inv = s.cwiseInverse();
        VectorXd g(dim);
        g.head(Ja) = -b + delta * (A.transpose() * inv);
        g[Ja] = 1.0 - delta * inv.sum();
        return g;
    };
    P.hessian = [&](const VectorXd& v) {
        const VectorXd s = slack_of(v);
        const VectorXd r = delta * s.array().square().inverse();
        MatrixXd H(dim, dim);
        H.topLeftCorner(Ja, Ja) = A.transpose() * r.asDiagonal() * A;
        const VectorXd cross = -(A.transpose() * r);
        H.topRightCorner(Ja, 1) = cross;
        H.bottomLeftCorner(1, Ja) = cross.transpose();
        H(Ja, Ja) = r.sum();
        return H;
    };
    for (int t = 0; t < Ja; ++t) {
        P.add_lower_bound(t, 0.0);
        P.add_upper_bound(t, Q[t]);
    }
    VectorXd v0(dim);
    v0.head(Ja) = 0.5 * Q;
    v0[Ja] = (Ja > 0 ? (A * v0.head(Ja)).maxCoeff() : 0.0) + N * delta + 1.0;
    P.initial_point = v0;

    const SolverReport rep = minimize(P, 1e-10, 200);
    if (rep.status == SolveStatus::Infeasible)
        throw SolverError("solve_cpcam: box constraints reported infeasible");

    // Active-set polish. The barrier stop leaves O(sqrt(tol)) stationarity
    // slop in the prices; identify the binding box faces, pin them, and run
    // plain Newton on the remaining smooth coordinates until the KKT
    // residuals reach machine precision (freeing a face again if its
    // multiplier comes out with the wrong sign).
    VectorXd v = rep.solution;
    std::vector<int> face(static_cast<size_t>(Ja), 0);  // -1 lower, +1 upper
    for (int t = 0; t < Ja; ++t) {
        const double snap = 1e-5 * std::max(1.0, Q[t]);
        if (v[t] <= snap) {
            face[static_cast<size_t>(t)] = -1;
            v[t] = 0.0;
        } else if (v[t] >= Q[t] - snap) {
            face[static_cast<size_t>(t)] = 1;
            v[t] = Q[t];
        }
    }
    for (int round = 0; round < 50; ++round) {
        std::vector<int> free;
        for (int t = 0; t < Ja; ++t)
            if (face[static_cast<size_t>(t)] == 0) free.push_back(t);
        const int f = static_cast<int>(free.size());

        for (int it = 0; it < 100; ++it) {
            const VectorXd g = P.gradient(v);
            VectorXd gf(f + 1);
            for (int i = 0; i < f; ++i) gf[i] = g[free[static_cast<size_t>(i)]];
            gf[f] = g[Ja];
            if (gf.cwiseAbs().maxCoeff() <= 1e-13) break;
            const MatrixXd H = P.hessian(v);
            MatrixXd Hf(f + 1, f + 1);
            for (int i = 0; i <= f; ++i)
                for (int j = 0; j <= f; ++j)
                    Hf(i, j) = H(i < f ? free[static_cast<size_t>(i)] : Ja,
                                 j < f ? free[static_cast<size_t>(j)] : Ja);
            VectorXd d;
            double ridge = 0.0;
            for (int attempt = 0; attempt < 30; ++attempt) {
                MatrixXd Hr = Hf;
                if (ridge > 0.0) Hr.diagonal().array() += ridge;
                const Eigen::LDLT<MatrixXd> ldlt(Hr);
                if (ldlt.info() == Eigen::Success) {
                    d = -ldlt.solve(gf);
                    if (d.allFinite() && gf.dot(d) < 0.0) break;
                }
                ridge = ridge == 0.0 ? 1e-14 * (1.0 + Hf.diagonal().cwiseAbs().maxCoeff())
                                     : ridge * 100.0;
                d = VectorXd::Zero(f + 1);
            }
            if (!(gf.dot(d) < 0.0)) break;
            // Truncate the step at the first box face it would cross.
            double step = 1.0;
            for (int i = 0; i < f; ++i) {
                const int t = free[static_cast<size_t>(i)];
                if (d[i] < 0.0) step = std::min(step, -v[t] / d[i]);
                else if (d[i] > 0.0) step = std::min(step, (Q[t] - v[t]) / d[i]);
            }
            const double f0 = P.value(v);
            bool moved = false;
            for (int ls = 0; ls < 60; ++ls) {
                VectorXd vn = v;
                for (int i = 0; i < f; ++i) {
                    const int t = free[static_cast<size_t>(i)];
                    vn[t] = std::min(Q[t], std::max(0.0, v[t] + step * d[i]));
                }
                vn[Ja] = v[Ja] + step * d[f];
                const double fn = P.value(vn);
                if (std::isfinite(fn) && fn <= f0 + 1e-4 * step * gf.dot(d)) {
                    v = vn;
                    moved = true;
                    break;
                }
                step *= 0.5;
            }
            if (!moved) break;
        }

        // Re-classify: pin coordinates that reached a face, free pinned ones
        // whose KKT multiplier has the wrong sign.
        const VectorXd g = P.gradient(v);
        bool changed = false;
        for (int t = 0; t < Ja; ++t) {
            int& ft = face[static_cast<size_t>(t)];
            if (ft == 0 && v[t] <= 0.0) {
                ft = -1;
                changed = true;
            } else if (ft == 0 && v[t] >= Q[t]) {
                ft = 1;
                changed = true;
            } else if (ft == -1 && g[t] < -1e-11) {
                ft = 0;
                changed = true;
            } else if (ft == 1 && g[t] > 1e-11) {
                ft = 0;
                changed = true;
            }
        }
        if (!changed) break;
    }

    CpcamSolution sol;
    sol.delta = delta;
    sol.report = rep;
    sol.report.solution = v;
    sol.report.objective = P.value(v);
    sol.fills = VectorXd::Zero(book.num_orders());
    for (int t = 0; t < Ja; ++t) sol.fills[act[static_cast<size_t>(t)]] = v[t];
    sol.scalar_m = v[Ja];
    sol.slack = slack_of(v);
    sol.state_prices = delta * sol.slack.cwiseInverse();
    return sol;
}

double cpcam_lp_value(const OrderBook& book, const VectorXd& x) {
    assert(x.size() == book.num_orders());
    double bx = 0.0;
    VectorXd Ax = VectorXd::Zero(book.num_states());
    for (int j = 0; j < book.num_orders(); ++j) {
        const Order& o = book.orders[static_cast<size_t>(j)];
        bx += o.limit_price * x[j];
        Ax += x[j] * o.payoff_column;
    }
    return bx - Ax.maxCoeff();
}

VectorXd solve_cpcam_lp(const OrderBook& book) {
    if (!book.all_buy()) throw ValidationError("solve_cpcam_lp: only buy orders are accepted");
    const int N = book.num_states();
    const std::vector<int> act = active_orders(book);
    const int Ja = static_cast<int>(act.size());
    VectorXd fills = VectorXd::Zero(book.num_orders());
    if (Ja == 0) return fills;

    MatrixXd A(N, Ja);
    VectorXd b(Ja), Q(Ja);
    for (int t = 0; t < Ja; ++t) {
        const Order& o = book.orders[static_cast<size_t>(act[static_cast<size_t>(t)])];
        A.col(t) = o.payoff_column;
        b[t] = o.limit_price;
        Q[t] = o.limit_quantity;
    }

    // Smooth max_i (A x)_i by tau * lse((A x)/tau) and anneal tau downward,
    // warm-starting each stage from the previous optimum.
    VectorXd x = 0.5 * Q;
    for (const double tau : {1e-2, 1e-4, 1e-6}) {
        auto weights = [&, tau](const VectorXd& xv) {
            VectorXd s = (A * xv) / tau;
            s.array() -= s.maxCoeff();
            VectorXd p = s.array().exp();
            return VectorXd(p / p.sum());
        };
        ConvexProgram P(Ja);
        P.value = [&, tau](const VectorXd& xv) {
            VectorXd s = (A * xv) / tau;
            const double m = s.maxCoeff();
            return -b.dot(xv) + tau * (m + std::log((s.array() - m).exp().sum()));
        };
        P.gradient = [&, tau](const VectorXd& xv) {
            return VectorXd(-b + A.transpose() * weights(xv));
        };
        P.hessian = [&, tau](const VectorXd& xv) {
            const VectorXd p = weights(xv);
            const MatrixXd D = MatrixXd(p.asDiagonal()) - p * p.transpose();
            return MatrixXd(A.transpose() * D * A / tau);
        };
        for (int t = 0; t < Ja; ++t) {
            P.add_lower_bound(t, 0.0);
            P.add_upper_bound(t, Q[t]);
        }
        // Keep the warm start strictly inside the box.
        VectorXd x0 = x;
        for (int t = 0; t < Ja; ++t)
            x0[t] = std::min(std::max(x0[t], 1e-9 * Q[t]), (1.0 - 1e-9) * Q[t]);
        P.initial_point = x0;
        x = minimize(P, 1e-12, 200).solution;
    }
    for (int t = 0; t < Ja; ++t) fills[act[static_cast<size_t>(t)]] = x[t];
    return fills;
}

std::vector<std::pair<double, double>> delta_path(const OrderBook& book,
                                                  const std::vector<double>& deltas) {
    for (size_t i = 0; i < deltas.size(); ++i) {
        if (!(deltas[i] > 0.0)) throw ValidationError("delta_path: deltas must be positive");
        if (i > 0 && !(deltas[i] < deltas[i - 1]))
            throw ValidationError("delta_path: deltas must be strictly decreasing");
    }
    const VectorXd x_lp = solve_cpcam_lp(book);
    std::vector<std::pair<double, double>> out;
    out.reserve(deltas.size());
    for (const double d : deltas) {
        const CpcamSolution sol = solve_cpcam(book, d);
        const double dist =
            book.num_orders() == 0 ? 0.0 : (sol.fills - x_lp).cwiseAbs().maxCoeff();
        out.emplace_back(d, dist);
    }
    return out;
}

}  // namespace kpm
