#include "kpm/kpm.hpp"

#include <cassert>
#include <cmath>
#include <limits>

#include "kpm/perspective_lse.hpp"

namespace kpm {

namespace {

constexpr double kMuFloor = 1e-10;  // keeps L smooth; mu = 0 is the lse limit
constexpr double kMuCap = 1e4;
constexpr double kTieTol = 1e-9;

/// The affine map zeta(v) = C v + c0 of one region, over the subproblem
/// variables v = (xi_1..xi_N, x_free..., [mu]). Within the region
///     zeta_i = alpha sum_j x_j (A_ij - (A' xi)_j)
/// collapses exactly: FIXED_FULL orders contribute alpha Q_j (A_ij - A_.j'xi),
/// FIXED_ZERO orders vanish, and FREE orders trade at their pinned bid so
/// their price term is the constant B_j b_j.
struct RegionAffine {
    MatrixXd C;   // N x dim
    VectorXd c0;  // N
    std::vector<int> free_orders;  // original order indices of the x variables
    int dim = 0;
    bool has_mu = false;
};

RegionAffine build_affine(const OrderBook& book, const FillSet& fills, double alpha,
                          bool with_mu) {
    const int N = book.num_states();
    RegionAffine ra;
    VectorXd u = VectorXd::Zero(N);  // sum over FIXED_FULL of Q_j A_.j
    for (int j = 0; j < book.num_orders(); ++j) {
        const Order& o = book.orders[static_cast<size_t>(j)];
        switch (fills.status[static_cast<size_t>(j)]) {
            case FillStatus::FixedFull:
                u += o.limit_quantity * o.payoff_column;
                break;
            case FillStatus::Free:
                if (o.limit_quantity > 0.0) ra.free_orders.push_back(j);
                break;
            case FillStatus::FixedZero:
                break;
        }
    }
    const int F = static_cast<int>(ra.free_orders.size());
    ra.has_mu = with_mu;
    ra.dim = N + F + (with_mu ? 1 : 0);
    ra.C = MatrixXd::Zero(N, ra.dim);
    ra.c0 = alpha * u;
    for (int i = 0; i < N; ++i) {
        ra.C.row(i).head(N) = -alpha * u.transpose();
        for (int f = 0; f < F; ++f) {
            const Order& o = book.orders[static_cast<size_t>(ra.free_orders[static_cast<size_t>(f)])];
            ra.C(i, N + f) = alpha * (o.payoff_column[i] - o.signed_limit());
        }
    }
    return ra;
}

VectorXd zeta_of(const RegionAffine& ra, const VectorXd& v) {
    return ra.C * v + ra.c0;
}

/// Feasible set of a region subproblem: simplex + cell constraints on xi,
/// boxes on the free fills, and the mu interval when present.
void add_region_constraints(ConvexProgram& P, const OrderBook& book,
                            const Region& region, const RegionAffine& ra) {
    const int N = book.num_states();
    VectorXd row = VectorXd::Zero(ra.dim);
    row.head(N).setOnes();
    P.add_equality(row, 1.0);  // sum xi = 1

    for (size_t k = 0; k < region.cells.size(); ++k) {
        const VectorXd& pay = book.securities[k].payoff;
        VectorXd r = VectorXd::Zero(ra.dim);
        r.head(N) = pay;
        const Region::PriceCell& c = region.cells[k];
        if (c.is_point()) {
            P.add_equality(r, c.lo);
        } else {
            P.add_inequality(r, c.hi);
            P.add_inequality(-r, -c.lo);
        }
    }
    for (int i = 0; i < N; ++i) P.add_lower_bound(i, 0.0);
    for (size_t f = 0; f < ra.free_orders.size(); ++f) {
        const int vi = N + static_cast<int>(f);
        P.add_lower_bound(vi, 0.0);
        P.add_upper_bound(vi, book.orders[static_cast<size_t>(ra.free_orders[f])].limit_quantity);
    }
    if (ra.has_mu) {
        P.add_lower_bound(ra.dim - 1, kMuFloor);
        P.add_upper_bound(ra.dim - 1, kMuCap);
    }
}

}  // namespace

MarketParams::MarketParams(double alpha_, VectorXd inventory_, AmbiguitySet ambiguity_)
    : alpha(alpha_), inventory(std::move(inventory_)), ambiguity(std::move(ambiguity_)) {
    if (!(alpha > 0.0)) throw ValidationError("market params: alpha must be positive");
    if (inventory.size() != ambiguity.size())
        throw ValidationError("market params: inventory length != prior length");
    if (!inventory.allFinite())
        throw ValidationError("market params: inventory must be finite");
}

VectorXd MarketParams::z() const {
    return (-(-alpha * inventory.array()).exp()).matrix();
}

VectorXd MarketParams::theta() const {
    return std::exp(ambiguity.radius) * ambiguity.pivot;
}

VectorXd state_pnl(const OrderBook& book, const VectorXd& xi, const VectorXd& x,
                   const VectorXd& inventory) {
    VectorXd pnl = inventory;
    for (int j = 0; j < book.num_orders(); ++j) {
        const Order& o = book.orders[static_cast<size_t>(j)];
        const double price = o.payoff_column.dot(xi);
        pnl.array() += x[j] * (price - o.payoff_column.array());
    }
    return pnl;
}

double evaluate_primal_objective(const OrderBook& book, const VectorXd& xi,
                                 const VectorXd& x, const MarketParams& params) {
    const VectorXd pnl = state_pnl(book, xi, x, params.inventory);
    const VectorXd d = (-(-params.alpha * pnl.array()).exp()).matrix();
    return worst_case_distribution(d, params.ambiguity).value;
}

RegionSolution solve_region(const OrderBook& book, const Region& region,
                            const FillSet& fills, const MarketParams& params) {
    const int N = book.num_states();
    const bool robust = params.ambiguity.radius > 0.0;
    const RegionAffine ra = build_affine(book, fills, params.alpha, robust);
    const VectorXd z = params.z();
    const VectorXd theta = params.theta();
    const VectorXd& q = params.ambiguity.pivot;

    ConvexProgram P(ra.dim);
    if (robust) {
        // L(v) = G(omega(v), mu) with omega_i = -z_i e^{zeta_i(v)}; convex by
        // composition: G is convex and nondecreasing in omega, omega_i is a
        // convex positive exponential of an affine form.
        P.value = [&, ra](const VectorXd& v) {
            const VectorXd omega = (-z.array() * zeta_of(ra, v).array().exp()).matrix();
            return perspective_lse(v[ra.dim - 1], omega, theta);
        };
        P.gradient = [&, ra](const VectorXd& v) {
            const double mu = v[ra.dim - 1];
            const VectorXd omega = (-z.array() * zeta_of(ra, v).array().exp()).matrix();
            const PerspectiveLseDerivatives d = perspective_lse_derivatives(mu, omega, theta);
            VectorXd g = ra.C.transpose() *
                         (d.gradient.head(N).array() * omega.array()).matrix();
            g[ra.dim - 1] += d.gradient[N];
            return g;
        };
        P.hessian = [&, ra](const VectorXd& v) {
            const double mu = v[ra.dim - 1];
            const VectorXd omega = (-z.array() * zeta_of(ra, v).array().exp()).matrix();
            const PerspectiveLseDerivatives d = perspective_lse_derivatives(mu, omega, theta);
            const VectorXd p = d.gradient.head(N);
            // Chain rule through omega(v): d omega_i = omega_i * C_i.
            MatrixXd inner = omega.asDiagonal() * d.hessian.topLeftCorner(N, N) *
                             omega.asDiagonal();
            inner += MatrixXd((p.array() * omega.array()).matrix().asDiagonal());
            MatrixXd H = ra.C.transpose() * inner * ra.C;
            const VectorXd cross =
                ra.C.transpose() *
                (omega.array() * d.hessian.topRightCorner(N, 1).col(0).array()).matrix();
            H.col(ra.dim - 1) += cross;
            H.row(ra.dim - 1) += cross.transpose();
            H(ra.dim - 1, ra.dim - 1) += d.hessian(N, N);
            return H;
        };
    } else {
        // Omega = 0: the inner problem is the single prior q and the smooth
        // limit of L is L0(v) = sum_i q_i omega_i(v); no mu variable.
        P.value = [&, ra](const VectorXd& v) {
            const VectorXd omega = (-z.array() * zeta_of(ra, v).array().exp()).matrix();
            return q.dot(omega);
        };
        P.gradient = [&, ra](const VectorXd& v) {
            const VectorXd omega = (-z.array() * zeta_of(ra, v).array().exp()).matrix();
            return VectorXd(ra.C.transpose() * (q.array() * omega.array()).matrix());
        };
        P.hessian = [&, ra](const VectorXd& v) {
            const VectorXd omega = (-z.array() * zeta_of(ra, v).array().exp()).matrix();
            return MatrixXd(ra.C.transpose() *
                            (q.array() * omega.array()).matrix().asDiagonal() * ra.C);
        };
    }
    add_region_constraints(P, book, region, ra);

    const SolverReport rep = minimize(P, 1e-9, 200);

    RegionSolution sol;
    sol.region = region.indices;
    sol.report = rep;
    if (rep.status == SolveStatus::Infeasible) {
        sol.objective = std::numeric_limits<double>::infinity();
        return sol;
    }
    const VectorXd& v = rep.solution;
    sol.state_prices = v.head(N);
    sol.fills = VectorXd::Zero(book.num_orders());
    for (int j = 0; j < book.num_orders(); ++j)
        if (fills.status[static_cast<size_t>(j)] == FillStatus::FixedFull)
            sol.fills[j] = book.orders[static_cast<size_t>(j)].limit_quantity;
    for (size_t f = 0; f < ra.free_orders.size(); ++f)
        sol.fills[ra.free_orders[f]] = v[N + static_cast<int>(f)];
    sol.zeta = zeta_of(ra, v);
    sol.omega = (-z.array() * sol.zeta.array().exp()).matrix();

    // Refine L (and mu) through the ambiguity dual at the achieved wealth
    // profile d = z e^{zeta}: this removes the mu-floor bias and makes the
    // strong-duality identity utility = -L hold to bisection accuracy.
    const VectorXd d = (z.array() * sol.zeta.array().exp()).matrix();
    const WorstCase wc = worst_case_distribution(d, params.ambiguity);
    sol.objective = -wc.value;
    sol.mu = wc.mu;
    return sol;
}

ClearingResult clear_market_kpm(const OrderBook& book, const MarketParams& params) {
    const int N = book.num_states();
    if (params.inventory.size() != N)
        throw ValidationError("clear_market_kpm: inventory length != state count");

    const std::vector<PriceLadder> ladders = price_ladders(book);

    ClearingResult result;
    result.regions_total = region_count(ladders);
    result.regions_feasible = 0;
    bool have_best = false;

    for_each_region(ladders, [&](const Region& region) {
        if (!region_feasible(region, book.securities, N)) return true;
        ++result.regions_feasible;
        const FillSet fills = forced_fills(region, book);
        RegionSolution sol = solve_region(book, region, fills, params);
        if (sol.report.status == SolveStatus::Infeasible) return true;
        // argmin of L; enumeration is lexicographic, so keeping the incumbent
        // on a tie selects the lexicographically smallest region index.
        if (!have_best || sol.objective < result.best.objective - kTieTol) {
            result.best = std::move(sol);
            have_best = true;
        }
        return true;
    });
    if (!have_best)
        throw SolverError("clear_market_kpm: no feasible region (invalid book?)");

    result.state_pnl =
        state_pnl(book, result.best.state_prices, result.best.fills, params.inventory);
    const VectorXd d =
        (-(-params.alpha * result.state_pnl.array()).exp()).matrix();
    const WorstCase wc = worst_case_distribution(d, params.ambiguity);
    result.worst_case_distribution = wc.distribution;
    result.utility = wc.value;
    result.best.objective = -wc.value;  // keep the duality identity exact
    return result;
}

double worst_case_pnl(const ClearingResult& result) {
    return result.state_pnl.minCoeff();
}

}  // namespace kpm
