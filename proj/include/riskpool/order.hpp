#pragma once

// Convex-order (stop-loss) verification machinery.
//
// X precedes Y in convex order iff E[X] = E[Y] and E[(X-t)+] <= E[(Y-t)+]
// for every threshold t — "same mean, less dispersed".  This is the exact
// property behind the pooling guarantee: each participant's pooled claim must
// be convex-dominated by their thinned stand-alone claim for ruin to improve
// universally.  This header tests that relation numerically:
//
//   convex_order_dominates   stop-loss comparison of two severity models —
//                            exact at the kink points when both laws are
//                            finite-atom, exact closed-form stop-loss values
//                            on a dense quantile-capped grid otherwise
//   check_pooled_dominance   the Z_i vs Y'_i instance above
//   build_transfer_matrix    the two-party transfer rule that extracts the
//                            necessary condition on normalized claim laws
//   normalized_chain_check   pairwise Y_j/b_j vs Y_i/b_i comparisons under
//                            homogeneous claim frequencies
//
// Comparisons never throw on failure: the result object carries the verdict,
// the worst violation, and the first violating threshold.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "pool.hpp"
#include "pooled.hpp"
#include "ruin.hpp"
#include "severity.hpp"

namespace riskpool {

struct OrderGrid {
    // Continuous comparisons run on [0, q] where q is this quantile of the
    // larger-mean law; finite-atom pairs ignore it and use their kink points.
    double quantile_level = 1.0 - 1e-6;
    std::size_t points = 2048;
};

struct StopLossComparison {
    std::vector<double> grid;  // thresholds t
    std::vector<double> lhs;   // E[(X-t)+] per threshold
    std::vector<double> rhs;   // E[(Y-t)+] per threshold
    double mean_lhs = 0.0;
    double mean_rhs = 0.0;
    double mean_gap = 0.0;        // |mean_lhs - mean_rhs|
    double max_violation = 0.0;   // max over grid of (lhs - rhs), >0 means lhs pokes above
    double tol = 0.0;             // tolerance the verdict used
    bool exact = false;           // kink-point evaluation (finite-atom inputs)
    bool dominated = false;
    std::optional<std::pair<double, double>> first_violation;  // (t, lhs-rhs)
};

// Does X precede Y in convex order?  tol = 0 picks the default for the input
// kind: 1e-9 (relative to the mean scale) for exact finite-atom comparisons,
// 1e-6 for grid-based ones.
inline StopLossComparison convex_order_dominates(const SeverityModel& x,
                                                 const SeverityModel& y,
                                                 const OrderGrid& grid_spec = {},
                                                 double tol = 0.0) {
    StopLossComparison out;
    out.mean_lhs = mean(x);
    out.mean_rhs = mean(y);
    out.mean_gap = std::abs(out.mean_lhs - out.mean_rhs);
    const double scale = std::max({1.0, out.mean_lhs, out.mean_rhs});

    const auto xa = as_discrete_atoms(x);
    const auto ya = as_discrete_atoms(y);
    if (xa && ya) {
        // Stop-loss transforms of finite-atom laws are piecewise linear with
        // kinks only at the atoms, so comparing at 0 and at every atom of
        // either law decides dominance exactly.
        out.exact = true;
        out.grid.push_back(0.0);
        for (const auto& [v, p] : xa->points) out.grid.push_back(v);
        for (const auto& [v, p] : ya->points) out.grid.push_back(v);
        std::sort(out.grid.begin(), out.grid.end());
        out.grid.erase(std::unique(out.grid.begin(), out.grid.end()),
                       out.grid.end());
        out.tol = tol > 0.0 ? tol : 1e-9 * scale;
    } else {
        detail::require(grid_spec.points >= 2,
                        "convex order: grid needs at least 2 points");
        detail::require(grid_spec.quantile_level > 0.0 &&
                            grid_spec.quantile_level < 1.0,
                        "convex order: quantile level must lie in (0,1)");
        const SeverityModel& wider = out.mean_lhs >= out.mean_rhs ? x : y;
        const double q = quantile(wider, grid_spec.quantile_level);
        const double hi = std::max(q, 1e-12);
        out.grid.resize(grid_spec.points);
        for (std::size_t i = 0; i < grid_spec.points; ++i)
            out.grid[i] = hi * static_cast<double>(i) /
                          static_cast<double>(grid_spec.points - 1);
        out.tol = tol > 0.0 ? tol : 1e-6 * scale;
    }

    out.lhs.resize(out.grid.size());
    out.rhs.resize(out.grid.size());
    for (std::size_t i = 0; i < out.grid.size(); ++i) {
        out.lhs[i] = stop_loss(x, out.grid[i]);
        out.rhs[i] = stop_loss(y, out.grid[i]);
        const double gap = out.lhs[i] - out.rhs[i];
        if (gap > out.max_violation) out.max_violation = gap;
        if (gap > out.tol && !out.first_violation)
            out.first_violation = {out.grid[i], gap};
    }
    out.dominated = out.max_violation <= out.tol && out.mean_gap <= out.tol;
    return out;
}

// The pooling guarantee's core inequality for participant i: pooled claim
// share Z_i versus thinned stand-alone claim Y'_i.
inline StopLossComparison check_pooled_dominance(const PoolSpec& pool,
                                                 const AllocationMatrix& a,
                                                 std::size_t i,
                                                 const OrderGrid& grid_spec = {},
                                                 double tol = 0.0) {
    return convex_order_dominates(build_pooled_claim(pool, a, i),
                                  build_thinned_standalone(pool, i), grid_spec,
                                  tol);
}

// ---------------------------------------------------------------------------
// Necessary-condition instruments
// ---------------------------------------------------------------------------

// The two-party transfer rule: participant i takes the fraction
// alpha = b_i / b_j of j's claims (the largest share its capacity allows),
// j keeps the rest and takes over all of i's claims; everyone else keeps
// their own.  Requires b_i <= b_j so that alpha <= 1.  Fair whenever claim
// frequencies are homogeneous, and the instrument that turns "pooling helps
// everyone" into a condition on normalized claim laws.
inline AllocationMatrix build_transfer_matrix(std::size_t i, std::size_t j,
                                              const std::vector<double>& b) {
    const std::size_t n = b.size();
    detail::require(n >= 2, "transfer matrix: need at least two participants");
    detail::require(i < n && j < n && i != j,
                    "transfer matrix: indices must be distinct and in range");
    for (double v : b)
        detail::require(std::isfinite(v) && v > 0.0,
                        "transfer matrix: mean claim sizes must be > 0");
    detail::require(b[i] <= b[j],
                    "transfer matrix: requires b_i <= b_j (the receiver cannot "
                    "absorb more than its own mean)");
    const double alpha = b[i] / b[j];
    AllocationMatrix a = AllocationMatrix::identity(n);
    a.set(i, i, 0.0);
    a.set(j, i, 1.0);
    a.set(i, j, alpha);
    a.set(j, j, 1.0 - alpha);
    return a;
}

struct NormalizedPairCheck {
    std::size_t small = 0;  // participant index with the smaller mean (0-based)
    std::size_t large = 0;  // participant index with the larger mean
    StopLossComparison comparison;  // Y_large/b_large vs Y_small/b_small
};

struct NormalizedChainReport {
    std::vector<NormalizedPairCheck> pairs;
    bool all_dominated = true;
};

// Pairwise necessary condition under homogeneous claim frequencies: if every
// admissible sharing rule is to benefit everyone, then for each pair with
// b_i <= b_j the normalized law Y_j/b_j must be convex-dominated by Y_i/b_i.
// Ties are checked in both directions.  Heterogeneous frequencies are outside
// the condition's hypotheses and are refused.
inline NormalizedChainReport normalized_chain_check(const PoolSpec& pool,
                                                    const OrderGrid& grid_spec = {},
                                                    double tol = 0.0) {
    validate_pool_spec(pool);
    const std::size_t n = pool.size();
    const double lam0 = pool.participants.front().lambda;
    for (const auto& p : pool.participants) {
        if (std::abs(p.lambda - lam0) > 1e-9 * std::max(1.0, lam0))
            throw std::domain_error(
                "normalized chain check applies only to pools with equal claim "
                "frequencies");
    }
    const std::vector<double> b = mean_claim_sizes(pool);

    auto normalized = [&](std::size_t k) {
        return SeverityModel::scaled_mixture(
            {{1.0, 1.0 / b[k], pool.participants[k].severity}});
    };

    NormalizedChainReport rep;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            if (i == j || b[i] > b[j]) continue;
            NormalizedPairCheck pc;
            pc.small = i;
            pc.large = j;
            pc.comparison =
                convex_order_dominates(normalized(j), normalized(i), grid_spec, tol);
            rep.all_dominated = rep.all_dominated && pc.comparison.dominated;
            rep.pairs.push_back(std::move(pc));
        }
    }
    return rep;
}

// ---------------------------------------------------------------------------
// CSV wire format
// ---------------------------------------------------------------------------

// gap = lhs - rhs: positive entries are where the claimed dominance fails.
inline void write_comparison_csv(std::ostream& os,
                                 const StopLossComparison& cmp) {
    os << "t,lhs,rhs,gap\n";
    for (std::size_t i = 0; i < cmp.grid.size(); ++i) {
        os << detail::fmt9(cmp.grid[i]) << ',' << detail::fmt9(cmp.lhs[i]) << ','
           << detail::fmt9(cmp.rhs[i]) << ','
           << detail::fmt9(cmp.lhs[i] - cmp.rhs[i]) << '\n';
    }
}

}  // namespace riskpool
