#pragma once

// Pool description and risk-sharing allocation matrices.
//
// A pool is a set of participants, each running an independent
// compound-Poisson surplus account (claim intensity lambda_i, severity Y_i,
// initial capital kappa_i) priced with a common safety loading eta.  A sharing
// rule is a column-stochastic matrix A: entry a(i,j) is the fraction of
// participant j's claims that participant i pays.  This header builds the two
// canonical rules (mean-proportional and uniform), completes a partially
// specified rule to a fair one, and validates rules against the structural
// conditions under which pooling provably helps everyone:
//
//   full allocation   every column of A sums to 1
//   fairness          expected payments in == expected claims out, per row
//   capacity          no single shared payment a(i,j)*Y_j can exceed i's own
//                     mean claim scale: a(i,j)*b_j <= b_i
//   scale family      all severities come from one scale family
//
// Validation reports each condition separately; callers decide which of them
// their use case actually requires.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "severity.hpp"

namespace riskpool {

struct Participant {
    double lambda = 1.0;  // claim intensity, > 0
    double kappa = 0.0;   // initial capital, >= 0
    SeverityModel severity = SeverityModel::exponential(1.0);
};

struct PoolSpec {
    double eta = 0.0;  // safety loading, > 0 (premium = (1+eta)*lambda*mean)
    std::vector<Participant> participants;

    std::size_t size() const { return participants.size(); }
};

inline void validate_pool_spec(const PoolSpec& pool) {
    detail::require(!pool.participants.empty(), "pool: at least one participant");
    detail::require(std::isfinite(pool.eta) && pool.eta > 0.0,
                    "pool: safety loading must be finite and > 0");
    for (std::size_t i = 0; i < pool.size(); ++i) {
        const auto& p = pool.participants[i];
        detail::require(std::isfinite(p.lambda) && p.lambda > 0.0,
                        "pool: participant " + std::to_string(i + 1) +
                            " intensity must be > 0");
        detail::require(std::isfinite(p.kappa) && p.kappa >= 0.0,
                        "pool: participant " + std::to_string(i + 1) +
                            " initial capital must be >= 0");
        detail::require(mean(p.severity) > 0.0,
                        "pool: participant " + std::to_string(i + 1) +
                            " severity mean must be > 0");
    }
}

inline double premium_rate(const PoolSpec& pool, std::size_t i) {
    const auto& p = pool.participants.at(i);
    return (1.0 + pool.eta) * p.lambda * mean(p.severity);
}

// ---------------------------------------------------------------------------
// Allocation matrix
// ---------------------------------------------------------------------------

class AllocationMatrix {
  public:
    AllocationMatrix(std::size_t n, double fill = 0.0)
        : n_(n), a_(n * n, fill) {
        detail::require(n > 0, "allocation matrix: dimension must be >= 1");
        detail::require(std::isfinite(fill) && fill >= 0.0 && fill <= 1.0,
                        "allocation matrix: entries must lie in [0,1]");
    }

    static AllocationMatrix identity(std::size_t n) {
        AllocationMatrix a(n);
        for (std::size_t i = 0; i < n; ++i) a.set(i, i, 1.0);
        return a;
    }

    static AllocationMatrix from_rows(
        const std::vector<std::vector<double>>& rows) {
        detail::require(!rows.empty(), "allocation matrix: no rows");
        AllocationMatrix a(rows.size());
        for (std::size_t i = 0; i < rows.size(); ++i) {
            detail::require(rows[i].size() == rows.size(),
                            "allocation matrix: row " + std::to_string(i + 1) +
                                " has wrong length");
            for (std::size_t j = 0; j < rows.size(); ++j) a.set(i, j, rows[i][j]);
        }
        return a;
    }

    std::size_t size() const { return n_; }

    double operator()(std::size_t i, std::size_t j) const {
        return a_[i * n_ + j];
    }

    // Entries a hair outside [0,1] from upstream arithmetic are clamped;
    // anything beyond the tolerance is a caller error.
    void set(std::size_t i, std::size_t j, double value) {
        detail::require(i < n_ && j < n_, "allocation matrix: index out of range");
        detail::require(std::isfinite(value) && value >= -1e-12 &&
                            value <= 1.0 + 1e-12,
                        "allocation matrix: entry (" + std::to_string(i + 1) + "," +
                            std::to_string(j + 1) + ") outside [0,1]");
        a_[i * n_ + j] = std::clamp(value, 0.0, 1.0);
    }

    double column_sum(std::size_t j) const {
        double s = 0.0;
        for (std::size_t i = 0; i < n_; ++i) s += (*this)(i, j);
        return s;
    }

    std::vector<std::vector<double>> rows() const {
        std::vector<std::vector<double>> out(n_, std::vector<double>(n_));
        for (std::size_t i = 0; i < n_; ++i)
            for (std::size_t j = 0; j < n_; ++j) out[i][j] = (*this)(i, j);
        return out;
    }

  private:
    std::size_t n_;
    std::vector<double> a_;
};

// Mean claim scales b_i = E[Y_i] for every participant.
inline std::vector<double> mean_claim_sizes(const PoolSpec& pool) {
    std::vector<double> b(pool.size());
    for (std::size_t i = 0; i < pool.size(); ++i)
        b[i] = mean(pool.participants[i].severity);
    return b;
}

// ---------------------------------------------------------------------------
// Canonical rules
// ---------------------------------------------------------------------------

// Everyone pays the same fraction of every claim, proportional to their own
// expected-claim volume: a(i,j) = lambda_i b_i / sum_k lambda_k b_k.  Constant
// across columns, always fair.
inline AllocationMatrix build_mean_proportional(const PoolSpec& pool) {
    validate_pool_spec(pool);
    const std::size_t n = pool.size();
    std::vector<double> volume(n);
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        volume[i] = pool.participants[i].lambda * mean(pool.participants[i].severity);
        total += volume[i];
    }
    AllocationMatrix a(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) a.set(i, j, volume[i] / total);
    return a;
}

// Every claim is split equally: a(i,j) = 1/n.  Fair only for exchangeable
// pools; validation reports the fairness residuals either way.
inline AllocationMatrix build_uniform(const PoolSpec& pool) {
    validate_pool_spec(pool);
    const std::size_t n = pool.size();
    return AllocationMatrix(n, 1.0 / static_cast<double>(n));
}

// ---------------------------------------------------------------------------
// Completion of a partially specified rule
// ---------------------------------------------------------------------------

struct FixedEntry {
    std::size_t row = 0;  // 0-based
    std::size_t col = 0;  // 0-based
    double value = 0.0;
};

// Fills in the unspecified entries of a sharing rule so that every column
// sums to 1 and every row is fair (expected payments match expected claims).
// With n^2 unknowns and 2n-1 independent constraints the system is
// underdetermined unless callers pin down n^2 - (2n-1) entries; redundant or
// contradictory pins surface as a singular or inconsistent linear system.
inline AllocationMatrix complete_alternative(const PoolSpec& pool,
                                             const std::vector<FixedEntry>& fixed) {
    validate_pool_spec(pool);
    const std::size_t n = pool.size();
    const std::vector<double> b = mean_claim_sizes(pool);
    std::vector<double> lam(n);
    for (std::size_t i = 0; i < n; ++i) lam[i] = pool.participants[i].lambda;

    const std::size_t expected_fixed = n * n - (2 * n - 1);
    detail::require(fixed.size() == expected_fixed,
                    "matrix completion: need exactly " +
                        std::to_string(expected_fixed) + " fixed entries for n=" +
                        std::to_string(n) + ", got " + std::to_string(fixed.size()));

    std::vector<std::optional<double>> pin(n * n);
    for (const auto& f : fixed) {
        detail::require(f.row < n && f.col < n,
                        "matrix completion: fixed entry index out of range");
        detail::require(std::isfinite(f.value) && f.value >= 0.0 && f.value <= 1.0,
                        "matrix completion: fixed entries must lie in [0,1]");
        detail::require(!pin[f.row * n + f.col].has_value(),
                        "matrix completion: entry (" + std::to_string(f.row + 1) +
                            "," + std::to_string(f.col + 1) + ") fixed twice");
        pin[f.row * n + f.col] = f.value;
    }

    // Unknown indexing: free entries in row-major order.
    std::vector<std::size_t> unknown_of_cell(n * n, SIZE_MAX);
    std::vector<std::size_t> cell_of_unknown;
    for (std::size_t c = 0; c < n * n; ++c) {
        if (!pin[c]) {
            unknown_of_cell[c] = cell_of_unknown.size();
            cell_of_unknown.push_back(c);
        }
    }
    const std::size_t u = cell_of_unknown.size();
    detail::require(u == 2 * n - 1,
                    "matrix completion: internal unknown-count mismatch");

    // Rows of the linear system: n column sums = 1, first n-1 fairness
    // equations (the last is implied by the others plus full allocation).
    const std::size_t rows = 2 * n - 1;
    std::vector<std::vector<double>> sys(rows, std::vector<double>(u + 1, 0.0));
    for (std::size_t j = 0; j < n; ++j) {  // column sums
        double rhs = 1.0;
        for (std::size_t i = 0; i < n; ++i) {
            const std::size_t c = i * n + j;
            if (pin[c])
                rhs -= *pin[c];
            else
                sys[j][unknown_of_cell[c]] = 1.0;
        }
        sys[j][u] = rhs;
    }
    for (std::size_t i = 0; i + 1 < n; ++i) {  // fairness: sum_j lam_j a(i,j) b_j = lam_i b_i
        auto& row = sys[n + i];
        double rhs = lam[i] * b[i];
        for (std::size_t j = 0; j < n; ++j) {
            const std::size_t c = i * n + j;
            const double coef = lam[j] * b[j];
            if (pin[c])
                rhs -= coef * (*pin[c]);
            else
                row[unknown_of_cell[c]] = coef;
        }
        row[u] = rhs;
    }

    // Gauss-Jordan with partial pivoting.
    const double pivot_tol = 1e-10;
    std::vector<std::size_t> pivot_col(rows, SIZE_MAX);
    std::size_t rank = 0;
    for (std::size_t col = 0; col < u && rank < rows; ++col) {
        std::size_t best = rank;
        for (std::size_t r = rank + 1; r < rows; ++r)
            if (std::abs(sys[r][col]) > std::abs(sys[best][col])) best = r;
        if (std::abs(sys[best][col]) <= pivot_tol) continue;
        std::swap(sys[rank], sys[best]);
        const double inv = 1.0 / sys[rank][col];
        for (std::size_t k = col; k <= u; ++k) sys[rank][k] *= inv;
        for (std::size_t r = 0; r < rows; ++r) {
            if (r == rank) continue;
            const double f = sys[r][col];
            if (f == 0.0) continue;
            for (std::size_t k = col; k <= u; ++k) sys[r][k] -= f * sys[rank][k];
        }
        pivot_col[rank] = col;
        ++rank;
    }
    for (std::size_t r = rank; r < rows; ++r) {
        if (std::abs(sys[r][u]) > 1e-8)
            throw std::invalid_argument(
                "matrix completion: the fixed entries contradict fairness or "
                "full allocation (inconsistent system)");
    }
    if (rank < u)
        throw std::invalid_argument(
            "matrix completion: the fixed entries leave the rule underdetermined "
            "(rank " + std::to_string(rank) + " of " + std::to_string(u) + ")");

    std::vector<double> x(u, 0.0);
    for (std::size_t r = 0; r < rank; ++r) x[pivot_col[r]] = sys[r][u];

    AllocationMatrix a(n);
    for (std::size_t c = 0; c < n * n; ++c) {
        const double v = pin[c] ? *pin[c] : x[unknown_of_cell[c]];
        detail::require(v >= -1e-9 && v <= 1.0 + 1e-9,
                        "matrix completion: completed entry (" +
                            std::to_string(c / n + 1) + "," +
                            std::to_string(c % n + 1) + ") = " + std::to_string(v) +
                            " falls outside [0,1]");
        a.set(c / n, c % n, std::clamp(v, 0.0, 1.0));
    }
    return a;
}

// ---------------------------------------------------------------------------
// Validation
// ---------------------------------------------------------------------------

enum class CheckStatus { pass, fail, not_applicable };

inline const char* to_string(CheckStatus s) {
    switch (s) {
        case CheckStatus::pass: return "pass";
        case CheckStatus::fail: return "fail";
        default: return "not_applicable";
    }
}

struct CapacityViolation {
    std::size_t row = 0;   // 0-based
    std::size_t col = 0;   // 0-based
    double excess = 0.0;   // a(i,j)*b_j - b_i, > 0
};

struct ValidationReport {
    CheckStatus full_allocation = CheckStatus::fail;
    CheckStatus fairness = CheckStatus::fail;
    CheckStatus capacity = CheckStatus::fail;
    CheckStatus scale_family = CheckStatus::fail;
    CheckStatus net_profit = CheckStatus::fail;

    std::vector<double> column_residuals;    // column_sum(j) - 1
    std::vector<double> fairness_residuals;  // sum_j lam_j a(i,j) b_j - lam_i b_i
    std::vector<CapacityViolation> capacity_violations;
    std::string scale_family_detail;
    double net_profit_margin = 0.0;  // total premium - total expected claims

    // The conditions the dominance guarantee actually needs.
    bool core_pass() const {
        return full_allocation == CheckStatus::pass &&
               fairness == CheckStatus::pass && capacity == CheckStatus::pass &&
               (scale_family == CheckStatus::pass ||
                scale_family == CheckStatus::not_applicable);
    }
};

namespace detail {

// Scale-family classification for the validation check.  Two laws belong to
// the same scale family when one is a rescaling of the other: exponentials
// always; gammas iff equal shape; lognormals iff equal log-variance; finite
// atom laws iff equal after normalizing to unit mean.  Mixtures are not
// classified (the check reports not_applicable rather than guessing).
inline bool atoms_scale_equal(const DiscreteAtoms& x, const DiscreteAtoms& y,
                              double mx, double my) {
    if (x.points.size() != y.points.size()) return false;
    for (std::size_t k = 0; k < x.points.size(); ++k) {
        const double vx = x.points[k].first / mx;
        const double vy = y.points[k].first / my;
        if (std::abs(vx - vy) > 1e-9 * std::max(1.0, std::abs(vx))) return false;
        if (std::abs(x.points[k].second - y.points[k].second) > 1e-9) return false;
    }
    return true;
}

}  // namespace detail

inline std::pair<CheckStatus, std::string> check_scale_family(
    const PoolSpec& pool) {
    const auto& ps = pool.participants;
    if (ps.size() <= 1) return {CheckStatus::pass, "single participant"};

    enum class Kind { exp, gam, lnorm, atoms, mixture };
    auto kind_of = [](const SeverityModel& m) {
        return std::visit(
            [](const auto& d) -> Kind {
                using T = std::decay_t<decltype(d)>;
                if constexpr (std::is_same_v<T, Exponential>) return Kind::exp;
                else if constexpr (std::is_same_v<T, GammaLaw>)
                    // A unit-shape gamma IS an exponential; classify by law,
                    // not by tag, so the two spellings mix freely.
                    return d.shape == 1.0 ? Kind::exp : Kind::gam;
                else if constexpr (std::is_same_v<T, LogNormal>) return Kind::lnorm;
                else if constexpr (std::is_same_v<T, DiscreteAtoms>) return Kind::atoms;
                else return Kind::mixture;
            },
            m.dist());
    };

    const Kind kind = kind_of(ps.front().severity);
    for (const auto& p : ps) {
        if (kind_of(p.severity) == Kind::mixture)
            return {CheckStatus::not_applicable,
                    "mixture severities are not classified into scale families"};
    }
    for (const auto& p : ps) {
        if (kind_of(p.severity) != kind)
            return {CheckStatus::fail, "severities come from different families"};
    }

    switch (kind) {
        case Kind::exp:
            return {CheckStatus::pass, "all exponential"};
        case Kind::gam: {
            const double shape0 = std::get<GammaLaw>(ps.front().severity.dist()).shape;
            for (const auto& p : ps) {
                const double s = std::get<GammaLaw>(p.severity.dist()).shape;
                if (std::abs(s - shape0) > 1e-9 * std::max(1.0, shape0))
                    return {CheckStatus::fail,
                            "gamma severities with unequal shape parameters"};
            }
            return {CheckStatus::pass, "gamma, common shape"};
        }
        case Kind::lnorm: {
            const double s0 = std::get<LogNormal>(ps.front().severity.dist()).sigma2;
            for (const auto& p : ps) {
                const double s = std::get<LogNormal>(p.severity.dist()).sigma2;
                if (std::abs(s - s0) > 1e-9 * std::max(1.0, s0))
                    return {CheckStatus::fail,
                            "lognormal severities with unequal log-variances"};
            }
            return {CheckStatus::pass, "lognormal, common log-variance"};
        }
        case Kind::atoms: {
            const auto base = as_discrete_atoms(ps.front().severity);
            const double m0 = mean(ps.front().severity);
            for (const auto& p : ps) {
                const auto cur = as_discrete_atoms(p.severity);
                if (!detail::atoms_scale_equal(*base, *cur, m0, mean(p.severity)))
                    return {CheckStatus::fail,
                            "atom severities are not rescalings of one another"};
            }
            return {CheckStatus::pass, "finite atoms, common shape up to scale"};
        }
        default:
            return {CheckStatus::not_applicable, "unclassified"};
    }
}

inline ValidationReport validate(const PoolSpec& pool, const AllocationMatrix& a,
                                 double tol = 1e-9) {
    validate_pool_spec(pool);
    const std::size_t n = pool.size();
    detail::require(a.size() == n, "validate: matrix dimension != pool size");
    const std::vector<double> b = mean_claim_sizes(pool);

    ValidationReport rep;

    rep.column_residuals.resize(n);
    bool cols_ok = true;
    for (std::size_t j = 0; j < n; ++j) {
        rep.column_residuals[j] = a.column_sum(j) - 1.0;
        if (std::abs(rep.column_residuals[j]) > tol) cols_ok = false;
    }
    rep.full_allocation = cols_ok ? CheckStatus::pass : CheckStatus::fail;

    rep.fairness_residuals.resize(n);
    bool fair_ok = true;
    for (std::size_t i = 0; i < n; ++i) {
        double inflow = 0.0;
        for (std::size_t j = 0; j < n; ++j)
            inflow += pool.participants[j].lambda * a(i, j) * b[j];
        const double own = pool.participants[i].lambda * b[i];
        rep.fairness_residuals[i] = inflow - own;
        if (std::abs(rep.fairness_residuals[i]) > tol * std::max(1.0, own))
            fair_ok = false;
    }
    rep.fairness = fair_ok ? CheckStatus::pass : CheckStatus::fail;

    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            const double excess = a(i, j) * b[j] - b[i];
            if (excess > tol * std::max(1.0, b[i]))
                rep.capacity_violations.push_back({i, j, excess});
        }
    }
    rep.capacity =
        rep.capacity_violations.empty() ? CheckStatus::pass : CheckStatus::fail;

    auto [scale_status, scale_detail] = check_scale_family(pool);
    rep.scale_family = scale_status;
    rep.scale_family_detail = std::move(scale_detail);

    double premiums = 0.0, claims = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        premiums += premium_rate(pool, i);
        claims += pool.participants[i].lambda * b[i];
    }
    rep.net_profit_margin = premiums - claims;
    rep.net_profit =
        rep.net_profit_margin > 0.0 ? CheckStatus::pass : CheckStatus::fail;

    return rep;
}

// ---------------------------------------------------------------------------
// Capacity feasibility of the canonical rules
// ---------------------------------------------------------------------------

enum class CanonicalRule { mean_proportional, uniform };

struct FeasibilityResult {
    bool feasible = true;
    // Worst offending pair when infeasible (0-based), with the excess
    // a(i,j)*b_j - b_i.
    std::size_t row = 0;
    std::size_t col = 0;
    double excess = 0.0;
};

// The mean-proportional rule satisfies capacity iff for every participant i
//   lambda_i b_i * max_j b_j <= b_i * sum_k lambda_k b_k,
// i.e. lambda_i * max_j b_j <= sum_k lambda_k b_k.  The uniform rule
// satisfies it iff max_j b_j <= n * min_i b_i.  Both reduce to scanning the
// rule's worst entry, which is what this does.
inline FeasibilityResult capacity_feasibility(const PoolSpec& pool,
                                              CanonicalRule rule) {
    validate_pool_spec(pool);
    const AllocationMatrix a = rule == CanonicalRule::mean_proportional
                                   ? build_mean_proportional(pool)
                                   : build_uniform(pool);
    const std::vector<double> b = mean_claim_sizes(pool);
    FeasibilityResult res;
    for (std::size_t i = 0; i < pool.size(); ++i) {
        for (std::size_t j = 0; j < pool.size(); ++j) {
            const double excess = a(i, j) * b[j] - b[i];
            if (excess > 1e-12 * std::max(1.0, b[i]) && excess > res.excess) {
                res.feasible = false;
                res.row = i;
                res.col = j;
                res.excess = excess;
            }
        }
    }
    return res;
}

}  // namespace riskpool
