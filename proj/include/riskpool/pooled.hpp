#pragma once

// Claim laws seen by a participant before and after pooling.
//
// Superposing the pool's claim arrivals gives one Poisson stream with
// intensity lambda_pool = sum_j lambda_j.  An arrival is participant j's with
// probability lambda_j / lambda_pool, and under sharing rule A participant i
// then pays a(i,j) * Y_j.  So after pooling, i faces a compound-Poisson
// process at rate lambda_pool whose severity is the scaled mixture
//
//   Z_i  ~  sum_j (lambda_j / lambda_pool) * law(a(i,j) * Y_j).
//
// For an apples-to-apples comparison, the standalone account is rewritten on
// the same clock: a rate-lambda_pool process whose severity is i's own claim
// thinned by the chance the arrival was theirs,
//
//   Y'_i ~  (1 - lambda_i/lambda_pool) at 0,  (lambda_i/lambda_pool) * law(Y_i).
//
// E[Z_i] = E[Y'_i] exactly when the rule is fair for i, which keeps premiums,
// loading, and the ruin comparison aligned.

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "pool.hpp"
#include "severity.hpp"

namespace riskpool {

// One compound-Poisson surplus account: V_t = kappa + c*t - S_t with S_t a
// compound Poisson (intensity, claim_law) process.
struct SurplusSpec {
    double premium_rate = 0.0;
    double intensity = 0.0;
    SeverityModel claim_law = SeverityModel::exponential(1.0);
    double kappa = 0.0;

    // Expected claim outflow per unit time.
    double drift_out() const { return intensity * mean(claim_law); }
    // Safety loading implied by the premium: c = (1+eta) * intensity * mean.
    double implied_loading() const { return premium_rate / drift_out() - 1.0; }
};

inline double pool_intensity(const PoolSpec& pool) {
    double s = 0.0;
    for (const auto& p : pool.participants) s += p.lambda;
    return s;
}

// Severity of participant i's share of a pooled arrival.
inline SeverityModel build_pooled_claim(const PoolSpec& pool,
                                        const AllocationMatrix& a,
                                        std::size_t i) {
    validate_pool_spec(pool);
    detail::require(a.size() == pool.size(),
                    "pooled claim: matrix dimension != pool size");
    detail::require(i < pool.size(), "pooled claim: participant index out of range");
    const double lam_pool = pool_intensity(pool);
    std::vector<MixtureInput> parts;
    parts.reserve(pool.size());
    for (std::size_t j = 0; j < pool.size(); ++j) {
        parts.push_back({pool.participants[j].lambda / lam_pool, a(i, j),
                         pool.participants[j].severity});
    }
    return SeverityModel::scaled_mixture(parts);
}

// Participant i's own claim law thinned onto the pooled clock.
inline SeverityModel build_thinned_standalone(const PoolSpec& pool,
                                              std::size_t i) {
    validate_pool_spec(pool);
    detail::require(i < pool.size(),
                    "thinned standalone: participant index out of range");
    const double lam_pool = pool_intensity(pool);
    const double w = pool.participants[i].lambda / lam_pool;
    if (w == 1.0) return pool.participants[i].severity;
    return SeverityModel::scaled_mixture(
        {{1.0 - w, 0.0, SeverityModel::atoms({{0.0, 1.0}})},
         {w, 1.0, pool.participants[i].severity}});
}

// Surplus account of participant i on their own: premium (1+eta)*lambda_i*b_i
// against their native claim process.
inline SurplusSpec standalone_surplus_spec(const PoolSpec& pool, std::size_t i) {
    validate_pool_spec(pool);
    detail::require(i < pool.size(), "surplus spec: participant index out of range");
    const auto& p = pool.participants[i];
    return {premium_rate(pool, i), p.lambda, p.severity, p.kappa};
}

// Surplus account of participant i inside the pool: same premium and capital,
// claims replaced by their share of the pooled stream.
inline SurplusSpec pooled_surplus_spec(const PoolSpec& pool,
                                       const AllocationMatrix& a, std::size_t i) {
    SurplusSpec spec = standalone_surplus_spec(pool, i);
    spec.intensity = pool_intensity(pool);
    spec.claim_law = build_pooled_claim(pool, a, i);
    return spec;
}

// The pool viewed as one account: total premiums against the superposed
// claim stream.  Under full allocation this is also the sum of the members'
// pooled accounts.
inline SurplusSpec aggregate_surplus_spec(const PoolSpec& pool) {
    validate_pool_spec(pool);
    const double lam_pool = pool_intensity(pool);
    double premium = 0.0, kappa = 0.0;
    std::vector<MixtureInput> parts;
    parts.reserve(pool.size());
    for (std::size_t i = 0; i < pool.size(); ++i) {
        premium += premium_rate(pool, i);
        kappa += pool.participants[i].kappa;
        parts.push_back({pool.participants[i].lambda / lam_pool, 1.0,
                         pool.participants[i].severity});
    }
    return {premium, lam_pool, SeverityModel::scaled_mixture(parts), kappa};
}

}  // namespace riskpool
