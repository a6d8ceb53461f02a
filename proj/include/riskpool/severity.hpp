#pragma once

// Claim-severity models for compound-Poisson surplus processes.
//
// A SeverityModel is an immutable value wrapping one of five laws on [0,inf):
// Exponential, LogNormal, Gamma, a finite atom law, or a scaled mixture of
// other severity models.  Every law exposes closed-form moments, cdf, the
// stop-loss transform E[(X-t)+], quantiles, sampling, and a discretization of
// its equilibrium (integrated-tail) distribution.  The stop-loss transform is
// the workhorse: equilibrium cell masses and convex-order comparisons both
// reduce to it, so no quadrature is needed anywhere.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "rng.hpp"
#include "special.hpp"

namespace riskpool {

class SeverityModel;

struct Exponential {
    double rate;  // > 0; mean 1/rate
};

struct LogNormal {
    double mu;      // mean of ln X
    double sigma2;  // variance of ln X, > 0
};

struct GammaLaw {
    double shape;  // > 0
    double rate;   // > 0; mean shape/rate
};

struct DiscreteAtoms {
    // (value, probability) pairs: values >= 0, strictly increasing,
    // probabilities > 0 summing to 1.
    std::vector<std::pair<double, double>> points;
};

struct ScaledComponent {
    double weight;  // > 0, weights sum to 1
    double scale;   // > 0 after construction (zero-scale inputs fold to an atom at 0)
    std::shared_ptr<const SeverityModel> base;
};

struct ScaledMixture {
    std::vector<ScaledComponent> components;
};

namespace detail {
inline void require(bool ok, const std::string& what) {
    if (!ok) throw std::invalid_argument(what);
}
constexpr double kProbTol = 1e-12;
constexpr double kMergeRelTol = 1e-12;
}  // namespace detail

struct MixtureInput;  // completed right after SeverityModel below

class SeverityModel {
  public:
    using Variant =
        std::variant<Exponential, LogNormal, GammaLaw, DiscreteAtoms, ScaledMixture>;

    static SeverityModel exponential(double rate) {
        detail::require(std::isfinite(rate) && rate > 0.0,
                        "exponential severity: rate must be finite and > 0");
        return SeverityModel(Exponential{rate});
    }

    static SeverityModel lognormal(double mu, double sigma2) {
        detail::require(std::isfinite(mu), "lognormal severity: mu must be finite");
        detail::require(std::isfinite(sigma2) && sigma2 > 0.0,
                        "lognormal severity: sigma2 must be finite and > 0");
        return SeverityModel(LogNormal{mu, sigma2});
    }

    static SeverityModel gamma(double shape, double rate) {
        detail::require(std::isfinite(shape) && shape > 0.0,
                        "gamma severity: shape must be finite and > 0");
        detail::require(std::isfinite(rate) && rate > 0.0,
                        "gamma severity: rate must be finite and > 0");
        return SeverityModel(GammaLaw{shape, rate});
    }

    static SeverityModel atoms(std::vector<std::pair<double, double>> points) {
        detail::require(!points.empty(), "atom severity: at least one atom required");
        double total = 0.0;
        for (const auto& [v, p] : points) {
            detail::require(std::isfinite(v) && v >= 0.0,
                            "atom severity: values must be finite and >= 0");
            detail::require(std::isfinite(p) && p > 0.0,
                            "atom severity: probabilities must be > 0");
            total += p;
        }
        detail::require(std::abs(total - 1.0) <= detail::kProbTol,
                        "atom severity: probabilities must sum to 1 within 1e-12");
        std::sort(points.begin(), points.end());
        std::vector<std::pair<double, double>> merged;
        for (const auto& [v, p] : points) {
            if (!merged.empty() &&
                v - merged.back().first <=
                    detail::kMergeRelTol * std::max(1.0, std::abs(v))) {
                merged.back().second += p;
            } else {
                merged.emplace_back(v, p);
            }
        }
        for (auto& [v, p] : merged) p /= total;
        return SeverityModel(DiscreteAtoms{std::move(merged)});
    }

    static SeverityModel scaled_mixture(const std::vector<MixtureInput>& inputs);

    const Variant& dist() const { return *v_; }

  private:
    explicit SeverityModel(Variant v)
        : v_(std::make_shared<const Variant>(std::move(v))) {}

    std::shared_ptr<const Variant> v_;
};

struct MixtureInput {
    double weight;
    double scale;
    SeverityModel base;
};

inline SeverityModel SeverityModel::scaled_mixture(
    const std::vector<MixtureInput>& inputs) {
    detail::require(!inputs.empty(), "scaled mixture: at least one component");
    double total = 0.0;
    double zero_mass = 0.0;
    std::vector<ScaledComponent> comps;
    for (const auto& in : inputs) {
        detail::require(std::isfinite(in.weight) && in.weight >= 0.0,
                        "scaled mixture: weights must be finite and >= 0");
        detail::require(std::isfinite(in.scale) && in.scale >= 0.0,
                        "scaled mixture: scales must be finite and >= 0");
        total += in.weight;
        if (in.weight == 0.0) continue;  // vacuous component
        if (in.scale == 0.0) {
            zero_mass += in.weight;  // folded into a single atom at 0 below
        } else {
            comps.push_back({in.weight, in.scale,
                             std::make_shared<const SeverityModel>(in.base)});
        }
    }
    detail::require(std::abs(total - 1.0) <= detail::kProbTol,
                    "scaled mixture: weights must sum to 1 within 1e-12");
    if (zero_mass > 0.0) {
        comps.insert(comps.begin(),
                     {zero_mass, 1.0,
                      std::make_shared<const SeverityModel>(
                          SeverityModel::atoms({{0.0, 1.0}}))});
    }
    detail::require(!comps.empty(), "scaled mixture: all components had weight 0");
    for (auto& c : comps) c.weight /= total;
    if (comps.size() == 1 && comps.front().scale == 1.0)
        return SeverityModel(*comps.front().base);  // trivial wrapper: collapse
    return SeverityModel(ScaledMixture{std::move(comps)});
}

// ---------------------------------------------------------------------------
// Moments
// ---------------------------------------------------------------------------

inline double mean(const SeverityModel& m) {
    return std::visit(
        [](const auto& d) -> double {
            using T = std::decay_t<decltype(d)>;
            if constexpr (std::is_same_v<T, Exponential>) {
                return 1.0 / d.rate;
            } else if constexpr (std::is_same_v<T, LogNormal>) {
                return std::exp(d.mu + 0.5 * d.sigma2);
            } else if constexpr (std::is_same_v<T, GammaLaw>) {
                return d.shape / d.rate;
            } else if constexpr (std::is_same_v<T, DiscreteAtoms>) {
                double s = 0.0;
                for (const auto& [v, p] : d.points) s += v * p;
                return s;
            } else {
                double s = 0.0;
                for (const auto& c : d.components) s += c.weight * c.scale * mean(*c.base);
                return s;
            }
        },
        m.dist());
}

inline double second_moment(const SeverityModel& m) {
    return std::visit(
        [](const auto& d) -> double {
            using T = std::decay_t<decltype(d)>;
            if constexpr (std::is_same_v<T, Exponential>) {
                return 2.0 / (d.rate * d.rate);
            } else if constexpr (std::is_same_v<T, LogNormal>) {
                return std::exp(2.0 * d.mu + 2.0 * d.sigma2);
            } else if constexpr (std::is_same_v<T, GammaLaw>) {
                return d.shape * (d.shape + 1.0) / (d.rate * d.rate);
            } else if constexpr (std::is_same_v<T, DiscreteAtoms>) {
                double s = 0.0;
                for (const auto& [v, p] : d.points) s += v * v * p;
                return s;
            } else {
                double s = 0.0;
                for (const auto& c : d.components)
                    s += c.weight * c.scale * c.scale * second_moment(*c.base);
                return s;
            }
        },
        m.dist());
}

inline double variance(const SeverityModel& m) {
    const double mu = mean(m);
    return second_moment(m) - mu * mu;
}

// ---------------------------------------------------------------------------
// cdf / stop-loss / quantile
// ---------------------------------------------------------------------------

inline double cdf(const SeverityModel& m, double x) {
    if (x < 0.0) return 0.0;
    return std::visit(
        [x](const auto& d) -> double {
            using T = std::decay_t<decltype(d)>;
            if constexpr (std::is_same_v<T, Exponential>) {
                return -std::expm1(-d.rate * x);
            } else if constexpr (std::is_same_v<T, LogNormal>) {
                if (x <= 0.0) return 0.0;
                return normal_cdf((std::log(x) - d.mu) / std::sqrt(d.sigma2));
            } else if constexpr (std::is_same_v<T, GammaLaw>) {
                return gamma_p_reg(d.shape, d.rate * x);
            } else if constexpr (std::is_same_v<T, DiscreteAtoms>) {
                double s = 0.0;
                for (const auto& [v, p] : d.points) {
                    if (v > x) break;
                    s += p;
                }
                return s;
            } else {
                double s = 0.0;
                for (const auto& c : d.components) s += c.weight * cdf(*c.base, x / c.scale);
                return s;
            }
        },
        m.dist());
}

// Stop-loss (excess) transform E[(X-t)+].  Defined for all real t; for t < 0
// it equals mean(X) - t since X >= 0.
inline double stop_loss(const SeverityModel& m, double t) {
    if (t < 0.0) return mean(m) - t;
    return std::visit(
        [t](const auto& d) -> double {
            using T = std::decay_t<decltype(d)>;
            if constexpr (std::is_same_v<T, Exponential>) {
                return std::exp(-d.rate * t) / d.rate;
            } else if constexpr (std::is_same_v<T, LogNormal>) {
                const double m1 = std::exp(d.mu + 0.5 * d.sigma2);
                if (t == 0.0) return m1;
                const double sigma = std::sqrt(d.sigma2);
                const double lt = std::log(t);
                return m1 * normal_cdf((d.mu + d.sigma2 - lt) / sigma) -
                       t * normal_cdf((d.mu - lt) / sigma);
            } else if constexpr (std::is_same_v<T, GammaLaw>) {
                const double x = d.rate * t;
                return (d.shape / d.rate) * gamma_q_reg(d.shape + 1.0, x) -
                       t * gamma_q_reg(d.shape, x);
            } else if constexpr (std::is_same_v<T, DiscreteAtoms>) {
                double s = 0.0;
                for (auto it = d.points.rbegin(); it != d.points.rend(); ++it) {
                    if (it->first <= t) break;
                    s += it->second * (it->first - t);
                }
                return s;
            } else {
                double s = 0.0;
                for (const auto& c : d.components)
                    s += c.weight * c.scale * stop_loss(*c.base, t / c.scale);
                return s;
            }
        },
        m.dist());
}

// Smallest x with cdf(x) >= p, for p in [0,1).
inline double quantile(const SeverityModel& m, double p) {
    detail::require(p >= 0.0 && p < 1.0, "quantile: p must lie in [0,1)");
    return std::visit(
        [p, &m](const auto& d) -> double {
            using T = std::decay_t<decltype(d)>;
            if constexpr (std::is_same_v<T, Exponential>) {
                return -std::log1p(-p) / d.rate;
            } else if constexpr (std::is_same_v<T, LogNormal>) {
                if (p == 0.0) return 0.0;
                return std::exp(d.mu + std::sqrt(d.sigma2) * normal_quantile(p));
            } else if constexpr (std::is_same_v<T, GammaLaw>) {
                if (p == 0.0) return 0.0;
                return gamma_p_inv_reg(d.shape, p) / d.rate;
            } else if constexpr (std::is_same_v<T, DiscreteAtoms>) {
                double acc = 0.0;
                for (const auto& [v, q] : d.points) {
                    acc += q;
                    if (acc >= p) return v;
                }
                return d.points.back().first;
            } else {
                // Bisection on the mixture cdf.  The bracket end
                // max_k scale_k * quantile(base_k, p) dominates the true
                // quantile: each component's tail beyond it is <= 1-p.
                double hi = 0.0;
                for (const auto& c : d.components)
                    hi = std::max(hi, c.scale * quantile(*c.base, p));
                if (cdf(m, 0.0) >= p) return 0.0;
                double lo = 0.0;
                for (int i = 0; i < 200 && hi - lo >
                                    1e-15 * std::max(1.0, hi); ++i) {
                    double mid = 0.5 * (lo + hi);
                    (cdf(m, mid) >= p ? hi : lo) = mid;
                }
                return hi;
            }
        },
        m.dist());
}

// ---------------------------------------------------------------------------
// Sampling
// ---------------------------------------------------------------------------

inline double sample(const SeverityModel& m, RngStream& rng) {
    return std::visit(
        [&rng](const auto& d) -> double {
            using T = std::decay_t<decltype(d)>;
            if constexpr (std::is_same_v<T, Exponential>) {
                return rng.exponential(d.rate);
            } else if constexpr (std::is_same_v<T, LogNormal>) {
                return std::exp(d.mu + std::sqrt(d.sigma2) * rng.normal());
            } else if constexpr (std::is_same_v<T, GammaLaw>) {
                return rng.gamma(d.shape) / d.rate;
            } else if constexpr (std::is_same_v<T, DiscreteAtoms>) {
                double u = rng.uniform01();
                double acc = 0.0;
                for (const auto& [v, p] : d.points) {
                    acc += p;
                    if (u <= acc) return v;
                }
                return d.points.back().first;
            } else {
                double u = rng.uniform01();
                double acc = 0.0;
                for (const auto& c : d.components) {
                    acc += c.weight;
                    if (u <= acc) return c.scale * sample(*c.base, rng);
                }
                const auto& last = d.components.back();
                return last.scale * sample(*last.base, rng);
            }
        },
        m.dist());
}

// ---------------------------------------------------------------------------
// Structure probes used by the ruin and order modules
// ---------------------------------------------------------------------------

// Flattens the law to finite atoms if it is purely discrete (atoms, or any
// nesting of scaled mixtures over atoms).  Returns nullopt otherwise.
inline std::optional<DiscreteAtoms> as_discrete_atoms(const SeverityModel& m) {
    std::vector<std::pair<double, double>> acc;
    bool ok = true;
    auto walk = [&](auto&& self, const SeverityModel& node, double weight,
                    double scale) -> void {
        if (!ok) return;
        std::visit(
            [&](const auto& d) {
                using T = std::decay_t<decltype(d)>;
                if constexpr (std::is_same_v<T, DiscreteAtoms>) {
                    for (const auto& [v, p] : d.points)
                        acc.emplace_back(scale * v, weight * p);
                } else if constexpr (std::is_same_v<T, ScaledMixture>) {
                    for (const auto& c : d.components)
                        self(self, *c.base, weight * c.weight, scale * c.scale);
                } else {
                    ok = false;
                }
            },
            node.dist());
    };
    walk(walk, m, 1.0, 1.0);
    if (!ok) return std::nullopt;
    std::sort(acc.begin(), acc.end());
    DiscreteAtoms out;
    for (const auto& [v, p] : acc) {
        if (!out.points.empty() &&
            v - out.points.back().first <=
                detail::kMergeRelTol * std::max(1.0, std::abs(v))) {
            out.points.back().second += p;
        } else {
            out.points.emplace_back(v, p);
        }
    }
    return out;
}

// Flattened view of a law that is a finite mixture of exponentials plus an
// optional atom at 0 — the shape required by the closed-form ruin solver.
// Components are (weight, rate), rates strictly increasing, near-equal rates
// merged.  zero_mass + sum of weights == 1.
struct ExponentialMixture {
    double zero_mass = 0.0;
    std::vector<std::pair<double, double>> components;  // (weight, rate)
};

inline std::optional<ExponentialMixture> as_exponential_mixture(
    const SeverityModel& m) {
    ExponentialMixture out;
    bool ok = true;
    auto walk = [&](auto&& self, const SeverityModel& node, double weight,
                    double scale) -> void {
        if (!ok) return;
        std::visit(
            [&](const auto& d) {
                using T = std::decay_t<decltype(d)>;
                if constexpr (std::is_same_v<T, Exponential>) {
                    out.components.emplace_back(weight, d.rate / scale);
                } else if constexpr (std::is_same_v<T, GammaLaw>) {
                    if (d.shape == 1.0)
                        out.components.emplace_back(weight, d.rate / scale);
                    else
                        ok = false;
                } else if constexpr (std::is_same_v<T, DiscreteAtoms>) {
                    for (const auto& [v, p] : d.points) {
                        if (v == 0.0)
                            out.zero_mass += weight * p;
                        else
                            ok = false;
                    }
                } else if constexpr (std::is_same_v<T, ScaledMixture>) {
                    for (const auto& c : d.components)
                        self(self, *c.base, weight * c.weight, scale * c.scale);
                } else {
                    ok = false;
                }
            },
            node.dist());
    };
    walk(walk, m, 1.0, 1.0);
    if (!ok || out.components.empty()) return std::nullopt;
    std::sort(out.components.begin(), out.components.end(),
              [](const auto& a, const auto& b) { return a.second < b.second; });
    std::vector<std::pair<double, double>> merged;
    for (const auto& [w, r] : out.components) {
        if (!merged.empty() &&
            r - merged.back().second <= detail::kMergeRelTol * r) {
            merged.back().first += w;
        } else {
            merged.emplace_back(w, r);
        }
    }
    out.components = std::move(merged);
    return out;
}

// ---------------------------------------------------------------------------
// Equilibrium (integrated-tail) distribution
// ---------------------------------------------------------------------------
//
// F_e(x) = (1/mean) * integral_0^x (1-F(u)) du = 1 - stop_loss(x)/mean.
// F_e is continuous with F_e(0) = 0 for every severity model (atoms at 0
// included), so its discretizations below have no mass ambiguity at 0.

enum class Rounding { lower, upper };

struct DiscretizedDist {
    double span = 0.0;
    Rounding rounding = Rounding::lower;
    std::vector<double> atoms;     // atoms[j] = mass at j*span
    double truncation_mass = 0.0;  // equilibrium tail mass beyond the grid
};

// Equilibrium survival values F_e-bar(j*span) for j = 0..count-1.  Stops
// filling once the tail drops below tail_floor (remaining entries are 0):
// the caller treats cells beyond that point as empty.
inline std::vector<double> equilibrium_tail_grid(const SeverityModel& m,
                                                 double span, std::size_t count,
                                                 double tail_floor = 0.0) {
    detail::require(std::isfinite(span) && span > 0.0,
                    "equilibrium grid: span must be finite and > 0");
    const double mu = mean(m);
    detail::require(mu > 0.0, "equilibrium grid: severity mean must be > 0");
    std::vector<double> tail(count, 0.0);
    for (std::size_t j = 0; j < count; ++j) {
        double v = stop_loss(m, static_cast<double>(j) * span) / mu;
        tail[j] = std::min(1.0, std::max(0.0, v));
        if (tail[j] <= tail_floor) break;
    }
    return tail;
}

inline DiscretizedDist equilibrium_discretize(const SeverityModel& m, double span,
                                              double tail_tol = 1e-10,
                                              Rounding rounding = Rounding::lower,
                                              std::size_t atom_cap = 2000000) {
    detail::require(std::isfinite(span) && span > 0.0,
                    "equilibrium_discretize: span must be finite and > 0");
    detail::require(tail_tol > 0.0 && tail_tol <= 1e-3,
                    "equilibrium_discretize: tail tolerance must lie in (0, 1e-3]");
    const double mu = mean(m);
    detail::require(mu > 0.0, "equilibrium_discretize: severity mean must be > 0");

    auto tail_at = [&](std::size_t j) {
        return stop_loss(m, static_cast<double>(j) * span) / mu;
    };

    // Find the smallest grid count whose residual tail is <= tail_tol.
    std::size_t hi = 1;
    while (tail_at(hi) > tail_tol) {
        if (hi > atom_cap)
            throw std::length_error(
                "equilibrium_discretize: grid would exceed the atom cap (" +
                std::to_string(atom_cap) + ") before the tail reaches " +
                std::to_string(tail_tol));
        hi *= 2;
    }
    std::size_t lo = hi / 2;
    while (lo + 1 < hi) {
        std::size_t mid = lo + (hi - lo) / 2;
        (tail_at(mid) <= tail_tol ? hi : lo) = mid;
    }
    const std::size_t n = hi;
    if (n > atom_cap)
        throw std::length_error("equilibrium_discretize: grid exceeds the atom cap");

    std::vector<double> tail(n + 1);
    for (std::size_t j = 0; j <= n; ++j) tail[j] = tail_at(j);

    DiscretizedDist out;
    out.span = span;
    out.rounding = rounding;
    out.truncation_mass = tail[n];
    if (rounding == Rounding::lower) {
        // Mass of [j*span, (j+1)*span) placed at the left endpoint.
        out.atoms.resize(n);
        for (std::size_t j = 0; j < n; ++j)
            out.atoms[j] = std::max(0.0, tail[j] - tail[j + 1]);
    } else {
        // Mass of ((j-1)*span, j*span] placed at the right endpoint.
        out.atoms.resize(n + 1);
        out.atoms[0] = 0.0;
        for (std::size_t j = 1; j <= n; ++j)
            out.atoms[j] = std::max(0.0, tail[j - 1] - tail[j]);
    }
    return out;
}

}  // namespace riskpool
