#pragma once

// Infinite-time ruin probabilities for compound-Poisson surplus accounts.
//
// Four routes, sharing one input type (SurplusSpec):
//
//   ruin_exponential           exact formula, Exponential claims only
//   ruin_mixture_exponential   exact expansion sum C_k exp(-r_k kappa) for
//                              claims that flatten to a finite mixture of
//                              exponentials (plus an atom at 0)
//   ruin_pk_panjer             rigorous lower/upper bounds for any claim law
//                              with finite mean, via the ladder-height
//                              (Pollaczek-Khinchine) representation: psi(k) =
//                              1 - cdf of a compound-geometric sum of
//                              equilibrium variables, discretized both ways
//                              and run through the Panjer recursion
//   ruin_monte_carlo           path simulation at claim epochs with a
//                              drift-based early exit; 95% CIs, deterministic
//                              per seed
//
// ruin_curves composes these per participant (stand-alone and pooled) over a
// shared kappa grid, and write_curves_csv emits the wire format.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstddef>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "pooled.hpp"
#include "rng.hpp"
#include "severity.hpp"

namespace riskpool {

enum class RuinMethod { auto_select, closed_form, panjer, monte_carlo };

inline const char* method_name(RuinMethod m) {
    switch (m) {
        case RuinMethod::closed_form: return "closed_form";
        case RuinMethod::panjer: return "panjer";
        case RuinMethod::monte_carlo: return "monte_carlo";
        default: return "auto";
    }
}

// Thrown when a method is forced onto a claim law it cannot handle.
class MethodMismatchError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

namespace detail {

inline void require_net_profit(double rho) {
    if (!(rho > 0.0) || rho >= 1.0)
        throw std::domain_error(
            "net profit condition violated: premium rate must exceed the "
            "expected claim rate (rho = " + std::to_string(rho) + ")");
}

inline void require_kappas(const std::vector<double>& kappas) {
    require(!kappas.empty(), "ruin: at least one reserve level required");
    for (double k : kappas)
        require(std::isfinite(k) && k >= 0.0,
                "ruin: reserve levels must be finite and >= 0");
}

}  // namespace detail

// Traffic intensity rho = lambda * mean / c = psi(0); the geometric parameter
// of the ladder-height representation.
inline double traffic_intensity(const SurplusSpec& spec) {
    detail::require(spec.premium_rate > 0.0, "ruin: premium rate must be > 0");
    detail::require(spec.intensity > 0.0, "ruin: claim intensity must be > 0");
    return spec.drift_out() / spec.premium_rate;
}

// ---------------------------------------------------------------------------
// Closed form, Exponential claims
// ---------------------------------------------------------------------------

// psi(kappa) = (lambda/(alpha c)) * exp(-(alpha - lambda/c) * kappa).
inline double ruin_exponential(double premium_rate, double lambda, double alpha,
                               double kappa) {
    detail::require(premium_rate > 0.0 && lambda > 0.0 && alpha > 0.0,
                    "ruin_exponential: rates must be > 0");
    detail::require(std::isfinite(kappa) && kappa >= 0.0,
                    "ruin_exponential: reserve must be >= 0");
    const double rho = lambda / (alpha * premium_rate);
    detail::require_net_profit(rho);
    return rho * std::exp(-(alpha - lambda / premium_rate) * kappa);
}

inline double ruin_exponential(const SurplusSpec& spec, double kappa) {
    const auto* e = std::get_if<Exponential>(&spec.claim_law.dist());
    if (e == nullptr)
        throw MethodMismatchError(
            "ruin_exponential: claim law is not a plain exponential");
    return ruin_exponential(spec.premium_rate, spec.intensity, e->rate, kappa);
}

// ---------------------------------------------------------------------------
// Closed form, mixture-of-exponentials claims
// ---------------------------------------------------------------------------

// psi(kappa) = sum_k coefficients[k] * exp(-exponents[k] * kappa), with
// exponents sorted ascending and sum of coefficients = traffic intensity.
struct MixtureExpansion {
    std::vector<double> coefficients;
    std::vector<double> exponents;
    double rho = 0.0;

    double psi(double kappa) const {
        double s = 0.0;
        for (std::size_t k = 0; k < coefficients.size(); ++k)
            s += coefficients[k] * std::exp(-exponents[k] * kappa);
        return s;
    }
};

// Builds the expansion for a claim law that flattens to a finite mixture of
// exponentials (an atom at 0 is allowed: those claims are vacuous, so the
// process is equivalent to one with thinned intensity and the atom removed).
//
// With effective rates beta_1 < ... < beta_m, weights p_k, intensity lambda
// and premium c, the decay exponents are the m roots of
//
//   G(r) = lambda * sum_k p_k / (beta_k - r) - c = 0,
//
// one in (0, beta_1) and one in each (beta_k, beta_{k+1}): G is strictly
// increasing between poles, G(0) = lambda*mean - c < 0 under net profit, and
// G blows up to -inf/+inf across each pole.  The coefficients follow from the
// partial-fraction form of the Pollaczek-Khinchine transform:
//
//   C_k = (1 - rho) * prod_j (beta_j - r_k) / (r_k * prod_{l!=k} (r_l - r_k)).
inline MixtureExpansion build_mixture_expansion(const SurplusSpec& spec) {
    const auto flat = as_exponential_mixture(spec.claim_law);
    if (!flat)
        throw MethodMismatchError(
            "closed-form ruin requires a claim law that is a finite mixture "
            "of exponentials (an atom at 0 is allowed)");
    detail::require(spec.premium_rate > 0.0, "ruin: premium rate must be > 0");
    detail::require(spec.intensity > 0.0, "ruin: claim intensity must be > 0");

    const double lambda = spec.intensity * (1.0 - flat->zero_mass);
    detail::require(lambda > 0.0, "ruin: claim law is an atom at 0");
    const double c = spec.premium_rate;
    const std::size_t m = flat->components.size();
    std::vector<double> p(m), beta(m);
    {
        double wsum = 0.0;
        for (const auto& [w, r] : flat->components) wsum += w;
        for (std::size_t k = 0; k < m; ++k) {
            p[k] = flat->components[k].first / wsum;
            beta[k] = flat->components[k].second;
        }
    }

    double mean_eff = 0.0;
    for (std::size_t k = 0; k < m; ++k) mean_eff += p[k] / beta[k];
    const double rho = lambda * mean_eff / c;
    detail::require_net_profit(rho);

    const auto G = [&](double r) {
        double s = 0.0;
        for (std::size_t k = 0; k < m; ++k) s += p[k] / (beta[k] - r);
        return lambda * s - c;
    };
    const auto Gprime = [&](double r) {
        double s = 0.0;
        for (std::size_t k = 0; k < m; ++k) {
            const double d = beta[k] - r;
            s += p[k] / (d * d);
        }
        return lambda * s;
    };

    // One root per interval; bisect on the open interval (midpoints never
    // touch the poles), then polish with a few bracket-clamped Newton steps.
    std::vector<double> roots(m);
    for (std::size_t k = 0; k < m; ++k) {
        double lo = k == 0 ? 0.0 : beta[k - 1];
        double hi = beta[k];
        for (int it = 0; it < 120; ++it) {
            const double mid = 0.5 * (lo + hi);
            (G(mid) < 0.0 ? lo : hi) = mid;
        }
        double r = 0.5 * (lo + hi);
        for (int it = 0; it < 3; ++it) {
            const double step = G(r) / Gprime(r);
            double next = r - step;
            if (!(next > lo && next < hi)) break;
            r = next;
        }
        roots[k] = r;
    }

    MixtureExpansion out;
    out.rho = rho;
    out.exponents = roots;
    out.coefficients.resize(m);
    for (std::size_t k = 0; k < m; ++k) {
        double num = 1.0 - rho;
        for (std::size_t j = 0; j < m; ++j) num *= beta[j] - roots[k];
        double den = roots[k];
        for (std::size_t l = 0; l < m; ++l)
            if (l != k) den *= roots[l] - roots[k];
        out.coefficients[k] = num / den;
    }
    return out;
}

inline double ruin_mixture_exponential(const SurplusSpec& spec, double kappa) {
    detail::require(std::isfinite(kappa) && kappa >= 0.0,
                    "ruin: reserve must be >= 0");
    return build_mixture_expansion(spec).psi(kappa);
}

// ---------------------------------------------------------------------------
// Pollaczek-Khinchine / Panjer sandwich bounds
// ---------------------------------------------------------------------------

struct PanjerOptions {
    double span = 0.0;           // discretization step; 0 -> mean(claim)/500
    double tail_tol = 1e-10;     // equilibrium tail mass below which the grid stops early
    std::size_t atom_cap = 2000000;  // refuse grids larger than this
};

struct PanjerResult {
    std::vector<double> lower;  // rigorous lower bounds on psi, per kappa
    std::vector<double> upper;  // rigorous upper bounds on psi, per kappa
    double span = 0.0;
    double rho = 0.0;

    double mid(std::size_t i) const { return 0.5 * (lower[i] + upper[i]); }
    double width(std::size_t i) const { return upper[i] - lower[i]; }
};

namespace detail {

// cdf prefix values of a compound geometric sum: N ~ Geom(rho)
// (P(N=n) = (1-rho) rho^n), summands on the lattice {0, h, 2h, ...} with
// masses g[0..], defective tails allowed.  Returns prefix[s] = P(sum <= s*h)
// for s = 0..cells-1 via the Panjer recursion for the geometric counting law.
inline std::vector<double> compound_geometric_prefix(const std::vector<double>& g,
                                                     double rho,
                                                     std::size_t cells) {
    const double denom = 1.0 - rho * (g.empty() ? 0.0 : g[0]);
    std::size_t glast = g.size();
    while (glast > 1 && g[glast - 1] == 0.0) --glast;

    std::vector<double> f(cells, 0.0);
    f[0] = (1.0 - rho) / denom;
    for (std::size_t s = 1; s < cells; ++s) {
        const std::size_t jmax = std::min(s, glast - 1);
        double acc = 0.0;
        const double* fs = f.data() + s;
        const double* gj = g.data();
        for (std::size_t j = 1; j <= jmax; ++j) acc += gj[j] * fs[-static_cast<std::ptrdiff_t>(j)];
        f[s] = rho * acc / denom;
    }
    double run = 0.0;
    for (std::size_t s = 0; s < cells; ++s) {
        run += f[s];
        f[s] = std::min(run, 1.0);
    }
    return f;
}

}  // namespace detail

// Rigorous sandwich psi_lower <= psi <= psi_upper at each requested reserve.
//
// The ladder-height law is the claim law's equilibrium distribution; rounding
// its cells down gives a stochastically smaller compound sum (hence a lower
// bound on psi), rounding up an upper bound.  The recursion only ever
// consumes lattice cells up to max(kappa)/span, so the grid is truncated
// there: for the prefix sums in range the truncation is exact (a path with
// any summand beyond the grid already exceeds every requested kappa).  The
// early stop at tail_tol trims cells whose equilibrium tail mass is below it;
// that can inflate the lower bound by at most rho/(1-rho) * tail_tol
// (~2.5e-10 at the defaults), which is treated as exact at double precision.
inline PanjerResult ruin_pk_panjer(const SurplusSpec& spec,
                                   const std::vector<double>& kappas,
                                   const PanjerOptions& opts = {}) {
    detail::require_kappas(kappas);
    const double rho = traffic_intensity(spec);
    detail::require_net_profit(rho);
    const double mu = mean(spec.claim_law);
    const double h = opts.span > 0.0 ? opts.span : mu / 500.0;
    detail::require(std::isfinite(h) && h > 0.0, "panjer: span must be > 0");

    const double kmax = *std::max_element(kappas.begin(), kappas.end());
    const std::size_t idx_max = static_cast<std::size_t>(std::floor(kmax / h + 1e-9));
    if (idx_max + 2 > opts.atom_cap)
        throw std::length_error(
            "panjer: grid of " + std::to_string(idx_max + 2) +
            " cells exceeds the atom cap (" + std::to_string(opts.atom_cap) +
            "); increase the span or raise the cap");
    const std::size_t cells = idx_max + 1;

    // Equilibrium survival values on the lattice, early-stopped at tail_tol.
    std::vector<double> tail =
        equilibrium_tail_grid(spec.claim_law, h, cells + 1, opts.tail_tol);
    std::size_t stop = tail.size();
    for (std::size_t j = 0; j < tail.size(); ++j) {
        if (tail[j] <= opts.tail_tol) {
            stop = j;
            break;
        }
    }

    // Lower-rounded cells g_low[j] = Fe-bar(jh) - Fe-bar((j+1)h), mass of
    // [jh,(j+1)h) placed at jh; cells at/after the early stop are dropped
    // (not lumped) so the upper bound's stochastic ordering stays intact.
    std::vector<double> g_low(cells, 0.0);
    for (std::size_t j = 0; j < std::min(cells, stop); ++j)
        g_low[j] = std::max(0.0, tail[j] - tail[j + 1]);

    // Upper-rounded cells are the same masses shifted one lattice step up:
    // g_up[j] = g_low[j-1], g_up[0] = 0.
    std::vector<double> g_up(cells, 0.0);
    for (std::size_t j = 1; j < cells; ++j) g_up[j] = g_low[j - 1];

    const std::vector<double> prefix_low =
        detail::compound_geometric_prefix(g_low, rho, cells);
    const std::vector<double> prefix_up =
        detail::compound_geometric_prefix(g_up, rho, cells);

    // Dropping the sub-tail_tol cells keeps every prefix below the stop cell
    // exact (a sum containing a dropped summand overshoots those prefixes
    // regardless), but prefixes at or beyond it lose at most
    // E[N] * tail[stop] of cdf mass, inflating 1 - prefix there.  The upper
    // curve only gains validity from that; the lower curve must pay it back.
    const double slack =
        stop < cells ? tail[stop] * rho / (1.0 - rho) : 0.0;

    PanjerResult res;
    res.span = h;
    res.rho = rho;
    res.lower.resize(kappas.size());
    res.upper.resize(kappas.size());
    for (std::size_t i = 0; i < kappas.size(); ++i) {
        const std::size_t idx =
            static_cast<std::size_t>(std::floor(kappas[i] / h + 1e-9));
        double lo = 1.0 - prefix_low[std::min(idx, cells - 1)];
        const double up = 1.0 - prefix_up[std::min(idx, cells - 1)];
        if (idx >= stop) lo -= slack;
        res.lower[i] = std::clamp(lo, 0.0, 1.0);
        res.upper[i] = std::clamp(std::max(up, lo), 0.0, 1.0);
    }
    return res;
}

// ---------------------------------------------------------------------------
// Monte Carlo
// ---------------------------------------------------------------------------

struct McOptions {
    std::size_t paths = 100000;
    std::size_t horizon_claims = 10000;
    std::uint64_t seed = 1;
    // Early exit once the surplus sits this many mean claims (divided by the
    // implied loading) above every level that could still flip a verdict; the
    // residual flip probability is about psi(gap), one-sided: unresolved
    // paths count as non-ruined, so the estimate errs low.
    double ceiling_multiple = 30.0;
    // Absolute override for the exit gap (same units as claims); 0 -> use
    // exit_bias or ceiling_multiple. Heavy-tailed severities need the gap
    // calibrated, since their psi(gap) decays slowly.
    double exit_gap = 0.0;
    // Target truncation bias per early-exited path: when set (> 0) the exit
    // gap is auto-sized from the claim law's own tail so that the flip
    // probability of an abandoned path stays near this value.  Takes
    // precedence over ceiling_multiple; exit_gap overrides both.
    double exit_bias = 0.0;
};

// Smallest gap g whose residual flip probability is believed to be at most
// `bias`.  The flip probability equals psi(g) for the same surplus process;
// for large g it behaves like rho/(1-rho) times the integrated claim tail
// SL(g)/mean (exact asymptotics for heavy tails, conservative up to a
// constant for light ones), so we solve that proxy against bias/4, the
// factor 4 absorbing pre-asymptotic slack.
inline double calibrate_exit_gap(const SurplusSpec& spec, double bias) {
    detail::require(bias > 0.0, "monte carlo: exit_bias must be positive");
    const double rho = traffic_intensity(spec);
    detail::require_net_profit(rho);
    const double mu = mean(spec.claim_law);
    const double target = 0.25 * bias * (1.0 - rho) / rho * mu;
    double lo = 0.0;
    double hi = mu;
    while (stop_loss(spec.claim_law, hi) > target && hi < 1e300) {
        lo = hi;
        hi *= 2.0;
    }
    for (int it = 0; it < 80 && hi - lo > 1e-6 * hi; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (stop_loss(spec.claim_law, mid) > target) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return hi;
}

struct McResult {
    std::vector<double> estimate;    // per kappa
    std::vector<double> half_width;  // 95% normal CI half-widths, per kappa
    std::size_t unresolved_paths = 0;  // hit the claim horizon while undecided
    double exit_gap = 0.0;             // the gap actually used
};

// Simulates the claim-epoch skeleton of the surplus process.  Ruin happens
// only at claim instants, so tracking the running maximum M of (claims paid
// so far - premiums earned so far) is exact: the path ruins reserve kappa iff
// M > kappa.  One set of paths serves every requested kappa, which also makes
// the estimates monotone in kappa by construction.
inline McResult ruin_monte_carlo(const SurplusSpec& spec,
                                 const std::vector<double>& kappas,
                                 const McOptions& opts = {}) {
    detail::require_kappas(kappas);
    detail::require(opts.paths >= 1, "monte carlo: at least one path");
    detail::require(opts.horizon_claims >= 1, "monte carlo: horizon must be >= 1");
    const double rho = traffic_intensity(spec);
    detail::require_net_profit(rho);

    const double mu = mean(spec.claim_law);
    const double eta_implied = 1.0 / rho - 1.0;
    // The tail-calibrated barrier only ever raises the default ceiling: the
    // integrated-tail proxy behind it understates the flip probability for
    // light and near-light tails (random-walk regime), where the ceiling
    // heuristic is the sound one.
    const double ceiling_gap = opts.ceiling_multiple * mu / eta_implied;
    const double gap =
        opts.exit_gap > 0.0
            ? opts.exit_gap
            : (opts.exit_bias > 0.0
                   ? std::max(calibrate_exit_gap(spec, opts.exit_bias),
                              ceiling_gap)
                   : ceiling_gap);
    const double premium_per_arrival_unit = spec.premium_rate / spec.intensity;
    const double kmin = *std::min_element(kappas.begin(), kappas.end());
    const double kmax = *std::max_element(kappas.begin(), kappas.end());

    std::vector<double> maxima(opts.paths);
    std::size_t unresolved = 0;
    for (std::size_t p = 0; p < opts.paths; ++p) {
        RngStream rng = RngStream::substream(opts.seed, p);
        double cur = 0.0;  // claims paid - premiums earned
        double best = -std::numeric_limits<double>::infinity();
        bool decided = false;
        for (std::size_t n = 0; n < opts.horizon_claims; ++n) {
            cur -= premium_per_arrival_unit * rng.exponential(1.0);
            cur += sample(spec.claim_law, rng);
            if (cur > best) best = cur;
            if (best > kmax) {  // every requested level already ruined
                decided = true;
                break;
            }
            if (std::max(best, kmin) - cur > gap) {  // flip prob <= psi(gap)
                decided = true;
                break;
            }
        }
        if (!decided) ++unresolved;
        maxima[p] = best;
    }
    std::sort(maxima.begin(), maxima.end());

    McResult res;
    res.exit_gap = gap;
    res.unresolved_paths = unresolved;
    res.estimate.resize(kappas.size());
    res.half_width.resize(kappas.size());
    const double n = static_cast<double>(opts.paths);
    for (std::size_t i = 0; i < kappas.size(); ++i) {
        const auto it =
            std::upper_bound(maxima.begin(), maxima.end(), kappas[i]);
        const double ruined = static_cast<double>(maxima.end() - it);
        const double est = ruined / n;
        res.estimate[i] = est;
        res.half_width[i] = 1.96 * std::sqrt(est * (1.0 - est) / n);
    }
    return res;
}

inline std::pair<double, double> ruin_monte_carlo(const SurplusSpec& spec,
                                                  double kappa,
                                                  const McOptions& opts = {}) {
    const McResult r = ruin_monte_carlo(spec, std::vector<double>{kappa}, opts);
    return {r.estimate[0], r.half_width[0]};
}

// ---------------------------------------------------------------------------
// Curves
// ---------------------------------------------------------------------------

struct CurveOptions {
    RuinMethod method = RuinMethod::auto_select;
    PanjerOptions panjer{};
    McOptions mc{};
};

struct RuinCurve {
    std::vector<double> kappas;
    std::vector<double> psi;    // point value (closed form), midpoint (panjer),
                                // estimate (monte carlo)
    std::vector<double> lower;  // bound / CI edge, clamped to [0,1]
    std::vector<double> upper;
    RuinMethod method = RuinMethod::closed_form;
    double panjer_span = 0.0;          // panjer only
    std::size_t unresolved_paths = 0;  // monte carlo only
};

inline RuinCurve ruin_curve(const SurplusSpec& spec,
                            const std::vector<double>& kappas,
                            const CurveOptions& opts = {}) {
    detail::require_kappas(kappas);
    RuinMethod method = opts.method;
    if (method == RuinMethod::auto_select) {
        method = as_exponential_mixture(spec.claim_law).has_value()
                     ? RuinMethod::closed_form
                     : RuinMethod::panjer;
    }

    RuinCurve curve;
    curve.kappas = kappas;
    curve.method = method;
    const std::size_t n = kappas.size();
    curve.psi.resize(n);
    curve.lower.resize(n);
    curve.upper.resize(n);

    switch (method) {
        case RuinMethod::closed_form: {
            const MixtureExpansion expansion = build_mixture_expansion(spec);
            for (std::size_t i = 0; i < n; ++i) {
                const double v = expansion.psi(kappas[i]);
                curve.psi[i] = v;
                curve.lower[i] = v;
                curve.upper[i] = v;
            }
            break;
        }
        case RuinMethod::panjer: {
            const PanjerResult pk = ruin_pk_panjer(spec, kappas, opts.panjer);
            curve.panjer_span = pk.span;
            for (std::size_t i = 0; i < n; ++i) {
                curve.lower[i] = pk.lower[i];
                curve.upper[i] = pk.upper[i];
                curve.psi[i] = pk.mid(i);
            }
            break;
        }
        case RuinMethod::monte_carlo: {
            const McResult mc = ruin_monte_carlo(spec, kappas, opts.mc);
            curve.unresolved_paths = mc.unresolved_paths;
            for (std::size_t i = 0; i < n; ++i) {
                curve.psi[i] = mc.estimate[i];
                curve.lower[i] =
                    std::max(0.0, mc.estimate[i] - mc.half_width[i]);
                curve.upper[i] =
                    std::min(1.0, mc.estimate[i] + mc.half_width[i]);
            }
            break;
        }
        default:
            throw std::logic_error("ruin_curve: unresolved method");
    }
    return curve;
}

struct ParticipantCurves {
    RuinCurve standalone;
    RuinCurve pooled;
};

// Stand-alone and pooled curves for every participant on a shared grid.
// Methods are auto-selected per claim law unless forced.
inline std::vector<ParticipantCurves> ruin_curves(const PoolSpec& pool,
                                                  const AllocationMatrix& a,
                                                  const std::vector<double>& kappas,
                                                  const CurveOptions& opts = {}) {
    validate_pool_spec(pool);
    detail::require(a.size() == pool.size(),
                    "ruin_curves: matrix dimension != pool size");
    std::vector<ParticipantCurves> out;
    out.reserve(pool.size());
    for (std::size_t i = 0; i < pool.size(); ++i) {
        ParticipantCurves pc;
        pc.standalone = ruin_curve(standalone_surplus_spec(pool, i), kappas, opts);
        pc.pooled = ruin_curve(pooled_surplus_spec(pool, a, i), kappas, opts);
        out.push_back(std::move(pc));
    }
    return out;
}

// ---------------------------------------------------------------------------
// CSV wire format
// ---------------------------------------------------------------------------

namespace detail {
inline std::string fmt9(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.9g", v);
    return buf;
}
}  // namespace detail

inline void write_curve_csv_rows(std::ostream& os, const RuinCurve& c,
                                 std::size_t participant, const char* mode) {
    for (std::size_t i = 0; i < c.kappas.size(); ++i) {
        os << detail::fmt9(c.kappas[i]) << ',' << detail::fmt9(c.psi[i]) << ','
           << detail::fmt9(c.lower[i]) << ',' << detail::fmt9(c.upper[i]) << ','
           << method_name(c.method) << ',' << participant + 1 << ',' << mode
           << '\n';
    }
}

inline void write_curves_csv(std::ostream& os,
                             const std::vector<ParticipantCurves>& curves) {
    os << "kappa,psi,lower,upper,method,participant,mode\n";
    for (std::size_t i = 0; i < curves.size(); ++i) {
        write_curve_csv_rows(os, curves[i].standalone, i, "standalone");
        write_curve_csv_rows(os, curves[i].pooled, i, "pooled");
    }
}

}  // namespace riskpool
