#ifndef NLPPA_DIAGNOSTICS_HPP
#define NLPPA_DIAGNOSTICS_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <ostream>
#include <random>
#include <string>
#include <vector>

#include <json.hpp>

#include "nlppa/pc_method.hpp"
#include "nlppa/relaxed_ppa.hpp"

namespace nlppa
{

/// One contraction inequality lhs <= rhs at iteration k.
struct ContractionEntry
{
    long k = 0;
    double lhs = 0.0;
    double rhs = 0.0;
    double violation = 0.0; // lhs - rhs
};

struct ContractionReport
{
    std::vector<ContractionEntry> entries;
    long violations = 0;
    double max_violation = -std::numeric_limits<double>::infinity();
    double min_sigma_eigenvalue = std::numeric_limits<double>::infinity();
    double min_g_eigenvalue = std::numeric_limits<double>::quiet_NaN(); // PC only
    double slack_factor = 1e-8;

    bool passed() const { return violations == 0; }
};

namespace detail
{

inline void require_snapshots(const IterationTrace& trace, const char* who)
{
    if (!trace.has_snapshots()) {
        throw InvalidInput(std::string(who) + ": trace has no per-iteration state; run with diagnostics enabled");
    }
}

inline void require_method(const IterationTrace& trace, Method expected, const char* who)
{
    if (trace.method != expected) throw InvalidInput(std::string(who) + ": trace comes from the other method");
}

inline void require_star(const IterationTrace& trace, const PrimalDualPoint& w_star, const char* who)
{
    if (w_star.x.size() != trace.n || w_star.lambda.size() != trace.m) {
        throw InvalidInput(std::string(who) + ": reference point has the wrong dimensions");
    }
}

inline void add_entry(ContractionReport& rep, long k, double lhs, double rhs)
{
    ContractionEntry e{k, lhs, rhs, lhs - rhs};
    if (e.violation > rep.slack_factor * (1.0 + std::abs(rhs))) ++rep.violations;
    rep.max_violation = std::max(rep.max_violation, e.violation);
    rep.entries.push_back(e);
}

} // namespace detail

/**
 * Relaxed-PPA contraction, per iteration:
 *   ||w^{k+1} - w*||^2_S <= ||w^k - w*||^2_S - gamma (2 - gamma) ||w~^k - w^k||^2_S
 * with S = [[r_k I, -J~^T], [-J~, s_k I]]. w^{k+1} is the relaxation output
 * before the multipliers are re-projected.
 */
inline ContractionReport check_ppa_contraction(const IterationTrace& trace, const PrimalDualPoint& w_star,
                                               double slack_factor = 1e-8)
{
    detail::require_method(trace, Method::RelaxedPpa, "check_ppa_contraction");
    detail::require_snapshots(trace, "check_ppa_contraction");
    detail::require_star(trace, w_star, "check_ppa_contraction");

    ContractionReport rep;
    rep.slack_factor = slack_factor;
    const Vec ws = w_star.stacked();
    for (std::size_t i = 0; i < trace.records.size(); ++i) {
        const IterationRecord& rec = trace.records[i];
        const IterationSnapshot& snap = trace.snapshots[i];
        const BlockMatrix S = build_sigma(rec.r, rec.s, snap.J_tilde);
        rep.min_sigma_eigenvalue = std::min(rep.min_sigma_eigenvalue, min_eigenvalue(S.dense()));
        const double g = rec.beta_or_gamma;
        const double lhs = S.quadratic_form(snap.w_next_raw - ws);
        const double rhs = S.quadratic_form(snap.w - ws) - g * (2.0 - g) * S.quadratic_form(snap.w_tilde - snap.w);
        detail::add_entry(rep, rec.k, lhs, rhs);
    }
    return rep;
}

/**
 * PC contraction, per iteration:
 *   ||w^{k+1} - w*||^2_S <= ||w^k - w*||^2_S - beta ||w^k - w~^k||^2_G
 * with S = Q M^{-1} and G = Q^T + Q - beta M^T S M for the trace's corrector.
 */
inline ContractionReport check_pc_contraction(const IterationTrace& trace, const PrimalDualPoint& w_star,
                                              double slack_factor = 1e-8)
{
    detail::require_method(trace, Method::PredictionCorrection, "check_pc_contraction");
    detail::require_snapshots(trace, "check_pc_contraction");
    detail::require_star(trace, w_star, "check_pc_contraction");

    ContractionReport rep;
    rep.slack_factor = slack_factor;
    rep.min_g_eigenvalue = std::numeric_limits<double>::infinity();
    const Vec ws = w_star.stacked();
    for (std::size_t i = 0; i < trace.records.size(); ++i) {
        const IterationRecord& rec = trace.records[i];
        const IterationSnapshot& snap = trace.snapshots[i];
        const BlockMatrix Q = build_q(rec.r, rec.s, snap.J_tilde);
        const BlockMatrix M = build_m(trace.corrector, rec.r, rec.s, snap.J_tilde);
        const BlockMatrix S = corrector_sigma(trace.corrector, rec.r, rec.s, snap.J_tilde);
        const double beta = rec.beta_or_gamma;
        const BlockMatrix G = build_g(Q, M, S, beta);
        rep.min_sigma_eigenvalue = std::min(rep.min_sigma_eigenvalue, min_eigenvalue(S.dense()));
        rep.min_g_eigenvalue = std::min(rep.min_g_eigenvalue, min_eigenvalue(G.dense()));
        const Vec d = snap.w - snap.w_tilde;
        const double lhs = S.quadratic_form(snap.w_next_raw - ws);
        const double rhs = S.quadratic_form(snap.w - ws) - beta * G.quadratic_form(d);
        detail::add_entry(rep, rec.k, lhs, rhs);
    }
    return rep;
}

/// Moves every recorded w^{k+1} a fraction further away from w_star.
inline IterationTrace perturb_trace(IterationTrace trace, const PrimalDualPoint& w_star, double fraction = 0.1)
{
    detail::require_snapshots(trace, "perturb_trace");
    const Vec ws = w_star.stacked();
    for (auto& snap : trace.snapshots) {
        snap.w_next_raw = ws + (1.0 + fraction) * (snap.w_next_raw - ws);
        snap.w_next = ws + (1.0 + fraction) * (snap.w_next - ws);
    }
    return trace;
}

// ---------------------------------------------------------------------------
// Ergodic gap

enum class ErgodicMode
{
    Ppa,
    Pc
};

struct ErgodicPoint
{
    long t = 0;
    double gap = 0.0;
    double bound = 0.0;
};

struct ErgodicReport
{
    std::vector<ErgodicPoint> series;
    double step = 0.0;          // gamma (PPA) or the smallest beta used (PC)
    double initial_distance = 0.0; // ||w* - w^0||^2_{S_0}
    long violations = 0;
    bool bound_asserted = true;

    bool passed() const { return violations == 0; }
};

namespace detail
{

inline bool constant_proximal_matrix(const IterationTrace& trace)
{
    const IterationRecord& r0 = trace.records.front();
    const Mat& J0 = trace.snapshots.front().J_tilde;
    const double jscale = 1.0 + J0.lpNorm<Eigen::Infinity>();
    for (std::size_t i = 1; i < trace.records.size(); ++i) {
        const IterationRecord& rec = trace.records[i];
        if (std::abs(rec.r - r0.r) > 1e-12 * (1.0 + r0.r) || std::abs(rec.s - r0.s) > 1e-12 * (1.0 + r0.s)) {
            return false;
        }
        if ((trace.snapshots[i].J_tilde - J0).lpNorm<Eigen::Infinity>() > 1e-12 * jscale) return false;
    }
    return true;
}

} // namespace detail

/**
 * Gap of the running predictor average against w_star,
 *   f(x~_t) - f(x*) + (w~_t - w*)^T Gamma(w*),
 * for every t in the trace, next to the bound ||w* - w^0||^2_{S_0} / (2 c (1+t))
 * with c = gamma (PPA) or the smallest beta of the run (PC). Does not judge
 * whether the bound applies; see check_ergodic_gap.
 */
inline ErgodicReport ergodic_gap_series(const ProblemSpec& p, const IterationTrace& trace,
                                        const PrimalDualPoint& w_star, ErgodicMode mode)
{
    const Method expected = mode == ErgodicMode::Ppa ? Method::RelaxedPpa : Method::PredictionCorrection;
    detail::require_method(trace, expected, "ergodic_gap_series");
    detail::require_snapshots(trace, "ergodic_gap_series");
    detail::require_star(trace, w_star, "ergodic_gap_series");

    ErgodicReport rep;
    const IterationRecord& r0 = trace.records.front();
    const IterationSnapshot& s0 = trace.snapshots.front();
    const BlockMatrix S0 = mode == ErgodicMode::Ppa ? build_sigma(r0.r, r0.s, s0.J_tilde)
                                                    : corrector_sigma(trace.corrector, r0.r, r0.s, s0.J_tilde);
    const Vec ws = w_star.stacked();
    rep.initial_distance = S0.quadratic_form(ws - s0.w);

    if (mode == ErgodicMode::Ppa) {
        rep.step = r0.beta_or_gamma;
    } else {
        rep.step = std::numeric_limits<double>::infinity();
        for (const auto& rec : trace.records) {
            if (rec.beta_or_gamma > 0.0) rep.step = std::min(rep.step, rec.beta_or_gamma);
        }
    }

    const Vec gamma_star = monotone_operator(p, w_star);
    const double f_star = p.objective(w_star.x);
    Vec sum = Vec::Zero(ws.size());
    for (std::size_t i = 0; i < trace.snapshots.size(); ++i) {
        sum += trace.snapshots[i].w_tilde;
        const double count = static_cast<double>(i + 1);
        const Vec avg = sum / count;
        ErgodicPoint pt;
        pt.t = static_cast<long>(i);
        pt.gap = p.objective(avg.head(trace.n)) - f_star + (avg - ws).dot(gamma_star);
        pt.bound = std::isfinite(rep.step) ? rep.initial_distance / (2.0 * rep.step * count)
                                           : std::numeric_limits<double>::infinity();
        if (pt.gap > pt.bound + 1e-12 * (1.0 + std::abs(pt.bound))) ++rep.violations;
        rep.series.push_back(pt);
    }
    return rep;
}

/**
 * ergodic_gap_series restricted to runs where the O(1/t) bound is known to
 * hold: constant proximal matrix (affine constraints with fixed or adaptive
 * r, s) or the decreasing schedule.
 */
inline ErgodicReport check_ergodic_gap(const ProblemSpec& p, const IterationTrace& trace,
                                       const PrimalDualPoint& w_star, ErgodicMode mode)
{
    detail::require_snapshots(trace, "check_ergodic_gap");
    if (trace.param_mode != "schedule" && !detail::constant_proximal_matrix(trace)) {
        throw InvalidInput("check_ergodic_gap: the proximal matrix changes between iterations (" + trace.param_mode +
                           " parameters with a varying constraint Jacobian); the O(1/t) bound is only "
                           "established for a constant matrix or the decreasing schedule. Use "
                           "ergodic_gap_series to inspect the gap without asserting the bound");
    }
    return ergodic_gap_series(p, trace, w_star, mode);
}

// ---------------------------------------------------------------------------
// Monotonicity of Gamma

struct MonotoneReport
{
    long samples = 0;
    double worst = std::numeric_limits<double>::infinity();        // smallest scaled form
    double worst_unscaled = std::numeric_limits<double>::infinity();
    double tolerance = 1e-10;

    bool passed() const { return worst >= -tolerance; }
};

/// (w - w~)^T [Gamma(w) - Gamma(w~)].
inline double monotone_form(const ProblemSpec& p, const PrimalDualPoint& w, const PrimalDualPoint& w_tilde)
{
    return (w.stacked() - w_tilde.stacked()).dot(monotone_operator(p, w) - monotone_operator(p, w_tilde));
}

/**
 * Samples pairs w, w~ with x in [-5, 5]^n and multipliers in [0, 10) (or
 * (-10, 0] under the flipped cone) and evaluates (w - w~)^T [Gamma(w) - Gamma(w~)].
 * Each value is divided by max(1, ||w - w~|| ||Gamma(w) - Gamma(w~)||).
 */
inline MonotoneReport check_monotone(const ProblemSpec& p, long samples, std::uint64_t seed)
{
    if (samples < 0) throw InvalidParameter("check_monotone: negative sample count");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> ux(-5.0, 5.0);
    std::uniform_real_distribution<double> ul(0.0, 10.0);
    const double sign = p.cone == DualCone::NonNegative ? 1.0 : -1.0;

    MonotoneReport rep;
    rep.samples = samples;
    if (samples == 0) rep.worst = rep.worst_unscaled = 0.0;
    for (long i = 0; i < samples; ++i) {
        PrimalDualPoint a(Vec(p.n), Vec(p.m));
        PrimalDualPoint b(Vec(p.n), Vec(p.m));
        for (Index j = 0; j < p.n; ++j) a.x[j] = ux(rng);
        for (Index j = 0; j < p.m; ++j) a.lambda[j] = sign * ul(rng);
        for (Index j = 0; j < p.n; ++j) b.x[j] = ux(rng);
        for (Index j = 0; j < p.m; ++j) b.lambda[j] = sign * ul(rng);
        const Vec dw = a.stacked() - b.stacked();
        const Vec dg = monotone_operator(p, a) - monotone_operator(p, b);
        const double form = dw.dot(dg);
        const double scale = std::max(1.0, dw.norm() * dg.norm());
        rep.worst = std::min(rep.worst, form / scale);
        rep.worst_unscaled = std::min(rep.worst_unscaled, form);
    }
    return rep;
}

// ---------------------------------------------------------------------------
// Export

inline nlohmann::json to_json(const ContractionReport& rep)
{
    nlohmann::json j;
    j["violations"] = rep.violations;
    j["max_violation"] = rep.entries.empty() ? 0.0 : rep.max_violation;
    j["min_sigma_eigenvalue"] = rep.entries.empty() ? 0.0 : rep.min_sigma_eigenvalue;
    if (!std::isnan(rep.min_g_eigenvalue)) j["min_g_eigenvalue"] = rep.min_g_eigenvalue;
    j["slack_factor"] = rep.slack_factor;
    j["passed"] = rep.passed();
    auto& arr = j["entries"] = nlohmann::json::array();
    for (const auto& e : rep.entries) arr.push_back({{"k", e.k}, {"lhs", e.lhs}, {"rhs", e.rhs}});
    return j;
}

inline nlohmann::json to_json(const ErgodicReport& rep)
{
    nlohmann::json j;
    j["step"] = rep.step;
    j["initial_distance"] = rep.initial_distance;
    j["violations"] = rep.violations;
    j["bound_asserted"] = rep.bound_asserted;
    auto& arr = j["series"] = nlohmann::json::array();
    for (const auto& pt : rep.series) arr.push_back({{"t", pt.t}, {"gap", pt.gap}, {"bound", pt.bound}});
    return j;
}

inline nlohmann::json to_json(const MonotoneReport& rep)
{
    return {{"samples", rep.samples},
            {"worst", rep.worst},
            {"worst_unscaled", rep.worst_unscaled},
            {"tolerance", rep.tolerance},
            {"passed", rep.passed()}};
}

/// Columns: k,lhs,rhs,violation
inline void write_csv(std::ostream& os, const ContractionReport& rep)
{
    os.precision(17);
    os << "k,lhs,rhs,violation\n";
    for (const auto& e : rep.entries) os << e.k << ',' << e.lhs << ',' << e.rhs << ',' << e.violation << '\n';
}

/// Columns: t,gap,bound
inline void write_csv(std::ostream& os, const ErgodicReport& rep)
{
    os.precision(17);
    os << "t,gap,bound\n";
    for (const auto& pt : rep.series) os << pt.t << ',' << pt.gap << ',' << pt.bound << '\n';
}

} // namespace nlppa

#endif // NLPPA_DIAGNOSTICS_HPP
