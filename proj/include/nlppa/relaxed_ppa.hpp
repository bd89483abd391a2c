#ifndef NLPPA_RELAXED_PPA_HPP
#define NLPPA_RELAXED_PPA_HPP

#include <cmath>
#include <limits>

#include "nlppa/sigma.hpp"
#include "nlppa/solver_common.hpp"

namespace nlppa
{

struct RelaxedPpaConfig
{
    double gamma = 1.5;
    double tau = 1e-10;
    long max_iters = 100000;
    /// The stopping test is skipped before this many iterations: from the
    /// unconstrained minimizer with lambda = 0 the first step leaves x fixed.
    long min_iters = 2;
    /// Optional second stopping condition: also require kkt_residual <= kkt_tol.
    /// Off by default.
    double kkt_tol = std::numeric_limits<double>::infinity();
    ParamRule rule = AdaptiveRule{};
    /// Keep full per-iteration state (w^k, w~^k, D Phi(x~^k)) for the checkers.
    bool diagnostics = false;

    void validate() const
    {
        if (!(gamma > 0.0 && gamma < 2.0)) throw InvalidParameter("relaxed PPA: gamma must lie in (0, 2)");
        if (!(tau > 0.0)) throw InvalidParameter("relaxed PPA: tau must be positive");
        if (!(kkt_tol > 0.0)) throw InvalidParameter("relaxed PPA: kkt_tol must be positive");
        if (max_iters < 1) throw InvalidParameter("relaxed PPA: max_iters must be at least 1");
        validate_rule(rule);
    }
};

/// x~^k = argmin_X f(x) + lambda^T Phi(x) + (r_k/2)||x - x^k||^2.
inline Vec ppa_primal_step(const ProblemSpec& p, const PrimalDualPoint& w_k, double r_k, long k = -1)
{
    detail::check_point(p, w_k, "ppa_primal_step");
    if (!(r_k > 0.0)) throw InvalidParameter("ppa_primal_step: r_k must be positive");
    return detail::solve_prox(p, w_k.lambda, w_k.x, r_k, k);
}

/// Dual step with the linearization term:
/// P_Z(lambda^k + [Phi(x~) + D Phi(x~)(x~ - x^k)] / s_k).
inline Vec ppa_dual_step(const Vec& lambda_k, const Vec& x_k, const Vec& x_tilde, const Vec& phi_tilde,
                         const Mat& J_tilde, double s_k, DualCone cone = DualCone::NonNegative)
{
    if (!(s_k > 0.0)) throw InvalidParameter("ppa_dual_step: s_k must be positive");
    if (lambda_k.size() == 0) return Vec(0);
    Vec lin = phi_tilde;
    lin.noalias() += J_tilde * (x_tilde - x_k);
    return project_dual(lambda_k + lin / s_k, cone);
}

inline Vec ppa_dual_step(const ProblemSpec& p, const PrimalDualPoint& w_k, const Vec& x_tilde, double s_k)
{
    detail::check_point(p, w_k, "ppa_dual_step");
    if (x_tilde.size() != p.n) throw InvalidInput("ppa_dual_step: x_tilde has wrong dimension");
    if (p.m == 0) return Vec(0);
    return ppa_dual_step(w_k.lambda, w_k.x, x_tilde, p.constraints(x_tilde), p.jacobian(x_tilde), s_k, p.cone);
}

/// w^{k+1} = w^k - gamma (w^k - w~^k); no projection.
inline PrimalDualPoint relax_step(const PrimalDualPoint& w_k, const PrimalDualPoint& w_tilde, double gamma)
{
    if (!(gamma > 0.0 && gamma < 2.0)) throw InvalidParameter("relax_step: gamma must lie in (0, 2)");
    if (w_k.x.size() != w_tilde.x.size() || w_k.lambda.size() != w_tilde.lambda.size()) {
        throw InvalidInput("relax_step: dimension mismatch");
    }
    return {w_k.x - gamma * (w_k.x - w_tilde.x), w_k.lambda - gamma * (w_k.lambda - w_tilde.lambda)};
}

/// (r_k/s_k) schedule value; thin wrapper kept next to the solver that uses it.
inline double schedule_rk(long k, const RelaxedPpaConfig& cfg)
{
    const auto* rule = std::get_if<ScheduleRule>(&cfg.rule);
    if (!rule) throw InvalidParameter("schedule_rk: configuration is not in schedule mode");
    return schedule_rk(k, *rule);
}

/**
 * Relaxed customized PPA.
 *
 * Each iteration: r_k -> primal prox step -> s_k from D Phi(x~^k) -> dual step
 * with linearization -> relaxation. After relaxation the multipliers are put
 * back into the dual cone (gamma > 1 can leave it). Stops when
 * |f(x^k) - f(x^{k+1})| < tau.
 */
inline RunResult run_relaxed_ppa(const ProblemSpec& p, const RelaxedPpaConfig& cfg, const PrimalDualPoint& w0)
{
    cfg.validate();
    detail::check_start(p, w0, "run_relaxed_ppa");

    RunResult result;
    IterationTrace& trace = result.trace;
    trace.reset(p.n, p.m);
    trace.method = Method::RelaxedPpa;
    trace.param_mode = param_rule_name(cfg.rule);

    const auto t_start = detail::Clock::now();
    const long cap = detail::iteration_cap(cfg.rule, cfg.max_iters);

    PrimalDualPoint w = w0;
    double f_k = p.objective(w.x);
    detail::BestPoint best;

    for (long k = 0; k < cap; ++k) {
        const double r_k = detail::rule_r(cfg.rule, p, w.x, k);

        const auto t_sub = detail::Clock::now();
        Vec x_tilde = ppa_primal_step(p, w, r_k, k);
        const double sub_seconds = detail::seconds_since(t_sub);

        const Mat J_tilde = detail::jacobian_or_empty(p, x_tilde);
        const double s_k = detail::rule_s(cfg.rule, r_k, J_tilde, k);
        Vec lambda_tilde = p.m > 0 ? ppa_dual_step(w.lambda, w.x, x_tilde, p.constraints(x_tilde), J_tilde, s_k, p.cone)
                                   : Vec(0);
        PrimalDualPoint w_tilde(std::move(x_tilde), std::move(lambda_tilde));
        trace.accumulate(w_tilde);

        const PrimalDualPoint w_raw = relax_step(w, w_tilde, cfg.gamma);
        PrimalDualPoint w_next(w_raw.x, project_dual(w_raw.lambda, p.cone));

        const double f_next = p.objective(w_next.x);
        const double error = std::abs(f_k - f_next);

        IterationRecord rec;
        rec.k = k;
        rec.f_value = f_next;
        rec.error = error;
        rec.kkt_residual = kkt_residual(p, w_next).value;
        rec.r = r_k;
        rec.s = s_k;
        rec.beta_or_gamma = cfg.gamma;
        rec.subproblem_seconds = sub_seconds;
        const Vec step = w_tilde.stacked() - w.stacked();
        rec.sigma_norm_of_step = std::sqrt(std::max(0.0, build_sigma(r_k, s_k, J_tilde).quadratic_form(step)));
        trace.records.push_back(rec);
        if (cfg.diagnostics) {
            trace.snapshots.push_back({w.stacked(), w_tilde.stacked(), w_raw.stacked(), w_next.stacked(), J_tilde});
        }
        result.max_subproblem_seconds = std::max(result.max_subproblem_seconds, sub_seconds);

        best.offer(w_next, rec.kkt_residual);
        w = std::move(w_next);
        f_k = f_next;
        result.final_error = error;

        if (k + 1 >= cfg.min_iters && error < cfg.tau && rec.kkt_residual <= cfg.kkt_tol) {
            result.converged = true;
            break;
        }
    }

    result.iterations = static_cast<long>(trace.records.size());
    result.w = result.converged ? w : best.w;
    result.total_seconds = detail::seconds_since(t_start);
    return result;
}

inline RunResult run_relaxed_ppa(const ProblemSpec& p, const RelaxedPpaConfig& cfg)
{
    return run_relaxed_ppa(p, cfg, default_start(p));
}

} // namespace nlppa

#endif // NLPPA_RELAXED_PPA_HPP
