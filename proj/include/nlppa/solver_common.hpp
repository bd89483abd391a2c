#ifndef NLPPA_SOLVER_COMMON_HPP
#define NLPPA_SOLVER_COMMON_HPP

#include <chrono>
#include <exception>
#include <string>
#include <variant>

#include "nlppa/errors.hpp"
#include "nlppa/params.hpp"
#include "nlppa/problem.hpp"
#include "nlppa/trace.hpp"

namespace nlppa
{

/// x^0 = unconstrained minimizer (zeros when unavailable); lambda^0 = 0, or -1 under the flipped cone.
inline PrimalDualPoint default_start(const ProblemSpec& p)
{
    Vec x0 = p.unconstrained_minimizer ? p.unconstrained_minimizer() : Vec(Vec::Zero(p.n));
    Vec l0 = p.cone == DualCone::NonNegative ? Vec(Vec::Zero(p.m)) : Vec(-Vec::Ones(p.m));
    return {std::move(x0), std::move(l0)};
}

namespace detail
{

using Clock = std::chrono::steady_clock;

inline double seconds_since(Clock::time_point t0)
{
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

inline Mat jacobian_or_empty(const ProblemSpec& p, const Vec& x)
{
    return p.m > 0 ? p.jacobian(x) : Mat(0, p.n);
}

inline Vec constraints_or_empty(const ProblemSpec& p, const Vec& x)
{
    return p.m > 0 ? p.constraints(x) : Vec(0);
}

/// r_k before the primal step. Schedule mode uses r_k = s_k.
inline double rule_r(const ParamRule& rule, const ProblemSpec& p, const Vec& x_k, long k)
{
    if (const auto* a = std::get_if<AdaptiveRule>(&rule)) return update_r(x_k, p, a->mu1);
    if (const auto* f = std::get_if<FixedRule>(&rule)) return f->r;
    return schedule_rk(k, std::get<ScheduleRule>(rule));
}

inline double rule_s(const ParamRule& rule, double r_k, const Mat& J_tilde, long k)
{
    if (const auto* a = std::get_if<AdaptiveRule>(&rule)) return update_s(r_k, J_tilde, a->mu2);
    if (const auto* f = std::get_if<FixedRule>(&rule)) return f->s;
    return schedule_rk(k, std::get<ScheduleRule>(rule));
}

/// Last admissible iteration index, honoring the schedule horizon.
inline long iteration_cap(const ParamRule& rule, long max_iters)
{
    if (const auto* s = std::get_if<ScheduleRule>(&rule)) return std::min(max_iters, s->horizon + 1);
    return max_iters;
}

inline void check_start(const ProblemSpec& p, const PrimalDualPoint& w0, const char* who)
{
    check_point(p, w0, who);
    if (!in_dual_cone(w0.lambda, p.cone)) {
        throw InvalidInput(std::string(who) + ": initial multipliers are outside the dual cone");
    }
}

/// Runs the prox subproblem, attaching the iteration index to any failure.
inline Vec solve_prox(const ProblemSpec& p, const Vec& lambda, const Vec& anchor, double r, long k)
{
    try {
        return p.prox_solver(lambda, anchor, r);
    } catch (const SolverError& e) {
        if (e.iteration() >= 0) throw;
        throw SolverError(std::string("prox subproblem failed: ") + e.what(), k);
    } catch (const std::exception& e) {
        throw SolverError(std::string("prox subproblem failed: ") + e.what(), k);
    }
}

/// Tracks the iterate with the smallest KKT residual for non-converged exits.
struct BestPoint
{
    PrimalDualPoint w;
    double kkt = std::numeric_limits<double>::infinity();

    void offer(const PrimalDualPoint& candidate, double residual)
    {
        if (residual < kkt) {
            kkt = residual;
            w = candidate;
        }
    }
};

} // namespace detail

} // namespace nlppa

#endif // NLPPA_SOLVER_COMMON_HPP
