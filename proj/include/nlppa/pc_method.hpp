#ifndef NLPPA_PC_METHOD_HPP
#define NLPPA_PC_METHOD_HPP

#include <cmath>
#include <limits>
#include <optional>

#include "nlppa/sigma.hpp"
#include "nlppa/solver_common.hpp"

namespace nlppa
{

struct PcConfig
{
    /// beta = gamma * beta*, then clamped so that G_k stays positive definite.
    double gamma = 1.0;
    double tau = 1e-10;
    long max_iters = 100000;
    long min_iters = 2;
    /// Optional second stopping condition: also require kkt_residual <= kkt_tol.
    /// Off by default.
    double kkt_tol = std::numeric_limits<double>::infinity();
    Corrector corrector = Corrector::LowerTriangular;
    ParamRule rule = AdaptiveRule{};
    bool diagnostics = false;

    void validate() const
    {
        if (!(gamma > 0.0)) throw InvalidParameter("PC: gamma must be positive");
        if (!(tau > 0.0)) throw InvalidParameter("PC: tau must be positive");
        if (!(kkt_tol > 0.0)) throw InvalidParameter("PC: kkt_tol must be positive");
        if (max_iters < 1) throw InvalidParameter("PC: max_iters must be at least 1");
        validate_rule(rule);
    }
};

/// Output of the prediction step.
struct Prediction
{
    PrimalDualPoint w_tilde;
    double r = 0.0;
    double s = 0.0;
    Mat J_tilde;
    double subproblem_seconds = 0.0;
};

/// Plain primal-dual step: prox in x, then P_Z(lambda^k + Phi(x~)/s_k) with no linearization.
inline Prediction predict(const ProblemSpec& p, const PrimalDualPoint& w_k, const ParamRule& rule, long k = 0)
{
    detail::check_point(p, w_k, "predict");
    Prediction out;
    out.r = detail::rule_r(rule, p, w_k.x, k);
    const auto t0 = detail::Clock::now();
    Vec x_tilde = detail::solve_prox(p, w_k.lambda, w_k.x, out.r, k);
    out.subproblem_seconds = detail::seconds_since(t0);
    out.J_tilde = detail::jacobian_or_empty(p, x_tilde);
    out.s = detail::rule_s(rule, out.r, out.J_tilde, k);
    Vec lambda_tilde = p.m > 0 ? project_dual(w_k.lambda + p.constraints(x_tilde) / out.s, p.cone) : Vec(0);
    out.w_tilde = PrimalDualPoint(std::move(x_tilde), std::move(lambda_tilde));
    return out;
}

inline Prediction predict(const ProblemSpec& p, const PrimalDualPoint& w_k, double mu1, double mu2)
{
    return predict(p, w_k, AdaptiveRule{mu1, mu2});
}

/// Predictive matrix Q = [[r I, -J^T], [0, s I]].
inline BlockMatrix build_q(double r, double s, const Mat& J)
{
    detail::require_positive_rs(r, s, "build_q");
    const Index m = J.rows();
    const Index n = J.cols();
    return BlockMatrix(r * Mat::Identity(n, n), -J.transpose(), Mat::Zero(m, n), s * Mat::Identity(m, m));
}

/// Corrective matrix M for either triangular choice.
inline BlockMatrix build_m(Corrector choice, double r, double s, const Mat& J)
{
    detail::require_positive_rs(r, s, "build_m");
    const Index m = J.rows();
    const Index n = J.cols();
    if (choice == Corrector::UpperTriangular) {
        return BlockMatrix(Mat::Identity(n, n), -J.transpose() / r, Mat::Zero(m, n), Mat::Identity(m, m));
    }
    return BlockMatrix(Mat::Identity(n, n), Mat::Zero(n, m), J / s, Mat::Identity(m, m));
}

/**
 * Sigma = Q M^{-1} in closed form:
 *   upper: diag(r I, s I)
 *   lower: [[r I + J^T J / s, -J^T], [-J, s I]]
 * Both are positive definite for any r, s > 0.
 */
inline BlockMatrix corrector_sigma(Corrector choice, double r, double s, const Mat& J)
{
    detail::require_positive_rs(r, s, "corrector_sigma");
    const Index m = J.rows();
    const Index n = J.cols();
    if (choice == Corrector::UpperTriangular) {
        return BlockMatrix(r * Mat::Identity(n, n), Mat::Zero(n, m), Mat::Zero(m, n), s * Mat::Identity(m, m), true);
    }
    Mat tl = r * Mat::Identity(n, n);
    tl.noalias() += J.transpose() * J / s;
    return BlockMatrix(std::move(tl), -J.transpose(), -J, s * Mat::Identity(m, m), true);
}

/// G = Q^T + Q - beta M^T Sigma M.
inline BlockMatrix build_g(const BlockMatrix& Q, const BlockMatrix& M, const BlockMatrix& Sigma, double beta)
{
    BlockMatrix G = Q.transpose() + Q - beta * (M.transpose() * (Sigma * M));
    // symmetric in exact arithmetic; average away rounding
    const Mat off = 0.5 * (G.top_right + G.bottom_left.transpose());
    G.top_right = off;
    G.bottom_left = off.transpose();
    G.top_left = 0.5 * (G.top_left + G.top_left.transpose());
    G.bottom_right = 0.5 * (G.bottom_right + G.bottom_right.transpose());
    G.symmetric = true;
    return G;
}

/// xi(beta) = 2 beta d^T Q d - beta^2 ||M d||^2_Sigma, the lower bound on the Sigma-distance decrease.
inline double xi_lower_bound(double beta, const Vec& d, const BlockMatrix& Q, const BlockMatrix& M,
                             const BlockMatrix& Sigma)
{
    return 2.0 * beta * Q.quadratic_form(d) - beta * beta * Sigma.quadratic_form(M.apply(d));
}

/**
 * beta* = d^T Q d / ||M d||^2_Sigma with d = w^k - w~^k, the maximizer of xi.
 * Returns nullopt when d = 0 (the predictor reproduced the iterate).
 */
inline std::optional<double> optimal_beta(const PrimalDualPoint& w_k, const PrimalDualPoint& w_tilde,
                                          const BlockMatrix& Q, const BlockMatrix& M, const BlockMatrix& Sigma)
{
    const Vec d = w_k.stacked() - w_tilde.stacked();
    if (d.size() != Q.size()) throw InvalidInput("optimal_beta: dimension mismatch");
    if (d.lpNorm<Eigen::Infinity>() == 0.0) return std::nullopt;
    const double num = Q.quadratic_form(d);
    const double den = Sigma.quadratic_form(M.apply(d));
    if (!(den > 0.0)) throw PdViolation("optimal_beta: ||M d||_Sigma^2 is not positive (" + std::to_string(den) + ")");
    return num / den;
}

/// w^{k+1} = w^k - beta M (w^k - w~^k), before re-projection.
inline PrimalDualPoint correct_raw(const PrimalDualPoint& w_k, const PrimalDualPoint& w_tilde, const BlockMatrix& M,
                                   double beta)
{
    if (!(beta >= 0.0)) throw InvalidParameter("correct: beta must be nonnegative");
    const Vec d = w_k.stacked() - w_tilde.stacked();
    return PrimalDualPoint::unstack(w_k.stacked() - beta * M.apply(d), w_k.x.size());
}

/// Correction followed by re-projection of the multipliers onto the cone.
inline PrimalDualPoint correct(const PrimalDualPoint& w_k, const PrimalDualPoint& w_tilde, const BlockMatrix& M,
                               double beta, DualCone cone = DualCone::NonNegative)
{
    PrimalDualPoint w = correct_raw(w_k, w_tilde, M, beta);
    w.lambda = project_dual(w.lambda, cone);
    return w;
}

/// Largest admissible correction step: (2 - beta)^2 r s > ||J||^2 with a 1e-9 margin.
inline double beta_upper_bound(const ParamRule& rule, double r, double s, const Mat& J)
{
    if (const auto* a = std::get_if<AdaptiveRule>(&rule)) return 2.0 - std::sqrt(1.0 / a->mu2) - 1e-9;
    const double nrm = spectral_norm(J);
    return 2.0 - nrm / std::sqrt(r * s) - 1e-9;
}

/**
 * Prediction-correction method.
 *
 * Each iteration: predict -> Q, M, Sigma -> beta* -> beta = gamma beta*
 * (clamped) -> correct -> re-project multipliers. Stops when
 * |f(x^k) - f(x^{k+1})| < tau or the predictor equals the iterate.
 */
inline RunResult run_pc(const ProblemSpec& p, const PcConfig& cfg, const PrimalDualPoint& w0)
{
    cfg.validate();
    detail::check_start(p, w0, "run_pc");

    RunResult result;
    IterationTrace& trace = result.trace;
    trace.reset(p.n, p.m);
    trace.method = Method::PredictionCorrection;
    trace.corrector = cfg.corrector;
    trace.param_mode = param_rule_name(cfg.rule);

    const auto t_start = detail::Clock::now();
    const long cap = detail::iteration_cap(cfg.rule, cfg.max_iters);

    PrimalDualPoint w = w0;
    double f_k = p.objective(w.x);
    detail::BestPoint best;

    for (long k = 0; k < cap; ++k) {
        Prediction pred = predict(p, w, cfg.rule, k);
        trace.accumulate(pred.w_tilde);

        const BlockMatrix Q = build_q(pred.r, pred.s, pred.J_tilde);
        const BlockMatrix M = build_m(cfg.corrector, pred.r, pred.s, pred.J_tilde);
        const BlockMatrix Sigma = corrector_sigma(cfg.corrector, pred.r, pred.s, pred.J_tilde);

        IterationRecord rec;
        rec.k = k;
        rec.r = pred.r;
        rec.s = pred.s;
        rec.subproblem_seconds = pred.subproblem_seconds;

        const std::optional<double> beta_star = optimal_beta(w, pred.w_tilde, Q, M, Sigma);
        const bool stalled = !beta_star.has_value();
        double beta = 0.0;
        if (!stalled) {
            const double bound = beta_upper_bound(cfg.rule, pred.r, pred.s, pred.J_tilde);
            beta = std::min(cfg.gamma * *beta_star, bound);
            rec.beta_star = *beta_star;
        } else {
            rec.beta_star = 0.0;
        }
        const PrimalDualPoint w_raw = stalled ? w : correct_raw(w, pred.w_tilde, M, beta);
        PrimalDualPoint w_next(w_raw.x, project_dual(w_raw.lambda, p.cone));

        const double f_next = p.objective(w_next.x);
        const double error = std::abs(f_k - f_next);
        const Vec step = pred.w_tilde.stacked() - w.stacked();

        rec.f_value = f_next;
        rec.error = error;
        rec.kkt_residual = kkt_residual(p, w_next).value;
        rec.beta_or_gamma = beta;
        rec.sigma_norm_of_step = std::sqrt(std::max(0.0, Sigma.quadratic_form(step)));
        const double jn = spectral_norm(pred.J_tilde);
        rec.g_pd = (2.0 - beta) > 0.0 && (2.0 - beta) * (2.0 - beta) * pred.r * pred.s > jn * jn;
        trace.records.push_back(rec);
        if (cfg.diagnostics) {
            trace.snapshots.push_back(
                {w.stacked(), pred.w_tilde.stacked(), w_raw.stacked(), w_next.stacked(), pred.J_tilde});
        }
        result.max_subproblem_seconds = std::max(result.max_subproblem_seconds, pred.subproblem_seconds);

        best.offer(w_next, rec.kkt_residual);
        w = std::move(w_next);
        f_k = f_next;
        result.final_error = error;

        if (stalled || (k + 1 >= cfg.min_iters && error < cfg.tau && rec.kkt_residual <= cfg.kkt_tol)) {
            result.converged = true;
            break;
        }
    }

    result.iterations = static_cast<long>(trace.records.size());
    result.w = result.converged ? w : best.w;
    result.total_seconds = detail::seconds_since(t_start);
    return result;
}

inline RunResult run_pc(const ProblemSpec& p, const PcConfig& cfg) { return run_pc(p, cfg, default_start(p)); }

} // namespace nlppa

#endif // NLPPA_PC_METHOD_HPP
