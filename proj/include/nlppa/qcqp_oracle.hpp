#ifndef NLPPA_QCQP_ORACLE_HPP
#define NLPPA_QCQP_ORACLE_HPP

#include <cmath>
#include <limits>
#include <optional>
#include <vector>

#include "nlppa/qcqp.hpp"

namespace nlppa::qcqp
{

struct OracleSettings
{
    int max_newton_iters = 200;
    double residual_tol = 1e-13; // relative, on the active constraint values
    double multiplier_tol = 1e-10;
    double feasibility_tol = 1e-9;
    double kkt_tol = 1e-8;
};

namespace detail
{

/// x(lambda) = argmin_x L(x, lambda); nullopt when the Hessian is not PD.
inline std::optional<Vec> lagrangian_minimizer(const Normal& nrm, const Vec& lambda, Eigen::LLT<Mat>& llt)
{
    Mat H;
    Vec rhs;
    assemble_x_system(nrm, lambda, Vec::Zero(nrm.Ata.size()), 0.0, H, rhs);
    llt.compute(H);
    if (llt.info() != Eigen::Success) return std::nullopt;
    // reject numerically indefinite factorizations
    if (llt.matrixLLT().diagonal().minCoeff() <= 0.0) return std::nullopt;
    return Vec(llt.solve(rhs));
}

inline double dual_value(const Instance& inst, const Vec& x, const Vec& lambda)
{
    return objective(inst, x) + (inst.m() > 0 ? lambda.dot(constraint_values(inst, x)) : 0.0);
}

/**
 * Maximizes the dual function over the multipliers in `active` (the rest held
 * at zero) by damped Newton on Phi_S(x(lambda)) = 0. The Newton matrix is
 * J_S H^{-1} J_S^T; steps are halved until the Lagrangian Hessian stays PD and
 * the dual value does not decrease.
 */
inline std::optional<PrimalDualPoint> solve_active_set(const Instance& inst, const Normal& nrm,
                                                       const std::vector<Index>& active,
                                                       const OracleSettings& settings)
{
    const Index m = inst.m();
    const auto k = static_cast<Index>(active.size());
    Vec lambda = Vec::Zero(m);
    for (Index i : active) lambda[i] = 1.0;

    Eigen::LLT<Mat> llt;
    auto x = lagrangian_minimizer(nrm, lambda, llt);
    if (!x) return std::nullopt;
    if (k == 0) return PrimalDualPoint(*x, lambda);

    double g = dual_value(inst, *x, lambda);
    for (int it = 0; it < settings.max_newton_iters; ++it) {
        const Vec phi = constraint_values(inst, *x);
        const Mat J = jacobian(inst, *x);
        Vec phi_s(k);
        Mat J_s(k, inst.n());
        for (Index a = 0; a < k; ++a) {
            phi_s[a] = phi[active[static_cast<std::size_t>(a)]];
            J_s.row(a) = J.row(active[static_cast<std::size_t>(a)]);
        }
        const double scale = 1.0 + inst.c.maxCoeff();
        if (phi_s.lpNorm<Eigen::Infinity>() <= settings.residual_tol * scale) return PrimalDualPoint(*x, lambda);

        const Mat HinvJt = llt.solve(J_s.transpose());
        const Mat newton = J_s * HinvJt;
        Eigen::LDLT<Mat> ldlt(newton);
        if (ldlt.info() != Eigen::Success) return std::nullopt;
        const Vec step = ldlt.solve(phi_s);
        if (!step.allFinite()) return std::nullopt;

        double t = 1.0;
        bool accepted = false;
        while (t > 1e-12) {
            Vec trial = lambda;
            for (Index a = 0; a < k; ++a) trial[active[static_cast<std::size_t>(a)]] += t * step[a];
            Eigen::LLT<Mat> trial_llt;
            auto trial_x = lagrangian_minimizer(nrm, trial, trial_llt);
            if (trial_x) {
                const double trial_g = dual_value(inst, *trial_x, trial);
                if (trial_g >= g - 1e-14 * (1.0 + std::abs(g))) {
                    lambda = trial;
                    x = trial_x;
                    llt = trial_llt;
                    g = trial_g;
                    accepted = true;
                    break;
                }
            }
            t *= 0.5;
        }
        if (!accepted) break;
    }
    // accept a stalled iterate if it is already accurate
    const Vec phi = constraint_values(inst, *x);
    double worst = 0.0;
    for (Index i : active) worst = std::max(worst, std::abs(phi[i]));
    if (worst <= 1e-10 * (1.0 + inst.c.maxCoeff())) return PrimalDualPoint(*x, lambda);
    return std::nullopt;
}

} // namespace detail

/**
 * Ground truth for small instances (m <= 3, n <= 6).
 *
 * Enumerates all 2^m active sets; for each one the stationarity and active
 * constraint equations are solved by damped Newton in the active multipliers.
 * Candidates with nonnegative active multipliers that satisfy the inactive
 * constraints are kept; the lowest objective wins and must pass a KKT
 * residual check of 1e-8 before it is returned.
 */
inline PrimalDualPoint oracle_solve(const Instance& inst, const OracleSettings& settings = {})
{
    inst.validate();
    const Index m = inst.m();
    if (m > 3 || inst.n() > 6) throw InvalidInput("oracle_solve: limited to m <= 3 and n <= 6");

    const Normal nrm(inst);
    const ProblemSpec p = qcqp_problem(inst);

    std::optional<PrimalDualPoint> best;
    double best_f = std::numeric_limits<double>::infinity();
    for (unsigned mask = 0; mask < (1u << m); ++mask) {
        std::vector<Index> active;
        for (Index i = 0; i < m; ++i)
            if (mask & (1u << i)) active.push_back(i);

        auto cand = detail::solve_active_set(inst, nrm, active, settings);
        if (!cand) continue;
        bool ok = true;
        for (Index i : active) {
            if (cand->lambda[i] < -settings.multiplier_tol) ok = false;
            cand->lambda[i] = std::max(cand->lambda[i], 0.0);
        }
        const Vec phi = constraint_values(inst, cand->x);
        for (Index i = 0; i < m && ok; ++i) {
            if (!(mask & (1u << i)) && phi[i] > settings.feasibility_tol) ok = false;
        }
        if (!ok) continue;
        if (kkt_residual(p, *cand).value > settings.kkt_tol) continue;
        const double f = objective(inst, cand->x);
        if (f < best_f) {
            best_f = f;
            best = std::move(cand);
        }
    }
    if (!best) throw OracleFailure("oracle_solve: no active set produced a certified KKT point");
    return *best;
}

} // namespace nlppa::qcqp

#endif // NLPPA_QCQP_ORACLE_HPP
