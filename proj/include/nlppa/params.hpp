#ifndef NLPPA_PARAMS_HPP
#define NLPPA_PARAMS_HPP

#include <cmath>
#include <string>
#include <variant>

#include "nlppa/errors.hpp"
#include "nlppa/linalg.hpp"
#include "nlppa/problem.hpp"

namespace nlppa
{

/// Lower bound applied to r_k and s_k when the constraint Jacobian vanishes.
inline constexpr double kRegularizationFloor = 1e-6;

/// Per-iteration regularization pair and the step parameters of both methods.
struct ProxParams
{
    double r = 1.0;
    double s = 1.0;
    double mu1 = 9.0;
    double mu2 = 1.2;
    double gamma = 1.0;
    double beta = 1.0;

    void validate(bool relaxed_ppa) const
    {
        if (!(r > 0.0) || !(s > 0.0)) throw InvalidParameter("ProxParams: r and s must be positive");
        if (!(mu1 > 1.0) || !(mu2 > 1.0)) throw InvalidParameter("ProxParams: mu1 and mu2 must exceed 1");
        if (relaxed_ppa && !(gamma > 0.0 && gamma < 2.0)) throw InvalidParameter("ProxParams: gamma must lie in (0, 2)");
        if (!relaxed_ppa && !(beta > 0.0)) throw InvalidParameter("ProxParams: beta must be positive");
    }
};

/// r_k = ||D Phi(x_k)|| / mu1, floored.
struct AdaptiveRule
{
    double mu1 = 9.0;
    double mu2 = 1.2;
};

/// Constant (r, s); the regime of the O(1/t) bound for affine constraints.
struct FixedRule
{
    double r = 1.0;
    double s = 1.0;
};

/**
 * Decreasing schedule r_k = s_k = (t - k) sqrt(L C2 + sigma) + L C1 + sigma,
 * k = 0..t. L bounds the Jacobian growth, C1 and C2 bound ||x||^2 and
 * ||x' - x''||^2 over the iterates; all are supplied by the caller.
 */
struct ScheduleRule
{
    double L = 1.0;
    double C1 = 1.0;
    double C2 = 1.0;
    double sigma = 1.0;
    long horizon = 1000;
};

using ParamRule = std::variant<AdaptiveRule, FixedRule, ScheduleRule>;

inline std::string param_rule_name(const ParamRule& rule)
{
    switch (rule.index()) {
    case 0: return "adaptive";
    case 1: return "fixed";
    default: return "schedule";
    }
}

inline void validate_rule(const ParamRule& rule)
{
    if (const auto* a = std::get_if<AdaptiveRule>(&rule)) {
        if (!(a->mu1 > 1.0) || !(a->mu2 > 1.0)) throw InvalidParameter("adaptive rule: mu1 and mu2 must exceed 1");
    } else if (const auto* f = std::get_if<FixedRule>(&rule)) {
        if (!(f->r > 0.0) || !(f->s > 0.0)) throw InvalidParameter("fixed rule: r and s must be positive");
    } else {
        const auto& s = std::get<ScheduleRule>(rule);
        if (!(s.L > 0.0) || !(s.C1 > 0.0) || !(s.C2 > 0.0) || !(s.sigma > 0.0)) {
            throw InvalidParameter("schedule rule: L, C1, C2 and sigma must be positive");
        }
        if (s.horizon < 0) throw InvalidParameter("schedule rule: negative horizon");
    }
}

/// r_k from the Jacobian norm at the current iterate.
inline double update_r(const Vec& x_k, const ProblemSpec& p, double mu1)
{
    if (!(mu1 > 1.0)) throw InvalidParameter("update_r: mu1 must exceed 1");
    if (p.m == 0) return kRegularizationFloor;
    const double nrm = spectral_norm(p.jacobian(x_k));
    if (nrm < 1e-12) return kRegularizationFloor;
    return std::max(nrm / mu1, kRegularizationFloor);
}

/// s_k = mu2 ||D Phi(x_tilde)||^2 / r_k, floored; gives r_k s_k > ||D Phi(x_tilde)||^2.
inline double update_s(double r_k, const Mat& J_tilde, double mu2)
{
    if (!(r_k > 0.0)) throw InvalidParameter("update_s: r_k must be positive");
    if (!(mu2 > 1.0)) throw InvalidParameter("update_s: mu2 must exceed 1");
    const double nrm = spectral_norm(J_tilde);
    const double s = mu2 * nrm * nrm / r_k;
    return s > 0.0 ? std::max(s, kRegularizationFloor) : kRegularizationFloor;
}

inline double update_s(double r_k, const Vec& x_tilde, const ProblemSpec& p, double mu2)
{
    return update_s(r_k, p.m > 0 ? p.jacobian(x_tilde) : Mat(0, p.n), mu2);
}

inline double schedule_rk(long k, const ScheduleRule& rule)
{
    if (k < 0 || k > rule.horizon) {
        throw InvalidParameter("schedule_rk: index " + std::to_string(k) + " outside [0, " +
                               std::to_string(rule.horizon) + "]");
    }
    return static_cast<double>(rule.horizon - k) * std::sqrt(rule.L * rule.C2 + rule.sigma) + rule.L * rule.C1 +
           rule.sigma;
}

} // namespace nlppa

#endif // NLPPA_PARAMS_HPP
