#ifndef NLPPA_PROBLEM_HPP
#define NLPPA_PROBLEM_HPP

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>

#include "nlppa/errors.hpp"
#include "nlppa/fwd.hpp"

namespace nlppa
{

/// Stacked primal-dual variable w = (x, lambda).
struct PrimalDualPoint
{
    Vec x;
    Vec lambda;

    PrimalDualPoint() = default;
    PrimalDualPoint(Vec x_, Vec lambda_) : x(std::move(x_)), lambda(std::move(lambda_)) {}

    Index n() const { return x.size(); }
    Index m() const { return lambda.size(); }

    Vec stacked() const
    {
        Vec w(x.size() + lambda.size());
        w << x, lambda;
        return w;
    }

    static PrimalDualPoint unstack(const Vec& w, Index n)
    {
        if (n > w.size()) throw InvalidInput("unstack: primal dimension exceeds vector size");
        return {w.head(n), w.tail(w.size() - n)};
    }
};

/**
 * Convex program  min f(x)  s.t.  phi_i(x) <= 0,  x in X.
 *
 * jacobian(x) returns D Phi(x) in numerator layout: row i is grad phi_i(x)^T.
 * prox_solver(lambda, anchor, r) returns
 *   argmin_{x in X} f(x) + lambda^T Phi(x) + (r/2) ||x - anchor||^2.
 * gradient is optional; without it the KKT stationarity term is unavailable.
 */
struct ProblemSpec
{
    Index n = 0;
    Index m = 0;
    std::function<double(const Vec&)> objective;
    std::function<Vec(const Vec&)> gradient;
    std::function<Vec(const Vec&)> constraints;
    std::function<Mat(const Vec&)> jacobian;
    std::function<Vec(const Vec&)> project_x;
    std::function<Vec(const Vec& lambda, const Vec& anchor, double r)> prox_solver;
    /// Unconstrained minimizer of f, when cheaply available; used as x^0.
    std::function<Vec()> unconstrained_minimizer;
    DualCone cone = DualCone::NonNegative;

    Vec project(const Vec& x) const { return project_x ? project_x(x) : x; }
};

namespace detail
{

inline void check_point(const ProblemSpec& p, const PrimalDualPoint& w, const char* who)
{
    if (w.x.size() != p.n || w.lambda.size() != p.m) {
        throw InvalidInput(std::string(who) + ": point has dimensions (" + std::to_string(w.x.size()) + ", " +
                           std::to_string(w.lambda.size()) + "), problem expects (" + std::to_string(p.n) + ", " +
                           std::to_string(p.m) + ")");
    }
}

} // namespace detail

/// L(x, lambda) = f(x) + lambda^T Phi(x).
inline double lagrangian_value(const ProblemSpec& p, const PrimalDualPoint& w)
{
    detail::check_point(p, w, "lagrangian_value");
    double value = p.objective(w.x);
    if (p.m > 0) value += w.lambda.dot(p.constraints(w.x));
    return value;
}

/// Gamma(w) = [D Phi(x)^T lambda; -Phi(x)].
inline Vec monotone_operator(const ProblemSpec& p, const PrimalDualPoint& w)
{
    detail::check_point(p, w, "monotone_operator");
    Vec g(p.n + p.m);
    if (p.m == 0) {
        g.setZero();
        return g;
    }
    const Mat J = p.jacobian(w.x);
    g.head(p.n).noalias() = J.transpose() * w.lambda;
    g.tail(p.m) = -p.constraints(w.x);
    return g;
}

/// Components of the KKT residual; value is the max of the available terms.
struct KktResidual
{
    double value = 0.0;
    double stationarity = 0.0;
    double complementarity = 0.0;
    double primal_infeasibility = 0.0;
    double dual_infeasibility = 0.0;
    bool stationarity_available = true;
};

/**
 * KKT residual of a primal-dual point (multipliers in R^m_+):
 * projected-gradient stationarity, |lambda_i phi_i|, max(phi_i, 0) and
 * max(-lambda_i, 0), all in the infinity norm.
 */
inline KktResidual kkt_residual(const ProblemSpec& p, const PrimalDualPoint& w)
{
    detail::check_point(p, w, "kkt_residual");
    KktResidual res;
    Vec phi = p.m > 0 ? p.constraints(w.x) : Vec(Vec::Zero(0));

    if (p.gradient) {
        Vec grad = p.gradient(w.x);
        if (p.m > 0) grad.noalias() += p.jacobian(w.x).transpose() * w.lambda;
        const Vec step = w.x - p.project(w.x - grad);
        res.stationarity = step.size() ? step.lpNorm<Eigen::Infinity>() : 0.0;
    } else {
        res.stationarity_available = false;
    }

    for (Index i = 0; i < p.m; ++i) {
        res.complementarity = std::max(res.complementarity, std::abs(w.lambda[i] * phi[i]));
        res.primal_infeasibility = std::max(res.primal_infeasibility, std::max(phi[i], 0.0));
        res.dual_infeasibility = std::max(res.dual_infeasibility, std::max(-w.lambda[i], 0.0));
    }
    res.value = std::max({res.stationarity, res.complementarity, res.primal_infeasibility, res.dual_infeasibility});
    return res;
}

/**
 * Variational-inequality form at a candidate optimum w_star evaluated against w:
 *   f(x) - f(x*) + (w - w*)^T Gamma(w*).
 * Nonnegative for every w in Omega when w_star solves the problem.
 */
inline double vi_form(const ProblemSpec& p, const PrimalDualPoint& w, const PrimalDualPoint& w_star,
                      const Vec& gamma_star)
{
    return p.objective(w.x) - p.objective(w_star.x) + (w.stacked() - w_star.stacked()).dot(gamma_star);
}

/**
 * Least squares with affine inequalities:
 *   min ||A x - a||^2  s.t.  G x - h <= 0.
 * The Jacobian is the constant G.
 */
inline ProblemSpec linear_constrained_least_squares(const Mat& A, const Vec& a, const Mat& G, const Vec& h)
{
    if (A.rows() != a.size() || G.cols() != A.cols() || G.rows() != h.size()) {
        throw InvalidInput("linear_constrained_least_squares: inconsistent dimensions");
    }
    ProblemSpec p;
    p.n = A.cols();
    p.m = G.rows();
    const Mat AtA2 = 2.0 * A.transpose() * A;
    const Vec Ata2 = 2.0 * A.transpose() * a;
    p.objective = [A, a](const Vec& x) { return (A * x - a).squaredNorm(); };
    p.gradient = [AtA2, Ata2](const Vec& x) -> Vec { return AtA2 * x - Ata2; };
    p.constraints = [G, h](const Vec& x) -> Vec { return G * x - h; };
    p.jacobian = [G](const Vec&) -> Mat { return G; };
    p.project_x = [](const Vec& x) { return x; };
    p.prox_solver = [AtA2, Ata2, G](const Vec& lambda, const Vec& anchor, double r) -> Vec {
        Mat H = AtA2;
        H.diagonal().array() += r;
        Eigen::LLT<Mat> llt(H);
        if (llt.info() != Eigen::Success) throw SolverError("prox subproblem matrix is not positive definite");
        Vec rhs = Ata2 + r * anchor;
        if (G.rows() > 0) rhs.noalias() -= G.transpose() * lambda;
        return llt.solve(rhs);
    };
    p.unconstrained_minimizer = [A, a]() -> Vec {
        return A.completeOrthogonalDecomposition().solve(a);
    };
    return p;
}

} // namespace nlppa

#endif // NLPPA_PROBLEM_HPP
