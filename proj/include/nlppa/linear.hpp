#ifndef NLPPA_LINEAR_HPP
#define NLPPA_LINEAR_HPP

#include <cstdint>
#include <limits>
#include <optional>
#include <vector>

#include "nlppa/errors.hpp"
#include "nlppa/problem.hpp"
#include "nlppa/qcqp.hpp"

namespace nlppa::linear
{

/// min ||A x - a||^2  s.t.  G x <= h.
struct Instance
{
    Mat A;
    Vec a;
    Mat G;
    Vec h;

    Index n() const { return A.cols(); }
    Index m() const { return G.rows(); }
};

/**
 * Random instance whose unconstrained minimizer violates the even-indexed
 * constraints by 0.1 to 0.6 and satisfies the odd-indexed ones by the same
 * margin. A = I + U with U uniform [0, 1); G uniform in [-1, 1).
 */
inline Instance generate_instance(Index m, Index n, std::uint64_t seed)
{
    if (m < 0 || n < 1) throw InvalidInput("linear::generate_instance: need m >= 0 and n >= 1");
    qcqp::UniformStream rng(seed);
    Instance inst;
    inst.A = Mat::Identity(n, n);
    inst.a.resize(n);
    inst.G.resize(m, n);
    inst.h.resize(m);
    for (Index i = 0; i < n; ++i)
        for (Index j = 0; j < n; ++j) inst.A(i, j) += rng.next();
    for (Index i = 0; i < n; ++i) inst.a[i] = 2.0 * rng.next() - 1.0;
    for (Index i = 0; i < m; ++i)
        for (Index j = 0; j < n; ++j) inst.G(i, j) = 2.0 * rng.next() - 1.0;
    const Vec xu = inst.A.colPivHouseholderQr().solve(inst.a);
    for (Index i = 0; i < m; ++i) {
        const double margin = 0.1 + 0.5 * rng.next();
        inst.h[i] = inst.G.row(i).dot(xu) + (i % 2 == 0 ? -margin : margin);
    }
    return inst;
}

inline ProblemSpec problem(const Instance& inst)
{
    return linear_constrained_least_squares(inst.A, inst.a, inst.G, inst.h);
}

/**
 * Exact solution by active-set enumeration (m <= 12): each active set gives
 * one KKT linear system; the feasible candidate with nonnegative multipliers
 * and the lowest objective is returned.
 */
inline PrimalDualPoint oracle_solve(const Instance& inst)
{
    const Index n = inst.n();
    const Index m = inst.m();
    if (m > 12) throw InvalidInput("linear::oracle_solve: limited to m <= 12");
    const Mat H = 2.0 * inst.A.transpose() * inst.A;
    const Vec g = 2.0 * inst.A.transpose() * inst.a;
    const ProblemSpec p = problem(inst);

    std::optional<PrimalDualPoint> best;
    double best_f = std::numeric_limits<double>::infinity();
    for (unsigned mask = 0; mask < (1u << m); ++mask) {
        std::vector<Index> active;
        for (Index i = 0; i < m; ++i)
            if (mask & (1u << i)) active.push_back(i);
        const auto k = static_cast<Index>(active.size());
        if (k > n) continue;
        Mat K = Mat::Zero(n + k, n + k);
        Vec rhs(n + k);
        K.topLeftCorner(n, n) = H;
        rhs.head(n) = g;
        for (Index a = 0; a < k; ++a) {
            const Index row = active[static_cast<std::size_t>(a)];
            K.block(0, n + a, n, 1) = inst.G.row(row).transpose();
            K.block(n + a, 0, 1, n) = inst.G.row(row);
            rhs[n + a] = inst.h[row];
        }
        Eigen::FullPivLU<Mat> lu(K);
        if (!lu.isInvertible()) continue;
        const Vec sol = lu.solve(rhs);
        PrimalDualPoint cand(sol.head(n), Vec::Zero(m));
        bool ok = true;
        for (Index a = 0; a < k; ++a) {
            const double l = sol[n + a];
            if (l < -1e-10) ok = false;
            cand.lambda[active[static_cast<std::size_t>(a)]] = std::max(l, 0.0);
        }
        if (!ok) continue;
        if (m > 0 && (inst.G * cand.x - inst.h).maxCoeff() > 1e-10) continue;
        const double f = p.objective(cand.x);
        if (f < best_f) {
            best_f = f;
            best = cand;
        }
    }
    if (!best) throw OracleFailure("linear::oracle_solve: no active set produced a KKT point");
    if (kkt_residual(p, *best).value > 1e-8) throw OracleFailure("linear::oracle_solve: KKT residual check failed");
    return *best;
}

} // namespace nlppa::linear

#endif // NLPPA_LINEAR_HPP
