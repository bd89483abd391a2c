#ifndef NLPPA_TESTS_SUPPORT_HPP
#define NLPPA_TESTS_SUPPORT_HPP

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "nlppa/nlppa.hpp"

namespace testing_support
{

using nlppa::Index;
using nlppa::Mat;
using nlppa::Vec;

class Rng
{
public:
    explicit Rng(std::uint64_t seed) : m_engine(seed) {}

    double uniform(double lo = 0.0, double hi = 1.0) { return std::uniform_real_distribution<double>(lo, hi)(m_engine); }
    Index integer(Index lo, Index hi) { return std::uniform_int_distribution<Index>(lo, hi)(m_engine); }

    Mat matrix(Index rows, Index cols, double lo = -1.0, double hi = 1.0)
    {
        Mat M(rows, cols);
        for (Index i = 0; i < rows; ++i)
            for (Index j = 0; j < cols; ++j) M(i, j) = uniform(lo, hi);
        return M;
    }

    Vec vector(Index n, double lo = -1.0, double hi = 1.0)
    {
        Vec v(n);
        for (Index i = 0; i < n; ++i) v[i] = uniform(lo, hi);
        return v;
    }

private:
    std::mt19937_64 m_engine;
};

/// Largest singular value from a full SVD.
inline double svd_norm(const Mat& J)
{
    if (J.size() == 0) return 0.0;
    return Eigen::JacobiSVD<Mat>(J).singularValues()(0);
}

inline double smallest_eigenvalue(const Mat& S)
{
    return Eigen::SelfAdjointEigenSolver<Mat>(0.5 * (S + S.transpose())).eigenvalues().minCoeff();
}

/// Central-difference gradient.
template <class F>
Vec fd_gradient(F&& f, const Vec& x, double h = 1e-6)
{
    Vec g(x.size());
    for (Index i = 0; i < x.size(); ++i) {
        Vec xp = x, xm = x;
        xp[i] += h;
        xm[i] -= h;
        g[i] = (f(xp) - f(xm)) / (2.0 * h);
    }
    return g;
}

/// Central-difference Jacobian of a vector function (row i = grad of component i).
template <class F>
Mat fd_jacobian(F&& f, const Vec& x, Index rows, double h = 1e-6)
{
    Mat J(rows, x.size());
    for (Index j = 0; j < x.size(); ++j) {
        Vec xp = x, xm = x;
        xp[j] += h;
        xm[j] -= h;
        J.col(j) = (f(xp) - f(xm)) / (2.0 * h);
    }
    return J;
}

/// Tiny QCQP instances (m in {1, 2}, n in 2..5) whose oracle solution has an active constraint.
inline std::vector<nlppa::qcqp::Instance> active_tiny_instances(int count, std::uint64_t first_seed = 1)
{
    std::vector<nlppa::qcqp::Instance> out;
    for (std::uint64_t seed = first_seed; static_cast<int>(out.size()) < count; ++seed) {
        const Index m = 1 + static_cast<Index>(seed % 2);
        const Index n = 2 + static_cast<Index>(seed % 4);
        nlppa::qcqp::Instance inst = nlppa::qcqp::generate_instance(m, n, seed);
        const nlppa::PrimalDualPoint star = nlppa::qcqp::oracle_solve(inst);
        if (star.lambda.maxCoeff() > 1e-8) out.push_back(std::move(inst));
    }
    return out;
}

} // namespace testing_support

#endif // NLPPA_TESTS_SUPPORT_HPP
