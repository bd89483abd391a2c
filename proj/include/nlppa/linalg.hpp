#ifndef NLPPA_LINALG_HPP
#define NLPPA_LINALG_HPP

#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>

#include "nlppa/fwd.hpp"

namespace nlppa
{

namespace detail
{

inline double exact_largest_singular_value(const Mat& gram)
{
    Eigen::SelfAdjointEigenSolver<Mat> es(gram, Eigen::EigenvaluesOnly);
    return std::sqrt(std::max(0.0, es.eigenvalues().maxCoeff()));
}

} // namespace detail

/// Settings for the power iteration behind spectral_norm.
struct PowerIterationSettings
{
    int max_iters = 200;
    double rel_tol = 1e-10;   // on the change of the Rayleigh quotient
    Index exact_below = 3;    // dense eigensolve when min(m, n) <= this
};

/**
 * Largest singular value of J.
 *
 * Power iteration on the smaller Gram matrix (J J^T or J^T J) from the fixed
 * start vector (1, ..., 1)/sqrt(k). Tiny matrices and runs that hit the
 * iteration cap without meeting the tolerance are handed to a dense
 * eigensolve, so the result is deterministic and within 1e-8 relative of the
 * SVD value.
 */
inline double spectral_norm(const Mat& J, const PowerIterationSettings& settings = {})
{
    if (J.size() == 0) return 0.0;
    const double fro = J.norm();
    if (fro == 0.0) return 0.0;

    const bool wide = J.rows() <= J.cols();
    const Mat gram = wide ? Mat(J * J.transpose()) : Mat(J.transpose() * J);
    if (std::min(J.rows(), J.cols()) <= settings.exact_below) {
        return detail::exact_largest_singular_value(gram);
    }

    Vec v = Vec::Ones(gram.rows()) / std::sqrt(static_cast<double>(gram.rows()));
    double rayleigh = 0.0;
    for (int it = 0; it < settings.max_iters; ++it) {
        Vec gv = gram * v;
        const double next = v.dot(gv);
        const double nrm = gv.norm();
        if (nrm == 0.0) break;
        v = gv / nrm;
        if (it > 0 && std::abs(next - rayleigh) <= settings.rel_tol * std::abs(next)) {
            return std::sqrt(std::max(0.0, v.dot(gram * v)));
        }
        rayleigh = next;
    }
    return detail::exact_largest_singular_value(gram);
}

/// Smallest eigenvalue of a symmetric matrix (dense).
inline double min_eigenvalue(const Mat& sym)
{
    if (sym.size() == 0) return 0.0;
    Eigen::SelfAdjointEigenSolver<Mat> es(sym, Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
}

} // namespace nlppa

#endif // NLPPA_LINALG_HPP
