#ifndef NLPPA_SIGMA_HPP
#define NLPPA_SIGMA_HPP

#include <cmath>

#include "nlppa/block_matrix.hpp"
#include "nlppa/errors.hpp"
#include "nlppa/linalg.hpp"

namespace nlppa
{

namespace detail
{

inline void require_positive_rs(double r, double s, const char* who)
{
    if (!(r > 0.0) || !(s > 0.0)) {
        throw InvalidParameter(std::string(who) + ": r and s must be positive (r=" + std::to_string(r) +
                               ", s=" + std::to_string(s) + ")");
    }
}

} // namespace detail

/// Customized symmetric proximal matrix [[r I, -J^T], [-J, s I]].
inline BlockMatrix build_sigma(double r, double s, const Mat& J)
{
    detail::require_positive_rs(r, s, "build_sigma");
    const Index m = J.rows();
    const Index n = J.cols();
    return BlockMatrix(r * Mat::Identity(n, n), -J.transpose(), -J, s * Mat::Identity(m, m), true);
}

/// Positive definiteness of build_sigma(r, s, J): r s > rho(J J^T).
inline bool sigma_is_pd(double r, double s, const Mat& J)
{
    detail::require_positive_rs(r, s, "sigma_is_pd");
    if (J.size() == 0) return true;
    // exact Gram spectrum; the criterion is sharp at the boundary
    const bool wide = J.rows() <= J.cols();
    const Mat gram = wide ? Mat(J * J.transpose()) : Mat(J.transpose() * J);
    const double rho = std::max(0.0, Eigen::SelfAdjointEigenSolver<Mat>(gram, Eigen::EigenvaluesOnly)
                                         .eigenvalues()
                                         .maxCoeff());
    return r * s > rho;
}

/// sqrt(v^T Sigma v) evaluated blockwise.
inline double sigma_norm(const BlockMatrix& sigma, const Vec& v, double tol = 1e-12)
{
    const double q = sigma.quadratic_form(v);
    if (q < 0.0) {
        const double scale = std::max(1.0, v.squaredNorm());
        if (q < -tol * scale) {
            throw PdViolation("sigma_norm: quadratic form is negative (" + std::to_string(q) + ")");
        }
        return 0.0;
    }
    return std::sqrt(q);
}

/// Squared weighted norm without the PD guard (used by diagnostics on G).
inline double weighted_sq_norm(const BlockMatrix& B, const Vec& v) { return B.quadratic_form(v); }

} // namespace nlppa

#endif // NLPPA_SIGMA_HPP
