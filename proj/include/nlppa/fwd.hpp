#ifndef NLPPA_FWD_HPP
#define NLPPA_FWD_HPP

#include <Eigen/Dense>

namespace nlppa
{

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;
using Index = Eigen::Index;

/// Side of the dual cone. The library works with multipliers in R^m_+;
/// NonPositive exists only to replay the sign convention of the QCQP study.
enum class DualCone
{
    NonNegative,
    NonPositive
};

/// Projection of a multiplier vector onto the dual cone.
inline Vec project_dual(const Vec& lambda, DualCone cone = DualCone::NonNegative)
{
    return cone == DualCone::NonNegative ? Vec(lambda.cwiseMax(0.0)) : Vec(lambda.cwiseMin(0.0));
}

inline bool in_dual_cone(const Vec& lambda, DualCone cone = DualCone::NonNegative)
{
    if (lambda.size() == 0) return true;
    return cone == DualCone::NonNegative ? lambda.minCoeff() >= 0.0 : lambda.maxCoeff() <= 0.0;
}

} // namespace nlppa

#endif // NLPPA_FWD_HPP
