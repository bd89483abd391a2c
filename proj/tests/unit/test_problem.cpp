#include <gtest/gtest.h>

#include "support.hpp"

using namespace nlppa;
using testing_support::Rng;

namespace
{

/// n=2, m=1: A = I, a = 0, B = I, b = 0, c = 1 (unit disc).
qcqp::Instance unit_disc(const Vec& a)
{
    qcqp::Instance inst;
    inst.A = Mat::Identity(2, 2);
    inst.a = a;
    inst.B = {Mat::Identity(2, 2)};
    inst.b = {Vec::Zero(2)};
    inst.c = Vec::Ones(1);
    return inst;
}

} // namespace

TEST(PrimalDualPoint, StackUnstack)
{
    Vec x(2), l(3);
    x << 1, 2;
    l << 3, 4, 5;
    const PrimalDualPoint w(x, l);
    const Vec s = w.stacked();
    EXPECT_EQ(s.size(), 5);
    const PrimalDualPoint back = PrimalDualPoint::unstack(s, 2);
    EXPECT_EQ(back.x, x);
    EXPECT_EQ(back.lambda, l);
    EXPECT_THROW(PrimalDualPoint::unstack(s, 6), InvalidInput);
}

TEST(LagrangianValue, UnitCircleBoundary)
{
    const ProblemSpec p = qcqp::qcqp_problem(unit_disc(Vec::Zero(2)));
    Vec x(2), l(1);
    x << 1, 0;
    l << 2;
    EXPECT_DOUBLE_EQ(p.objective(x), 1.0);
    EXPECT_DOUBLE_EQ(p.constraints(x)[0], 0.0);
    EXPECT_DOUBLE_EQ(lagrangian_value(p, {x, l}), 1.0);
}

TEST(LagrangianValue, ZeroMultiplierGivesObjective)
{
    const qcqp::Instance inst = qcqp::generate_instance(2, 3, 5);
    const ProblemSpec p = qcqp::qcqp_problem(inst);
    Rng rng(30);
    const Vec x = rng.vector(3, -3, 3);
    EXPECT_EQ(lagrangian_value(p, {x, Vec::Zero(2)}), p.objective(x));
}

TEST(LagrangianValue, IndependentRecomputation)
{
    const qcqp::Instance inst = qcqp::generate_instance(2, 3, 17);
    const ProblemSpec p = qcqp::qcqp_problem(inst);
    Rng rng(31);
    const Vec x = rng.vector(3, -3, 3);
    const Vec l = rng.vector(2, 0, 5);
    double expected = 0.0;
    for (Index i = 0; i < 3; ++i) {
        double r = -inst.a[i];
        for (Index j = 0; j < 3; ++j) r += inst.A(i, j) * x[j];
        expected += r * r;
    }
    for (std::size_t k = 0; k < 2; ++k) {
        double sq = 0.0;
        for (Index i = 0; i < 3; ++i) {
            double r = -inst.b[k][i];
            for (Index j = 0; j < 3; ++j) r += inst.B[k](i, j) * x[j];
            sq += r * r;
        }
        expected += l[static_cast<Index>(k)] * (sq - inst.c[static_cast<Index>(k)]);
    }
    EXPECT_NEAR(lagrangian_value(p, {x, l}), expected, 1e-12 * std::abs(expected));
}

TEST(LagrangianValue, DimensionMismatch)
{
    const ProblemSpec p = qcqp::qcqp_problem(qcqp::generate_instance(2, 3, 1));
    EXPECT_THROW(lagrangian_value(p, {Vec::Zero(2), Vec::Zero(2)}), InvalidInput);
    EXPECT_THROW(lagrangian_value(p, {Vec::Zero(3), Vec::Zero(1)}), InvalidInput);
}

TEST(MonotoneOperator, ZeroMultiplier)
{
    const ProblemSpec p = qcqp::qcqp_problem(qcqp::generate_instance(2, 3, 2));
    Rng rng(32);
    const Vec x = rng.vector(3);
    const Vec g = monotone_operator(p, {x, Vec::Zero(2)});
    EXPECT_EQ(g.head(3), Vec::Zero(3));
    EXPECT_EQ(g.tail(2), -p.constraints(x));
}

TEST(MonotoneOperator, LinearConstraintsTopBlockConstant)
{
    Rng rng(33);
    const Mat G = rng.matrix(2, 4);
    const Vec h = rng.vector(2);
    const ProblemSpec p = linear_constrained_least_squares(Mat::Identity(4, 4), Vec::Zero(4), G, h);
    const Vec l = rng.vector(2, 0, 3);
    const Vec g1 = monotone_operator(p, {rng.vector(4), l});
    const Vec g2 = monotone_operator(p, {rng.vector(4), l});
    EXPECT_LT((g1.head(4) - G.transpose() * l).norm(), 1e-14);
    EXPECT_LT((g1.head(4) - g2.head(4)).norm(), 1e-14);
}

TEST(MonotoneOperator, SampledMonotonicity)
{
    const ProblemSpec p = qcqp::qcqp_problem(qcqp::generate_instance(2, 4, 9));
    Rng rng(34);
    for (int i = 0; i < 1000; ++i) {
        const PrimalDualPoint a(rng.vector(4, -5, 5), rng.vector(2, 0, 10));
        const PrimalDualPoint b(rng.vector(4, -5, 5), rng.vector(2, 0, 10));
        EXPECT_GE(monotone_form(p, a, b), -1e-10);
    }
}

TEST(KktResidual, InteriorStationaryPointIsZero)
{
    Vec a(2);
    a << 0.3, -0.2;
    const ProblemSpec p = qcqp::qcqp_problem(unit_disc(a));
    const KktResidual r = kkt_residual(p, {a, Vec::Zero(1)});
    EXPECT_EQ(r.value, 0.0);
    EXPECT_TRUE(r.stationarity_available);
}

TEST(KktResidual, PrimalViolationDominates)
{
    const ProblemSpec p = qcqp::qcqp_problem(unit_disc(Vec::Zero(2)));
    Vec x(2);
    x << std::sqrt(1.5), 0.0; // phi = 0.5
    const KktResidual r = kkt_residual(p, {x, Vec::Zero(1)});
    EXPECT_NEAR(r.primal_infeasibility, 0.5, 1e-14);
    EXPECT_GE(r.value, 0.5 - 1e-14);
}

TEST(KktResidual, HandSolvedOptimum)
{
    Vec a(2);
    a << 3.0, 0.0;
    const ProblemSpec p = qcqp::qcqp_problem(unit_disc(a));
    Vec x(2), l(1);
    x << 1.0, 0.0;
    l << 2.0;
    EXPECT_LT(kkt_residual(p, {x, l}).value, 1e-14);
    l << -1.0;
    EXPECT_NEAR(kkt_residual(p, {x, l}).dual_infeasibility, 1.0, 1e-14);
}

TEST(KktResidual, WithoutGradientFlagsStationarity)
{
    ProblemSpec p = qcqp::qcqp_problem(unit_disc(Vec::Zero(2)));
    p.gradient = nullptr;
    const KktResidual r = kkt_residual(p, {Vec::Ones(2), Vec::Zero(1)});
    EXPECT_FALSE(r.stationarity_available);
    EXPECT_NEAR(r.value, 1.0, 1e-14);
}

TEST(ProblemSpec, JacobianMatchesFiniteDifferences)
{
    Rng rng(35);
    for (int trial = 0; trial < 10; ++trial) {
        const qcqp::Instance inst = qcqp::generate_instance(3, 4, 100 + trial);
        const ProblemSpec p = qcqp::qcqp_problem(inst);
        const Vec x = rng.vector(4, -2, 2);
        const Mat fd = testing_support::fd_jacobian(p.constraints, x, 3);
        const Mat J = p.jacobian(x);
        EXPECT_LT((fd - J).norm(), 1e-4 * std::max(1.0, J.norm()));
        const Vec fg = testing_support::fd_gradient(p.objective, x);
        EXPECT_LT((fg - p.gradient(x)).norm(), 1e-4 * std::max(1.0, fg.norm()));
    }
}

TEST(ProblemSpec, ProxOutputSatisfiesVariationalInequality)
{
    Rng rng(36);
    for (int trial = 0; trial < 10; ++trial) {
        const ProblemSpec p = qcqp::qcqp_problem(qcqp::generate_instance(2, 4, 200 + trial));
        const Vec l = rng.vector(2, 0, 3);
        const Vec anchor = rng.vector(4, -2, 2);
        const double r = rng.uniform(0.1, 5.0);
        const Vec xt = p.prox_solver(l, anchor, r);
        const Vec lin = p.jacobian(xt).transpose() * l + r * (xt - anchor);
        for (int s = 0; s < 100; ++s) {
            const Vec x = rng.vector(4, -5, 5);
            const double lhs = p.objective(x) - p.objective(xt) + (x - xt).dot(lin);
            EXPECT_GE(lhs, -1e-8 * std::max(1.0, std::abs(p.objective(x))));
        }
        const Vec grad = p.gradient(xt) + lin;
        EXPECT_LT(grad.norm(), 1e-8 * std::max(1.0, p.gradient(xt).norm()));
    }
}

TEST(ProblemSpec, VariationalInequalityAtOracleOptimum)
{
    const qcqp::Instance inst = testing_support::active_tiny_instances(1).front();
    const ProblemSpec p = qcqp::qcqp_problem(inst);
    const PrimalDualPoint star = qcqp::oracle_solve(inst);
    EXPECT_LE(kkt_residual(p, star).value, 1e-6);
    const Vec gs = monotone_operator(p, star);
    Rng rng(37);
    for (int s = 0; s < 1000; ++s) {
        const PrimalDualPoint w(rng.vector(p.n, -5, 5), rng.vector(p.m, 0, 10));
        EXPECT_GE(vi_form(p, w, star, gs), -1e-8);
    }
}

TEST(ErgodicAverage, Cases)
{
    IterationTrace t;
    EXPECT_THROW(ergodic_average(t), InvalidInput);
    t.reset(2, 1);
    Vec w0(3), w1(3), w2(3);
    w0 << 1, 2, 3;
    w1 << 4, 5, 6;
    w2 << -2, 0, 9;
    t.accumulate(PrimalDualPoint::unstack(w0, 2));
    EXPECT_EQ(ergodic_average(t).stacked(), w0);
    t.accumulate(PrimalDualPoint::unstack(w1, 2));
    t.accumulate(PrimalDualPoint::unstack(w2, 2));
    const Vec avg = ergodic_average(t).stacked();
    for (Index i = 0; i < 3; ++i) EXPECT_DOUBLE_EQ(avg[i], (w0[i] + w1[i] + w2[i]) / 3.0);

    IterationTrace c;
    c.reset(2, 1);
    for (int k = 0; k < 5; ++k) c.accumulate(PrimalDualPoint::unstack(w1, 2));
    EXPECT_EQ(ergodic_average(c).stacked(), w1);
}
