#include <gtest/gtest.h>

#include <cstring>
#include <random>

#include "support.hpp"

using namespace nlppa;
using testing_support::Rng;

namespace
{

bool same_bits(const Mat& a, const Mat& b)
{
    return a.rows() == b.rows() && a.cols() == b.cols() &&
           std::memcmp(a.data(), b.data(), sizeof(double) * static_cast<std::size_t>(a.size())) == 0;
}

bool same_instance(const qcqp::Instance& x, const qcqp::Instance& y)
{
    if (x.seed != y.seed || x.m() != y.m() || !same_bits(x.A, y.A) || !same_bits(x.a, y.a) || !same_bits(x.c, y.c))
        return false;
    for (std::size_t i = 0; i < x.B.size(); ++i)
        if (!same_bits(x.B[i], y.B[i]) || !same_bits(x.b[i], y.b[i])) return false;
    return true;
}

} // namespace

TEST(UniformStream, TopBitsOfMersenneTwister)
{
    qcqp::UniformStream s(17);
    std::mt19937_64 ref(17);
    for (int i = 0; i < 100; ++i) {
        const double u = s.next();
        EXPECT_EQ(u, static_cast<double>(ref() >> 11) / 9007199254740992.0);
        EXPECT_GE(u, 0.0);
        EXPECT_LT(u, 1.0);
    }
}

TEST(GenerateInstance, DeterministicAndInRange)
{
    const qcqp::Instance x = qcqp::generate_instance(10, 30, 5);
    EXPECT_TRUE(same_instance(x, qcqp::generate_instance(10, 30, 5)));
    EXPECT_FALSE(same_instance(x, qcqp::generate_instance(10, 30, 6)));
    EXPECT_EQ(x.n(), 30);
    EXPECT_EQ(x.m(), 10);
    EXPECT_GE(x.A.minCoeff(), 0.0);
    EXPECT_LT(x.A.maxCoeff(), 1.0);
    for (const auto& B : x.B) {
        EXPECT_GE(B.minCoeff(), 0.0);
        EXPECT_LT(B.maxCoeff(), 1.0);
    }
    EXPECT_GE(x.c.minCoeff(), 10.0);
    EXPECT_LT(x.c.maxCoeff(), 20.0);
    EXPECT_THROW(qcqp::generate_instance(-1, 3, 1), InvalidInput);
    EXPECT_THROW(qcqp::generate_instance(1, 0, 1), InvalidInput);
}

TEST(GenerateInstance, FillOrder)
{
    qcqp::UniformStream s(9);
    const qcqp::Instance x = qcqp::generate_instance(1, 2, 9);
    EXPECT_EQ(x.A(0, 0), s.next());
    EXPECT_EQ(x.A(0, 1), s.next());
    EXPECT_EQ(x.A(1, 0), s.next());
    EXPECT_EQ(x.A(1, 1), s.next());
    EXPECT_EQ(x.a[0], s.next());
    EXPECT_EQ(x.a[1], s.next());
    for (int i = 0; i < 6; ++i) s.next();
    EXPECT_EQ(x.c[0], 10.0 * (1.0 + s.next()));
}

TEST(GenerateInstance, Unconstrained)
{
    const qcqp::Instance x = qcqp::generate_instance(0, 4, 3);
    EXPECT_EQ(x.m(), 0);
    const ProblemSpec p = qcqp::qcqp_problem(x);
    EXPECT_EQ(p.m, 0);
    EXPECT_EQ(p.constraints(Vec::Zero(4)).size(), 0);
}

TEST(QcqpProblem, Functions)
{
    const qcqp::Instance inst = qcqp::generate_instance(3, 5, 11);
    const ProblemSpec p = qcqp::qcqp_problem(inst);
    const Vec phi0 = p.constraints(Vec::Zero(5));
    for (Index i = 0; i < 3; ++i) EXPECT_DOUBLE_EQ(phi0[i], inst.b[static_cast<std::size_t>(i)].squaredNorm() - inst.c[i]);

    Rng rng(11);
    for (int trial = 0; trial < 10; ++trial) {
        const Vec x = rng.vector(5, -2, 2);
        const Mat fd = testing_support::fd_jacobian(p.constraints, x, 3);
        const Mat J = p.jacobian(x);
        EXPECT_LT((J - fd).norm(), 1e-5 * std::max(1.0, J.norm()));
        const Vec g = testing_support::fd_gradient(p.objective, x);
        EXPECT_LT((p.gradient(x) - g).norm(), 1e-5 * std::max(1.0, g.norm()));
    }

    const Vec ls = (inst.A.transpose() * inst.A).ldlt().solve(inst.A.transpose() * inst.a);
    EXPECT_NEAR(p.objective(ls), (inst.A * ls - inst.a).squaredNorm(), 1e-15);
    EXPECT_EQ(p.project(Vec::Ones(5)), Vec::Ones(5));
}

TEST(ClosedFormX, Limits)
{
    const qcqp::Instance inst = qcqp::generate_instance(2, 4, 12);
    Rng rng(12);
    const Vec anchor = rng.vector(4);
    EXPECT_LT((qcqp::closed_form_x_update(inst, Vec::Zero(2), anchor, 1e8) - anchor).norm(), 1e-6);
    const Vec ne = (inst.A.transpose() * inst.A).fullPivLu().solve(inst.A.transpose() * inst.a);
    EXPECT_LT((qcqp::closed_form_x_update(inst, Vec::Zero(2), anchor, 0.0) - ne).norm(), 1e-8 * ne.norm());
    EXPECT_THROW(qcqp::closed_form_x_update(inst, Vec::Zero(3), anchor, 1.0), InvalidInput);
    EXPECT_THROW(qcqp::closed_form_x_update(inst, Vec::Zero(2), anchor, -1.0), InvalidParameter);
}

TEST(ClosedFormX, SystemResidualAndConvexity)
{
    Rng rng(13);
    for (int trial = 0; trial < 20; ++trial) {
        const qcqp::Instance inst = qcqp::generate_instance(3, 6, 500 + trial);
        const Vec l = rng.vector(3, 0, 5), anchor = rng.vector(6, -3, 3);
        const double r = rng.uniform(0.01, 10);
        Mat H = 2.0 * inst.A.transpose() * inst.A + r * Mat::Identity(6, 6);
        Vec rhs = 2.0 * inst.A.transpose() * inst.a + r * anchor;
        for (std::size_t i = 0; i < 3; ++i) {
            H += 2.0 * l[static_cast<Index>(i)] * inst.B[i].transpose() * inst.B[i];
            rhs += 2.0 * l[static_cast<Index>(i)] * inst.B[i].transpose() * inst.b[i];
        }
        const Vec x = qcqp::closed_form_x_update(inst, l, anchor, r);
        EXPECT_LE((H * x - rhs).norm(), 1e-10 * rhs.norm());
        EXPECT_GE(testing_support::smallest_eigenvalue(H), r * (1 - 1e-10));
    }
}

TEST(ClosedFormX, GenericProxCharacterization)
{
    Rng rng(14);
    for (int trial = 0; trial < 20; ++trial) {
        const qcqp::Instance inst = qcqp::generate_instance(2, 5, 600 + trial);
        const ProblemSpec p = qcqp::qcqp_problem(inst);
        const Vec l = rng.vector(2, 0, 3), anchor = rng.vector(5, -2, 2);
        const double r = rng.uniform(0.1, 5);
        const Vec x = qcqp::closed_form_x_update(inst, l, anchor, r);
        // first-order condition of the prox subproblem over X = R^n
        const Vec res = p.gradient(x) + p.jacobian(x).transpose() * l + r * (x - anchor);
        EXPECT_LE(res.norm(), 1e-8 * std::max(1.0, p.gradient(x).norm()));
    }
}

TEST(ClosedFormLambda, Cases)
{
    const qcqp::Instance inst = qcqp::generate_instance(3, 4, 15);
    Rng rng(15);
    const Vec x = rng.vector(4), xk = rng.vector(4), l = rng.vector(3, 0, 1);
    EXPECT_EQ(qcqp::closed_form_lambda_ppa(inst, x, x, l, 2.0), qcqp::closed_form_lambda_pc(inst, x, l, 2.0));
    const Vec at_origin = qcqp::closed_form_lambda_pc(inst, Vec::Zero(4), Vec::Zero(3), 1.0);
    for (Index i = 0; i < 3; ++i) {
        if (inst.b[static_cast<std::size_t>(i)].squaredNorm() < inst.c[i]) {
            EXPECT_EQ(at_origin[i], 0.0);
        }
    }
    EXPECT_THROW(qcqp::closed_form_lambda_pc(inst, x, l, 0.0), InvalidParameter);
    EXPECT_THROW(qcqp::closed_form_lambda_ppa(inst, x, xk, l, -1.0), InvalidParameter);
    const Vec compat = qcqp::closed_form_lambda_pc(inst, x, -l, 1e6, DualCone::NonPositive);
    EXPECT_TRUE(in_dual_cone(compat, DualCone::NonPositive));
}

TEST(ClosedFormLambda, MatchesGenericPath)
{
    Rng rng(16);
    for (int trial = 0; trial < 20; ++trial) {
        const qcqp::Instance inst = qcqp::generate_instance(3, 5, 700 + trial);
        const ProblemSpec p = qcqp::qcqp_problem(inst);
        const PrimalDualPoint wk(rng.vector(5, -2, 2), rng.vector(3, 0, 2));
        const Vec xt = rng.vector(5, -2, 2);
        const double s = rng.uniform(0.5, 30);
        const Vec closed = qcqp::closed_form_lambda_ppa(inst, xt, wk.x, wk.lambda, s);
        EXPECT_LE((closed - ppa_dual_step(p, wk, xt, s)).lpNorm<Eigen::Infinity>(), 1e-12 * std::max(1.0, closed.norm()));

        const Prediction pred = predict(p, wk, 9.0, 1.2);
        const Vec pc = qcqp::closed_form_lambda_pc(inst, pred.w_tilde.x, wk.lambda, pred.s);
        EXPECT_LE((pc - pred.w_tilde.lambda).lpNorm<Eigen::Infinity>(), 1e-12 * std::max(1.0, pc.norm()));
        EXPECT_LE((pred.w_tilde.x - qcqp::closed_form_x_update(inst, wk.lambda, wk.x, pred.r)).norm(),
                  1e-12 * std::max(1.0, pred.w_tilde.x.norm()));
    }
}

TEST(CompatSigns, NegativeMultipliersReportedByIndex)
{
    const qcqp::Instance inst = qcqp::generate_instance(2, 3, 17);
    Vec l(2);
    l << 0.5, -1e6;
    try {
        qcqp::closed_form_x_update(inst, l, Vec::Zero(3), 1e-6);
        FAIL() << "expected SolverError";
    } catch (const SolverError& e) {
        const std::string msg = e.what();
        EXPECT_NE(msg.find("lambda[1]"), std::string::npos);
        EXPECT_EQ(msg.find("lambda[0]"), std::string::npos);
    }
}

TEST(InstanceJson, RoundTripIsBitwise)
{
    const qcqp::Instance inst = qcqp::generate_instance(3, 7, 18);
    const std::string text = qcqp::to_json(inst).dump();
    EXPECT_TRUE(same_instance(inst, qcqp::parse_instance(text)));
    const nlohmann::json j = nlohmann::json::parse(text);
    EXPECT_EQ(j.at("n"), 7);
    EXPECT_EQ(j.at("m"), 3);
    EXPECT_EQ(j.at("A").size(), 49u);
    EXPECT_EQ(j.at("A")[1].get<double>(), inst.A(0, 1));
}

TEST(InstanceJson, Errors)
{
    nlohmann::json j = qcqp::to_json(qcqp::generate_instance(1, 2, 19));
    j.erase("c");
    try {
        qcqp::from_json(j);
        FAIL() << "expected FormatError";
    } catch (const FormatError& e) {
        EXPECT_NE(std::string(e.what()).find("'c'"), std::string::npos);
    }
    j = qcqp::to_json(qcqp::generate_instance(1, 2, 19));
    j["A"].erase(0);
    EXPECT_THROW(qcqp::from_json(j), FormatError);

    const std::string text = qcqp::to_json(qcqp::generate_instance(1, 2, 19)).dump();
    try {
        qcqp::parse_instance(text.substr(0, 25));
        FAIL() << "expected FormatError";
    } catch (const FormatError& e) {
        EXPECT_NE(std::string(e.what()).find("byte"), std::string::npos);
    }
    EXPECT_THROW(qcqp::parse_instance("{\"n\": 2, \"m\": \"x\"}"), FormatError);
}
