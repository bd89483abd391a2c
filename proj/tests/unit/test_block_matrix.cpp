#include <gtest/gtest.h>

#include "support.hpp"

using namespace nlppa;
using testing_support::Rng;

namespace
{

BlockMatrix random_block(Rng& rng, Index n, Index m)
{
    return BlockMatrix(rng.matrix(n, n), rng.matrix(n, m), rng.matrix(m, n), rng.matrix(m, m));
}

} // namespace

TEST(BlockMatrix, ApplyMatchesDenseProduct)
{
    Rng rng(1);
    for (int trial = 0; trial < 20; ++trial) {
        const Index n = rng.integer(1, 6), m = rng.integer(0, 4);
        const BlockMatrix B = random_block(rng, n, m);
        const Vec v = rng.vector(n + m);
        EXPECT_LT((B.apply(v) - B.dense() * v).norm(), 1e-12);
    }
}

TEST(BlockMatrix, BilinearAndQuadraticForm)
{
    Rng rng(2);
    const BlockMatrix B = random_block(rng, 4, 3);
    const Vec u = rng.vector(7), v = rng.vector(7);
    EXPECT_NEAR(B.bilinear(u, v), u.dot(B.dense() * v), 1e-12);
    EXPECT_NEAR(B.quadratic_form(v), v.dot(B.dense() * v), 1e-12);
}

TEST(BlockMatrix, TransposeAndArithmetic)
{
    Rng rng(3);
    const BlockMatrix A = random_block(rng, 3, 2), B = random_block(rng, 3, 2);
    EXPECT_LT((A.transpose().dense() - A.dense().transpose()).norm(), 1e-15);
    EXPECT_LT(((A + B).dense() - (A.dense() + B.dense())).norm(), 1e-14);
    EXPECT_LT(((A - B).dense() - (A.dense() - B.dense())).norm(), 1e-14);
    EXPECT_LT(((2.5 * A).dense() - 2.5 * A.dense()).norm(), 1e-14);
    EXPECT_LT(((A * B).dense() - A.dense() * B.dense()).norm(), 1e-13);
}

TEST(BlockMatrix, FromDenseRoundTrip)
{
    Rng rng(4);
    const Mat d = rng.matrix(5, 5);
    EXPECT_EQ(BlockMatrix::from_dense(d, 3).dense(), d);
    const Mat s = d + d.transpose();
    const BlockMatrix bs = BlockMatrix::from_dense(s, 2, true);
    EXPECT_TRUE(bs.symmetric);
    EXPECT_NO_THROW(bs.validate());
    EXPECT_THROW(BlockMatrix::from_dense(rng.matrix(3, 4), 2), InvalidInput);
}

TEST(BlockMatrix, EmptyDualBlock)
{
    const BlockMatrix B(Mat::Identity(2, 2), Mat(2, 0), Mat(0, 2), Mat(0, 0));
    EXPECT_EQ(B.size(), 2);
    const Vec v = Vec::Ones(2);
    EXPECT_EQ(B.apply(v), v);
}

TEST(BlockMatrix, RejectsInconsistentBlocks)
{
    EXPECT_THROW(BlockMatrix(Mat::Identity(2, 2), Mat::Zero(2, 1), Mat::Zero(2, 2), Mat::Identity(1, 1)), InvalidInput);
    EXPECT_THROW(BlockMatrix(Mat::Identity(2, 2), Mat::Ones(2, 1), Mat::Zero(1, 2), Mat::Identity(1, 1), true),
                 InvalidInput);
    const BlockMatrix B(Mat::Identity(2, 2), Mat::Zero(2, 1), Mat::Zero(1, 2), Mat::Identity(1, 1));
    EXPECT_THROW(B.apply(Vec::Ones(2)), InvalidInput);
    const BlockMatrix C(Mat::Identity(3, 3), Mat::Zero(3, 1), Mat::Zero(1, 3), Mat::Identity(1, 1));
    EXPECT_THROW(B * C, InvalidInput);
}
