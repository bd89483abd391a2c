#ifndef NLPPA_BLOCK_MATRIX_HPP
#define NLPPA_BLOCK_MATRIX_HPP

#include <string>

#include "nlppa/errors.hpp"
#include "nlppa/fwd.hpp"

namespace nlppa
{

/**
 * 2x2 block operator over the stacked primal-dual space R^n x R^m.
 *
 * All the proximal, predictive, corrective and convergence matrices of the
 * solvers share this layout. Blocks are stored densely; products with stacked
 * vectors are formed blockwise so the (n+m)^2 matrix is only assembled on
 * request (dense()).
 */
struct BlockMatrix
{
    Mat top_left;     // n x n
    Mat top_right;    // n x m
    Mat bottom_left;  // m x n
    Mat bottom_right; // m x m
    bool symmetric = false;

    BlockMatrix() = default;

    BlockMatrix(Mat tl, Mat tr, Mat bl, Mat br, bool sym = false)
        : top_left(std::move(tl)), top_right(std::move(tr)), bottom_left(std::move(bl)),
          bottom_right(std::move(br)), symmetric(sym)
    {
        validate();
    }

    Index n() const { return top_left.rows(); }
    Index m() const { return bottom_right.rows(); }
    Index size() const { return n() + m(); }

    void validate() const
    {
        const Index nn = top_left.rows();
        const Index mm = bottom_right.rows();
        if (top_left.cols() != nn || bottom_right.cols() != mm || top_right.rows() != nn ||
            top_right.cols() != mm || bottom_left.rows() != mm || bottom_left.cols() != nn) {
            throw InvalidInput("BlockMatrix: inconsistent block dimensions");
        }
        if (symmetric && !(top_right == bottom_left.transpose())) {
            throw InvalidInput("BlockMatrix: tagged symmetric but off-diagonal blocks are not transposes");
        }
    }

    /// y = B v for stacked v = (v_x, v_lambda).
    Vec apply(const Vec& v) const
    {
        check_vector(v);
        const Index nn = n();
        const Index mm = m();
        Vec y(nn + mm);
        y.head(nn).noalias() = top_left * v.head(nn) + top_right * v.tail(mm);
        y.tail(mm).noalias() = bottom_left * v.head(nn) + bottom_right * v.tail(mm);
        return y;
    }

    /// u^T B v, blockwise.
    double bilinear(const Vec& u, const Vec& v) const
    {
        check_vector(u);
        check_vector(v);
        const Index nn = n();
        const Index mm = m();
        const auto ux = u.head(nn);
        const auto ul = u.tail(mm);
        const auto vx = v.head(nn);
        const auto vl = v.tail(mm);
        return ux.dot(top_left * vx) + ux.dot(top_right * vl) + ul.dot(bottom_left * vx) + ul.dot(bottom_right * vl);
    }

    double quadratic_form(const Vec& v) const { return bilinear(v, v); }

    BlockMatrix transpose() const
    {
        return BlockMatrix(top_left.transpose(), bottom_left.transpose(), top_right.transpose(),
                           bottom_right.transpose(), symmetric);
    }

    Mat dense() const
    {
        const Index nn = n();
        const Index mm = m();
        Mat d(nn + mm, nn + mm);
        d.topLeftCorner(nn, nn) = top_left;
        d.topRightCorner(nn, mm) = top_right;
        d.bottomLeftCorner(mm, nn) = bottom_left;
        d.bottomRightCorner(mm, mm) = bottom_right;
        return d;
    }

    static BlockMatrix from_dense(const Mat& d, Index nn, bool sym = false)
    {
        if (d.rows() != d.cols() || nn > d.rows()) throw InvalidInput("BlockMatrix::from_dense: bad shape");
        const Index mm = d.rows() - nn;
        BlockMatrix b;
        b.top_left = d.topLeftCorner(nn, nn);
        b.top_right = d.topRightCorner(nn, mm);
        b.bottom_left = d.bottomLeftCorner(mm, nn);
        b.bottom_right = d.bottomRightCorner(mm, mm);
        b.symmetric = sym;
        if (sym) b.bottom_left = b.top_right.transpose();
        return b;
    }

    friend BlockMatrix operator+(const BlockMatrix& a, const BlockMatrix& b)
    {
        return BlockMatrix(a.top_left + b.top_left, a.top_right + b.top_right, a.bottom_left + b.bottom_left,
                           a.bottom_right + b.bottom_right, a.symmetric && b.symmetric);
    }

    friend BlockMatrix operator-(const BlockMatrix& a, const BlockMatrix& b)
    {
        return BlockMatrix(a.top_left - b.top_left, a.top_right - b.top_right, a.bottom_left - b.bottom_left,
                           a.bottom_right - b.bottom_right, a.symmetric && b.symmetric);
    }

    friend BlockMatrix operator*(double s, const BlockMatrix& a)
    {
        return BlockMatrix(s * a.top_left, s * a.top_right, s * a.bottom_left, s * a.bottom_right, a.symmetric);
    }

    /// Blockwise product a * b.
    friend BlockMatrix operator*(const BlockMatrix& a, const BlockMatrix& b)
    {
        if (a.n() != b.n() || a.m() != b.m()) throw InvalidInput("BlockMatrix product: dimension mismatch");
        return BlockMatrix(a.top_left * b.top_left + a.top_right * b.bottom_left,
                           a.top_left * b.top_right + a.top_right * b.bottom_right,
                           a.bottom_left * b.top_left + a.bottom_right * b.bottom_left,
                           a.bottom_left * b.top_right + a.bottom_right * b.bottom_right, false);
    }

private:
    void check_vector(const Vec& v) const
    {
        if (v.size() != size()) {
            throw InvalidInput("BlockMatrix: vector of size " + std::to_string(v.size()) + ", expected " +
                               std::to_string(size()));
        }
    }
};

} // namespace nlppa

#endif // NLPPA_BLOCK_MATRIX_HPP
