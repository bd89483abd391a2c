#ifndef NLPPA_QCQP_HPP
#define NLPPA_QCQP_HPP

#include <atomic>
#include <cmath>
#include <cstdint>
#include <iostream>
#include <limits>
#include <memory>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "nlppa/errors.hpp"
#include "nlppa/problem.hpp"

namespace nlppa::qcqp
{

/**
 * min ||A x - a||^2  s.t.  ||B_i x - b_i||^2 <= c_i,  i = 1..m.
 */
struct Instance
{
    Mat A;
    Vec a;
    std::vector<Mat> B;
    std::vector<Vec> b;
    Vec c;
    std::uint64_t seed = 0;

    Index n() const { return A.cols(); }
    Index m() const { return c.size(); }

    void validate() const
    {
        const Index nn = A.cols();
        if (A.rows() != nn || a.size() != nn) throw InvalidInput("qcqp instance: A must be n x n and a of length n");
        if (static_cast<Index>(B.size()) != c.size() || static_cast<Index>(b.size()) != c.size()) {
            throw InvalidInput("qcqp instance: B, b and c must have m entries");
        }
        for (std::size_t i = 0; i < B.size(); ++i) {
            if (B[i].rows() != nn || B[i].cols() != nn || b[i].size() != nn) {
                throw InvalidInput("qcqp instance: constraint " + std::to_string(i) + " has wrong dimensions");
            }
        }
    }
};

/// Uniform [0, 1) from the top 53 bits of a mt19937_64 draw; identical on every platform.
class UniformStream
{
public:
    explicit UniformStream(std::uint64_t seed) : m_engine(seed) {}

    double next() { return static_cast<double>(m_engine() >> 11) * 0x1.0p-53; }

    void fill(Mat& M)
    {
        for (Index i = 0; i < M.rows(); ++i)
            for (Index j = 0; j < M.cols(); ++j) M(i, j) = next();
    }

    void fill(Vec& v)
    {
        for (Index i = 0; i < v.size(); ++i) v[i] = next();
    }

private:
    std::mt19937_64 m_engine;
};

/**
 * Random instance. One stream per seed, drawn in the order A (row-major), a,
 * then B_i (row-major) and b_i for each constraint, then c_i = 10 (1 + u_i).
 */
inline Instance generate_instance(Index m, Index n, std::uint64_t seed)
{
    if (m < 0 || n < 1) throw InvalidInput("generate_instance: need m >= 0 and n >= 1");
    UniformStream rng(seed);
    Instance inst;
    inst.seed = seed;
    inst.A.resize(n, n);
    inst.a.resize(n);
    rng.fill(inst.A);
    rng.fill(inst.a);
    inst.B.assign(static_cast<std::size_t>(m), Mat(n, n));
    inst.b.assign(static_cast<std::size_t>(m), Vec(n));
    for (Index i = 0; i < m; ++i) {
        rng.fill(inst.B[static_cast<std::size_t>(i)]);
        rng.fill(inst.b[static_cast<std::size_t>(i)]);
    }
    inst.c.resize(m);
    for (Index i = 0; i < m; ++i) inst.c[i] = 10.0 * (1.0 + rng.next());
    return inst;
}

/// Precomputed normal-equation data: A^T A, A^T a, B_i^T B_i, B_i^T b_i.
struct Normal
{
    Mat AtA;
    Vec Ata;
    std::vector<Mat> BtB;
    std::vector<Vec> Btb;

    explicit Normal(const Instance& inst)
        : AtA(inst.A.transpose() * inst.A), Ata(inst.A.transpose() * inst.a)
    {
        for (std::size_t i = 0; i < inst.B.size(); ++i) {
            BtB.emplace_back(inst.B[i].transpose() * inst.B[i]);
            Btb.emplace_back(inst.B[i].transpose() * inst.b[i]);
        }
    }
};

inline double objective(const Instance& inst, const Vec& x) { return (inst.A * x - inst.a).squaredNorm(); }

inline Vec constraint_values(const Instance& inst, const Vec& x)
{
    Vec phi(inst.m());
    for (Index i = 0; i < inst.m(); ++i) {
        const auto ui = static_cast<std::size_t>(i);
        phi[i] = (inst.B[ui] * x - inst.b[ui]).squaredNorm() - inst.c[i];
    }
    return phi;
}

/// Row i is 2 (B_i x - b_i)^T B_i.
inline Mat jacobian(const Instance& inst, const Vec& x)
{
    Mat J(inst.m(), inst.n());
    for (Index i = 0; i < inst.m(); ++i) {
        const auto ui = static_cast<std::size_t>(i);
        J.row(i) = 2.0 * (inst.B[ui].transpose() * (inst.B[ui] * x - inst.b[ui])).transpose();
    }
    return J;
}

namespace detail
{

inline void assemble_x_system(const Normal& nrm, const Vec& lambda, const Vec& anchor, double r, Mat& H, Vec& rhs)
{
    H = 2.0 * nrm.AtA;
    rhs = 2.0 * nrm.Ata;
    for (std::size_t i = 0; i < nrm.BtB.size(); ++i) {
        const double li = lambda[static_cast<Index>(i)];
        if (li == 0.0) continue;
        H.noalias() += 2.0 * li * nrm.BtB[i];
        rhs.noalias() += 2.0 * li * nrm.Btb[i];
    }
    H.diagonal().array() += r;
    rhs.noalias() += r * anchor;
}

inline std::string describe_multipliers(const Vec& lambda)
{
    std::ostringstream os;
    bool first = true;
    for (Index i = 0; i < lambda.size(); ++i) {
        if (lambda[i] < 0.0) {
            os << (first ? "" : ", ") << "lambda[" << i << "]=" << lambda[i];
            first = false;
        }
    }
    return first ? std::string("none negative") : os.str();
}

inline Vec solve_x_system(const Normal& nrm, const Vec& lambda, const Vec& anchor, double r,
                          std::atomic<bool>* warned = nullptr)
{
    Mat H;
    Vec rhs;
    assemble_x_system(nrm, lambda, anchor, r, H, rhs);
    Eigen::LLT<Mat> llt(H);
    if (llt.info() != Eigen::Success) {
        throw SolverError("x-update system is not positive definite; offending multipliers: " +
                          describe_multipliers(lambda));
    }
    // condition estimate from the Cholesky diagonal
    const Vec d = llt.matrixL().toDenseMatrix().diagonal();
    const double cond = std::pow(d.maxCoeff() / d.minCoeff(), 2);
    if (cond > 1e12 && !(warned && warned->exchange(true))) {
        std::cerr << "nlppa: warning: x-update system condition estimate " << cond << " exceeds 1e12\n";
    }
    return llt.solve(rhs);
}

} // namespace detail

/**
 * x-update of both methods:
 * (2 A^T A + 2 sum lambda_i B_i^T B_i + r I) x = 2 A^T a + 2 sum lambda_i B_i^T b_i + r anchor.
 */
inline Vec closed_form_x_update(const Instance& inst, const Vec& lambda, const Vec& anchor, double r)
{
    if (lambda.size() != inst.m() || anchor.size() != inst.n()) {
        throw InvalidInput("closed_form_x_update: dimension mismatch");
    }
    if (!(r >= 0.0)) throw InvalidParameter("closed_form_x_update: r must be nonnegative");
    return detail::solve_x_system(Normal(inst), lambda, anchor, r);
}

/// Relaxed-PPA multiplier update with the linearization term.
inline Vec closed_form_lambda_ppa(const Instance& inst, const Vec& x_tilde, const Vec& x_k, const Vec& lambda_k,
                                  double s, DualCone cone = DualCone::NonNegative)
{
    if (!(s > 0.0)) throw InvalidParameter("closed_form_lambda_ppa: s must be positive");
    Vec out(inst.m());
    for (Index i = 0; i < inst.m(); ++i) {
        const auto ui = static_cast<std::size_t>(i);
        const Vec res = inst.B[ui] * x_tilde - inst.b[ui];
        const double lin = 2.0 * res.dot(inst.B[ui] * (x_tilde - x_k));
        const double hat = lambda_k[i] + (res.squaredNorm() - inst.c[i] + lin) / s;
        out[i] = cone == DualCone::NonNegative ? std::max(hat, 0.0) : std::min(hat, 0.0);
    }
    return out;
}

/// PC prediction multiplier update (no linearization term).
inline Vec closed_form_lambda_pc(const Instance& inst, const Vec& x_tilde, const Vec& lambda_k, double s,
                                 DualCone cone = DualCone::NonNegative)
{
    if (!(s > 0.0)) throw InvalidParameter("closed_form_lambda_pc: s must be positive");
    Vec out(inst.m());
    for (Index i = 0; i < inst.m(); ++i) {
        const auto ui = static_cast<std::size_t>(i);
        const double hat = lambda_k[i] + ((inst.B[ui] * x_tilde - inst.b[ui]).squaredNorm() - inst.c[i]) / s;
        out[i] = cone == DualCone::NonNegative ? std::max(hat, 0.0) : std::min(hat, 0.0);
    }
    return out;
}

/// ProblemSpec view of an instance. compat_signs flips the dual cone to R^m_-.
inline ProblemSpec qcqp_problem(const Instance& inst, bool compat_signs = false)
{
    inst.validate();
    auto data = std::make_shared<const Instance>(inst);
    auto nrm = std::make_shared<const Normal>(inst);
    auto warned = std::make_shared<std::atomic<bool>>(false);
    ProblemSpec p;
    p.n = inst.n();
    p.m = inst.m();
    p.cone = compat_signs ? DualCone::NonPositive : DualCone::NonNegative;
    p.objective = [data](const Vec& x) { return objective(*data, x); };
    p.gradient = [nrm](const Vec& x) -> Vec { return 2.0 * (nrm->AtA * x - nrm->Ata); };
    p.constraints = [data](const Vec& x) { return constraint_values(*data, x); };
    p.jacobian = [data](const Vec& x) { return jacobian(*data, x); };
    p.project_x = [](const Vec& x) { return x; };
    p.prox_solver = [nrm, warned](const Vec& lambda, const Vec& anchor, double r) {
        return detail::solve_x_system(*nrm, lambda, anchor, r, warned.get());
    };
    p.unconstrained_minimizer = [data]() -> Vec { return data->A.colPivHouseholderQr().solve(data->a); };
    return p;
}

// ---------------------------------------------------------------------------
// Serialization: {n, m, seed, A (row-major), a, B (list, row-major), b (list), c}

namespace detail
{

inline nlohmann::json matrix_to_json(const Mat& M)
{
    std::vector<double> flat;
    flat.reserve(static_cast<std::size_t>(M.size()));
    for (Index i = 0; i < M.rows(); ++i)
        for (Index j = 0; j < M.cols(); ++j) flat.push_back(M(i, j));
    return flat;
}

inline nlohmann::json vector_to_json(const Vec& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

inline const nlohmann::json& require(const nlohmann::json& j, const char* key, const std::string& where)
{
    if (!j.is_object() || !j.contains(key)) throw FormatError(where + ": missing field '" + key + "'");
    return j.at(key);
}

inline std::vector<double> read_numbers(const nlohmann::json& j, const std::string& where, std::size_t expected)
{
    if (!j.is_array()) throw FormatError(where + ": expected an array");
    if (j.size() != expected) {
        throw FormatError(where + ": expected " + std::to_string(expected) + " numbers, found " +
                          std::to_string(j.size()));
    }
    std::vector<double> out;
    out.reserve(expected);
    for (std::size_t i = 0; i < j.size(); ++i) {
        if (!j[i].is_number()) throw FormatError(where + "[" + std::to_string(i) + "]: not a number");
        out.push_back(j[i].get<double>());
    }
    return out;
}

inline Mat read_matrix(const nlohmann::json& j, const std::string& where, Index n)
{
    const auto flat = read_numbers(j, where, static_cast<std::size_t>(n * n));
    Mat M(n, n);
    for (Index i = 0; i < n; ++i)
        for (Index k = 0; k < n; ++k) M(i, k) = flat[static_cast<std::size_t>(i * n + k)];
    return M;
}

inline Vec read_vector(const nlohmann::json& j, const std::string& where, Index n)
{
    const auto flat = read_numbers(j, where, static_cast<std::size_t>(n));
    return Eigen::Map<const Vec>(flat.data(), n);
}

} // namespace detail

inline nlohmann::json to_json(const Instance& inst)
{
    nlohmann::json j;
    j["n"] = inst.n();
    j["m"] = inst.m();
    j["seed"] = inst.seed;
    j["A"] = detail::matrix_to_json(inst.A);
    j["a"] = detail::vector_to_json(inst.a);
    j["B"] = nlohmann::json::array();
    j["b"] = nlohmann::json::array();
    for (Index i = 0; i < inst.m(); ++i) {
        j["B"].push_back(detail::matrix_to_json(inst.B[static_cast<std::size_t>(i)]));
        j["b"].push_back(detail::vector_to_json(inst.b[static_cast<std::size_t>(i)]));
    }
    j["c"] = detail::vector_to_json(inst.c);
    return j;
}

inline Instance from_json(const nlohmann::json& j)
{
    const std::string root = "instance";
    const auto& jn = detail::require(j, "n", root);
    const auto& jm = detail::require(j, "m", root);
    if (!jn.is_number_integer() || !jm.is_number_integer()) throw FormatError(root + ": n and m must be integers");
    const Index n = jn.get<Index>();
    const Index m = jm.get<Index>();
    if (n < 1 || m < 0) throw FormatError(root + ": need n >= 1 and m >= 0");

    Instance inst;
    inst.seed = j.contains("seed") ? j.at("seed").get<std::uint64_t>() : 0;
    inst.A = detail::read_matrix(detail::require(j, "A", root), "A", n);
    inst.a = detail::read_vector(detail::require(j, "a", root), "a", n);
    const auto& jB = detail::require(j, "B", root);
    const auto& jb = detail::require(j, "b", root);
    if (!jB.is_array() || jB.size() != static_cast<std::size_t>(m)) throw FormatError("B: expected m matrices");
    if (!jb.is_array() || jb.size() != static_cast<std::size_t>(m)) throw FormatError("b: expected m vectors");
    for (Index i = 0; i < m; ++i) {
        const auto ui = static_cast<std::size_t>(i);
        inst.B.push_back(detail::read_matrix(jB[ui], "B[" + std::to_string(i) + "]", n));
        inst.b.push_back(detail::read_vector(jb[ui], "b[" + std::to_string(i) + "]", n));
    }
    inst.c = detail::read_vector(detail::require(j, "c", root), "c", m);
    return inst;
}

/// Parses serialized text; syntax errors report the byte offset.
inline Instance parse_instance(const std::string& text)
{
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw FormatError("instance parse error at byte " + std::to_string(e.byte) + ": " + e.what());
    }
    try {
        return from_json(j);
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(std::string("instance: ") + e.what());
    }
}

} // namespace nlppa::qcqp

#endif // NLPPA_QCQP_HPP
