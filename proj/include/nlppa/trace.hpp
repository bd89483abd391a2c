#ifndef NLPPA_TRACE_HPP
#define NLPPA_TRACE_HPP

#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "nlppa/errors.hpp"
#include "nlppa/params.hpp"
#include "nlppa/problem.hpp"

namespace nlppa
{

enum class Method
{
    RelaxedPpa,
    PredictionCorrection
};

/// Corrective matrix of the PC method.
enum class Corrector
{
    UpperTriangular, // M = [[I, -J^T/r], [0, I]], Sigma = diag(r I, s I)
    LowerTriangular  // M = [[I, 0], [J/s, I]]
};

inline const char* corrector_name(Corrector c)
{
    return c == Corrector::UpperTriangular ? "upper" : "lower";
}

/// Scalars kept for every iteration.
struct IterationRecord
{
    long k = 0;
    double f_value = 0.0;      // f(x^{k+1})
    double error = 0.0;        // |f(x^k) - f(x^{k+1})|
    double kkt_residual = 0.0; // at w^{k+1}
    double r = 0.0;
    double s = 0.0;
    double beta_or_gamma = 0.0;
    double beta_star = std::numeric_limits<double>::quiet_NaN(); // PC only
    double sigma_norm_of_step = 0.0;                             // ||w~^k - w^k||_{Sigma_k}
    bool g_pd = true;                                            // PC: (2 - beta)^2 r s > ||J||^2
    double subproblem_seconds = 0.0;
};

/// Full per-iteration state, retained only when diagnostics are on.
struct IterationSnapshot
{
    Vec w;          // w^k
    Vec w_tilde;    // predictor
    Vec w_next_raw; // relaxation/correction output before re-projection
    Vec w_next;     // w^{k+1}
    Mat J_tilde;    // D Phi(x~^k)
};

struct IterationTrace
{
    Method method = Method::RelaxedPpa;
    Corrector corrector = Corrector::LowerTriangular;
    std::string param_mode = "adaptive";
    Index n = 0;
    Index m = 0;
    std::vector<IterationRecord> records;
    std::vector<IterationSnapshot> snapshots;

    // ergodic accumulators
    Vec sum_x_tilde;
    Vec sum_w_tilde;
    long predictor_count = 0;

    bool has_snapshots() const { return !snapshots.empty() && snapshots.size() == records.size(); }
    std::size_t iterations() const { return records.size(); }

    void reset(Index n_, Index m_)
    {
        n = n_;
        m = m_;
        records.clear();
        snapshots.clear();
        sum_x_tilde = Vec::Zero(n_);
        sum_w_tilde = Vec::Zero(n_ + m_);
        predictor_count = 0;
    }

    void accumulate(const PrimalDualPoint& w_tilde)
    {
        sum_x_tilde += w_tilde.x;
        sum_w_tilde += w_tilde.stacked();
        ++predictor_count;
    }
};

/// Outcome of a solver run.
struct RunResult
{
    PrimalDualPoint w;
    IterationTrace trace;
    bool converged = false;
    long iterations = 0;
    double final_error = std::numeric_limits<double>::quiet_NaN();
    double total_seconds = 0.0;
    double max_subproblem_seconds = 0.0;
};

/// (1/(1+t)) sum_{k=0..t} w~^k over all recorded predictors.
inline PrimalDualPoint ergodic_average(const IterationTrace& trace)
{
    if (trace.predictor_count < 1) throw InvalidInput("ergodic_average: trace holds no predictor");
    const Vec avg = trace.sum_w_tilde / static_cast<double>(trace.predictor_count);
    return PrimalDualPoint::unstack(avg, trace.n);
}

} // namespace nlppa

#endif // NLPPA_TRACE_HPP
