// Constant regularization on an affine-constrained least-squares problem and
// the ergodic gap of the predictor average.

#include <iostream>

#include "nlppa/nlppa.hpp"

int main()
{
    using namespace nlppa;

    const linear::Instance inst = linear::generate_instance(3, 6, 11);
    const ProblemSpec p = linear::problem(inst);
    const PrimalDualPoint star = linear::oracle_solve(inst);

    const double g = spectral_norm(inst.G);
    RelaxedPpaConfig cfg;
    cfg.gamma = 1.5;
    cfg.rule = FixedRule{1.1 * g, 1.1 * g};
    cfg.max_iters = 500;
    cfg.tau = 1e-14;
    cfg.diagnostics = true;

    const RunResult res = run_relaxed_ppa(p, cfg);
    const ErgodicReport rep = check_ergodic_gap(p, res.trace, star, ErgodicMode::Ppa);

    std::cout << "iterations " << res.iterations << ", |x - x*| = " << (res.w.x - star.x).norm() << "\n";
    for (std::size_t t : {0ul, 9ul, 99ul}) {
        if (t >= rep.series.size()) break;
        const ErgodicPoint& pt = rep.series[t];
        std::cout << "t=" << pt.t << "  gap " << pt.gap << "  bound " << pt.bound << "\n";
    }
    std::cout << (rep.passed() ? "bound holds" : "bound violated") << "\n";
    return 0;
}
