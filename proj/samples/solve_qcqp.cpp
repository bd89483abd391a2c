// Solves one random QCQP with the three methods and compares against the exact solution.

#include <iomanip>
#include <iostream>

#include "nlppa/nlppa.hpp"

int main()
{
    using namespace nlppa;

    const qcqp::Instance inst = qcqp::generate_instance(2, 5, 1);
    const ProblemSpec p = qcqp::qcqp_problem(inst);
    const PrimalDualPoint star = qcqp::oracle_solve(inst);

    RelaxedPpaConfig ppa;
    ppa.gamma = 1.0;
    ppa.kkt_tol = 1e-8;
    RelaxedPpaConfig rppa = ppa;
    rppa.gamma = 1.5;
    PcConfig pc;
    pc.kkt_tol = 1e-8;

    const RunResult runs[] = {run_relaxed_ppa(p, ppa), run_relaxed_ppa(p, rppa), run_pc(p, pc)};
    const char* names[] = {"customized PPA", "relaxed PPA", "prediction-correction"};

    std::cout << std::setprecision(6) << std::scientific;
    std::cout << "f* = " << p.objective(star.x) << "\n";
    for (int i = 0; i < 3; ++i) {
        const RunResult& r = runs[i];
        std::cout << std::left << std::setw(24) << names[i] << " iter " << std::setw(6) << r.iterations
                  << " |x - x*| " << (r.w.x - star.x).norm() << "  kkt " << kkt_residual(p, r.w).value << "\n";
    }
    return 0;
}
