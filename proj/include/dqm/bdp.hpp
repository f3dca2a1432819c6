#pragma once

#include <string>

#include "dqm/hamiltonian.hpp"
#include "dqm/linalg.hpp"

namespace dqm {

// Birth-death transition kernel p(x, y; t) for the chain with birth rates
// B(x) and death rates D(x).
struct TransitionKernel {
    Real t = 0;
    Matrix p;                 // rows x, columns y
    Real spectral_residual = 0;  // max |expm path - spectral path|
    Real row_sum_dev = 0;        // max |row sum - 1|
};

// Generator in the polynomial gauge: rows of -(B(x)(1-e^d)+D(x)(1-e^-d)) sum
// to zero, so the kernel is stochastic.  Computed two ways (scaled-and-squared
// exponential, spectral expansion through the symmetric form) which must
// agree to tolerance.  Requires a hermitian finite system; works for barred
// systems too since their assembled matrix carries the zero mode at 0.
TransitionKernel transition_kernel(const JacobiSystem& sys, Real t,
                                   const NumericPolicy& policy = default_policy());

std::string kernel_csv(const TransitionKernel& k);

struct DecayReport {
    Real fitted_rate = 0;    // log-linear fit of p(0,0;t) - p(0,0;inf)
    Real expected_rate = 0;  // smallest positive eigenvalue of the generator
    Real rel_dev = 0;
};

DecayReport decay_rate_report(const JacobiSystem& sys,
                              const NumericPolicy& policy = default_policy());

std::string decay_report_json(const DecayReport& rep);

}  // namespace dqm
