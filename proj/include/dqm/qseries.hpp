#pragma once

#include <initializer_list>
#include <vector>

#include "dqm/core.hpp"

namespace dqm {

// Rising factorial (a)_k.
Real pochhammer(Real a, int k);

// q-shifted factorial (a;q)_k.
Real q_pochhammer(Real a, Real q, int k);

// (a;q)_infinity, product truncated once the remaining factors differ from 1
// by less than tail_tol.
Real q_pochhammer_inf(Real a, Real q, Real tail_tol = default_policy().tail_tol);

// Terminating generalized hypergeometric sum
//   rFs(num; den; z) = sum_{k=0}^{terms} prod (num_i)_k / ((k)! prod (den_j)_k) z^k.
// `terms` is the last retained index; callers pass the termination order of
// the series (some numerator entry is a non-positive integer).
Real hypergeometric_sum(const std::vector<Real>& num, const std::vector<Real>& den, Real z,
                        int terms);

// Terminating basic hypergeometric sum
//   rphis(num; den; q; z) with the standard ((-1)^k q^(k(k-1)/2))^(1+s-r) factor.
Real basic_hypergeometric_sum(const std::vector<Real>& num, const std::vector<Real>& den, Real q,
                              Real z, int terms);

}  // namespace dqm
