#include "dqm/qseries.hpp"

#include <cmath>

namespace dqm {

Real pochhammer(Real a, int k) {
    Real p = 1;
    for (int j = 0; j < k; ++j) p *= a + static_cast<Real>(j);
    return p;
}

Real q_pochhammer(Real a, Real q, int k) {
    Real p = 1;
    Real aq = a;
    for (int j = 0; j < k; ++j) {
        p *= 1 - aq;
        aq *= q;
    }
    return p;
}

Real q_pochhammer_inf(Real a, Real q, Real tail_tol) {
    if (!(std::fabs(q) < 1)) throw OutOfDomain("q", "|q| < 1 required for (a;q)_inf");
    Real p = 1;
    Real aq = a;
    for (int j = 0; j < 100000; ++j) {
        if (std::fabs(aq) < tail_tol) break;
        p *= 1 - aq;
        aq *= q;
    }
    return p;
}

Real hypergeometric_sum(const std::vector<Real>& num, const std::vector<Real>& den, Real z,
                        int terms) {
    Real sum = 1;
    Real term = 1;
    for (int k = 0; k < terms; ++k) {
        Real ratio = z / static_cast<Real>(k + 1);
        for (Real a : num) ratio *= a + static_cast<Real>(k);
        for (Real b : den) {
            const Real bk = b + static_cast<Real>(k);
            if (bk == 0) throw EvaluationSingularity(b, "hypergeometric denominator pole");
            ratio /= bk;
        }
        term *= ratio;
        sum += term;
        if (term == 0) break;  // series terminated early
    }
    return sum;
}

Real basic_hypergeometric_sum(const std::vector<Real>& num, const std::vector<Real>& den, Real q,
                              Real z, int terms) {
    const int twist = 1 + static_cast<int>(den.size()) - static_cast<int>(num.size());
    Real sum = 1;
    Real term = 1;
    Real qk = 1;  // q^k
    for (int k = 0; k < terms; ++k) {
        Real ratio = z / (1 - q * qk);  // 1/(q;q) factor advanced to k+1
        for (Real a : num) ratio *= 1 - a * qk;
        for (Real b : den) {
            const Real bq = 1 - b * qk;
            if (bq == 0) throw EvaluationSingularity(b, "basic hypergeometric denominator pole");
            ratio /= bq;
        }
        if (twist != 0) {
            // ((-1)^k q^C(k,2)) advanced from k to k+1 multiplies by -q^k.
            Real f = -qk;
            Real fp = 1;
            for (int t = 0; t < std::abs(twist); ++t) fp *= f;
            ratio *= (twist > 0) ? fp : 1 / fp;
        }
        term *= ratio;
        sum += term;
        qk *= q;
        if (term == 0) break;
    }
    return sum;
}

}  // namespace dqm
