#pragma once

#include <string>
#include <vector>

#include "dqm/core.hpp"

namespace dqm {

class Family;
struct DeletedSystem;

// Q_x(E) for x in [0, x_max] from the three-term recurrence
//   B(x)(Q_x - Q_{x+1}) + D(x)(Q_x - Q_{x-1}) = E Q_x,  Q_0 = 1, Q_{-1} = 0.
// b and d are sampled on [0, x_max]; throws ZeroLeadingCoefficient if some
// B(x), x < x_max, vanishes.
Vector dual_recurrence(const Vector& b, const Vector& d, Real energy);

// Values Q_x(E(n)) (or the deformed version when built from barred
// potentials) for x rows and a level set of columns.
struct DualTable {
    std::vector<int> levels;
    std::vector<Vector> columns;  // columns[k][x] = Q_x(E(levels[k]))
    bool deformed = false;
    Real q0_dev = 0;  // max |Q_x(0) - 1| over x (universal normalization)
};

DualTable dual_table(const Vector& b, const Vector& d, const std::vector<int>& levels,
                     const Vector& energies, bool deformed = false);

// max over (n, x) of |P_n(eta(x)) - Q_x(E(n))|, plus the dual orthogonality
// residual of sum_n d_n^2 Q_x Q_y = delta_xy / phi_0(x)^2.
struct DualityReport {
    Real duality_dev = 0;
    Real dual_orthogonality_dev = 0;  // relative
    bool pass = false;
};

DualityReport duality_check(const Family& fam, const ParameterSet& lambda, const GridSpec& grid,
                            const NumericPolicy& policy = default_policy());

// mu = 0 case: checks the deformed duality P_n/P_0 = p_n Q_x(E(n)) and the
// deformed dual orthogonality including the prod E(d_j)^2 factor.
struct DeformedDualityReport {
    Real duality_dev = 0;           // relative, against p_n * Q
    Real orthogonality_dev = 0;     // relative
    Real q0_dev = 0;                // |Q_x(0) - 1|
    std::vector<Real> p_factors;    // p_n for surviving levels
    std::vector<int> levels;
    bool pass = false;
};

DeformedDualityReport deformed_duality_check(const DeletedSystem& ds,
                                             const NumericPolicy& policy = default_policy());

// Elementary kernel-polynomial step at node a:
//   P~_n(y) = (P_{n+1}(y) - A_n P_n(y)) / (y - a),  A_n = P_{n+1}(a)/P_n(a).
// `eval(n, y)` supplies polynomial values. Throws NodeZero if P_n(a) = 0.
// The removable singularity at y = a is evaluated by adjacent-point
// interpolation.
template <typename Eval>
Vector elementary_christoffel(Eval&& eval, Real a, int n, const Vector& ys) {
    const Real pna = eval(n, a);
    if (pna == 0) throw NodeZero("kernel node coincides with a zero of P_n");
    const Real an = eval(n + 1, a) / pna;
    Vector out(ys.size());
    for (size_t i = 0; i < ys.size(); ++i) {
        const Real y = ys[i];
        if (std::fabs(y - a) > 1e-9L) {
            out[i] = (eval(n + 1, y) - an * eval(n, y)) / (y - a);
        } else {
            const Real h = 1e-5L * (1 + std::fabs(a));
            const Real left = (eval(n + 1, a - h) - an * eval(n, a - h)) / (-h);
            const Real right = (eval(n + 1, a + h) - an * eval(n, a + h)) / h;
            out[i] = (left + right) / 2;
        }
    }
    return out;
}

// Recomputes the deformed dual orthogonality sums with the transformed
// weights d_n^2 prod_j (E(n) - E(d_j)) and reports the residual.
struct WeightTransformationReport {
    std::vector<int> levels;
    std::vector<Real> weights;  // transformed dual weights
    Real orthogonality_dev = 0;
    bool weights_positive = false;
    bool pass = false;
};

WeightTransformationReport weight_transformation_report(
    const DeletedSystem& ds, const NumericPolicy& policy = default_policy());

// CSV export: rows x, columns E(n).
std::string dual_table_csv(const DualTable& table, const Vector& energies);

}  // namespace dqm
