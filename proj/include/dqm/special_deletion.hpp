#pragma once

#include <vector>

#include "dqm/families.hpp"
#include "dqm/hamiltonian.hpp"

namespace dqm {

// Deforming polynomial of depth ell: closed form when the family implements
// one, otherwise the normalized Casoratian of P_1..P_ell.
Real xi_ell(const Family& fam, const ParameterSet& lambda, int ell, Real x);

// Relative deviation between the closed form and the Casoratian definition.
Real xi_vs_casoratian_residual(const Family& fam, const ParameterSet& lambda, int ell, Real x);

// Residual of the depth recurrence
//   B(0; l+ell d) xi_{ell+1}(x) = B(x; l+ell d) varphi(x; l+ell d) xi_ell(x)
//                               - D(x; l+ell d) varphi(x-1; l+ell d) xi_ell(x+1).
Real xi_recurrence_residual(const Family& fam, const ParameterSet& lambda, int ell, Real x);

// System with levels 1..ell deleted, built from the deforming polynomial.
struct SpecialDeletedSystem {
    const Family* fam = nullptr;
    ParameterSet lambda;
    GridSpec base_grid;
    int ell = 0;
    int xbar_max = 0;

    Vector xi;                   // xi_ell(x) on [0, xbar_max + 1]
    Vector bl, dl;               // potentials on [0, xbar_max]
    Vector phi_l0;               // ground state, unnormalized convention (phi(0) != 1)
    Real c_const = 0;            // C(ell, lambda)
    std::vector<int> levels;     // 0, ell+1, ..., level cap
    std::vector<Vector> pl;      // P_{ell,n} tables on [0, xbar_max]
    Vector dln_sq;               // closed-form norms for `levels`
    Real xi_positivity_margin = 0;
    bool hermitian = true;       // even ell

    JacobiSystem system() const;
    Real energy(int n) const { return fam->energy(n, lambda); }
    Real f_ln(int n) const;      // forward factor f_{ell,n}
    Real b_ln(int n) const;      // backward factor b_{ell,n}
};

// Odd ell is constructible only with allow_odd; hermiticity-dependent data is
// then flagged off.
SpecialDeletedSystem build_special(const Family& fam, const ParameterSet& lambda,
                                   const GridSpec& grid, int ell, bool allow_odd = false,
                                   const NumericPolicy& policy = default_policy());

// P_{ell,n} from the two-term expression in B, D, xi and the shifted
// polynomial; cross-checked against the Casoratian definition.
struct ModifiedPolynomial {
    Vector values;               // on [0, xbar_max]
    Real casoratian_dev = 0;     // vs the determinant definition
    Real normalization_dev = 0;  // |P_{ell,n}(0) - 1|
};

ModifiedPolynomial modified_polynomials(const Family& fam, const ParameterSet& lambda,
                                        const GridSpec& grid, int ell, int n,
                                        const NumericPolicy& policy = default_policy());

struct ShiftOperatorReport {
    Real forward_dev = 0;        // A_l phi_{l,n} vs f_{l,n} phi_{n-l-1}(lambda + (l+1) delta)
    Real backward_dev = 0;
    Real factor_dev = 0;         // f_{l,n} b_{l,n-1} vs E(n)
    Real energy_relation_dev = 0;
    Real partner_hamiltonian_dev = 0;  // A_l A_l^T vs kappa^{l+1} H(lambda+(l+1)delta) + E(l+1)
    bool pass = false;
};

ShiftOperatorReport shift_operator_checks(const SpecialDeletedSystem& sys, int n,
                                          const NumericPolicy& policy = default_policy());

// d_{ell,n}^2 closed form and its direct-summation cross-check.
struct SpecialNorm {
    Real closed_form = 0;
    Real summed = 0;
    Real rel_dev = 0;
};

SpecialNorm special_norms(const SpecialDeletedSystem& sys, int n);

// Report JSON mirroring the deletion report, plus depth, C(ell, lambda) and
// the deforming-polynomial positivity margin.
std::string special_report_json(const SpecialDeletedSystem& sys,
                                const NumericPolicy& policy = default_policy());

}  // namespace dqm
