#pragma once

#include <vector>

#include "dqm/families.hpp"
#include "dqm/hamiltonian.hpp"

namespace dqm {

// State after s ground-state deletions. Tables may extend past the physical
// top `x_max_s` (truncated grids keep constant headroom so every step can
// evaluate its potentials on the full physical range).
struct CrumChainState {
    int s = 0;
    int x_max_s = 0;            // physical top of the reduced grid
    bool finite = true;
    std::vector<int> levels;    // surviving levels, levels.front() == s
    Vector energies;            // E(n) for n in levels
    Vector b, d;                // potentials, b[x] for x in [0, table_top], d likewise
    std::vector<Vector> phi;    // phi[k] = phi^{[s]}_{levels[k]} on [0, table_top]

    int table_top() const { return static_cast<int>(b.size()) - 1; }
    Real e_offset() const { return e_offset_; }
    Real e_offset_ = 0;  // H^{[s]} = A^{[s]+} A^{[s]} + E(s)

    JacobiSystem system() const;  // on the physical range [0, x_max_s]
};

// Initial state (s = 0) from the closed forms; level_cap bounds the carried
// levels for truncated grids.
CrumChainState crum_initial(const Family& fam, const ParameterSet& lambda, const GridSpec& grid,
                            int level_cap = -1);

// One ground-state deletion.  Throws NonPositivePotential when positivity of
// the new potentials or of the new ground state fails beyond tolerance.
CrumChainState crum_step(const CrumChainState& state,
                         const NumericPolicy& policy = default_policy());

// Full history (states 0..s).
std::vector<CrumChainState> crum_chain(const Family& fam, const ParameterSet& lambda,
                                       const GridSpec& grid, int s, int level_cap = -1,
                                       const NumericPolicy& policy = default_policy());

enum class CrumVariant { BPrefactor, DPrefactor };

// phi_n^{[s]}(x) from the Casorati-determinant representation, using the
// per-step potentials recorded in `history`.  Throws ZeroDenominator when the
// denominator Casoratian vanishes.
Real crum_determinant_eigenfunction(const Family& fam, const ParameterSet& lambda,
                                    const std::vector<CrumChainState>& history, int s, int n,
                                    int x, CrumVariant variant);

struct ShapeInvarianceReport {
    Real b_dev = 0;           // B^{[1]}(x; lambda) vs kappa B(x; lambda+delta)
    Real d_dev = 0;
    Real cond1_dev = 0;       // geometric-mean condition
    Real cond2_dev = 0;       // trace condition
    Real energy_sum_dev = 0;  // E(n) vs sum_s kappa^s E(1; lambda+s delta)
    bool pass = false;
};

// `perturb_b` adds a constant to the computed B^{[1]} before comparison
// (sensitivity checks).
ShapeInvarianceReport verify_shape_invariance(const Family& fam, const ParameterSet& lambda,
                                              const GridSpec& grid,
                                              const NumericPolicy& policy = default_policy(),
                                              Real perturb_b = 0);

// phi_n built by the shape-invariant cascade of raising operators applied to
// the shifted-parameter ground state; unnormalized.
WaveFunction rodrigues_wavefunction(const Family& fam, const ParameterSet& lambda,
                                    const GridSpec& grid, int n);

struct CrumPolynomialTables {
    int s = 0;
    Vector eta_s;               // eta^{[s]}(x) = sum_k eta(x+k) on [0, x_max - s + 1]
    std::vector<int> levels;
    std::vector<Vector> rows;   // P^{[s]}_n(x) on [0, x_max - s]
};

// Divided-difference tables for the polynomial parts of the chain
// eigenfunctions; requires phi_1/phi_0 affine in eta (AffineCheckFailed).
CrumPolynomialTables crum_polynomial_tables(const Family& fam, const ParameterSet& lambda,
                                            const GridSpec& grid, int s,
                                            const std::vector<int>& levels,
                                            const NumericPolicy& policy = default_policy());

// Chain report (per-step spectra, residuals, positivity margins) as JSON.
std::string chain_report_json(const Family& fam, const ParameterSet& lambda,
                              const std::vector<CrumChainState>& history,
                              const NumericPolicy& policy = default_policy());

}  // namespace dqm
