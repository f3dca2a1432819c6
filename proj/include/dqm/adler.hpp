#pragma once

#include <string>
#include <vector>

#include "dqm/families.hpp"
#include "dqm/hamiltonian.hpp"

namespace dqm {

struct DeletionSet {
    std::vector<int> levels;  // sorted distinct non-negative integers
    bool admissible = false;
    int mu = 0;               // lowest surviving level
    bool contains_zero = false;

    int ell() const { return static_cast<int>(levels.size()); }
    bool contains(int n) const;
    // sum of the deleted levels
    int weight() const;
};

// Admissibility from the sign condition prod_j (m - d_j) >= 0 for all
// non-negative integers m (checked up to max(D)+1, which suffices).
DeletionSet validate_deletion(std::vector<int> levels, int n_max);

// Independent route: admissible iff the set splits into even-length clusters
// of contiguous integers, except that a cluster starting at 0 may have any
// length.
bool admissible_by_clusters(const std::vector<int>& sorted_levels);

// The barred system produced by deleting the level set.
struct DeletedSystem {
    const Family* fam = nullptr;
    ParameterSet lambda;
    GridSpec base_grid;
    DeletionSet deletion;

    int xbar_max = 0;
    Vector bbar, dbar;           // [0, xbar_max]
    std::vector<int> levels;     // surviving levels
    Vector energies;             // E(n) for the surviving levels
    std::vector<Vector> phibar;  // eigenfunctions on [0, xbar_max]
    Real e_mu = 0;

    // diagnostics
    Real realness_margin = 0;    // min of the weight-ratio data; < 0 flags sign trouble
    bool real_valued = true;

    const Vector& phibar_of(int n) const;
    Real norm_factor(int n) const;  // prod_j (E(n) - E(d_j))
    // Assembled barred Hamiltonian; throws NonHermitianSystem when the
    // off-diagonal products are negative.
    JacobiSystem system() const;
};

// Stepwise construction (one deletion at a time).  The chain is carried in a
// prefactor gauge: ratio tables u_{s,n} and w-ratio rho_s stay real through
// sign-indefinite intermediate steps; square roots are taken only at the
// final, hermitian stage.  `order`, when non-empty, fixes the deletion order
// (default ascending).
DeletedSystem adler_chain(const Family& fam, const ParameterSet& lambda, const GridSpec& grid,
                          const DeletionSet& deletion, bool unsafe = false,
                          std::vector<int> order = {},
                          const NumericPolicy& policy = default_policy());

// Direct Casorati-determinant construction from eigenfunction tables.
DeletedSystem barred_system_casoratian(const Family& fam, const ParameterSet& lambda,
                                       const GridSpec& grid, const DeletionSet& deletion,
                                       std::vector<int> order = {},
                                       const NumericPolicy& policy = default_policy());

// Polynomial route: Casoratians of the eigenpolynomials with B/D prefactors.
DeletedSystem polynomial_fast_path(const Family& fam, const ParameterSet& lambda,
                                   const GridSpec& grid, const DeletionSet& deletion,
                                   std::vector<int> order = {},
                                   const NumericPolicy& policy = default_policy());

// Deformed polynomial tables P(eta_{l-1}), P_mu(eta_l), P_n(eta_l) and the
// deformed weight, with fitted-degree verification.
struct DeformedPolynomials {
    int ell = 0;
    int mu = 0;
    Vector eta_lm1, eta_l;        // eta(x; lambda+(l-1)delta), eta(x; lambda+l delta)
    Vector p_table;               // P(eta_{l-1}(x)) on [0, xbar_max+1]
    Vector p_mu_table;            // P_mu(eta_l(x)) on [0, xbar_max]
    std::vector<int> levels;
    std::vector<Vector> p_n_tables;
    Vector weight;                // deformed weight psi(x)
    int p_degree = 0, p_mu_degree = 0;
    std::vector<int> p_n_degrees;
    Real orthogonality_dev = 0;   // relative residual of the deformed orthogonality
};

DeformedPolynomials deformed_polynomials(const DeletedSystem& ds, const std::vector<int>& levels,
                                         const NumericPolicy& policy = default_policy());

struct HermiticityReport {
    Real max_asymmetry = 0;        // max |H - H^T| of the assembled matrix
    Real min_bbar = 0;             // over x < xbar_max
    Real min_dbar = 0;             // over 1 <= x <= xbar_max
    Real min_offdiag_product = 0;  // min_x Bbar(x) Dbar(x+1)
    Real realness_margin = 0;
    bool pass = false;
};

HermiticityReport hermiticity_report(const DeletedSystem& ds,
                                     const NumericPolicy& policy = default_policy());

// Deletion report JSON (admissibility, spectra, hermiticity, norm factors).
std::string deletion_report_json(const DeletedSystem& ds,
                                 const NumericPolicy& policy = default_policy());

}  // namespace dqm
