#pragma once

#include <memory>
#include <mutex>
#include <string>

#include "dqm/families.hpp"
#include "dqm/linalg.hpp"

namespace dqm {

struct WaveFunction {
    Vector values;    // over [0, x_max]
    Vector log_sq;    // log of the squared entries where available (underflow-safe)

    Real at(int x) const { return values.at(static_cast<size_t>(x)); }
    int size() const { return static_cast<int>(values.size()); }
};

// Symmetric tridiagonal Hamiltonian assembled from (B, D) samples.
class JacobiSystem {
public:
    JacobiSystem(Vector bpot, Vector dpot, GridSpec grid);

    int dim() const { return static_cast<int>(diag_.size()); }
    const GridSpec& grid() const { return grid_; }
    const Vector& bpot() const { return bpot_; }
    const Vector& dpot() const { return dpot_; }
    const Vector& diag() const { return diag_; }
    const Vector& offdiag() const { return offdiag_; }

    Matrix dense() const;

    // Compute-once eigensystem, safe under concurrent first access.
    const Eigensystem& eigensystem() const;

private:
    // compute-once cache shared across copies; the system itself is immutable
    struct EigCache {
        std::once_flag once;
        std::unique_ptr<Eigensystem> eig;
    };

    GridSpec grid_;
    Vector bpot_, dpot_;
    Vector diag_, offdiag_;
    std::shared_ptr<EigCache> cache_ = std::make_shared<EigCache>();
};

JacobiSystem build(const Family& fam, const ParameterSet& lambda, const GridSpec& grid);

// phi_0(x) = sqrt(prod_{y<x} B(y)/D(y+1)), phi_0(0) = 1, via log-space sums.
WaveFunction ground_state(const Family& fam, const ParameterSet& lambda, const GridSpec& grid);

// phi_n = phi_0 * P_n(eta) from the closed forms, on [0, x_hi] (extended
// points allowed; finite families continue by the exact zero of phi_0 above N).
Vector eigenfunction_table(const Family& fam, const ParameterSet& lambda, int n, int x_hi);

struct Factorization {
    Vector sqrt_b;  // diagonal of A
    Vector sqrt_d;  // superdiagonal magnitudes: A(x, x+1) = -sqrt_d[x+1]

    Matrix a_dense() const;
    Matrix a_dagger_dense() const;
    Vector apply_a(const Vector& f) const;         // (A f)(x) = sqrt(B(x)) f(x) - sqrt(D(x+1)) f(x+1)
    Vector apply_a_dagger(const Vector& f) const;  // grows the domain by one at the top
};

// Throws NegativePotential if a square-root argument is negative beyond
// positivity_tol.
Factorization factorize(const JacobiSystem& sys,
                        const NumericPolicy& policy = default_policy());

// Action of the similarity-transformed operator on samples over [0, x_max+1]
// (one extra point so truncated grids stay exact): result on [0, x_max],
//   (H~ f)(x) = B(x)(f(x) - f(x+1)) + D(x)(f(x) - f(x-1)).
Vector apply_similarity_transform(const JacobiSystem& sys, const Vector& f_ext);

// Dense H~ matrix (finite truncation), similar to the symmetric form.
Matrix similarity_matrix(const JacobiSystem& sys);

// Spectrum report against the closed-form energies.
struct SpectrumReport {
    std::string family_id;
    Vector eigenvalues;
    Vector closed_form;
    int levels_checked = 0;  // truncated grids only resolve the low levels
    Real max_residual = 0;
    bool pass = false;
};

SpectrumReport spectrum_report(const Family& fam, const ParameterSet& lambda, const GridSpec& grid,
                               const NumericPolicy& policy = default_policy());

std::string spectrum_report_json(const SpectrumReport& report, const ParameterSet& lambda);

}  // namespace dqm
