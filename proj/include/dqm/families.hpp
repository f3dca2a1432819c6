#pragma once

#include <memory>
#include <string>
#include <vector>

#include "dqm/core.hpp"

namespace dqm {

// One concrete polynomial family: closed-form birth/death potentials B, D,
// energies E(n), sinusoidal coordinate eta, auxiliary function varphi, the
// eigenpolynomial series, and (when printed in the source tables) norm
// constants, shift factors and the deforming polynomial xi_ell.
//
// All evaluators are pure; x is real so the same code serves the physical
// grid, analytic continuation to extended points and twisted arguments.
class Family {
public:
    virtual ~Family() = default;

    virtual std::string id() const = 0;
    virtual bool finite() const = 0;
    virtual ParameterSet default_parameters() const = 0;

    // Named domain constraints; throws OutOfDomain. Does not sample the grid
    // (validate_parameters below adds the generic positivity sweep).
    virtual void check_domain(const ParameterSet& lambda) const = 0;

    virtual Real bpot(Real x, const ParameterSet& lambda) const = 0;
    virtual Real dpot(Real x, const ParameterSet& lambda) const = 0;
    virtual Real energy(int n, const ParameterSet& lambda) const = 0;
    virtual Real eta(Real x, const ParameterSet& lambda) const = 0;
    virtual Real varphi(Real x, const ParameterSet& lambda) const = 0;

    // P_n(eta(x; lambda); lambda) as a terminating (basic) hypergeometric sum.
    virtual Real poly(int n, Real x, const ParameterSet& lambda) const = 0;

    virtual bool has_dn_sq() const { return false; }
    virtual Real dn_sq(int /*n*/, const ParameterSet&) const {
        throw NotImplementedForFamily(id() + ": no closed-form d_n^2");
    }

    virtual bool has_shift_factors() const { return false; }
    virtual Real fn(int /*n*/, const ParameterSet&) const {
        throw NotImplementedForFamily(id() + ": no shift factors");
    }
    virtual Real bn(int /*n*/, const ParameterSet&) const {
        throw NotImplementedForFamily(id() + ": no shift factors");
    }

    virtual bool has_xi() const { return false; }
    virtual Real xi(int /*ell*/, Real /*x*/, const ParameterSet&) const {
        throw NotImplementedForFamily(id() + ": deforming polynomial not implemented");
    }

    // Grid size N for finite families, -1 otherwise.
    virtual int grid_n(const ParameterSet& lambda) const = 0;

    // Human-readable domain constraints, mirrored in check_domain.
    virtual std::string constraints() const { return ""; }

    // Leading coefficient c_n of P_n in eta.
    Real leading_coeff(int n, const ParameterSet& lambda) const;

    // Free-form metadata shown in the catalog (e.g. structure functions kept
    // as strings only).
    virtual std::vector<std::string> metadata() const { return {}; }
};

struct CatalogEntry {
    std::string id;
    bool implemented = false;  // full FamilySpec vs data stub
    bool finite = false;
    bool xi_implemented = false;
    bool most_generic = false;
    std::vector<std::string> parameters;
    std::string constraints;
    std::string xi_formula;  // recorded closed form for stubs
    std::string note;
};

const std::vector<CatalogEntry>& catalog_list();

// Implemented families only; throws OutOfDomain for unknown/stub ids.
const Family& family(const std::string& id);
std::vector<std::string> implemented_family_ids();

// Catalog as a JSON document string.
std::string catalog_json();

// ---------------------------------------------------------------------------
// Operations on validated families
// ---------------------------------------------------------------------------

// Named constraints plus a positivity sweep of B and D over the grid.
// Returns lambda unchanged on success.
ParameterSet validate_parameters(const std::string& family_id, const ParameterSet& lambda,
                                 const GridSpec& grid);

// Finite families: grid fixed by N. Infinite: smallest cutoff >= 8 with the
// ground-state weight phi_0(cutoff)^2 below tail_tol.
GridSpec make_grid(const Family& fam, const ParameterSet& lambda,
                   const NumericPolicy& policy = default_policy());

// B and D sampled on the extended integer grid [-1, x_max + ell_pad + 1].
struct PotentialPair {
    int x_lo = -1;
    Vector b;  // b[i] = B(x_lo + i)
    Vector d;

    Real bval(int x) const { return b.at(static_cast<size_t>(x - x_lo)); }
    Real dval(int x) const { return d.at(static_cast<size_t>(x - x_lo)); }
};

PotentialPair eval_potentials(const Family& fam, const ParameterSet& lambda, const GridSpec& grid,
                              int ell_pad = 6);

// Values P_n(eta(x)) for n in `levels`, x in [0, grid.x_max], computed by the
// dual three-term recurrence and cross-checked against the series evaluator.
struct PolynomialTable {
    std::vector<int> levels;
    std::vector<Vector> rows;  // rows[k][x] for level levels[k]
    Real normalization_dev = 0;  // max |row(x=0) - 1|
    Real series_dev = 0;         // max deviation recurrence vs series
};

PolynomialTable polynomial_table(const Family& fam, const ParameterSet& lambda,
                                 const std::vector<int>& levels, const GridSpec& grid,
                                 const NumericPolicy& policy = default_policy());

// log(phi_0(x)^2) for x in [0, x_hi], cumulative sum of log B/D ratios.
Vector log_weight_table(const Family& fam, const ParameterSet& lambda, int x_hi);

// 1/d_n^2 by direct summation of phi_0^2 P_n^2 over the grid.
Real dn_sq_by_summation(const Family& fam, const ParameterSet& lambda, const GridSpec& grid,
                        int n);

}  // namespace dqm
