#include "dqm/adler.hpp"

#include <algorithm>
#include <cmath>

#include "dqm/casorati.hpp"
#include "dqm/linalg.hpp"
#include "json.hpp"

namespace dqm {

bool DeletionSet::contains(int n) const {
    return std::binary_search(levels.begin(), levels.end(), n);
}

int DeletionSet::weight() const {
    int w = 0;
    for (int d : levels) w += d;
    return w;
}

DeletionSet validate_deletion(std::vector<int> levels, int n_max) {
    std::sort(levels.begin(), levels.end());
    for (size_t i = 0; i + 1 < levels.size(); ++i)
        if (levels[i] == levels[i + 1]) throw PreconditionViolated("deletion levels must be distinct");
    for (int d : levels) {
        if (d < 0) throw PreconditionViolated("deletion levels must be non-negative");
        if (d > n_max) throw PreconditionViolated("deletion level exceeds n_max");
    }
    DeletionSet out;
    out.levels = std::move(levels);
    out.contains_zero = !out.levels.empty() && out.levels.front() == 0;
    out.admissible = true;
    const int m_hi = out.levels.empty() ? 0 : out.levels.back() + 1;
    for (int m = 0; m <= m_hi; ++m) {
        Real prod = 1;
        for (int d : out.levels) prod *= static_cast<Real>(m - d);
        if (prod < 0) {
            out.admissible = false;
            break;
        }
    }
    int mu = 0;
    while (out.contains(mu)) ++mu;
    out.mu = mu;
    return out;
}

bool admissible_by_clusters(const std::vector<int>& sorted_levels) {
    size_t i = 0;
    while (i < sorted_levels.size()) {
        size_t j = i;
        while (j + 1 < sorted_levels.size() && sorted_levels[j + 1] == sorted_levels[j] + 1) ++j;
        const size_t len = j - i + 1;
        if (sorted_levels[i] != 0 && len % 2 != 0) return false;
        i = j + 1;
    }
    return true;
}

const Vector& DeletedSystem::phibar_of(int n) const {
    for (size_t k = 0; k < levels.size(); ++k)
        if (levels[k] == n) return phibar[k];
    throw PreconditionViolated("level " + std::to_string(n) + " not carried by the deleted system");
}

Real DeletedSystem::norm_factor(int n) const {
    Real prod = 1;
    const Real en = fam->energy(n, lambda);
    for (int d : deletion.levels) prod *= en - fam->energy(d, lambda);
    return prod;
}

JacobiSystem DeletedSystem::system() const {
    for (int x = 0; x < xbar_max; ++x)
        if (bbar[x] * dbar[x + 1] < -default_policy().positivity_tol)
            throw NonHermitianSystem("negative off-diagonal product at x=" + std::to_string(x));
    GridSpec g = base_grid.finite() ? GridSpec::finite(xbar_max)
                                    : GridSpec{GridSpec::Kind::Truncated, xbar_max};
    return JacobiSystem(bbar, dbar, g);
}

namespace {

std::vector<int> deletion_order(const DeletionSet& del, std::vector<int> order) {
    if (order.empty()) return del.levels;
    std::vector<int> sorted = order;
    std::sort(sorted.begin(), sorted.end());
    if (sorted != del.levels)
        throw PreconditionViolated("deletion order must permute the deletion set");
    return order;
}

struct PathInputs {
    std::vector<int> survivors;
    Vector energies;
    int x0_top;  // top of the eigenfunction tables
};

PathInputs path_inputs(const Family& fam, const ParameterSet& lambda, const GridSpec& grid,
                       const DeletionSet& del) {
    PathInputs in;
    const int cap = grid.n_max();
    for (int n = 0; n <= cap; ++n)
        if (!del.contains(n)) {
            in.survivors.push_back(n);
            in.energies.push_back(fam.energy(n, lambda));
        }
    in.x0_top = grid.finite() ? grid.x_max + 1 : grid.x_max + del.ell() + 1;
    return in;
}

void check_unsafe(const DeletionSet& del, bool unsafe) {
    if (!del.admissible && !unsafe)
        throw PreconditionViolated(
            "deletion set is inadmissible (needs even clusters of contiguous levels); "
            "pass unsafe to construct anyway");
}

void finalize(DeletedSystem& ds, const NumericPolicy& policy) {
    ds.e_mu = ds.fam->energy(ds.deletion.mu, ds.lambda);
    if (ds.base_grid.finite()) ds.bbar[ds.xbar_max] = 0;
    ds.dbar[0] = 0;
    ds.real_valued = ds.realness_margin >= -policy.positivity_tol;

    // fix the square-root branch so the new ground state is positive; the
    // relative signs across levels are already consistent within a path
    if (!ds.phibar.empty()) {
        const Vector& mu_phi = ds.phibar_of(ds.deletion.mu);
        Real anchor = 0;
        for (Real v : mu_phi)
            if (std::fabs(v) > std::fabs(anchor)) anchor = v;
        if (anchor < 0)
            for (Vector& phi : ds.phibar)
                for (Real& v : phi) v = -v;
    }
}

}  // namespace

DeletedSystem adler_chain(const Family& fam, const ParameterSet& lambda, const GridSpec& grid,
                          const DeletionSet& del, bool unsafe, std::vector<int> order,
                          const NumericPolicy& policy) {
    check_unsafe(del, unsafe);
    const std::vector<int> deletions = deletion_order(del, std::move(order));
    const PathInputs in = path_inputs(fam, lambda, grid, del);
    const int ell = del.ell();

    // u_{0,n} = phi_n, rho_0 = 1; carried levels = survivors plus the not yet
    // deleted members of D.  Finite tables stop at N: the continued phi
    // vanish there and the ratio updates would hit exact zeros.
    const int x0_top = grid.finite() ? grid.x_max : grid.x_max + ell + 1;
    std::vector<int> carried;
    for (int n = 0; n <= grid.n_max(); ++n) carried.push_back(n);
    std::vector<Vector> u;
    for (int n : carried) u.push_back(eigenfunction_table(fam, lambda, n, x0_top));
    Vector rho(x0_top + 1, 1);

    for (int step = 0; step < ell; ++step) {
        const int target = deletions[step];
        const size_t g = static_cast<size_t>(
            std::find(carried.begin(), carried.end(), target) - carried.begin());
        const int new_top = static_cast<int>(u[g].size()) - 2;
        std::vector<Vector> u_next;
        std::vector<int> carried_next;
        Vector rho_next(new_top + 1);
        for (int x = 0; x <= new_top; ++x) {
            if (u[g][x + 1] == 0 || u[g][x] == 0) throw IntermediateBreakdown(step + 1, x);
            rho_next[x] = rho[x + 1] * u[g][x + 1] / u[g][x];
        }
        for (size_t k = 0; k < carried.size(); ++k) {
            if (k == g) continue;
            Vector v(new_top + 1);
            for (int x = 0; x <= new_top; ++x)
                v[x] = u[g][x] / u[g][x + 1] * u[k][x + 1] - u[k][x];
            carried_next.push_back(carried[k]);
            u_next.push_back(std::move(v));
        }
        carried = std::move(carried_next);
        u = std::move(u_next);
        rho = std::move(rho_next);
    }

    DeletedSystem ds;
    ds.fam = &fam;
    ds.lambda = lambda;
    ds.base_grid = grid;
    ds.deletion = del;
    ds.xbar_max = grid.x_max - ell;
    ds.levels = in.survivors;
    ds.energies = in.energies;

    const size_t gmu = static_cast<size_t>(
        std::find(carried.begin(), carried.end(), del.mu) - carried.begin());
    const Vector& umu = u[gmu];

    auto prod4 = [&](int x) {
        Real p = 1;
        for (int k = 1; k <= ell; ++k)
            p *= fam.bpot(static_cast<Real>(x + k - 1), lambda) *
                 fam.dpot(static_cast<Real>(x + k), lambda);
        return p;
    };

    ds.realness_margin = std::numeric_limits<Real>::max();
    for (int x = 0; x <= ds.xbar_max; ++x) ds.realness_margin = std::min(ds.realness_margin, rho[x]);
    if (ell == 0) ds.realness_margin = 1;

    ds.bbar.assign(ds.xbar_max + 1, 0);
    ds.dbar.assign(ds.xbar_max + 1, 0);
    const int b_hi = grid.finite() ? ds.xbar_max - 1 : ds.xbar_max;
    for (int x = 0; x <= b_hi; ++x) {
        if (umu[x] == 0) throw ZeroDenominator(x, "barred ground state");
        ds.bbar[x] = std::sqrt(fam.bpot(static_cast<Real>(x + ell), lambda) *
                               fam.dpot(static_cast<Real>(x + ell + 1), lambda)) *
                     (rho[x + 1] / rho[x]) * (umu[x + 1] / umu[x]);
    }
    for (int x = 1; x <= ds.xbar_max; ++x) {
        if (umu[x] == 0) throw ZeroDenominator(x, "barred ground state");
        ds.dbar[x] = std::sqrt(fam.bpot(static_cast<Real>(x - 1), lambda) *
                               fam.dpot(static_cast<Real>(x), lambda)) *
                     umu[x - 1] / umu[x];
    }

    const Real sign = (ell % 2 == 0) ? 1 : -1;
    for (size_t k = 0; k < carried.size(); ++k) {
        Vector phi(ds.xbar_max + 1);
        for (int x = 0; x <= ds.xbar_max; ++x)
            phi[x] = sign * std::pow(prod4(x), 0.25L) * std::sqrt(std::fabs(rho[x])) * u[k][x];
        ds.phibar.push_back(std::move(phi));
    }

    finalize(ds, policy);
    return ds;
}

namespace {

// Shared skeleton of the two determinant routes: W tables of either the full
// eigenfunctions or the bare polynomials.
DeletedSystem determinant_path(const Family& fam, const ParameterSet& lambda, const GridSpec& grid,
                               const DeletionSet& del, std::vector<int> order, bool polynomial,
                               const NumericPolicy& policy) {
    const std::vector<int> deletions = deletion_order(del, std::move(order));
    const PathInputs in = path_inputs(fam, lambda, grid, del);
    const int ell = del.ell();

    auto table = [&](int n) {
        if (polynomial) return sample_poly(fam, lambda, n, 0, in.x0_top);
        return SampledFunction(0, eigenfunction_table(fam, lambda, n, in.x0_top));
    };

    std::vector<SampledFunction> fs_d;
    for (int d : deletions) fs_d.push_back(table(d));

    DeletedSystem ds;
    ds.fam = &fam;
    ds.lambda = lambda;
    ds.base_grid = grid;
    ds.deletion = del;
    ds.xbar_max = grid.x_max - ell;
    ds.levels = in.survivors;
    ds.energies = in.energies;

    Vector wd(ds.xbar_max + 2);  // W[f_D](x) on [0, xbar_max+1]
    for (int x = 0; x <= ds.xbar_max + 1; ++x) {
        wd[x] = casoratian(fs_d, x);
        if (wd[x] == 0 && ell > 0) throw ZeroDenominator(x, "W[phi_D]");
    }
    ds.realness_margin = std::numeric_limits<Real>::max();
    for (int x = 0; x <= ds.xbar_max; ++x)
        ds.realness_margin = std::min(ds.realness_margin, wd[x + 1] / wd[x]);
    if (ell == 0) ds.realness_margin = 1;

    auto wdn = [&](int n) {
        std::vector<SampledFunction> fs = fs_d;
        fs.push_back(table(n));
        Vector w(ds.xbar_max + 2);
        for (int x = 0; x <= ds.xbar_max + 1; ++x) w[x] = casoratian(fs, x);
        return w;
    };
    const Vector wmu = wdn(del.mu);

    ds.bbar.assign(ds.xbar_max + 1, 0);
    ds.dbar.assign(ds.xbar_max + 1, 0);
    const int b_hi = grid.finite() ? ds.xbar_max - 1 : ds.xbar_max;
    for (int x = 0; x <= b_hi; ++x) {
        if (wmu[x] == 0) throw ZeroDenominator(x, "W[phi_D, phi_mu]");
        if (polynomial)
            ds.bbar[x] = fam.bpot(static_cast<Real>(x + ell), lambda) * (wd[x] / wd[x + 1]) *
                         (wmu[x + 1] / wmu[x]);
        else
            ds.bbar[x] = std::sqrt(fam.bpot(static_cast<Real>(x + ell), lambda) *
                                   fam.dpot(static_cast<Real>(x + ell + 1), lambda)) *
                         (wd[x] / wd[x + 1]) * (wmu[x + 1] / wmu[x]);
    }
    for (int x = 1; x <= ds.xbar_max; ++x) {
        if (wmu[x] == 0) throw ZeroDenominator(x, "W[phi_D, phi_mu]");
        if (polynomial)
            ds.dbar[x] = fam.dpot(static_cast<Real>(x), lambda) * (wd[x + 1] / wd[x]) *
                         (wmu[x - 1] / wmu[x]);
        else
            ds.dbar[x] = std::sqrt(fam.bpot(static_cast<Real>(x - 1), lambda) *
                                   fam.dpot(static_cast<Real>(x), lambda)) *
                         (wd[x + 1] / wd[x]) * (wmu[x - 1] / wmu[x]);
    }

    const Real sign = (ell % 2 == 0) ? 1 : -1;
    const Vector logw =
        polynomial ? log_weight_table(fam, lambda, std::min(in.x0_top, grid.x_max)) : Vector{};
    for (int n : ds.levels) {
        const Vector w = (n == del.mu) ? wmu : wdn(n);
        Vector phi(ds.xbar_max + 1);
        for (int x = 0; x <= ds.xbar_max; ++x) {
            if (polynomial) {
                Real bprod = 1;
                for (int k = 0; k < ell; ++k) bprod *= fam.bpot(static_cast<Real>(x + k), lambda);
                phi[x] = sign * std::exp(logw[x] / 2) * std::sqrt(std::fabs(bprod)) * w[x] /
                         std::sqrt(std::fabs(wd[x] * wd[x + 1]));
            } else {
                Real p4 = 1;
                for (int k = 1; k <= ell; ++k)
                    p4 *= fam.bpot(static_cast<Real>(x + k - 1), lambda) *
                          fam.dpot(static_cast<Real>(x + k), lambda);
                phi[x] = sign * std::pow(p4, 0.25L) * w[x] / std::sqrt(std::fabs(wd[x] * wd[x + 1]));
            }
        }
        ds.phibar.push_back(std::move(phi));
    }

    finalize(ds, policy);
    return ds;
}

}  // namespace

DeletedSystem barred_system_casoratian(const Family& fam, const ParameterSet& lambda,
                                       const GridSpec& grid, const DeletionSet& del,
                                       std::vector<int> order, const NumericPolicy& policy) {
    return determinant_path(fam, lambda, grid, del, std::move(order), false, policy);
}

DeletedSystem polynomial_fast_path(const Family& fam, const ParameterSet& lambda,
                                   const GridSpec& grid, const DeletionSet& del,
                                   std::vector<int> order, const NumericPolicy& policy) {
    return determinant_path(fam, lambda, grid, del, std::move(order), true, policy);
}

DeformedPolynomials deformed_polynomials(const DeletedSystem& ds, const std::vector<int>& levels,
                                         const NumericPolicy& policy) {
    const Family& fam = *ds.fam;
    const ParameterSet& lambda = ds.lambda;
    const int ell = ds.deletion.ell();
    const int mu = ds.deletion.mu;

    DeformedPolynomials out;
    out.ell = ell;
    out.mu = mu;
    out.levels = levels;

    // Casoratian of eigenpolynomials at a real offset x.
    auto wcheck = [&](const std::vector<int>& set, Real x) {
        const int m = static_cast<int>(set.size());
        if (m == 0) return Real(1);
        Matrix a(m, m);
        for (int k = 0; k < m; ++k)
            for (int j = 0; j < m; ++j)
                a(j, k) = fam.poly(set[k], x + static_cast<Real>(j), lambda);
        return lu_determinant(std::move(a));
    };

    std::vector<int> dset = ds.deletion.levels;
    std::vector<int> dmu = dset;
    dmu.push_back(mu);

    const int xm = ds.xbar_max;
    out.eta_lm1.resize(xm + 2);
    out.eta_l.resize(xm + 1);
    out.p_table.resize(xm + 2);
    out.p_mu_table.resize(xm + 1);
    const ParameterSet lam_lm1 = lambda.shifted(ell - 1);
    const ParameterSet lam_l = lambda.shifted(ell);
    for (int x = 0; x <= xm + 1; ++x) {
        out.eta_lm1[x] = fam.eta(static_cast<Real>(x), lam_lm1);
        out.p_table[x] = wcheck(dset, x) / varphi_ell(fam, lambda, ell, static_cast<Real>(x));
    }
    for (int x = 0; x <= xm; ++x) {
        out.eta_l[x] = fam.eta(static_cast<Real>(x), lam_l);
        out.p_mu_table[x] = wcheck(dmu, x) / varphi_ell(fam, lambda, ell + 1, static_cast<Real>(x));
    }

    // The raw Casoratians carry the conventional sign of the (energy-difference)
    // prefactor; positivity statements live in the normalization with value 1
    // at the origin, so the tables are sign-normalized as a block.
    if (out.p_table[0] < 0)
        for (Real& v : out.p_table) v = -v;
    const bool flip_mu = out.p_mu_table[0] < 0;
    if (flip_mu)
        for (Real& v : out.p_mu_table) v = -v;

    // degree fits on a half-integer mesh (enough nodes even for small grids)
    auto fit_degree = [&](const std::vector<int>& set, int m_funcs, const ParameterSet& lam_eta,
                          int expected) {
        Vector ys, vals;
        const int need = expected + 4;
        for (int i = 0; i < 2 * need; ++i) {
            const Real x = static_cast<Real>(i) / 2;
            ys.push_back(fam.eta(x, lam_eta));
            vals.push_back(wcheck(set, x) / varphi_ell(fam, lambda, m_funcs, x));
        }
        const int deg = fitted_polynomial_degree(ys, vals, expected + 2, 1e-7L);
        if (deg != expected) throw DegreeMismatch(expected, deg);
        return deg;
    };

    const int dweight = ds.deletion.weight();
    out.p_degree = fit_degree(dset, ell, lam_lm1, dweight - ell * (ell - 1) / 2);
    out.p_mu_degree = fit_degree(dmu, ell + 1, lam_l, dweight + mu - ell * (ell + 1) / 2);
    for (int n : levels) {
        std::vector<int> dn = dset;
        dn.push_back(n);
        out.p_n_degrees.push_back(
            fit_degree(dn, ell + 1, lam_l, dweight + n - ell * (ell + 1) / 2));
        Vector tab(xm + 1);
        for (int x = 0; x <= xm; ++x)
            tab[x] = wcheck(dn, x) / varphi_ell(fam, lambda, ell + 1, static_cast<Real>(x));
        if (flip_mu)  // same block normalization as P_mu so the ratios survive
            for (Real& v : tab) v = -v;
        out.p_n_tables.push_back(std::move(tab));
    }

    // deformed weight and the orthogonality residual
    out.weight.resize(xm + 1);
    const Vector& phimu = ds.phibar_of(mu);
    for (int x = 0; x <= xm; ++x) out.weight[x] = phimu[x] / out.p_mu_table[x];

    Real dev = 0;
    Vector norms(levels.size());
    for (size_t i = 0; i < levels.size(); ++i)
        norms[i] =
            ds.norm_factor(levels[i]) / dn_sq_by_summation(fam, lambda, ds.base_grid, levels[i]);
    for (size_t i = 0; i < levels.size(); ++i)
        for (size_t j = i; j < levels.size(); ++j) {
            Real sum = 0;
            for (int x = 0; x <= xm; ++x)
                sum += out.weight[x] * out.weight[x] * out.p_n_tables[i][x] * out.p_n_tables[j][x];
            const Real expect = (i == j) ? norms[i] : 0;
            const Real scale =
                (i == j) ? std::fabs(norms[i]) : std::sqrt(std::fabs(norms[i] * norms[j]));
            dev = std::max(dev, std::fabs(sum - expect) / scale);
        }
    out.orthogonality_dev = dev;
    if (dev > std::max(Real(1e-8L), policy.identity_tol) && ds.deletion.admissible)
        throw ConvergenceFailure("deformed polynomial orthogonality residual too large", 0);
    return out;
}

HermiticityReport hermiticity_report(const DeletedSystem& ds, const NumericPolicy& policy) {
    HermiticityReport rep;
    const int xm = ds.xbar_max;
    rep.min_bbar = std::numeric_limits<Real>::max();
    rep.min_dbar = std::numeric_limits<Real>::max();
    rep.min_offdiag_product = std::numeric_limits<Real>::max();
    for (int x = 0; x < xm; ++x) rep.min_bbar = std::min(rep.min_bbar, ds.bbar[x]);
    for (int x = 1; x <= xm; ++x) rep.min_dbar = std::min(rep.min_dbar, ds.dbar[x]);
    for (int x = 0; x < xm; ++x)
        rep.min_offdiag_product = std::min(rep.min_offdiag_product, ds.bbar[x] * ds.dbar[x + 1]);
    if (xm == 0) rep.min_bbar = rep.min_dbar = rep.min_offdiag_product = 0;
    rep.realness_margin = ds.realness_margin;

    // Explicit matrix in the wavefunction gauge: Phi G Phi^{-1} with
    // Phi = diag(|phibar_mu|); symmetric exactly when detailed balance holds.
    const Vector& phimu = ds.phibar_of(ds.deletion.mu);
    Matrix h(xm + 1, xm + 1);
    Real scale = 1;
    for (int x = 0; x <= xm; ++x) {
        h(x, x) = ds.bbar[x] + ds.dbar[x] + ds.e_mu;
        scale = std::max(scale, std::fabs(h(x, x)));
        if (x + 1 <= xm) {
            h(x, x + 1) = -ds.bbar[x] * std::fabs(phimu[x]) / std::fabs(phimu[x + 1]);
            h(x + 1, x) = -ds.dbar[x + 1] * std::fabs(phimu[x + 1]) / std::fabs(phimu[x]);
        }
    }
    rep.max_asymmetry = (h - h.transposed()).max_abs() / scale;
    rep.pass = rep.max_asymmetry <= 100 * policy.identity_tol &&
               rep.min_offdiag_product >= -policy.positivity_tol &&
               rep.realness_margin >= -policy.positivity_tol &&
               (xm == 0 || (rep.min_bbar > 0 && rep.min_dbar > 0));
    return rep;
}

std::string deletion_report_json(const DeletedSystem& ds, const NumericPolicy& policy) {
    nlohmann::json j;
    j["schema"] = "dqm-report/1";
    j["family"] = ds.fam->id();
    nlohmann::json params;
    if (ds.lambda.has_q()) params["q"] = static_cast<double>(ds.lambda.q());
    for (const auto& [name, p] : ds.lambda.entries())
        params[name] = static_cast<double>(p.value(ds.lambda.has_q() ? ds.lambda.q() : 0));
    j["lambda"] = params;
    j["deletion"] = ds.deletion.levels;
    j["admissible"] = ds.deletion.admissible;
    j["mu"] = ds.deletion.mu;

    std::vector<double> before, after;
    for (int n = 0; n <= ds.base_grid.n_max(); ++n)
        before.push_back(static_cast<double>(ds.fam->energy(n, ds.lambda)));
    j["spectrum_before"] = before;

    Real max_resid = 0;
    bool hermitian_path = true;
    try {
        const JacobiSystem sys = ds.system();
        for (Real e : sys.eigensystem().values) after.push_back(static_cast<double>(e));
        for (size_t k = 0; k < after.size() && k < ds.energies.size(); ++k)
            max_resid = std::max(max_resid,
                                 std::fabs(static_cast<Real>(after[k]) - ds.energies[k]) /
                                     std::max(Real(1), std::fabs(ds.energies[k])));
    } catch (const NonHermitianSystem&) {
        hermitian_path = false;
    }
    j["spectrum_after"] = after;
    j["max_residual"] = static_cast<double>(max_resid);

    const HermiticityReport h = hermiticity_report(ds, policy);
    j["hermiticity"] = {{"max_asymmetry", static_cast<double>(h.max_asymmetry)},
                        {"min_bbar", static_cast<double>(h.min_bbar)},
                        {"min_dbar", static_cast<double>(h.min_dbar)},
                        {"min_offdiag_product", static_cast<double>(h.min_offdiag_product)},
                        {"realness_margin", static_cast<double>(h.realness_margin)},
                        {"pass", h.pass && hermitian_path}};

    std::vector<double> norm_factors;
    for (int n : ds.levels) norm_factors.push_back(static_cast<double>(ds.norm_factor(n)));
    j["norm_factors"] = norm_factors;
    j["surviving_levels"] = ds.levels;
    return j.dump(2);
}

}  // namespace dqm
