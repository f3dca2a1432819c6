#include "dqm/special_deletion.hpp"

#include <cmath>

#include "dqm/casorati.hpp"
#include "json.hpp"

namespace dqm {

namespace {

std::vector<int> one_to_ell(int ell) {
    std::vector<int> v;
    for (int j = 1; j <= ell; ++j) v.push_back(j);
    return v;
}

Real xi_casoratian(const Family& fam, const ParameterSet& lambda, int ell, Real x) {
    if (ell == 0) return 1;
    const int m = ell;
    Matrix a(m, m);
    for (int k = 0; k < m; ++k)
        for (int j = 0; j < m; ++j)
            a(j, k) = fam.poly(k + 1, x + static_cast<Real>(j), lambda);
    const Real raw = lu_determinant(std::move(a));
    return raw / (varphi_ell(fam, lambda, m, x) *
                  poly_casoratian_prefactor(fam, lambda, one_to_ell(ell)));
}

}  // namespace

Real xi_ell(const Family& fam, const ParameterSet& lambda, int ell, Real x) {
    if (ell == 0) return 1;
    if (fam.has_xi()) return fam.xi(ell, x, lambda);
    return xi_casoratian(fam, lambda, ell, x);
}

Real xi_vs_casoratian_residual(const Family& fam, const ParameterSet& lambda, int ell, Real x) {
    const Real closed = xi_ell(fam, lambda, ell, x);
    const Real det = xi_casoratian(fam, lambda, ell, x);
    return std::fabs(closed - det) / std::max({Real(1), std::fabs(closed), std::fabs(det)});
}

Real xi_recurrence_residual(const Family& fam, const ParameterSet& lambda, int ell, Real x) {
    const ParameterSet ls = lambda.shifted(ell);
    const Real lhs = fam.bpot(0, ls) * xi_ell(fam, lambda, ell + 1, x);
    const Real rhs = fam.bpot(x, ls) * fam.varphi(x, ls) * xi_ell(fam, lambda, ell, x) -
                     fam.dpot(x, ls) * fam.varphi(x - 1, ls) * xi_ell(fam, lambda, ell, x + 1);
    return std::fabs(lhs - rhs) / std::max({Real(1), std::fabs(lhs), std::fabs(rhs)});
}

JacobiSystem SpecialDeletedSystem::system() const {
    if (!hermitian)
        throw NonHermitianSystem("odd-depth special deletion is not assembled as a matrix");
    GridSpec g = base_grid.finite() ? GridSpec::finite(xbar_max)
                                    : GridSpec{GridSpec::Kind::Truncated, xbar_max};
    return JacobiSystem(bl, dl, g);
}

Real SpecialDeletedSystem::f_ln(int n) const {
    return fam->fn(n, lambda) * lambda.kappa_pow(-0.5L * ell) * c_const /
           fam->bpot(0, lambda.shifted(ell));
}

Real SpecialDeletedSystem::b_ln(int n) const {
    return fam->bn(n, lambda) * fam->bpot(0, lambda.shifted(ell)) /
           (lambda.kappa_pow(-0.5L * ell) * c_const);
}

SpecialDeletedSystem build_special(const Family& fam, const ParameterSet& lambda,
                                   const GridSpec& grid, int ell, bool allow_odd,
                                   const NumericPolicy& policy) {
    if (ell % 2 != 0 && !allow_odd)
        throw PreconditionViolated("odd depth may be non-hermitian; pass allow_odd");
    SpecialDeletedSystem sys;
    sys.fam = &fam;
    sys.lambda = lambda;
    sys.base_grid = grid;
    sys.ell = ell;
    sys.xbar_max = grid.x_max - ell;
    sys.hermitian = (ell % 2 == 0);
    if (sys.xbar_max < 0) throw PreconditionViolated("deletion depth exceeds the grid");

    sys.xi.resize(sys.xbar_max + 2);
    sys.xi_positivity_margin = std::numeric_limits<Real>::max();
    for (int x = 0; x <= sys.xbar_max + 1; ++x) {
        sys.xi[x] = xi_ell(fam, lambda, ell, static_cast<Real>(x));
        sys.xi_positivity_margin = std::min(sys.xi_positivity_margin, sys.xi[x]);
    }
    if (sys.hermitian && sys.xi_positivity_margin <= 0)
        throw NonPositivePotential(0, "deforming polynomial at integer points");

    const ParameterSet ls = lambda.shifted(ell);
    const Real kl = lambda.kappa_pow(static_cast<Real>(ell));
    sys.bl.assign(sys.xbar_max + 1, 0);
    sys.dl.assign(sys.xbar_max + 1, 0);
    for (int x = 0; x <= sys.xbar_max; ++x) {
        sys.bl[x] = kl * fam.bpot(static_cast<Real>(x), ls) * sys.xi[x] / sys.xi[x + 1];
        if (x >= 1) sys.dl[x] = kl * fam.dpot(static_cast<Real>(x), ls) * sys.xi[x + 1] / sys.xi[x];
    }
    if (grid.finite()) {
        if (std::fabs(sys.bl[sys.xbar_max]) > policy.positivity_tol)
            throw NonPositivePotential(sys.xbar_max, "B_l boundary");
        sys.bl[sys.xbar_max] = 0;
    }

    Real c = std::sqrt(fam.bpot(0, ls)) * ((ell % 2 == 0) ? 1 : -1) *
             lambda.kappa_pow(-0.25L * ell * (ell - 1));
    for (int j = 1; j <= ell; ++j)
        c *= fam.energy(j, lambda) / std::sqrt(fam.bpot(0, lambda.shifted(j - 1)));
    sys.c_const = c;

    // ground state keeps the unnormalized convention (phi_{l,0}(0) deliberately != 1)
    const Vector logw = log_weight_table(fam, ls, sys.xbar_max);
    sys.phi_l0.resize(sys.xbar_max + 1);
    for (int x = 0; x <= sys.xbar_max; ++x)
        sys.phi_l0[x] = sys.c_const / std::sqrt(fam.bpot(0, ls)) * std::exp(logw[x] / 2) /
                        std::sqrt(std::fabs(sys.xi[x] * sys.xi[x + 1]));

    const int cap = grid.n_max();
    sys.levels.push_back(0);
    for (int n = ell + 1; n <= cap; ++n) sys.levels.push_back(n);
    for (int n : sys.levels) {
        Vector tab(sys.xbar_max + 1);
        if (n == 0) {
            std::fill(tab.begin(), tab.end(), Real(1));
        } else {
            std::vector<int> set = one_to_ell(ell);
            set.push_back(n);
            for (int x = 0; x <= sys.xbar_max; ++x)
                tab[x] = casoratian_of_polynomials(fam, lambda, set, x).normalized;
        }
        sys.pl.push_back(std::move(tab));
        Real dn2 = fam.has_dn_sq() ? fam.dn_sq(n, lambda)
                                   : dn_sq_by_summation(fam, lambda, grid, n);
        for (int j = 1; j <= ell; ++j) {
            const Real ej = fam.energy(j, lambda);
            dn2 *= (fam.energy(n, lambda) - ej) / (ej * ej);
        }
        sys.dln_sq.push_back(dn2);
    }
    return sys;
}

ModifiedPolynomial modified_polynomials(const Family& fam, const ParameterSet& lambda,
                                        const GridSpec& grid, int ell, int n,
                                        const NumericPolicy& policy) {
    if (n != 0 && n < ell + 1)
        throw PreconditionViolated("modified polynomial vanishes for 1 <= n <= ell");
    if (!fam.has_shift_factors())
        throw NotImplementedForFamily(fam.id() + ": two-term route needs shift factors");

    const int xbar_max = grid.x_max - ell;
    ModifiedPolynomial out;
    out.values.resize(xbar_max + 1);

    if (n == 0) {
        std::fill(out.values.begin(), out.values.end(), Real(1));
        out.normalization_dev = 0;
        return out;
    }

    const ParameterSet ls = lambda.shifted(ell);
    const ParameterSet ls1 = lambda.shifted(ell + 1);
    // kappa^{-l/2} C(l) b_{l,n-1} collapses to b_{n-1} B(0; lambda + l delta)
    const Real scale = fam.bn(n - 1, lambda) * fam.bpot(0, ls);

    std::vector<int> set = one_to_ell(ell);
    set.push_back(n);
    for (int x = 0; x <= xbar_max; ++x) {
        const Real xr = static_cast<Real>(x);
        const Real xi_x = xi_ell(fam, lambda, ell, xr);
        const Real xi_x1 = xi_ell(fam, lambda, ell, xr + 1);
        const Real value =
            (fam.bpot(xr, ls) * xi_x * fam.varphi(xr, ls) * fam.poly(n - ell - 1, xr, ls1) -
             fam.dpot(xr, ls) * xi_x1 * fam.varphi(xr - 1, ls) *
                 fam.poly(n - ell - 1, xr - 1, ls1)) /
            scale;
        out.values[x] = value;
        const Real det = casoratian_of_polynomials(fam, lambda, set, x).normalized;
        out.casoratian_dev = std::max(
            out.casoratian_dev,
            std::fabs(value - det) / std::max({Real(1), std::fabs(value), std::fabs(det)}));
    }
    out.normalization_dev = std::fabs(out.values[0] - 1);
    if (out.casoratian_dev > 1e-8L)
        throw ConvergenceFailure("two-term and determinant routes disagree", 0);
    (void)policy;
    return out;
}

ShiftOperatorReport shift_operator_checks(const SpecialDeletedSystem& sys, int n,
                                          const NumericPolicy& policy) {
    if (n < sys.ell + 1) throw PreconditionViolated("shift checks need n >= ell + 1");
    const Family& fam = *sys.fam;
    const ParameterSet& lambda = sys.lambda;
    const ParameterSet ls1 = lambda.shifted(sys.ell + 1);

    ShiftOperatorReport rep;
    auto rel = [](Real a, Real b) {
        return std::fabs(a - b) / std::max({Real(1), std::fabs(a), std::fabs(b)});
    };

    // The shift factors act on the unit-normalized phi_{l,0} P_{l,n}; the
    // energy-product weight of the full eigenfunction stays outside.
    Vector phi_ln(sys.xbar_max + 1);
    {
        const Vector& pl = [&]() -> const Vector& {
            for (size_t k = 0; k < sys.levels.size(); ++k)
                if (sys.levels[k] == n) return sys.pl[k];
            throw PreconditionViolated("level not carried");
        }();
        for (int x = 0; x <= sys.xbar_max; ++x) phi_ln[x] = sys.phi_l0[x] * pl[x];
    }
    const Vector partner = eigenfunction_table(fam, ls1, n - sys.ell - 1, sys.xbar_max);

    const Real fln = sys.f_ln(n);
    const Real bln = sys.b_ln(n - 1);
    rep.factor_dev = rel(fln * bln, fam.energy(n, lambda));

    const int fwd_hi = sys.base_grid.finite() ? sys.xbar_max : sys.xbar_max - 1;
    for (int x = 0; x <= fwd_hi; ++x) {
        Real af = std::sqrt(sys.bl[x]) * phi_ln[x];
        if (x + 1 <= sys.xbar_max) af -= std::sqrt(sys.dl[x + 1]) * phi_ln[x + 1];
        rep.forward_dev = std::max(rep.forward_dev, rel(af, fln * partner[x]));
    }
    for (int x = 0; x <= sys.xbar_max; ++x) {
        Real adf = std::sqrt(sys.bl[x]) * partner[x];
        if (x >= 1) adf -= std::sqrt(sys.dl[x]) * partner[x - 1];
        rep.backward_dev = std::max(rep.backward_dev, rel(adf, bln * phi_ln[x]));
    }

    // E(n) = kappa^{l+1} E(n-l-1; lambda+(l+1)delta) + E(l+1)
    rep.energy_relation_dev =
        rel(fam.energy(n, lambda),
            lambda.kappa_pow(static_cast<Real>(sys.ell + 1)) * fam.energy(n - sys.ell - 1, ls1) +
                fam.energy(sys.ell + 1, lambda));

    // A_l A_l^T = kappa^{l+1} H(lambda+(l+1)delta) + E(l+1); the finite case
    // compares the reduced block (the last row and column vanish).
    {
        const int m = sys.xbar_max;  // reduced block; the top entry needs D_l past the grid
        const Real kp = lambda.kappa_pow(static_cast<Real>(sys.ell + 1));
        const Real el1 = fam.energy(sys.ell + 1, lambda);
        for (int x = 0; x < m; ++x) {
            const Real diag = sys.bl[x] + (x + 1 <= sys.xbar_max ? sys.dl[x + 1] : 0);
            const Real expect_diag =
                kp * (fam.bpot(static_cast<Real>(x), ls1) + fam.dpot(static_cast<Real>(x), ls1)) +
                el1;
            rep.partner_hamiltonian_dev =
                std::max(rep.partner_hamiltonian_dev, rel(diag, expect_diag));
            if (x + 1 < m) {
                const Real off = -std::sqrt(sys.bl[x + 1] * sys.dl[x + 1]);
                const Real expect_off = -kp * std::sqrt(fam.bpot(static_cast<Real>(x), ls1) *
                                                        fam.dpot(static_cast<Real>(x + 1), ls1));
                rep.partner_hamiltonian_dev =
                    std::max(rep.partner_hamiltonian_dev, rel(off, expect_off));
            }
        }
    }

    rep.pass = rep.forward_dev <= 1e-8L && rep.backward_dev <= 1e-8L &&
               rep.factor_dev <= policy.identity_tol &&
               rep.energy_relation_dev <= policy.identity_tol &&
               rep.partner_hamiltonian_dev <= 1e-8L;
    return rep;
}

std::string special_report_json(const SpecialDeletedSystem& sys, const NumericPolicy& policy) {
    nlohmann::json j;
    j["schema"] = "dqm-report/1";
    j["family"] = sys.fam->id();
    nlohmann::json params;
    if (sys.lambda.has_q()) params["q"] = static_cast<double>(sys.lambda.q());
    for (const auto& [name, p] : sys.lambda.entries())
        params[name] = static_cast<double>(p.value(sys.lambda.has_q() ? sys.lambda.q() : 0));
    j["lambda"] = params;
    j["ell"] = sys.ell;
    std::vector<int> deleted;
    for (int k = 1; k <= sys.ell; ++k) deleted.push_back(k);
    j["deletion"] = deleted;
    j["C_l_lambda"] = static_cast<double>(sys.c_const);
    j["xi_positivity_margin"] = static_cast<double>(sys.xi_positivity_margin);
    j["hermitian"] = sys.hermitian;

    std::vector<double> before, after;
    for (int n = 0; n <= sys.base_grid.n_max(); ++n)
        before.push_back(static_cast<double>(sys.fam->energy(n, sys.lambda)));
    j["spectrum_before"] = before;
    Real max_resid = 0;
    if (sys.hermitian) {
        const Vector ev = sys.system().eigensystem().values;
        for (size_t k = 0; k < ev.size(); ++k) {
            after.push_back(static_cast<double>(ev[k]));
            const Real expect = sys.energy(sys.levels[k]);
            max_resid = std::max(max_resid, std::fabs(ev[k] - expect) /
                                                std::max(Real(1), std::fabs(expect)));
        }
    }
    j["spectrum_after"] = after;
    j["max_residual"] = static_cast<double>(max_resid);
    j["surviving_levels"] = sys.levels;
    std::vector<double> norms;
    for (Real d : sys.dln_sq) norms.push_back(static_cast<double>(d));
    j["d_ln_sq"] = norms;
    j["pass"] = sys.hermitian && max_resid <= 100 * policy.identity_tol;
    return j.dump(2);
}

SpecialNorm special_norms(const SpecialDeletedSystem& sys, int n) {
    SpecialNorm out;
    for (size_t k = 0; k < sys.levels.size(); ++k)
        if (sys.levels[k] == n) {
            out.closed_form = sys.dln_sq[k];
            Real inv = 0;
            for (int x = 0; x <= sys.xbar_max; ++x)
                inv += sys.phi_l0[x] * sys.phi_l0[x] * sys.pl[k][x] * sys.pl[k][x];
            out.summed = 1 / inv;
            out.rel_dev = std::fabs(out.closed_form - out.summed) /
                          std::max(std::fabs(out.closed_form), std::fabs(out.summed));
            return out;
        }
    throw PreconditionViolated("level not carried by the special system");
}

}  // namespace dqm
