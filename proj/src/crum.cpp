#include "dqm/crum.hpp"

#include <algorithm>
#include <cmath>

#include "dqm/casorati.hpp"
#include "json.hpp"

namespace dqm {

JacobiSystem CrumChainState::system() const {
    Vector bp(b.begin(), b.begin() + x_max_s + 1);
    Vector dp(d.begin(), d.begin() + x_max_s + 1);
    GridSpec g = finite ? GridSpec::finite(x_max_s)
                        : GridSpec{GridSpec::Kind::Truncated, x_max_s};
    JacobiSystem sys(std::move(bp), std::move(dp), g);
    return sys;
}

CrumChainState crum_initial(const Family& fam, const ParameterSet& lambda, const GridSpec& grid,
                            int level_cap) {
    CrumChainState st;
    st.finite = grid.finite();
    st.x_max_s = grid.x_max;
    const int cap = (level_cap < 0) ? grid.n_max() : std::min(level_cap, grid.n_max());
    // constant headroom so every truncated-grid step can fill its own top
    const int table_top = grid.finite() ? grid.x_max : grid.x_max + cap;
    for (int n = 0; n <= cap; ++n) {
        st.levels.push_back(n);
        st.energies.push_back(fam.energy(n, lambda));
        st.phi.push_back(eigenfunction_table(fam, lambda, n, table_top));
    }
    st.b.resize(table_top + 1);
    st.d.resize(table_top + 1);
    for (int x = 0; x <= table_top; ++x) {
        st.b[x] = fam.bpot(static_cast<Real>(x), lambda);
        st.d[x] = fam.dpot(static_cast<Real>(x), lambda);
    }
    if (grid.finite()) st.b[grid.x_max] = 0;
    st.d[0] = 0;
    return st;
}

CrumChainState crum_step(const CrumChainState& state, const NumericPolicy& policy) {
    if (state.levels.size() < 2)
        throw PreconditionViolated("crum_step: no level left to delete into");
    const int top = state.table_top();

    CrumChainState next;
    next.s = state.s + 1;
    next.finite = state.finite;
    next.x_max_s = state.x_max_s - 1;
    next.e_offset_ = state.energies[1];  // deleted spectrum now starts at E(s+1)
    if (next.x_max_s < 0) throw PreconditionViolated("crum_step: chain exhausted the grid");

    Vector sqrt_b(top + 1), sqrt_d(top + 1);
    for (int x = 0; x <= top; ++x) {
        if (state.b[x] < -policy.positivity_tol) throw NonPositivePotential(x, "B");
        if (state.d[x] < -policy.positivity_tol) throw NonPositivePotential(x, "D");
        sqrt_b[x] = std::sqrt(std::max(state.b[x], Real(0)));
        sqrt_d[x] = std::sqrt(std::max(state.d[x], Real(0)));
    }

    const int new_top = top - 1;
    for (size_t k = 1; k < state.levels.size(); ++k) {
        Vector p(new_top + 1);
        for (int x = 0; x <= new_top; ++x)
            p[x] = sqrt_b[x] * state.phi[k][x] - sqrt_d[x + 1] * state.phi[k][x + 1];
        next.levels.push_back(state.levels[k]);
        next.energies.push_back(state.energies[k]);
        next.phi.push_back(std::move(p));
    }

    // new ground state must keep a fixed sign on the physical range
    const Vector& gs = next.phi.front();
    for (int x = 0; x <= next.x_max_s; ++x)
        if (!(gs[x] > 0)) throw NonPositivePotential(x, "chain ground state");

    next.b.assign(new_top + 1, 0);
    next.d.assign(new_top + 1, 0);
    for (int x = 0; x < new_top; ++x)
        next.b[x] = sqrt_b[x + 1] * sqrt_d[x + 1] * gs[x + 1] / gs[x];
    if (next.finite)
        next.b[new_top] = 0;
    else if (new_top > next.x_max_s)
        next.b[new_top] = 0;  // headroom entry, never used physically
    for (int x = 1; x <= new_top; ++x) next.d[x] = sqrt_b[x] * sqrt_d[x] * gs[x - 1] / gs[x];
    next.d[0] = 0;
    return next;
}

std::vector<CrumChainState> crum_chain(const Family& fam, const ParameterSet& lambda,
                                       const GridSpec& grid, int s, int level_cap,
                                       const NumericPolicy& policy) {
    if (s > grid.n_max()) throw PreconditionViolated("crum_chain: s exceeds n_max");
    std::vector<CrumChainState> history;
    history.push_back(crum_initial(fam, lambda, grid, level_cap));
    for (int k = 0; k < s; ++k) history.push_back(crum_step(history.back(), policy));
    return history;
}

Real crum_determinant_eigenfunction(const Family& fam, const ParameterSet& lambda,
                                    const std::vector<CrumChainState>& history, int s, int n,
                                    int x, CrumVariant variant) {
    if (s >= static_cast<int>(history.size()))
        throw PreconditionViolated("determinant eigenfunction: history too short");
    if (n < s) throw PreconditionViolated("determinant eigenfunction: n >= s required");

    std::vector<SampledFunction> denom_fs;
    const int hi = x + s;
    for (int k = 0; k < s; ++k)
        denom_fs.emplace_back(x, [&] {
            Vector v = eigenfunction_table(fam, lambda, k, hi);
            return Vector(v.begin() + x, v.end());
        }());
    std::vector<SampledFunction> numer_fs = denom_fs;
    numer_fs.emplace_back(x, [&] {
        Vector v = eigenfunction_table(fam, lambda, n, hi);
        return Vector(v.begin() + x, v.end());
    }());

    const Real numer = casoratian(numer_fs, x);
    Real prefactor = (s % 2 == 0) ? 1 : -1;
    Real denom;
    if (variant == CrumVariant::BPrefactor) {
        for (int k = 0; k < s; ++k) prefactor *= std::sqrt(std::max(history[k].b[x], Real(0)));
        denom = casoratian(denom_fs, x + 1);
    } else {
        for (int k = 0; k < s; ++k)
            prefactor *= std::sqrt(std::max(history[k].d[x + s - k], Real(0)));
        denom = casoratian(denom_fs, x);
    }
    if (denom == 0) throw ZeroDenominator(x, "Casoratian denominator");
    return prefactor * numer / denom;
}

ShapeInvarianceReport verify_shape_invariance(const Family& fam, const ParameterSet& lambda,
                                              const GridSpec& grid, const NumericPolicy& policy,
                                              Real perturb_b) {
    ShapeInvarianceReport rep;
    const ParameterSet shifted = lambda.shifted(1);
    const Real kappa = lambda.kappa();
    const auto history = crum_chain(fam, lambda, grid, 1, std::min(grid.n_max(), 4), policy);
    const CrumChainState& st = history[1];

    auto rel = [](Real a, Real b) {
        return std::fabs(a - b) / std::max({Real(1), std::fabs(a), std::fabs(b)});
    };

    for (int x = 0; x <= st.x_max_s; ++x) {
        rep.b_dev = std::max(rep.b_dev,
                             rel(st.b[x] + perturb_b, kappa * fam.bpot(static_cast<Real>(x), shifted)));
        rep.d_dev = std::max(rep.d_dev, rel(st.d[x], kappa * fam.dpot(static_cast<Real>(x), shifted)));
    }
    for (int x = 0; x <= st.x_max_s; ++x) {
        const Real xr = static_cast<Real>(x);
        const Real lhs1 = std::sqrt(fam.bpot(xr + 1, lambda) * fam.dpot(xr + 1, lambda));
        const Real rhs1 = kappa * std::sqrt(fam.bpot(xr, shifted) * fam.dpot(xr + 1, shifted));
        rep.cond1_dev = std::max(rep.cond1_dev, rel(lhs1, rhs1));
        const Real lhs2 = fam.bpot(xr, lambda) + fam.dpot(xr + 1, lambda);
        const Real rhs2 = kappa * (fam.bpot(xr, shifted) + fam.dpot(xr, shifted)) +
                          fam.energy(1, lambda);
        rep.cond2_dev = std::max(rep.cond2_dev, rel(lhs2, rhs2));
    }
    const int n_hi = std::min(grid.n_max(), 12);
    for (int n = 0; n <= n_hi; ++n) {
        Real sum = 0;
        for (int k = 0; k < n; ++k)
            sum += lambda.kappa_pow(static_cast<Real>(k)) * fam.energy(1, lambda.shifted(k));
        rep.energy_sum_dev = std::max(rep.energy_sum_dev, rel(sum, fam.energy(n, lambda)));
    }
    rep.pass = rep.b_dev <= policy.identity_tol && rep.d_dev <= policy.identity_tol &&
               rep.cond1_dev <= policy.identity_tol && rep.cond2_dev <= policy.identity_tol &&
               rep.energy_sum_dev <= policy.identity_tol;
    return rep;
}

WaveFunction rodrigues_wavefunction(const Family& fam, const ParameterSet& lambda,
                                    const GridSpec& grid, int n) {
    const bool finite = grid.finite();
    const int base_top = finite ? grid.x_max - n : grid.x_max;
    if (base_top < 0) throw PreconditionViolated("rodrigues: n exceeds the finite grid");

    const ParameterSet ln = lambda.shifted(n);
    const Vector logw = log_weight_table(fam, ln, base_top);
    Vector f(base_top + 1);
    for (int x = 0; x <= base_top; ++x) f[x] = std::exp(logw[x] / 2);

    for (int k = n - 1; k >= 0; --k) {
        const ParameterSet lk = lambda.shifted(k);
        const int out_top = finite ? static_cast<int>(f.size()) : static_cast<int>(f.size()) - 1;
        Vector out(out_top + 1, 0);
        for (int x = 0; x <= out_top; ++x) {
            const Real fx = (x < static_cast<int>(f.size())) ? f[x] : 0;
            out[x] = std::sqrt(fam.bpot(static_cast<Real>(x), lk)) * fx;
            if (x >= 1)
                out[x] -= std::sqrt(fam.dpot(static_cast<Real>(x), lk)) * f[x - 1];
        }
        f = std::move(out);
    }
    WaveFunction psi;
    psi.values = std::move(f);
    return psi;
}

CrumPolynomialTables crum_polynomial_tables(const Family& fam, const ParameterSet& lambda,
                                            const GridSpec& grid, int s,
                                            const std::vector<int>& levels,
                                            const NumericPolicy& policy) {
    // degree-1 check of phi_1/phi_0 in eta
    {
        Vector etas, p1;
        const int pts = std::min(grid.x_max, 12);
        for (int x = 0; x <= pts; ++x) {
            etas.push_back(fam.eta(static_cast<Real>(x), lambda));
            p1.push_back(fam.poly(1, static_cast<Real>(x), lambda));
        }
        if (polynomial_fit(etas, p1, 1).residual > policy.identity_tol)
            throw AffineCheckFailed(fam.id() + ": phi_1/phi_0 is not affine in eta");
    }

    const int x0_top = grid.x_max;
    CrumPolynomialTables out;
    out.s = s;
    out.levels = levels;

    // eta^{[k]} tables for k = 0..s on [0, x0_top + 1 - k]
    std::vector<Vector> eta_k(s + 1);
    for (int k = 0; k <= s; ++k) {
        eta_k[k].resize(x0_top + 2 - k);
        for (int x = 0; x <= x0_top + 1 - k; ++x) {
            Real sum = 0;
            for (int j = 0; j <= k; ++j) sum += fam.eta(static_cast<Real>(x + j), lambda);
            eta_k[k][x] = sum;
        }
    }
    out.eta_s = eta_k[s];

    for (int n : levels) {
        Vector p(x0_top + 1);
        for (int x = 0; x <= x0_top; ++x) p[x] = fam.poly(n, static_cast<Real>(x), lambda);
        for (int step = 1; step <= s; ++step) {
            const Real ratio = fam.leading_coeff(step - 1, lambda) / fam.leading_coeff(step, lambda);
            Vector q(p.size() - 1);
            for (size_t x = 0; x + 1 < p.size(); ++x) {
                const Real de = eta_k[step - 1][x] - eta_k[step - 1][x + 1];
                if (de == 0) throw ZeroDenominator(static_cast<int>(x), "eta difference");
                q[x] = ratio * (p[x] - p[x + 1]) / de;
            }
            p = std::move(q);
        }
        out.rows.push_back(std::move(p));
    }
    return out;
}

std::string chain_report_json(const Family& fam, const ParameterSet& lambda,
                              const std::vector<CrumChainState>& history,
                              const NumericPolicy& policy) {
    nlohmann::json j;
    j["schema"] = "dqm-report/1";
    j["family"] = fam.id();
    nlohmann::json params;
    if (lambda.has_q()) params["q"] = static_cast<double>(lambda.q());
    for (const auto& [name, p] : lambda.entries())
        params[name] = static_cast<double>(p.value(lambda.has_q() ? lambda.q() : 0));
    j["lambda"] = params;
    j["steps"] = nlohmann::json::array();
    for (const auto& st : history) {
        nlohmann::json step;
        step["s"] = st.s;
        step["x_max"] = st.x_max_s;
        const JacobiSystem sys = st.system();
        std::vector<double> spectrum;
        for (Real e : sys.eigensystem().values)
            spectrum.push_back(static_cast<double>(e + st.e_offset()));
        step["spectrum"] = spectrum;
        Real max_resid = 0;
        for (size_t k = 0; k < st.levels.size() && k < spectrum.size(); ++k) {
            const Real expect = st.energies[k];
            const Real got = static_cast<Real>(spectrum[k]);
            max_resid = std::max(max_resid,
                                 std::fabs(got - expect) / std::max(Real(1), std::fabs(expect)));
        }
        step["max_residual"] = static_cast<double>(max_resid);
        Real margin = std::numeric_limits<Real>::max();
        for (int x = 0; x < st.x_max_s; ++x) margin = std::min(margin, st.b[x]);
        for (int x = 1; x <= st.x_max_s; ++x) margin = std::min(margin, st.d[x]);
        step["positivity_margin"] = static_cast<double>(margin);
        step["pass"] = max_resid <= 100 * policy.identity_tol;
        j["steps"].push_back(std::move(step));
    }
    return j.dump(2);
}

}  // namespace dqm
