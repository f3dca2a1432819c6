#include "dqm/hamiltonian.hpp"

#include <cmath>

#include "json.hpp"

namespace dqm {

JacobiSystem::JacobiSystem(Vector bpot, Vector dpot, GridSpec grid)
    : grid_(grid), bpot_(std::move(bpot)), dpot_(std::move(dpot)) {
    const int n = static_cast<int>(bpot_.size());
    diag_.resize(n);
    offdiag_.assign(n > 0 ? n - 1 : 0, 0);
    for (int x = 0; x < n; ++x) diag_[x] = bpot_[x] + dpot_[x];
    for (int x = 0; x + 1 < n; ++x) {
        const Real prod = bpot_[x] * dpot_[x + 1];
        if (prod < -default_policy().positivity_tol) throw NegativePotential(x, prod);
        offdiag_[x] = -std::sqrt(std::max(prod, Real(0)));
    }
}

Matrix JacobiSystem::dense() const {
    Matrix h(dim(), dim());
    for (int x = 0; x < dim(); ++x) {
        h(x, x) = diag_[x];
        if (x + 1 < dim()) h(x, x + 1) = h(x + 1, x) = offdiag_[x];
    }
    return h;
}

const Eigensystem& JacobiSystem::eigensystem() const {
    std::call_once(cache_->once, [this] {
        try {
            cache_->eig = std::make_unique<Eigensystem>(tridiagonal_eigensystem(diag_, offdiag_));
        } catch (const ConvergenceFailure&) {
            if (dim() > 64) throw;
            cache_->eig = std::make_unique<Eigensystem>(jacobi_eigensystem(dense()));
        }
        // snap the zero mode
        if (!cache_->eig->values.empty() &&
            std::fabs(cache_->eig->values.front()) <= default_policy().identity_tol)
            cache_->eig->values.front() = 0;
    });
    return *cache_->eig;
}

JacobiSystem build(const Family& fam, const ParameterSet& lambda, const GridSpec& grid) {
    Vector b(grid.size()), d(grid.size());
    for (int x = 0; x <= grid.x_max; ++x) {
        b[x] = fam.bpot(static_cast<Real>(x), lambda);
        d[x] = fam.dpot(static_cast<Real>(x), lambda);
    }
    if (grid.finite()) b[grid.x_max] = 0;  // exact boundary
    d[0] = 0;
    return JacobiSystem(std::move(b), std::move(d), grid);
}

WaveFunction ground_state(const Family& fam, const ParameterSet& lambda, const GridSpec& grid) {
    WaveFunction psi;
    psi.log_sq = log_weight_table(fam, lambda, grid.x_max);
    psi.values.resize(psi.log_sq.size());
    for (size_t x = 0; x < psi.log_sq.size(); ++x) psi.values[x] = std::exp(psi.log_sq[x] / 2);
    return psi;
}

Vector eigenfunction_table(const Family& fam, const ParameterSet& lambda, int n, int x_hi) {
    const int nn = fam.finite() ? fam.grid_n(lambda) : -1;
    const int in_grid_hi = (nn >= 0) ? std::min(x_hi, nn) : x_hi;
    const Vector logw = log_weight_table(fam, lambda, in_grid_hi);
    Vector out(static_cast<size_t>(x_hi) + 1, 0);
    for (int x = 0; x <= x_hi; ++x) {
        if (nn >= 0 && x > nn) {
            out[x] = 0;  // phi_0^2 has an exact zero at integer points above N
            continue;
        }
        out[x] = std::exp(logw[x] / 2) * fam.poly(n, static_cast<Real>(x), lambda);
    }
    return out;
}

Matrix Factorization::a_dense() const {
    const int n = static_cast<int>(sqrt_b.size());
    Matrix a(n, n);
    for (int x = 0; x < n; ++x) {
        a(x, x) = sqrt_b[x];
        if (x + 1 < n) a(x, x + 1) = -sqrt_d[x + 1];
    }
    return a;
}

Matrix Factorization::a_dagger_dense() const { return a_dense().transposed(); }

Vector Factorization::apply_a(const Vector& f) const {
    const int n = static_cast<int>(f.size());
    Vector out(n, 0);
    for (int x = 0; x < n; ++x) {
        out[x] = sqrt_b[x] * f[x];
        if (x + 1 < n) out[x] -= sqrt_d[x + 1] * f[x + 1];
    }
    return out;
}

Vector Factorization::apply_a_dagger(const Vector& f) const {
    const int n = static_cast<int>(f.size());
    Vector out(std::min(f.size() + 1, sqrt_b.size()), 0);
    for (int x = 0; x < static_cast<int>(out.size()); ++x) {
        out[x] = (x < n ? sqrt_b[x] * f[x] : 0);
        if (x >= 1) out[x] -= sqrt_d[x] * f[x - 1];
    }
    return out;
}

Factorization factorize(const JacobiSystem& sys, const NumericPolicy& policy) {
    Factorization f;
    f.sqrt_b.resize(sys.dim());
    f.sqrt_d.resize(sys.dim());
    for (int x = 0; x < sys.dim(); ++x) {
        const Real b = sys.bpot()[x], d = sys.dpot()[x];
        if (b < -policy.positivity_tol) throw NegativePotential(x, b);
        if (d < -policy.positivity_tol) throw NegativePotential(x, d);
        f.sqrt_b[x] = std::sqrt(std::max(b, Real(0)));
        f.sqrt_d[x] = std::sqrt(std::max(d, Real(0)));
    }
    return f;
}

Vector apply_similarity_transform(const JacobiSystem& sys, const Vector& f_ext) {
    const int n = sys.dim();
    if (static_cast<int>(f_ext.size()) < n + 1)
        throw DomainExceeded("similarity transform needs samples on [0, x_max+1]");
    Vector out(n, 0);
    for (int x = 0; x < n; ++x) {
        out[x] = sys.bpot()[x] * (f_ext[x] - f_ext[x + 1]);
        if (x > 0) out[x] += sys.dpot()[x] * (f_ext[x] - f_ext[x - 1]);
    }
    return out;
}

Matrix similarity_matrix(const JacobiSystem& sys) {
    const int n = sys.dim();
    Matrix h(n, n);
    for (int x = 0; x < n; ++x) {
        h(x, x) = sys.bpot()[x] + sys.dpot()[x];
        if (x + 1 < n) h(x, x + 1) = -sys.bpot()[x];
        if (x > 0) h(x, x - 1) = -sys.dpot()[x];
    }
    return h;
}

SpectrumReport spectrum_report(const Family& fam, const ParameterSet& lambda, const GridSpec& grid,
                               const NumericPolicy& policy) {
    const JacobiSystem sys = build(fam, lambda, grid);
    SpectrumReport rep;
    rep.family_id = fam.id();
    rep.eigenvalues = sys.eigensystem().values;
    for (int n = 0; n <= grid.n_max(); ++n) rep.closed_form.push_back(fam.energy(n, lambda));

    // A truncated grid only resolves the levels whose eigenfunction has
    // negligible weight at the cut: phi_n(C)^2 ~ phi_0(C)^2 P_n(C)^2.
    rep.levels_checked = grid.n_max();
    if (!grid.finite()) {
        const Vector logw = log_weight_table(fam, lambda, grid.x_max);
        rep.levels_checked = 0;
        for (int n = 0; n <= grid.n_max(); ++n) {
            const Real pc = fam.poly(n, static_cast<Real>(grid.x_max), lambda);
            if (std::exp(logw[grid.x_max]) * pc * pc > policy.identity_tol) break;
            rep.levels_checked = n;
        }
    }
    for (int k = 0; k <= rep.levels_checked; ++k) {
        const Real scale = std::max(Real(1), std::fabs(rep.closed_form[k]));
        rep.max_residual =
            std::max(rep.max_residual, std::fabs(rep.eigenvalues[k] - rep.closed_form[k]) / scale);
    }
    rep.pass = grid.finite() ? rep.max_residual <= 100 * policy.identity_tol
                             : rep.max_residual <= 1e-8L;
    return rep;
}

std::string spectrum_report_json(const SpectrumReport& report, const ParameterSet& lambda) {
    nlohmann::json j;
    j["schema"] = "dqm-report/1";
    j["family"] = report.family_id;
    nlohmann::json params;
    if (lambda.has_q()) params["q"] = static_cast<double>(lambda.q());
    for (const auto& [name, p] : lambda.entries())
        params[name] = static_cast<double>(p.value(lambda.has_q() ? lambda.q() : 0));
    j["lambda"] = params;
    j["N"] = static_cast<int>(report.eigenvalues.size()) - 1;
    auto to_dbl = [](const Vector& v) {
        std::vector<double> out;
        for (Real r : v) out.push_back(static_cast<double>(r));
        return out;
    };
    j["eigenvalues"] = to_dbl(report.eigenvalues);
    j["closed_form"] = to_dbl(report.closed_form);
    j["levels_checked"] = report.levels_checked;
    j["max_residual"] = static_cast<double>(report.max_residual);
    j["pass"] = report.pass;
    return j.dump(2);
}

}  // namespace dqm
