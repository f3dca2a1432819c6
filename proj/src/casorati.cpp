#include "dqm/casorati.hpp"

#include <cmath>

#include "dqm/linalg.hpp"

namespace dqm {

Real casoratian(const std::vector<SampledFunction>& fs, int x) {
    const int m = static_cast<int>(fs.size());
    if (m == 0) return 1;
    if (m == 1) return fs[0].at(x);
    if (m == 2) return fs[0].at(x) * fs[1].at(x + 1) - fs[1].at(x) * fs[0].at(x + 1);
    if (m == 3) {
        Real det = 0;
        for (int k = 0; k < 3; ++k) {
            const int k1 = (k + 1) % 3, k2 = (k + 2) % 3;
            det += fs[k].at(x) *
                   (fs[k1].at(x + 1) * fs[k2].at(x + 2) - fs[k2].at(x + 1) * fs[k1].at(x + 2));
        }
        return det;
    }
    if (m == 4) {
        // cofactor expansion along the first row: division-free, so integer
        // samples evaluate exactly
        Real det = 0;
        for (int k = 0; k < 4; ++k) {
            std::vector<SampledFunction> minor;
            for (int j = 0; j < 4; ++j)
                if (j != k) minor.push_back(fs[j]);
            const Real cof = casoratian(minor, x + 1) * fs[k].at(x);
            det += (k % 2 == 0) ? cof : -cof;
        }
        return det;
    }
    Matrix a(m, m);
    for (int j = 0; j < m; ++j)
        for (int k = 0; k < m; ++k) a(j, k) = fs[k].at(x + j);
    return lu_determinant(std::move(a));
}

namespace {

Real relative_residual(Real lhs, Real rhs) {
    const Real scale = std::max({Real(1), std::fabs(lhs), std::fabs(rhs)});
    return std::fabs(lhs - rhs) / scale;
}

}  // namespace

Real check_product_rule(const SampledFunction& g, const std::vector<SampledFunction>& fs, int x) {
    const int m = static_cast<int>(fs.size());
    std::vector<SampledFunction> gf;
    for (const auto& f : fs) {
        Vector vals;
        for (int y = f.x_lo(); y <= f.x_hi(); ++y) vals.push_back(g.at(y) * f.at(y));
        gf.emplace_back(f.x_lo(), std::move(vals));
    }
    Real prod = 1;
    for (int k = 0; k < m; ++k) prod *= g.at(x + k);
    return relative_residual(casoratian(gf, x), prod * casoratian(fs, x));
}

Real check_wronskian_identity(const std::vector<SampledFunction>& fs, const SampledFunction& g,
                              const SampledFunction& h, int x) {
    auto with = [&](const SampledFunction* extra1, const SampledFunction* extra2) {
        std::vector<SampledFunction> v = fs;
        if (extra1) v.push_back(*extra1);
        if (extra2) v.push_back(*extra2);
        return v;
    };
    const auto fg = with(&g, nullptr);
    const auto fh = with(&h, nullptr);
    const auto fgh = with(&g, &h);
    const Real t1 = casoratian(fg, x) * casoratian(fh, x + 1);
    const Real t2 = casoratian(fh, x) * casoratian(fg, x + 1);
    const Real rhs = casoratian(fs, x + 1) * casoratian(fgh, x);
    // residual relative to the largest constituent: the difference t1 - t2
    // may cancel far below the term size
    const Real scale = std::max({Real(1), std::fabs(t1), std::fabs(t2), std::fabs(rhs)});
    return std::fabs((t1 - t2) - rhs) / scale;
}

Real varphi_ell(const Family& fam, const ParameterSet& lambda, int ell, Real x) {
    Real prod = 1;
    for (int k = 1; k <= ell - 1; ++k)
        for (int j = 0; j < k; ++j)
            prod *= (fam.eta(x + k, lambda) - fam.eta(x + j, lambda)) /
                    fam.eta(static_cast<Real>(k - j), lambda);
    return prod;
}

Real varphi_ell_product_residual(const Family& fam, const ParameterSet& lambda, int ell, Real x) {
    Real prod = 1;
    for (int k = 1; k <= ell - 1; ++k)
        for (int j = 0; j < k; ++j) prod *= fam.varphi(x + j, lambda.shifted(k - j - 1));
    return relative_residual(varphi_ell(fam, lambda, ell, x), prod);
}

Real poly_casoratian_prefactor(const Family& fam, const ParameterSet& lambda,
                               const std::vector<int>& levels) {
    const int m = static_cast<int>(levels.size());
    Real pref = ((m * (m - 1) / 2) % 2 == 0) ? 1 : -1;
    pref *= lambda.kappa_pow(-static_cast<Real>(m * (m - 1) * (m - 2)) / 6);
    for (int j = 1; j <= m; ++j) {
        const Real b0 = fam.bpot(0, lambda.shifted(j - 1));
        for (int k = j + 1; k <= m; ++k) {
            const Real diff =
                fam.energy(levels[k - 1], lambda) - fam.energy(levels[j - 1], lambda);
            if (diff == 0) throw ZeroPrefactor("coincident levels in polynomial Casoratian");
            pref *= diff / b0;
        }
    }
    return pref;
}

SampledFunction sample_poly(const Family& fam, const ParameterSet& lambda, int n, int x_lo,
                            int x_hi) {
    Vector vals;
    for (int x = x_lo; x <= x_hi; ++x) vals.push_back(fam.poly(n, static_cast<Real>(x), lambda));
    return SampledFunction(x_lo, std::move(vals));
}

PolyCasoratian casoratian_of_polynomials(const Family& fam, const ParameterSet& lambda,
                                         const std::vector<int>& levels, int x) {
    const int m = static_cast<int>(levels.size());
    std::vector<SampledFunction> fs;
    for (int n : levels) fs.push_back(sample_poly(fam, lambda, n, x, x + m - 1));
    PolyCasoratian out;
    out.raw = casoratian(fs, x);
    const Real phi_m = varphi_ell(fam, lambda, m, static_cast<Real>(x));
    out.normalized = out.raw / (phi_m * poly_casoratian_prefactor(fam, lambda, levels));
    return out;
}

}  // namespace dqm
