#include <cmath>

#include "doctest.h"
#include "dqm/adler.hpp"
#include "dqm/special_deletion.hpp"

using namespace dqm;

namespace {

Real rel(Real a, Real b) {
    return std::fabs(a - b) / std::max({Real(1), std::fabs(a), std::fabs(b)});
}

ParameterSet dqqk3() {
    ParameterSet l = family("dual_quantum_q_krawtchouk").default_parameters();
    l.set_q(0.5L);
    l.override_coeff("p", 10);
    l.override_coeff("N", 3);
    return l;
}

}  // namespace

TEST_CASE("deforming polynomial values") {
    SUBCASE("depth 0 is 1; x = 0 is 1") {
        for (const std::string& id : implemented_family_ids()) {
            const Family& fam = family(id);
            const ParameterSet l = fam.default_parameters();
            CHECK(xi_ell(fam, l, 0, 3) == 1.0L);
            for (int ell = 1; ell <= 4; ++ell)
                CHECK_MESSAGE(std::fabs(xi_ell(fam, l, ell, 0) - 1) < 1e-12L, id);
        }
    }

    SUBCASE("closed form vs Casoratian definition, depth <= 4, all families") {
        for (const std::string& id : implemented_family_ids()) {
            const Family& fam = family(id);
            REQUIRE(fam.has_xi());
            const ParameterSet l = fam.default_parameters();
            const GridSpec g = make_grid(fam, l);
            for (int ell = 1; ell <= 4; ++ell)
                for (int x = 0; x <= std::min(g.x_max - ell + 1, 6); ++x)
                    CHECK_MESSAGE(xi_vs_casoratian_residual(fam, l, ell, x) <= 1e-8L,
                                  id << " ell=" << ell << " x=" << x);
        }
    }

    SUBCASE("depth recurrence") {
        for (const std::string& id : {"krawtchouk", "racah", "q_racah",
                                      "dual_quantum_q_krawtchouk", "dual_little_q_jacobi",
                                      "meixner"}) {
            const Family& fam = family(id);
            const ParameterSet l = fam.default_parameters();
            for (int ell = 0; ell <= 2; ++ell)
                for (int x = 0; x <= 4; ++x)
                    CHECK_MESSAGE(xi_recurrence_residual(fam, l, ell, x) <= 1e-8L,
                                  id << " ell=" << ell);
        }
    }

    SUBCASE("xi_l = P_{l-1, l}") {
        const Family& fam = family("dual_quantum_q_krawtchouk");
        const ParameterSet l = fam.default_parameters();
        for (int ell = 1; ell <= 3; ++ell) {
            const ModifiedPolynomial mp =
                modified_polynomials(fam, l, make_grid(fam, l), ell - 1, ell);
            for (int x = 0; x < static_cast<int>(mp.values.size()); ++x)
                CHECK(rel(mp.values[x], xi_ell(fam, l, ell, x)) < 1e-8L);
        }
    }
}

TEST_CASE("special deleted system") {
    const Family& fam = family("dual_quantum_q_krawtchouk");
    const ParameterSet l = dqqk3();
    const GridSpec g = GridSpec::finite(3);

    SUBCASE("depth 0 is the original system") {
        const SpecialDeletedSystem sp = build_special(fam, l, g, 0);
        for (int x = 0; x <= 3; ++x) {
            CHECK(rel(sp.bl[x], x == 3 ? 0 : fam.bpot(x, l)) < 1e-16L);
            CHECK(rel(sp.dl[x], x == 0 ? 0 : fam.dpot(x, l)) < 1e-16L);
        }
    }

    SUBCASE("depth 2: spectrum {0, 7}, equality with the generic path") {
        const SpecialDeletedSystem sp = build_special(fam, l, g, 2);
        const Vector ev = sp.system().eigensystem().values;
        REQUIRE(ev.size() == 2);
        CHECK(std::fabs(ev[0]) < 1e-12L);
        CHECK(std::fabs(ev[1] - 7) < 1e-12L);

        const DeletedSystem generic = adler_chain(fam, l, g, validate_deletion({1, 2}, 3));
        for (int x = 0; x <= sp.xbar_max; ++x) {
            CHECK(rel(sp.bl[x], generic.bbar[x]) < 1e-8L);
            CHECK(rel(sp.dl[x], generic.dbar[x]) < 1e-8L);
        }
    }

    SUBCASE("odd depth is quarantined") {
        CHECK_THROWS_AS(build_special(fam, l, g, 1), PreconditionViolated);
        const SpecialDeletedSystem sp = build_special(fam, l, g, 1, true);
        CHECK_FALSE(sp.hermitian);
        CHECK_THROWS_AS(sp.system(), NonHermitianSystem);
    }

    SUBCASE("ground state keeps the unnormalized convention phi(0) != 1") {
        const SpecialDeletedSystem sp = build_special(fam, l, g, 2);
        CHECK(std::fabs(sp.phi_l0[0] - 1) > 1e-6L);
        // C / (sqrt(B(0; l+ld)) sqrt(xi(1)))
        const Real expect = sp.c_const / std::sqrt(fam.bpot(0, l.shifted(2))) /
                            std::sqrt(xi_ell(fam, l, 2, 1));
        CHECK(rel(sp.phi_l0[0], expect) < 1e-14L);
    }

    SUBCASE("xi positivity at integer points for even depth") {
        for (const std::string& id : {"krawtchouk", "hahn", "racah", "q_racah",
                                      "dual_quantum_q_krawtchouk"}) {
            const Family& f = family(id);
            const ParameterSet lam = f.default_parameters();
            const GridSpec grid = make_grid(f, lam);
            for (int ell : {2, 4}) {
                const SpecialDeletedSystem sp = build_special(f, lam, grid, ell);
                CHECK_MESSAGE(sp.xi_positivity_margin > 0, id);
            }
        }
    }
}

TEST_CASE("modified polynomials") {
    const Family& fam = family("dual_quantum_q_krawtchouk");
    const ParameterSet l = dqqk3();
    const GridSpec g = GridSpec::finite(3);

    SUBCASE("n = 0 is constant 1; normalization at x = 0") {
        const ModifiedPolynomial p0 = modified_polynomials(fam, l, g, 2, 0);
        for (Real v : p0.values) CHECK(v == 1.0L);
        const ModifiedPolynomial p3 = modified_polynomials(fam, l, g, 2, 3);
        CHECK(p3.normalization_dev < 1e-12L);
        CHECK(p3.casoratian_dev < 1e-8L);
        CHECK_THROWS_AS(modified_polynomials(fam, l, g, 2, 1), PreconditionViolated);
    }

    SUBCASE("zero count n - l on the reduced range for even depth") {
        // count sign changes of P_{l,n} along a fine real mesh of x
        const Family& f = family("krawtchouk");
        const ParameterSet lam = f.default_parameters();
        const GridSpec grid = make_grid(f, lam);
        for (int ell : {2, 4}) {
            for (int n = ell + 1; n <= std::min(grid.n_max(), ell + 6); ++n) {
                const ParameterSet ls = lam.shifted(ell);
                const int xbar = grid.x_max - ell;
                int sign_changes = 0;
                Real prev = 0;
                bool have_prev = false;
                for (int i = 0; i <= 400; ++i) {
                    const Real x = xbar * static_cast<Real>(i) / 400;
                    // two-term expression evaluated directly
                    const Real v =
                        f.bpot(x, ls) * f.xi(ell, x, lam) * f.varphi(x, ls) *
                            f.poly(n - ell - 1, x, lam.shifted(ell + 1)) -
                        f.dpot(x, ls) * f.xi(ell, x + 1, lam) * f.varphi(x - 1, ls) *
                            f.poly(n - ell - 1, x - 1, lam.shifted(ell + 1));
                    if (have_prev && prev * v < 0) ++sign_changes;
                    if (v != 0) {
                        prev = v;
                        have_prev = true;
                    }
                }
                CHECK_MESSAGE(sign_changes == n - ell, "n=" << n << " ell=" << ell);
            }
        }
    }
}

TEST_CASE("special report JSON") {
    const Family& fam = family("dual_quantum_q_krawtchouk");
    const ParameterSet l = dqqk3();
    const SpecialDeletedSystem sp = build_special(fam, l, GridSpec::finite(3), 2);
    const std::string j = special_report_json(sp);
    for (const char* key :
         {"\"schema\": \"dqm-report/1\"", "\"ell\": 2", "C_l_lambda", "xi_positivity_margin"})
        CHECK(j.find(key) != std::string::npos);
}

TEST_CASE("shift operators and norms") {
    const Family& fam = family("dual_quantum_q_krawtchouk");
    const ParameterSet l = fam.default_parameters();
    const GridSpec g = make_grid(fam, l);
    const SpecialDeletedSystem sp = build_special(fam, l, g, 2);

    SUBCASE("forward, backward, factors, energies and the partner Hamiltonian") {
        for (int n = 3; n <= 5; ++n) {
            const ShiftOperatorReport rep = shift_operator_checks(sp, n);
            CHECK_MESSAGE(rep.pass, "n=" << n);
            CHECK(rep.factor_dev <= 1e-10L);
        }
    }

    SUBCASE("energy relation at ell = 2, n = 4 by hand") {
        // q^{-4} - 1 = q^{-3} (q^{-1} - 1) + q^{-3} - 1
        const Real q = l.q();
        const Real lhs = fam.energy(4, l);
        const Real rhs = std::pow(q, -3.0L) * fam.energy(1, l.shifted(3)) + fam.energy(3, l);
        CHECK(rel(lhs, rhs) < 1e-17L);
    }

    SUBCASE("norm factor 1/3 at n = 0 for q = 1/2, closed vs summed") {
        const ParameterSet l3 = dqqk3();
        const SpecialDeletedSystem s3 = build_special(fam, l3, GridSpec::finite(3), 2);
        const SpecialNorm n0 = special_norms(s3, 0);
        CHECK(n0.rel_dev < 1e-8L);
        CHECK(rel(n0.closed_form, fam.dn_sq(0, l3) / 3) < 1e-12L);
        const SpecialNorm n3 = special_norms(s3, 3);
        CHECK(n3.rel_dev < 1e-8L);
        for (size_t k = 0; k < s3.dln_sq.size(); ++k) CHECK(s3.dln_sq[k] > 0);  // even depth
    }
}
