#include <cmath>

#include "doctest.h"
#include "dqm/adler.hpp"
#include "dqm/christoffel.hpp"
#include "dqm/families.hpp"

using namespace dqm;

namespace {

ParameterSet dqqk3() {
    ParameterSet l = family("dual_quantum_q_krawtchouk").default_parameters();
    l.set_q(0.5L);
    l.override_coeff("p", 10);
    l.override_coeff("N", 3);
    return l;
}

Real rel(Real a, Real b) {
    return std::fabs(a - b) / std::max({Real(1), std::fabs(a), std::fabs(b)});
}

}  // namespace

TEST_CASE("dual recurrence") {
    const Family& fam = family("dual_quantum_q_krawtchouk");
    const ParameterSet l = dqqk3();
    Vector b(4), d(4);
    for (int x = 0; x <= 3; ++x) {
        b[x] = fam.bpot(x, l);
        d[x] = fam.dpot(x, l);
    }
    b[3] = 0;

    SUBCASE("E = 0 gives the constant column") {
        for (Real v : dual_recurrence(b, d, 0)) CHECK(v == 1.0L);
    }

    SUBCASE("E = E(1): the column is the n = 1 polynomial row") {
        const Vector q = dual_recurrence(b, d, 1);
        const Real eps = std::numeric_limits<Real>::epsilon();
        for (int x = 0; x <= 3; ++x) CHECK(rel(q[x], fam.poly(1, x, l)) < 100 * eps);
    }

    SUBCASE("a vanishing interior B is an error") {
        Vector bz = b;
        bz[1] = 0;
        CHECK_THROWS_AS(dual_recurrence(bz, d, 1), ZeroLeadingCoefficient);
    }

    SUBCASE("Q_x(E) is a degree-x polynomial in E") {
        for (int x = 1; x <= 3; ++x) {
            Vector es, vals;
            for (int i = 0; i <= 2 * x + 6; ++i) {
                const Real e = -1 + 0.5L * i;
                es.push_back(e);
                vals.push_back(dual_recurrence(b, d, e)[x]);
            }
            CHECK(fitted_polynomial_degree(es, vals, x + 2, 1e-9L) == x);
        }
    }
}

TEST_CASE("duality on the finite catalog") {
    for (const std::string& id : {"krawtchouk", "hahn", "racah", "q_racah",
                                  "dual_quantum_q_krawtchouk"}) {
        const Family& fam = family(id);
        const ParameterSet l = fam.default_parameters();
        const GridSpec g = make_grid(fam, l);
        REQUIRE(g.x_max <= 12);
        const DualityReport rep = duality_check(fam, l, g);
        CHECK_MESSAGE(rep.duality_dev <= 1e-10L, id);
        CHECK_MESSAGE(rep.dual_orthogonality_dev <= 1e-8L, id);
        CHECK(rep.pass);
    }
}

TEST_CASE("duality on truncated families within the conditioning window") {
    for (const std::string& id : {"meixner", "charlier", "dual_little_q_jacobi",
                                  "dual_alternative_q_charlier"}) {
        const Family& fam = family(id);
        const ParameterSet l = fam.default_parameters();
        const GridSpec g = make_grid(fam, l);
        const DualityReport rep = duality_check(fam, l, g);
        CHECK_MESSAGE(rep.pass, id);
    }
}

TEST_CASE("deformed duals") {
    const Family& fam = family("dual_quantum_q_krawtchouk");
    const ParameterSet l = dqqk3();
    const GridSpec g = GridSpec::finite(3);
    const DeletionSet del = validate_deletion({1, 2}, 3);
    const DeletedSystem ds = adler_chain(fam, l, g, del);

    SUBCASE("deformed recurrence keeps Q_x(0) = 1") {
        const DualTable t = dual_table(ds.bbar, ds.dbar, ds.levels, ds.energies, true);
        CHECK(t.q0_dev <= 1e-15L);
    }

    SUBCASE("p_3 = 8 and p_0 = 1") {
        const DeformedDualityReport rep = deformed_duality_check(ds);
        REQUIRE(rep.levels == std::vector<int>{0, 3});
        CHECK(rel(rep.p_factors[0], 1.0L) < 1e-15L);
        CHECK(rel(rep.p_factors[1], 8.0L) < 1e-12L);  // (6/1)(4/3)
        CHECK(rep.duality_dev <= 1e-8L);
        CHECK(rep.orthogonality_dev <= 1e-8L);
        CHECK(rep.pass);
    }

    SUBCASE("preconditions: 0 in D or odd size are rejected") {
        const DeletedSystem crum_like = adler_chain(fam, l, g, validate_deletion({0, 1}, 3));
        CHECK_THROWS_AS(deformed_duality_check(crum_like), PreconditionViolated);
    }

    SUBCASE("battery over sets and families") {
        for (const std::string& id : {"krawtchouk", "hahn", "dual_quantum_q_krawtchouk"}) {
            const Family& f = family(id);
            const ParameterSet lam = f.default_parameters();
            const GridSpec grid = make_grid(f, lam);
            for (const std::vector<int>& levels :
                 {std::vector<int>{1, 2}, {1, 2, 3, 4}, {2, 3}}) {
                const DeletedSystem sys =
                    adler_chain(f, lam, grid, validate_deletion(levels, grid.n_max()));
                const DeformedDualityReport rep = deformed_duality_check(sys);
                CHECK_MESSAGE(rep.duality_dev <= 1e-8L, id);
                CHECK_MESSAGE(rep.orthogonality_dev <= 1e-8L, id);
            }
        }
    }
}

TEST_CASE("weight transformation") {
    const Family& fam = family("dual_quantum_q_krawtchouk");
    const ParameterSet l = dqqk3();
    const GridSpec g = GridSpec::finite(3);

    SUBCASE("factors d_n^2 prod(E(n) - E(d_j)), positive for admissible sets") {
        const DeletedSystem ds = adler_chain(fam, l, g, validate_deletion({1, 2}, 3));
        const WeightTransformationReport rep = weight_transformation_report(ds);
        CHECK(rep.pass);
        CHECK(rep.weights_positive);
        // n = 0 weight: d_0^2 (0-1)(0-3) = 3 d_0^2
        const Real d0sq = fam.dn_sq(0, l);
        CHECK(rel(rep.weights[0], 3 * d0sq) < 1e-12L);
    }

    SUBCASE("empty deletion keeps the weights") {
        const DeletedSystem ds = adler_chain(fam, l, g, validate_deletion({}, 3));
        const WeightTransformationReport rep = weight_transformation_report(ds);
        for (size_t k = 0; k < rep.levels.size(); ++k)
            CHECK(rel(rep.weights[k], fam.dn_sq(rep.levels[k], l)) < 1e-14L);
    }
}

TEST_CASE("elementary kernel-polynomial step") {
    const Family& fam = family("dual_quantum_q_krawtchouk");
    const ParameterSet l = dqqk3();

    // dual polynomials as functions of E: Q_x(E), degree x
    Vector b(4), d(4);
    for (int x = 0; x <= 3; ++x) {
        b[x] = fam.bpot(x, l);
        d[x] = fam.dpot(x, l);
    }
    auto qeval = [&](int x, Real e) { return dual_recurrence(b, d, e)[x]; };

    SUBCASE("finite at the node, degree preserved") {
        const Real a = fam.energy(1, l);
        Vector ys;
        for (int i = 0; i <= 10; ++i) ys.push_back(-0.5L + 0.35L * i);
        ys.push_back(a);  // removable singularity
        const Vector t1 = elementary_christoffel(qeval, a, 1, ys);
        for (Real v : t1) CHECK(std::isfinite(v));
        Vector es(ys.begin(), ys.begin() + 11), vals(t1.begin(), t1.begin() + 11);
        CHECK(fitted_polynomial_degree(es, vals, 3, 1e-9L) == 1);
    }

    SUBCASE("node at a polynomial zero raises") {
        // Q_1(E) = 1 - E/B(0): zero at E = B(0)
        CHECK_THROWS_AS(elementary_christoffel(qeval, b[0], 1, Vector{0.0L}), NodeZero);
    }

    SUBCASE("two steps at the deleted energies reproduce the deformed dual") {
        const DeletionSet del = validate_deletion({1, 2}, 3);
        const DeletedSystem ds = adler_chain(fam, l, GridSpec::finite(3), del);
        const Real e1 = fam.energy(1, l), e2 = fam.energy(2, l);

        // first step at E(1) acting on degree x, then a second at E(2)
        auto step1 = [&](int x, Real e) { return elementary_christoffel(qeval, e1, x, {e})[0]; };
        auto step2 = [&](int x, Real e) { return elementary_christoffel(step1, e2, x, {e})[0]; };

        for (size_t k = 0; k < ds.levels.size(); ++k) {
            const Real en = ds.energies[k];
            for (int x = 0; x <= ds.xbar_max; ++x) {
                const Real deformed = dual_recurrence(ds.bbar, ds.dbar, en)[x];
                const Real kernel = step2(x, en) / step2(x, 0);  // normalize to Q(0) = 1
                CHECK(rel(kernel, deformed) < 1e-8L);
            }
        }
    }
}

TEST_CASE("CSV export shape") {
    const Family& fam = family("dual_quantum_q_krawtchouk");
    const ParameterSet l = dqqk3();
    Vector b(4), d(4);
    for (int x = 0; x <= 3; ++x) {
        b[x] = fam.bpot(x, l);
        d[x] = fam.dpot(x, l);
    }
    b[3] = 0;
    Vector energies = {0, 1, 3, 7};
    const DualTable t = dual_table(b, d, {0, 1, 2, 3}, energies);
    const std::string csv = dual_table_csv(t, energies);
    CHECK(csv.rfind("x,E=0", 0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 5);  // header + 4 rows
}
