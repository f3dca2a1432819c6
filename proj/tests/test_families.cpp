#include <cmath>

#include "doctest.h"
#include "dqm/families.hpp"
#include "dqm/hamiltonian.hpp"

using namespace dqm;

namespace {

ParameterSet dqqk_reference_params() {
    ParameterSet l = family("dual_quantum_q_krawtchouk").default_parameters();
    l.set_q(0.5L);
    l.override_coeff("p", 10);
    l.override_coeff("N", 3);
    return l;
}

}  // namespace

TEST_CASE("catalog contents") {
    const auto& entries = catalog_list();
    auto find = [&](const std::string& id) -> const CatalogEntry* {
        for (const auto& e : entries)
            if (e.id == id) return &e;
        return nullptr;
    };
    REQUIRE(find("dual_quantum_q_krawtchouk") != nullptr);
    CHECK(find("dual_quantum_q_krawtchouk")->implemented);
    REQUIRE(find("q_racah") != nullptr);
    CHECK(find("q_racah")->most_generic);
    for (const char* id : {"krawtchouk", "hahn", "racah", "meixner", "charlier",
                           "dual_little_q_jacobi", "dual_alternative_q_charlier"})
        CHECK(find(id) != nullptr);
    // stubs carry their closed form as data and are flagged unimplemented
    const CatalogEntry* stub = find("dual_q_hahn");
    REQUIRE(stub != nullptr);
    CHECK_FALSE(stub->implemented);
    CHECK_FALSE(stub->xi_formula.empty());
    CHECK_THROWS_AS(family("dual_q_hahn"), OutOfDomain);

    SUBCASE("every implemented family validates its own defaults") {
        for (const std::string& id : implemented_family_ids()) {
            const Family& fam = family(id);
            const ParameterSet l = fam.default_parameters();
            const GridSpec g = make_grid(fam, l);
            CHECK_NOTHROW(validate_parameters(id, l, g));
        }
    }

    SUBCASE("JSON export carries the schema tag") {
        const std::string j = catalog_json();
        CHECK(j.find("dqm-report/1") != std::string::npos);
        CHECK(j.find("xi_formula") != std::string::npos);
    }
}

TEST_CASE("closed-form energies") {
    const ParameterSet l = dqqk_reference_params();
    const Family& fam = family("dual_quantum_q_krawtchouk");
    CHECK(fam.energy(2, l) == doctest::Approx(3.0).epsilon(1e-18));  // 2^2 - 1
    CHECK(fam.energy(0, l) == 0.0L);

    const Family& dlq = family("dual_little_q_jacobi");
    CHECK(dlq.energy(1, dlq.default_parameters()) == doctest::Approx(0.5).epsilon(1e-18));

    for (const std::string& id : implemented_family_ids()) {
        const Family& f = family(id);
        CHECK(f.energy(0, f.default_parameters()) == 0.0L);
    }
}

TEST_CASE("sinusoidal coordinate") {
    const ParameterSet l = dqqk_reference_params();
    const Family& fam = family("dual_quantum_q_krawtchouk");
    CHECK(fam.eta(0, l) == 0.0L);
    CHECK(fam.eta(1, l) == doctest::Approx(0.5).epsilon(1e-18));

    const Family& daq = family("dual_alternative_q_charlier");
    ParameterSet la = daq.default_parameters();  // q = 1/2, a = 1
    CHECK(daq.eta(1, la) == doctest::Approx(1.5).epsilon(1e-18));  // (2-1)(1+1/2)

    for (const std::string& id : implemented_family_ids()) {
        const Family& f = family(id);
        CHECK(std::fabs(f.eta(0, f.default_parameters())) < 1e-18L);
    }
}

TEST_CASE("potential tables on the extended grid") {
    for (const std::string& id : implemented_family_ids()) {
        const Family& fam = family(id);
        const ParameterSet l = fam.default_parameters();
        const GridSpec g = make_grid(fam, l);
        const PotentialPair pots = eval_potentials(fam, l, g);
        CHECK(std::fabs(pots.dval(0)) < 1e-16L);
        for (int x = 0; x < g.x_max; ++x) CHECK(pots.bval(x) > 0);
        for (int x = 1; x <= g.x_max; ++x) CHECK(pots.dval(x) > 0);
        if (fam.finite()) CHECK(std::fabs(pots.bval(g.x_max)) < 1e-16L);
        CHECK(pots.x_lo == -1);  // analytic continuation below the grid
    }
}

TEST_CASE("poles at extended points raise EvaluationSingularity") {
    // Racah denominator (2x + d)(2x + d + 1) hits zero at x = -1 when d = 2
    const Family& fam = family("racah");
    ParameterSet l = fam.default_parameters();
    l.override_coeff("d", 2.0L);
    CHECK_THROWS_AS(eval_potentials(fam, l, GridSpec::finite(7)), EvaluationSingularity);
}

TEST_CASE("dual quantum q-Krawtchouk potentials reproduce {0,1,3,7}") {
    const ParameterSet l = dqqk_reference_params();
    const Family& fam = family("dual_quantum_q_krawtchouk");
    const JacobiSystem sys = build(fam, l, GridSpec::finite(3));
    const Vector expect = {0, 1, 3, 7};
    for (int k = 0; k < 4; ++k)
        CHECK(std::fabs(sys.eigensystem().values[k] - expect[k]) < 1e-12L);
}

TEST_CASE("polynomial tables: recurrence is the evaluator, series must agree") {
    const ParameterSet l = dqqk_reference_params();
    const Family& fam = family("dual_quantum_q_krawtchouk");
    const GridSpec g = GridSpec::finite(3);
    const PolynomialTable t = polynomial_table(fam, l, {0, 1, 2, 3}, g);
    CHECK(t.normalization_dev < 1e-15L);
    CHECK(t.series_dev < 1e-15L);
    for (Real v : t.rows[0]) CHECK(v == doctest::Approx(1.0));  // P_0 == 1
    // direct 2phi1 value at n = 1, x = 1 against the recurrence row
    const Real series = fam.poly(1, 1, l);
    CHECK(std::fabs(t.rows[1][1] - series) < 1e-17L);
}

TEST_CASE("orthogonality by direct summation at defaults") {
    for (const std::string& id : {"krawtchouk", "hahn", "racah", "q_racah",
                                  "dual_quantum_q_krawtchouk"}) {
        const Family& fam = family(id);
        const ParameterSet l = fam.default_parameters();
        const GridSpec g = make_grid(fam, l);
        const Vector logw = log_weight_table(fam, l, g.x_max);
        for (int n = 0; n <= std::min(4, g.n_max()); ++n)
            for (int m = n; m <= std::min(4, g.n_max()); ++m) {
                Real sum = 0;
                for (int x = 0; x <= g.x_max; ++x)
                    sum += std::exp(logw[x]) * fam.poly(n, static_cast<Real>(x), l) *
                           fam.poly(m, static_cast<Real>(x), l);
                if (n == m) {
                    const Real dn2 = dn_sq_by_summation(fam, l, g, n);
                    CHECK(std::fabs(sum * dn2 - 1) < 1e-8L);
                    if (fam.has_dn_sq())
                        CHECK(std::fabs(fam.dn_sq(n, l) - dn2) / dn2 < 1e-8L);
                } else {
                    CHECK(std::fabs(sum) * dn_sq_by_summation(fam, l, g, n) < 1e-8L);
                }
            }
    }
}

TEST_CASE("leading coefficient ties B(0), E(1), eta(1) together") {
    for (const std::string& id : implemented_family_ids()) {
        const Family& fam = family(id);
        const ParameterSet l = fam.default_parameters();
        const Real c1 = fam.leading_coeff(1, l);
        const Real lhs = fam.bpot(0, l) / fam.energy(1, l);
        const Real rhs = -1 / (c1 * fam.eta(1, l));
        CHECK(std::fabs(lhs - rhs) / std::fabs(lhs) < 1e-15L);
    }
}

TEST_CASE("shift factors multiply to the energy") {
    for (const std::string& id : implemented_family_ids()) {
        const Family& fam = family(id);
        if (!fam.has_shift_factors()) continue;
        const ParameterSet l = fam.default_parameters();
        for (int n = 1; n <= 6; ++n)
            CHECK(std::fabs(fam.fn(n, l) * fam.bn(n - 1, l) - fam.energy(n, l)) <=
                  1e-14L * std::max(Real(1), std::fabs(fam.energy(n, l))));
    }
}

TEST_CASE("auxiliary function matches the eta difference ratio") {
    // (eta(x+alpha) - eta(x)) / eta(alpha) = varphi(x; lambda + (alpha-1) delta)
    for (const std::string& id : implemented_family_ids()) {
        const Family& fam = family(id);
        const ParameterSet l = fam.default_parameters();
        for (int alpha : {1, 2, 3})
            for (int x = 0; x <= 5; ++x) {
                const Real lhs = (fam.eta(static_cast<Real>(x + alpha), l) -
                                  fam.eta(static_cast<Real>(x), l)) /
                                 fam.eta(static_cast<Real>(alpha), l);
                const Real rhs = fam.varphi(static_cast<Real>(x), l.shifted(alpha - 1));
                CHECK(std::fabs(lhs - rhs) <= 1e-15L * std::max(Real(1), std::fabs(lhs)));
            }
    }
}
