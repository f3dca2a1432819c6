#include <cmath>

#include "doctest.h"
#include "dqm/core.hpp"
#include "dqm/families.hpp"
#include "dqm/qseries.hpp"

using namespace dqm;

TEST_CASE("parameter shifts are exact in the accumulator") {
    const Family& fam = family("dual_quantum_q_krawtchouk");
    ParameterSet l = fam.default_parameters();
    l.set_q(0.5L);
    l.override_coeff("p", 10);
    l.override_coeff("N", 3);

    SUBCASE("s = 0 leaves lambda unchanged") {
        const ParameterSet s0 = shift_parameters(l, 0);
        CHECK(s0.value("p") == l.value("p"));
        CHECK(s0.value("N") == l.value("N"));
    }

    SUBCASE("delta = (0, -1) drops N by one, p fixed") {
        const ParameterSet s1 = shift_parameters(l, 1);
        CHECK(s1.value("p") == 10.0L);
        CHECK(s1.value("N") == 2.0L);
    }

    SUBCASE("shifting twice then once equals three at once, exactly") {
        const ParameterSet a = shift_parameters(shift_parameters(l, 2), 1);
        const ParameterSet b = shift_parameters(l, 3);
        CHECK(a.value("N") == b.value("N"));
        CHECK(a.raw("N").shift == b.raw("N").shift);
    }

    SUBCASE("multiplicative entries shift on the exponent") {
        ParameterSet qr = family("q_racah").default_parameters();
        const ParameterSet s = shift_parameters(qr, 2);
        CHECK(s.value("b") ==
              doctest::Approx(static_cast<double>(qr.value("b")) * 0.36).epsilon(1e-14));
        CHECK(s.raw("b").shift == 2);
    }
}

TEST_CASE("validate_parameters enforces the named domains") {
    const GridSpec g3 = GridSpec::finite(3);

    SUBCASE("dual quantum q-Krawtchouk accepts p > q^{-N}") {
        ParameterSet l = family("dual_quantum_q_krawtchouk").default_parameters();
        l.set_q(0.5L);
        l.override_coeff("p", 10);
        l.override_coeff("N", 3);
        CHECK_NOTHROW(validate_parameters("dual_quantum_q_krawtchouk", l, g3));
        // idempotent
        const ParameterSet v = validate_parameters("dual_quantum_q_krawtchouk", l, g3);
        CHECK_NOTHROW(validate_parameters("dual_quantum_q_krawtchouk", v, g3));
    }

    SUBCASE("p = 4 < q^{-3} = 8 is rejected with the constraint named") {
        ParameterSet l = family("dual_quantum_q_krawtchouk").default_parameters();
        l.set_q(0.5L);
        l.override_coeff("p", 4);
        l.override_coeff("N", 3);
        try {
            validate_parameters("dual_quantum_q_krawtchouk", l, g3);
            FAIL("expected OutOfDomain");
        } catch (const OutOfDomain& e) {
            CHECK(e.parameter == "p");
            CHECK(e.constraint.find("q^{-N}") != std::string::npos);
        }
    }

    SUBCASE("degenerate Krawtchouk probability is rejected") {
        ParameterSet l = family("krawtchouk").default_parameters();
        l.override_coeff("p", 0);
        CHECK_THROWS_AS(validate_parameters("krawtchouk", l, GridSpec::finite(8)), OutOfDomain);
    }
}

TEST_CASE("numeric policy validation") {
    NumericPolicy p;
    CHECK_NOTHROW(p.validate());
    p.identity_tol = 0;
    CHECK_THROWS_AS(p.validate(), OutOfDomain);
    p.identity_tol = std::numeric_limits<Real>::epsilon();  // below eps * 1e3
    CHECK_THROWS_AS(p.validate(), OutOfDomain);
}

TEST_CASE("series building blocks") {
    SUBCASE("rising factorial and q-shifted factorial") {
        CHECK(pochhammer(3, 0) == 1.0L);
        CHECK(pochhammer(3, 4) == 3.0L * 4 * 5 * 6);
        CHECK(q_pochhammer(0.25L, 0.5L, 2) == doctest::Approx(0.75 * 0.875));
        CHECK(q_pochhammer(0, 0.5L, 5) == 1.0L);
    }

    SUBCASE("infinite product truncates at the tail tolerance") {
        const Real q = 0.5L;
        Real direct = 1;
        for (int j = 0; j < 80; ++j) direct *= 1 - 0.3L * std::pow(q, static_cast<Real>(j));
        CHECK(std::fabs(q_pochhammer_inf(0.3L, q) - direct) < 1e-13L);
        CHECK_THROWS_AS(q_pochhammer_inf(0.3L, 1.5L), OutOfDomain);
    }

    SUBCASE("terminating sums against hand expansions") {
        // 2F1(-1, -x; b; z) = 1 + x z / b
        CHECK(hypergeometric_sum({-1, -2.5L}, {1.5L}, 0.75L, 1) ==
              doctest::Approx(1 + 2.5 * 0.75 / 1.5));
        // 2phi1(q^{-1}, a; b; q, z) = 1 + (1 - q^{-1})(1 - a) z / ((1 - q)(1 - b))
        const Real q = 0.5L, a = 0.25L, b = 0.125L, z = 0.4L;
        CHECK(basic_hypergeometric_sum({1 / q, a}, {b}, q, z, 1) ==
              doctest::Approx(1 + (1 - 1 / q) * (1 - a) * z / ((1 - q) * (1 - b))));
        // the r = s + 2 twist factor: 2phi0(q^{-1}, a; -; q, z) gains (-1)q^0
        CHECK(basic_hypergeometric_sum({1 / q, a}, {}, q, z, 1) ==
              doctest::Approx(1 - (1 - 1 / q) * (1 - a) * z / (1 - q)));
    }
}

TEST_CASE("grid construction") {
    CHECK(GridSpec::finite(5).size() == 6);
    CHECK_THROWS_AS(GridSpec::truncated(4), OutOfDomain);

    SUBCASE("truncated grids stop once the weight tail is below tolerance") {
        const Family& fam = family("meixner");
        const ParameterSet l = fam.default_parameters();
        const GridSpec g = make_grid(fam, l);
        CHECK(g.x_max >= 8);
        const Vector logw = log_weight_table(fam, l, g.x_max);
        CHECK(std::exp(logw[g.x_max]) < default_policy().tail_tol);
    }
}
