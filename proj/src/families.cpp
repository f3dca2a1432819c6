#include "dqm/families.hpp"

#include <cmath>
#include <map>
#include <sstream>

#include "dqm/christoffel.hpp"
#include "dqm/qseries.hpp"
#include "json.hpp"

namespace dqm {

Real Family::leading_coeff(int n, const ParameterSet& lambda) const {
    Real c = (n % 2 == 0) ? 1 : -1;
    c *= lambda.kappa_pow(-0.5L * n * (n - 1));
    const Real en = energy(n, lambda);
    for (int j = 1; j <= n; ++j) c /= eta(static_cast<Real>(j), lambda);
    for (int j = 0; j < n; ++j) c *= (en - energy(j, lambda)) / bpot(0, lambda.shifted(j));
    return c;
}

namespace {

// ---------------------------------------------------------------------------
// Krawtchouk
// ---------------------------------------------------------------------------

class Krawtchouk final : public Family {
public:
    std::string id() const override { return "krawtchouk"; }
    bool finite() const override { return true; }

    ParameterSet default_parameters() const override {
        ParameterSet p;
        p.add("p", 0.3L, 0).add("N", 8, -1);
        return p;
    }

    void check_domain(const ParameterSet& l) const override {
        const Real p = l.value("p");
        if (!(p > 0 && p < 1)) throw OutOfDomain("p", "0 < p < 1");
        if (grid_n(l) < 1) throw OutOfDomain("N", "N >= 1");
    }

    int grid_n(const ParameterSet& l) const override {
        return static_cast<int>(std::llround(static_cast<double>(l.value("N"))));
    }

    std::string constraints() const override { return "0 < p < 1; N >= 1"; }

    Real bpot(Real x, const ParameterSet& l) const override {
        return l.value("p") * (l.value("N") - x);
    }
    Real dpot(Real x, const ParameterSet& l) const override { return (1 - l.value("p")) * x; }
    Real energy(int n, const ParameterSet&) const override { return n; }
    Real eta(Real x, const ParameterSet&) const override { return x; }
    Real varphi(Real, const ParameterSet&) const override { return 1; }

    Real poly(int n, Real x, const ParameterSet& l) const override {
        return hypergeometric_sum({Real(-n), -x}, {-l.value("N")}, 1 / l.value("p"), n);
    }

    bool has_dn_sq() const override { return true; }
    Real dn_sq(int n, const ParameterSet& l) const override {
        const Real p = l.value("p");
        const int N = grid_n(l);
        Real binom = 1;
        for (int j = 1; j <= n; ++j) binom *= static_cast<Real>(N - n + j) / j;
        return binom * std::pow(p / (1 - p), static_cast<Real>(n)) *
               std::pow(1 - p, static_cast<Real>(N));
    }

    bool has_shift_factors() const override { return true; }
    Real fn(int n, const ParameterSet&) const override { return n; }
    Real bn(int, const ParameterSet&) const override { return 1; }

    bool has_xi() const override { return true; }
    Real xi(int ell, Real x, const ParameterSet& l) const override {
        ParameterSet t = l.shifted(ell - 1);
        t.override_coeff("N", -t.value("N"));
        return poly(ell, -x, t);
    }
};

// ---------------------------------------------------------------------------
// Hahn
// ---------------------------------------------------------------------------

class Hahn final : public Family {
public:
    std::string id() const override { return "hahn"; }
    bool finite() const override { return true; }

    ParameterSet default_parameters() const override {
        ParameterSet p;
        p.add("a", 1.7L, 1).add("b", 2.5L, 1).add("N", 8, -1);
        return p;
    }

    void check_domain(const ParameterSet& l) const override {
        if (!(l.value("a") > 0)) throw OutOfDomain("a", "a > 0");
        if (!(l.value("b") > 0)) throw OutOfDomain("b", "b > 0");
        if (grid_n(l) < 1) throw OutOfDomain("N", "N >= 1");
    }

    int grid_n(const ParameterSet& l) const override {
        return static_cast<int>(std::llround(static_cast<double>(l.value("N"))));
    }

    std::string constraints() const override { return "a > 0; b > 0; N >= 1"; }

    Real bpot(Real x, const ParameterSet& l) const override {
        return (x + l.value("a")) * (l.value("N") - x);
    }
    Real dpot(Real x, const ParameterSet& l) const override {
        return x * (l.value("b") + l.value("N") - x);
    }
    Real energy(int n, const ParameterSet& l) const override {
        return n * (n + l.value("a") + l.value("b") - 1);
    }
    Real eta(Real x, const ParameterSet&) const override { return x; }
    Real varphi(Real, const ParameterSet&) const override { return 1; }

    Real poly(int n, Real x, const ParameterSet& l) const override {
        const Real a = l.value("a"), b = l.value("b"), N = l.value("N");
        return hypergeometric_sum({Real(-n), n + a + b - 1, -x}, {a, -N}, 1, n);
    }

    bool has_shift_factors() const override { return true; }
    Real fn(int n, const ParameterSet& l) const override { return energy(n, l); }
    Real bn(int, const ParameterSet&) const override { return 1; }

    bool has_xi() const override { return true; }
    Real xi(int ell, Real x, const ParameterSet& l) const override {
        ParameterSet t = l.shifted(ell - 1);
        for (const char* name : {"a", "b", "N"}) t.override_coeff(name, -t.value(name));
        return poly(ell, -x, t);
    }
};

// ---------------------------------------------------------------------------
// Racah
// ---------------------------------------------------------------------------

class Racah final : public Family {
public:
    std::string id() const override { return "racah"; }
    bool finite() const override { return true; }

    ParameterSet default_parameters() const override {
        ParameterSet p;
        p.add("a", -7, 1).add("b", 9.8L, 1).add("c", 0.7L, 1).add("d", 1.3L, 1);
        return p;
    }

    void check_domain(const ParameterSet& l) const override {
        const Real a = l.value("a");
        if (!(a < 0 && std::fabs(a - std::llround(static_cast<double>(a))) < 1e-9L))
            throw OutOfDomain("a", "a = -N, N positive integer");
        if (!(l.value("d") > 0)) throw OutOfDomain("d", "d > 0");
        if (!(dtilde(l) > -1)) throw OutOfDomain("a+b+c-d-1", "dtilde > -1 (E increasing)");
    }

    int grid_n(const ParameterSet& l) const override {
        return static_cast<int>(std::llround(static_cast<double>(-l.value("a"))));
    }

    std::string constraints() const override { return "a = -N; d > 0; a+b+c-d-1 > -1; B, D > 0 on the grid"; }

    Real bpot(Real x, const ParameterSet& l) const override {
        const Real a = l.value("a"), b = l.value("b"), c = l.value("c"), d = l.value("d");
        const Real den = (2 * x + d) * (2 * x + d + 1);
        if (den == 0) throw EvaluationSingularity(x, "Racah B denominator");
        return -(x + a) * (x + b) * (x + c) * (x + d) / den;
    }
    Real dpot(Real x, const ParameterSet& l) const override {
        const Real a = l.value("a"), b = l.value("b"), c = l.value("c"), d = l.value("d");
        const Real den = (2 * x + d - 1) * (2 * x + d);
        if (den == 0) throw EvaluationSingularity(x, "Racah D denominator");
        return -x * (x + d - a) * (x + d - b) * (x + d - c) / den;
    }
    Real energy(int n, const ParameterSet& l) const override { return n * (n + dtilde(l)); }
    Real eta(Real x, const ParameterSet& l) const override { return x * (x + l.value("d")); }
    Real varphi(Real x, const ParameterSet& l) const override {
        const Real d = l.value("d");
        return (2 * x + 1 + d) / (1 + d);
    }

    Real poly(int n, Real x, const ParameterSet& l) const override {
        const Real a = l.value("a"), b = l.value("b"), c = l.value("c"), d = l.value("d");
        return hypergeometric_sum({Real(-n), n + dtilde(l), -x, x + d}, {a, b, c}, 1, n);
    }

    bool has_xi() const override { return true; }
    Real xi(int ell, Real x, const ParameterSet& l) const override {
        ParameterSet t = l.shifted(ell - 1);
        for (const char* name : {"a", "b", "c", "d"}) t.override_coeff(name, -t.value(name));
        return poly(ell, -x, t);
    }

private:
    static Real dtilde(const ParameterSet& l) {
        return l.value("a") + l.value("b") + l.value("c") - l.value("d") - 1;
    }
};

// ---------------------------------------------------------------------------
// q-Racah
// ---------------------------------------------------------------------------

class QRacah final : public Family {
public:
    std::string id() const override { return "q_racah"; }
    bool finite() const override { return true; }

    ParameterSet default_parameters() const override {
        ParameterSet p;
        p.set_q(0.6L).set_kappa_qpow(-1);
        p.add("N", 6, -1).add("b", 0.021L, 1, true).add("c", 0.8L, 1, true).add("d", 0.9L, 1,
                                                                                 true);
        return p;
    }

    void check_domain(const ParameterSet& l) const override {
        const Real q = l.q();
        if (!(q > 0 && q < 1)) throw OutOfDomain("q", "0 < q < 1");
        if (grid_n(l) < 1) throw OutOfDomain("N", "N >= 1");
        const Real d = l.value("d");
        if (!(d > 0 && d < 1)) throw OutOfDomain("d", "0 < d < 1");
        if (!(dtilde(l) > 0 && dtilde(l) < 1)) throw OutOfDomain("b*c/(d*q*q^N)", "0 < dtilde < 1");
    }

    int grid_n(const ParameterSet& l) const override {
        return static_cast<int>(std::llround(static_cast<double>(l.value("N"))));
    }

    std::string constraints() const override { return "0 < q < 1; N >= 1; 0 < d < 1; 0 < q^{-N} b c/(d q) < 1"; }

    Real bpot(Real x, const ParameterSet& l) const override {
        const Real q = l.q(), qx = std::pow(q, x);
        const Real d = l.value("d");
        const Real den = (1 - d * qx * qx) * (1 - d * qx * qx * q);
        if (den == 0) throw EvaluationSingularity(x, "q-Racah B denominator");
        return -(1 - aval(l) * qx) * (1 - l.value("b") * qx) * (1 - l.value("c") * qx) *
               (1 - d * qx) / den;
    }
    Real dpot(Real x, const ParameterSet& l) const override {
        const Real q = l.q(), qx = std::pow(q, x);
        const Real d = l.value("d");
        const Real den = (1 - d * qx * qx / q) * (1 - d * qx * qx);
        if (den == 0) throw EvaluationSingularity(x, "q-Racah D denominator");
        return -dtilde(l) * (1 - d * qx / aval(l)) * (1 - d * qx / l.value("b")) *
               (1 - d * qx / l.value("c")) * (1 - qx) / den;
    }
    Real energy(int n, const ParameterSet& l) const override {
        const Real q = l.q(), qn = std::pow(q, static_cast<Real>(n));
        return (1 / qn - 1) * (1 - dtilde(l) * qn);
    }
    Real eta(Real x, const ParameterSet& l) const override {
        const Real q = l.q(), qx = std::pow(q, x);
        return (1 / qx - 1) * (1 - l.value("d") * qx);
    }
    Real varphi(Real x, const ParameterSet& l) const override {
        const Real q = l.q(), d = l.value("d");
        return (std::pow(q, -x) - d * std::pow(q, x + 1)) / (1 - d * q);
    }

    Real poly(int n, Real x, const ParameterSet& l) const override {
        const Real q = l.q(), qx = std::pow(q, x), qn = std::pow(q, static_cast<Real>(n));
        return basic_hypergeometric_sum(
            {1 / qn, dtilde(l) * qn, 1 / qx, l.value("d") * qx},
            {aval(l), l.value("b"), l.value("c")}, q, q, n);
    }

    bool has_xi() const override { return true; }
    Real xi(int ell, Real x, const ParameterSet& l) const override {
        ParameterSet t = l.shifted(ell - 1);
        t.override_coeff("N", -t.value("N"));
        for (const char* name : {"b", "c", "d"}) t.override_coeff(name, 1 / t.value(name));
        return poly(ell, -x, t);
    }

    std::vector<std::string> metadata() const override { return {"most generic case"}; }

private:
    static Real aval(const ParameterSet& l) { return std::pow(l.q(), -l.value("N")); }
    static Real dtilde(const ParameterSet& l) {
        return aval(l) * l.value("b") * l.value("c") / (l.value("d") * l.q());
    }
};

// ---------------------------------------------------------------------------
// Meixner
// ---------------------------------------------------------------------------

class Meixner final : public Family {
public:
    std::string id() const override { return "meixner"; }
    bool finite() const override { return false; }

    ParameterSet default_parameters() const override {
        ParameterSet p;
        p.add("beta", 1.2L, 1).add("c", 0.4L, 0);
        return p;
    }

    void check_domain(const ParameterSet& l) const override {
        if (!(l.value("beta") > 0)) throw OutOfDomain("beta", "beta > 0");
        const Real c = l.value("c");
        if (!(c > 0 && c < 1)) throw OutOfDomain("c", "0 < c < 1");
    }

    int grid_n(const ParameterSet&) const override { return -1; }

    std::string constraints() const override { return "beta > 0; 0 < c < 1"; }

    Real bpot(Real x, const ParameterSet& l) const override {
        const Real c = l.value("c");
        return c * (x + l.value("beta")) / (1 - c);
    }
    Real dpot(Real x, const ParameterSet& l) const override { return x / (1 - l.value("c")); }
    Real energy(int n, const ParameterSet&) const override { return n; }
    Real eta(Real x, const ParameterSet&) const override { return x; }
    Real varphi(Real, const ParameterSet&) const override { return 1; }

    Real poly(int n, Real x, const ParameterSet& l) const override {
        return hypergeometric_sum({Real(-n), -x}, {l.value("beta")}, 1 - 1 / l.value("c"), n);
    }

    bool has_dn_sq() const override { return true; }
    Real dn_sq(int n, const ParameterSet& l) const override {
        const Real beta = l.value("beta"), c = l.value("c");
        return pochhammer(beta, n) * std::pow(c, static_cast<Real>(n)) *
               std::pow(1 - c, beta) / pochhammer(1, n);
    }

    bool has_shift_factors() const override { return true; }
    Real fn(int n, const ParameterSet&) const override { return n; }
    Real bn(int, const ParameterSet&) const override { return 1; }

    bool has_xi() const override { return true; }
    Real xi(int ell, Real x, const ParameterSet& l) const override {
        ParameterSet t = l.shifted(ell - 1);
        t.override_coeff("beta", -t.value("beta"));
        return poly(ell, -x, t);
    }
};

// ---------------------------------------------------------------------------
// Charlier
// ---------------------------------------------------------------------------

class Charlier final : public Family {
public:
    std::string id() const override { return "charlier"; }
    bool finite() const override { return false; }

    ParameterSet default_parameters() const override {
        ParameterSet p;
        p.add("a", 1.7L, 0);  // integer a puts a zero of P_1 on the grid
        return p;
    }

    void check_domain(const ParameterSet& l) const override {
        if (!(l.value("a") > 0)) throw OutOfDomain("a", "a > 0");
    }

    int grid_n(const ParameterSet&) const override { return -1; }

    std::string constraints() const override { return "a > 0"; }

    Real bpot(Real, const ParameterSet& l) const override { return l.value("a"); }
    Real dpot(Real x, const ParameterSet&) const override { return x; }
    Real energy(int n, const ParameterSet&) const override { return n; }
    Real eta(Real x, const ParameterSet&) const override { return x; }
    Real varphi(Real, const ParameterSet&) const override { return 1; }

    Real poly(int n, Real x, const ParameterSet& l) const override {
        return hypergeometric_sum({Real(-n), -x}, {}, -1 / l.value("a"), n);
    }

    bool has_dn_sq() const override { return true; }
    Real dn_sq(int n, const ParameterSet& l) const override {
        const Real a = l.value("a");
        return std::pow(a, static_cast<Real>(n)) * std::exp(-a) / pochhammer(1, n);
    }

    bool has_shift_factors() const override { return true; }
    Real fn(int n, const ParameterSet&) const override { return n; }
    Real bn(int, const ParameterSet&) const override { return 1; }

    bool has_xi() const override { return true; }
    Real xi(int ell, Real x, const ParameterSet& l) const override {
        ParameterSet t = l;
        t.override_coeff("a", -t.value("a"));
        return poly(ell, -x, t);
    }
};

// ---------------------------------------------------------------------------
// dual quantum q-Krawtchouk
// ---------------------------------------------------------------------------

class DualQuantumQKrawtchouk final : public Family {
public:
    std::string id() const override { return "dual_quantum_q_krawtchouk"; }
    bool finite() const override { return true; }

    ParameterSet default_parameters() const override {
        ParameterSet p;
        p.set_q(0.5L).set_kappa_qpow(-1);
        p.add("p", 100.0L, 0, true).add("N", 6, -1);
        return p;
    }

    void check_domain(const ParameterSet& l) const override {
        const Real q = l.q();
        if (!(q > 0 && q < 1)) throw OutOfDomain("q", "0 < q < 1");
        if (grid_n(l) < 1) throw OutOfDomain("N", "N >= 1");
        if (!(l.value("p") > std::pow(q, -l.value("N")))) throw OutOfDomain("p", "p > q^{-N}");
    }

    int grid_n(const ParameterSet& l) const override {
        return static_cast<int>(std::llround(static_cast<double>(l.value("N"))));
    }

    std::string constraints() const override { return "0 < q < 1; N >= 1; p > q^{-N}"; }

    Real bpot(Real x, const ParameterSet& l) const override {
        const Real q = l.q(), N = l.value("N");
        return std::pow(q, -x) * (1 - std::pow(q, N - x)) / (l.value("p") * std::pow(q, N + 1));
    }
    Real dpot(Real x, const ParameterSet& l) const override {
        const Real qmx = std::pow(l.q(), -x);
        return (qmx - 1) * (1 - qmx / l.value("p"));
    }
    Real energy(int n, const ParameterSet& l) const override {
        return std::pow(l.q(), static_cast<Real>(-n)) - 1;
    }
    Real eta(Real x, const ParameterSet& l) const override { return 1 - std::pow(l.q(), x); }
    Real varphi(Real x, const ParameterSet& l) const override { return std::pow(l.q(), x); }

    Real poly(int n, Real x, const ParameterSet& l) const override {
        const Real q = l.q(), N = l.value("N");
        return basic_hypergeometric_sum({std::pow(q, static_cast<Real>(-n)), std::pow(q, -x)},
                                        {std::pow(q, -N)}, q,
                                        l.value("p") * std::pow(q, x + 1), n);
    }

    bool has_dn_sq() const override { return true; }
    Real dn_sq(int n, const ParameterSet& l) const override {
        const Real q = l.q(), p = l.value("p");
        const int N = grid_n(l);
        const Real pinv_qmn = std::pow(q, static_cast<Real>(-N)) / p;
        Real v = q_pochhammer(q, q, N) / (q_pochhammer(q, q, n) * q_pochhammer(q, q, N - n));
        v *= std::pow(p, static_cast<Real>(-n)) * std::pow(q, static_cast<Real>(n) * (n - 1 - N));
        v /= q_pochhammer(pinv_qmn, q, n);
        v *= q_pochhammer(pinv_qmn, q, N);
        return v;
    }

    bool has_shift_factors() const override { return true; }
    Real fn(int n, const ParameterSet& l) const override { return energy(n, l); }
    Real bn(int, const ParameterSet&) const override { return 1; }

    bool has_xi() const override { return true; }
    Real xi(int ell, Real x, const ParameterSet& l) const override {
        const Real q = l.q(), N = l.value("N");
        return basic_hypergeometric_sum({std::pow(q, static_cast<Real>(-ell)), std::pow(q, x)},
                                        {std::pow(q, N - ell + 1)}, q,
                                        l.value("p") * std::pow(q, N + 1), ell);
    }

    std::vector<std::string> metadata() const override {
        return {"R1(z) = (q^{-1/2}-q^{1/2})^2 z', z' = z+1",
                "R0(z) = (q^{-1/2}-q^{1/2})^2 z'^2",
                "R-1(z) = (q^{-1/2}-q^{1/2})^2 (-z'^2 + p^{-1}(1+p+q^{-N-1})z' - "
                "p^{-1}q^{-N}(1+q^{-1}))"};
    }
};

// ---------------------------------------------------------------------------
// dual little q-Jacobi
// ---------------------------------------------------------------------------

class DualLittleQJacobi final : public Family {
public:
    std::string id() const override { return "dual_little_q_jacobi"; }
    bool finite() const override { return false; }

    ParameterSet default_parameters() const override {
        ParameterSet p;
        p.set_q(0.5L).set_kappa_qpow(1);
        p.add("a", 0.8L, 0, true).add("b", 0.5L, 1, true);
        return p;
    }

    void check_domain(const ParameterSet& l) const override {
        const Real q = l.q();
        if (!(q > 0 && q < 1)) throw OutOfDomain("q", "0 < q < 1");
        const Real a = l.value("a");
        if (!(a > 0 && a < 1 / q)) throw OutOfDomain("a", "0 < a < q^{-1}");
        if (!(l.value("b") < 1 / q)) throw OutOfDomain("b", "b < q^{-1}");
    }

    int grid_n(const ParameterSet&) const override { return -1; }

    std::string constraints() const override { return "0 < q < 1; 0 < a < q^{-1}; b < q^{-1}"; }

    Real bpot(Real x, const ParameterSet& l) const override {
        const Real q = l.q(), a = l.value("a"), ab = a * l.value("b");
        const Real qx = std::pow(q, x);
        const Real den = (1 - ab * qx * qx * q) * (1 - ab * qx * qx * q * q);
        if (den == 0) throw EvaluationSingularity(x, "dual little q-Jacobi B denominator");
        return a * qx * qx * q * (1 - l.value("b") * qx * q) * (1 - ab * qx * q) / den;
    }
    Real dpot(Real x, const ParameterSet& l) const override {
        const Real q = l.q(), a = l.value("a"), ab = a * l.value("b");
        const Real qx = std::pow(q, x);
        const Real den = (1 - ab * qx * qx) * (1 - ab * qx * qx * q);
        if (den == 0) throw EvaluationSingularity(x, "dual little q-Jacobi D denominator");
        return (1 - qx) * (1 - a * qx) / den;
    }
    Real energy(int n, const ParameterSet& l) const override {
        return 1 - std::pow(l.q(), static_cast<Real>(n));
    }
    Real eta(Real x, const ParameterSet& l) const override {
        const Real q = l.q(), qx = std::pow(q, x);
        return (1 / qx - 1) * (1 - l.value("a") * l.value("b") * qx * q);
    }
    Real varphi(Real x, const ParameterSet& l) const override {
        const Real q = l.q(), ab = l.value("a") * l.value("b");
        return (std::pow(q, -x) - ab * std::pow(q, x + 2)) / (1 - ab * q * q);
    }

    Real poly(int n, Real x, const ParameterSet& l) const override {
        const Real q = l.q(), a = l.value("a"), b = l.value("b");
        const Real qx = std::pow(q, x), qn = std::pow(q, static_cast<Real>(n));
        return basic_hypergeometric_sum({1 / qn, 1 / qx, a * b * qx * q}, {b * q}, q, qn / a, n);
    }

    bool has_dn_sq() const override { return true; }
    Real dn_sq(int n, const ParameterSet& l) const override {
        const Real q = l.q(), a = l.value("a"), b = l.value("b");
        return q_pochhammer(b * q, q, n) / q_pochhammer(q, q, n) *
               std::pow(a * q, static_cast<Real>(n)) * q_pochhammer_inf(a * q, q) /
               q_pochhammer_inf(a * b * q * q, q);
    }

    bool has_shift_factors() const override { return true; }
    Real fn(int n, const ParameterSet& l) const override { return energy(n, l); }
    Real bn(int, const ParameterSet&) const override { return 1; }

    bool has_xi() const override { return true; }
    Real xi(int ell, Real x, const ParameterSet& l) const override {
        const Real q = l.q(), a = l.value("a"), b = l.value("b");
        const Real qx = std::pow(q, x), qml = std::pow(q, static_cast<Real>(-ell));
        return basic_hypergeometric_sum({qml, qx, qml / (a * b * qx)}, {qml / b, Real(0)}, q, q,
                                        ell);
    }

    std::vector<std::string> metadata() const override {
        return {"R1(z) = (q^{-1/2}-q^{1/2})^2 z', z' = z-1",
                "R0(z) = (q^{-1/2}-q^{1/2})^2 z'^2",
                "R-1(z) = (q^{-1/2}-q^{1/2})^2 ((1+abq)z'^2 + (1+a)z')"};
    }
};

// ---------------------------------------------------------------------------
// dual alternative q-Charlier
// ---------------------------------------------------------------------------

class DualAlternativeQCharlier final : public Family {
public:
    std::string id() const override { return "dual_alternative_q_charlier"; }
    bool finite() const override { return false; }

    ParameterSet default_parameters() const override {
        ParameterSet p;
        p.set_q(0.5L).set_kappa_qpow(1);
        p.add("a", 1.0L, 1, true);
        return p;
    }

    void check_domain(const ParameterSet& l) const override {
        const Real q = l.q();
        if (!(q > 0 && q < 1)) throw OutOfDomain("q", "0 < q < 1");
        if (!(l.value("a") > 0)) throw OutOfDomain("a", "a > 0");
    }

    int grid_n(const ParameterSet&) const override { return -1; }

    std::string constraints() const override { return "0 < q < 1; a > 0"; }

    Real bpot(Real x, const ParameterSet& l) const override {
        const Real q = l.q(), a = l.value("a"), qx = std::pow(q, x);
        return a * qx * qx * qx * q * (1 + a * qx) / ((1 + a * qx * qx) * (1 + a * qx * qx * q));
    }
    Real dpot(Real x, const ParameterSet& l) const override {
        const Real q = l.q(), a = l.value("a"), qx = std::pow(q, x);
        return (1 - qx) / ((1 + a * qx * qx / q) * (1 + a * qx * qx));
    }
    Real energy(int n, const ParameterSet& l) const override {
        return 1 - std::pow(l.q(), static_cast<Real>(n));
    }
    Real eta(Real x, const ParameterSet& l) const override {
        const Real qx = std::pow(l.q(), x);
        return (1 / qx - 1) * (1 + l.value("a") * qx);
    }
    Real varphi(Real x, const ParameterSet& l) const override {
        const Real q = l.q(), a = l.value("a");
        return (std::pow(q, -x) + a * std::pow(q, x + 1)) / (1 + a * q);
    }

    Real poly(int n, Real x, const ParameterSet& l) const override {
        const Real q = l.q(), a = l.value("a");
        const Real qx = std::pow(q, x), qn = std::pow(q, static_cast<Real>(n));
        return basic_hypergeometric_sum({1 / qn, 1 / qx, -a * qx}, {}, q, -qn / a, n);
    }

    bool has_dn_sq() const override { return true; }
    Real dn_sq(int n, const ParameterSet& l) const override {
        const Real q = l.q(), a = l.value("a");
        return std::pow(a, static_cast<Real>(n)) *
               std::pow(q, 0.5L * n * (n + 1)) / q_pochhammer(q, q, n) /
               q_pochhammer_inf(-a * q, q);
    }

    bool has_shift_factors() const override { return true; }
    Real fn(int n, const ParameterSet& l) const override { return energy(n, l); }
    Real bn(int, const ParameterSet&) const override { return 1; }

    bool has_xi() const override { return true; }
    Real xi(int ell, Real x, const ParameterSet& l) const override {
        const Real q = l.q(), a = l.value("a");
        const Real qx = std::pow(q, x), qml = std::pow(q, static_cast<Real>(-ell));
        return basic_hypergeometric_sum({qml, qx, -qml * q / (a * qx)}, {Real(0), Real(0)}, q, q,
                                        ell);
    }

    std::vector<std::string> metadata() const override {
        return {"R1(z) = (q^{-1/2}-q^{1/2})^2 z', z' = z-1",
                "R0(z) = (q^{-1/2}-q^{1/2})^2 z'^2",
                "R-1(z) = (q^{-1/2}-q^{1/2})^2 ((1-a)z'^2 + z')"};
    }
};

// ---------------------------------------------------------------------------
// Registry
// ---------------------------------------------------------------------------

const std::vector<std::unique_ptr<Family>>& registry() {
    static const auto reg = [] {
        std::vector<std::unique_ptr<Family>> r;
        r.push_back(std::make_unique<Krawtchouk>());
        r.push_back(std::make_unique<Hahn>());
        r.push_back(std::make_unique<Racah>());
        r.push_back(std::make_unique<QRacah>());
        r.push_back(std::make_unique<Meixner>());
        r.push_back(std::make_unique<Charlier>());
        r.push_back(std::make_unique<DualQuantumQKrawtchouk>());
        r.push_back(std::make_unique<DualLittleQJacobi>());
        r.push_back(std::make_unique<DualAlternativeQCharlier>());
        return r;
    }();
    return reg;
}

struct StubEntry {
    const char* id;
    bool finite;
    const char* xi_formula;
};

// Deforming-polynomial catalog entries whose full potential data is not
// implemented; the closed form is recorded verbatim as data.
const StubEntry stub_entries[] = {
    {"dual_hahn", true, "P_l(-x; t(lambda+(l-1)delta)+(0,2,0)), t(lambda) = -lambda"},
    {"q_hahn", true,
     "P_l(x-N+l-1; t(lambda+(l-1)delta)) (-1)^l a^l q^{l(l-1)/2} (b;q)_l/(a;q)_l, t = -(b,a,N)"},
    {"dual_q_hahn", true,
     "3phi2(q^{-l}, q^x, a^{-1}b^{-1}q^{-x+2-l}; a^{-1}q^{-l+1}, q^{N-l+1} | q; b q^N)"},
    {"quantum_q_krawtchouk", true,
     "3phi2(q^{-l}, 0, q^{-x+N-l+1}; p^{-1}q^{-l}, q^{N-l+1} | q; q) (pq;q)_l"},
    {"q_krawtchouk", true,
     "P_l(x-N+l-1; t(lambda+(l-1)delta)+(-2,0)) (-1)^l q^{l^2} p^l, t = -lambda"},
    {"dual_q_krawtchouk", true,
     "3phi1(q^{-l}, q^x, c^{-1}q^{-x+N-l+1}; q^{N-l+1} | q; c q^l)"},
    {"affine_q_krawtchouk", true,
     "2phi1(q^{-l}, q^{-x+N-l+1}; q^{N-l+1} | q; p^{-1}) (-1)^l p^l q^{l(l+1)/2}/(pq;q)_l"},
    {"alternative_q_hahn", true,
     "P_l(x-N+l-1; t(lambda+(l-1)delta)) (-1)^l q^{-l(l-1)/2} (a;q)_l/(a^l (b;q)_l), t = -(b,a,N)"},
    {"alternative_q_krawtchouk", true,
     "P_l(x-N+l-1; t(lambda+(l-1)delta)+(-2,0)) (-1)^l p^{-l} q^{-l^2}, t = -lambda"},
    {"alternative_affine_q_krawtchouk", true,
     "2phi1(q^{-l}, q^{-x+N-l+1}; q^{N-l+1} | q; p q^{x+l+1}) / (pq;q)_l"},
    {"little_q_jacobi", false,
     "P_l(x+b'+l; t(lambda+(l-1)delta)-(2,2)) a^{-l} b^{-l} q^{-l(l+1)}, b = q^{b'}, t = -lambda"},
    {"q_meixner", false, "2phi1(q^{-l}, q^x; b^{-1}q^{-l} | q; -b^{-1}c^{-1}q^{1-x})"},
    {"little_q_laguerre", false,
     "1phi1(q^{-l}; a^{-1}q^{-l} | q; a^{-1}q^x) (-1)^l a^{-l} q^{-l(l+1)/2} (aq;q)_l"},
    {"al_salam_carlitz_ii", false, "2phi1(q^{-l}, q^x; 0 | q; a^{-1}q^{1-x})"},
    {"alternative_q_charlier", false,
     "2phi0(q^{-l}, -a^{-1}q^{-l}; - | q; -a q^{x+2l}) (-a)^{-l} q^{-l^2}"},
    {"q_charlier", false, "2phi0(q^{-l}, q^x; - | q; -a^{-1}q^{l+1-x})"},
};

}  // namespace

const std::vector<CatalogEntry>& catalog_list() {
    static const auto entries = [] {
        std::vector<CatalogEntry> out;
        for (const auto& fam : registry()) {
            CatalogEntry e;
            e.id = fam->id();
            e.implemented = true;
            e.finite = fam->finite();
            e.xi_implemented = fam->has_xi();
            e.most_generic = (fam->id() == "q_racah");
            const ParameterSet defaults = fam->default_parameters();
            for (const auto& [name, p] : defaults.entries()) e.parameters.push_back(name);
            e.constraints = fam->constraints();
            for (const auto& m : fam->metadata()) {
                if (!e.note.empty()) e.note += "; ";
                e.note += m;
            }
            out.push_back(std::move(e));
        }
        for (const auto& s : stub_entries) {
            CatalogEntry e;
            e.id = s.id;
            e.implemented = false;
            e.finite = s.finite;
            e.xi_implemented = false;
            e.xi_formula = s.xi_formula;
            e.note = "data stub: deforming polynomial recorded, potentials not implemented";
            out.push_back(std::move(e));
        }
        return out;
    }();
    return entries;
}

const Family& family(const std::string& id) {
    for (const auto& fam : registry())
        if (fam->id() == id) return *fam;
    throw OutOfDomain(id, "not an implemented family id");
}

std::vector<std::string> implemented_family_ids() {
    std::vector<std::string> out;
    for (const auto& fam : registry()) out.push_back(fam->id());
    return out;
}

std::string catalog_json() {
    nlohmann::json j;
    j["schema"] = "dqm-report/1";
    j["families"] = nlohmann::json::array();
    for (const auto& e : catalog_list()) {
        nlohmann::json f;
        f["id"] = e.id;
        f["implemented"] = e.implemented;
        f["finite"] = e.finite;
        f["xi_implemented"] = e.xi_implemented;
        if (e.most_generic) f["most_generic"] = true;
        f["parameters"] = e.parameters;
        if (!e.constraints.empty()) f["constraints"] = e.constraints;
        if (!e.xi_formula.empty()) f["xi_formula"] = e.xi_formula;
        if (!e.note.empty()) f["note"] = e.note;
        j["families"].push_back(std::move(f));
    }
    return j.dump(2);
}

// ---------------------------------------------------------------------------
// Operations
// ---------------------------------------------------------------------------

ParameterSet validate_parameters(const std::string& family_id, const ParameterSet& lambda,
                                 const GridSpec& grid) {
    const Family& fam = family(family_id);
    fam.check_domain(lambda);

    const int xmax = grid.x_max;
    const Real ptol = default_policy().positivity_tol;
    if (std::fabs(fam.dpot(0, lambda)) > ptol) throw OutOfDomain("D", "D(0) = 0");
    for (int x = 0; x < xmax; ++x)
        if (!(fam.bpot(x, lambda) > 0)) throw OutOfDomain("B", "B(x) > 0 on the grid");
    for (int x = 1; x <= xmax; ++x)
        if (!(fam.dpot(x, lambda) > 0)) throw OutOfDomain("D", "D(x) > 0 for x >= 1");
    if (fam.finite()) {
        if (grid.x_max != fam.grid_n(lambda)) throw OutOfDomain("N", "grid size must equal N");
        if (std::fabs(fam.bpot(xmax, lambda)) > ptol)
            throw OutOfDomain("B", "B(x_max) = 0 for the finite case");
    }
    Real prev = fam.energy(0, lambda);
    if (std::fabs(prev) > ptol) throw OutOfDomain("E", "E(0) = 0");
    for (int n = 1; n <= grid.n_max(); ++n) {
        const Real en = fam.energy(n, lambda);
        if (!(en > prev)) throw OutOfDomain("E", "E(n) strictly increasing");
        prev = en;
    }
    return lambda;
}

GridSpec make_grid(const Family& fam, const ParameterSet& lambda, const NumericPolicy& policy) {
    if (fam.finite()) return GridSpec::finite(fam.grid_n(lambda));
    Real log_w = 0;  // log phi_0(x)^2
    for (int x = 0; x < 400; ++x) {
        if (x >= 8 && log_w < std::log(policy.tail_tol)) return GridSpec::truncated(x);
        log_w += std::log(fam.bpot(x, lambda)) - std::log(fam.dpot(x + 1, lambda));
    }
    throw ConvergenceFailure(fam.id() + ": ground-state tail does not reach tail_tol", 400);
}

PotentialPair eval_potentials(const Family& fam, const ParameterSet& lambda, const GridSpec& grid,
                              int ell_pad) {
    PotentialPair out;
    out.x_lo = -1;
    const int x_hi = grid.x_max + ell_pad + 1;
    for (int x = out.x_lo; x <= x_hi; ++x) {
        const Real b = fam.bpot(static_cast<Real>(x), lambda);
        const Real d = fam.dpot(static_cast<Real>(x), lambda);
        if (!std::isfinite(b) || !std::isfinite(d)) throw EvaluationSingularity(x);
        out.b.push_back(b);
        out.d.push_back(d);
    }
    return out;
}

Vector log_weight_table(const Family& fam, const ParameterSet& lambda, int x_hi) {
    Vector logw(static_cast<size_t>(x_hi) + 1, 0);
    for (int x = 1; x <= x_hi; ++x) {
        const Real b = fam.bpot(static_cast<Real>(x - 1), lambda);
        const Real d = fam.dpot(static_cast<Real>(x), lambda);
        if (!(b > 0) || !(d > 0)) throw NegativePotential(x, std::min(b, d));
        logw[x] = logw[x - 1] + std::log(b) - std::log(d);
    }
    return logw;
}

PolynomialTable polynomial_table(const Family& fam, const ParameterSet& lambda,
                                 const std::vector<int>& levels, const GridSpec& grid,
                                 const NumericPolicy& policy) {
    Vector b(grid.size()), d(grid.size());
    for (int x = 0; x <= grid.x_max; ++x) {
        b[x] = fam.bpot(static_cast<Real>(x), lambda);
        d[x] = fam.dpot(static_cast<Real>(x), lambda);
    }
    PolynomialTable table;
    table.levels = levels;
    for (int n : levels) {
        Vector row = dual_recurrence(b, d, fam.energy(n, lambda));
        table.normalization_dev = std::max(table.normalization_dev, std::fabs(row[0] - 1));
        for (int x = 0; x <= grid.x_max; ++x) {
            const Real series = fam.poly(n, static_cast<Real>(x), lambda);
            const Real scale = std::max(Real(1), std::fabs(series));
            table.series_dev = std::max(table.series_dev, std::fabs(row[x] - series) / scale);
        }
        table.rows.push_back(std::move(row));
    }
    if (table.series_dev > policy.identity_tol)
        throw ConvergenceFailure(fam.id() + ": recurrence/series disagreement", 0);
    return table;
}

Real dn_sq_by_summation(const Family& fam, const ParameterSet& lambda, const GridSpec& grid,
                        int n) {
    const Vector logw = log_weight_table(fam, lambda, grid.x_max);
    Real inv = 0;
    for (int x = 0; x <= grid.x_max; ++x) {
        const Real p = fam.poly(n, static_cast<Real>(x), lambda);
        inv += std::exp(logw[x]) * p * p;
    }
    return 1 / inv;
}

}  // namespace dqm
