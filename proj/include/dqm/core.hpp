#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace dqm {

// Working scalar. Casoratian ratios lose digits to cancellation, so the
// default build uses the 80-bit extended type; -DDQM_REAL_DOUBLE switches
// to plain double.
#ifdef DQM_REAL_DOUBLE
using Real = double;
#else
using Real = long double;
#endif

using Vector = std::vector<Real>;

inline constexpr int real_significand_bits = std::numeric_limits<Real>::digits;

// ---------------------------------------------------------------------------
// Errors
// ---------------------------------------------------------------------------

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct OutOfDomain : Error {
    std::string parameter;
    std::string constraint;
    OutOfDomain(std::string param, std::string constr)
        : Error("parameter '" + param + "' violates: " + constr),
          parameter(std::move(param)),
          constraint(std::move(constr)) {}
};

struct EvaluationSingularity : Error {
    Real x;
    explicit EvaluationSingularity(Real x_, const std::string& what_ = "")
        : Error("singular evaluation at x=" + std::to_string(static_cast<double>(x_)) +
                (what_.empty() ? "" : (": " + what_))),
          x(x_) {}
};

struct DomainExceeded : Error {
    using Error::Error;
};

struct ConvergenceFailure : Error {
    int iterations;
    ConvergenceFailure(const std::string& what_, int iters)
        : Error(what_ + " (iterations=" + std::to_string(iters) + ")"), iterations(iters) {}
};

struct NegativePotential : Error {
    int x;
    explicit NegativePotential(int x_, Real value)
        : Error("negative square-root argument at x=" + std::to_string(x_) +
                " (value=" + std::to_string(static_cast<double>(value)) + ")"),
          x(x_) {}
};

struct NonPositivePotential : Error {
    int x;
    explicit NonPositivePotential(int x_, const std::string& which)
        : Error(which + " non-positive at x=" + std::to_string(x_)), x(x_) {}
};

struct ZeroDenominator : Error {
    int x;
    explicit ZeroDenominator(int x_, const std::string& what_)
        : Error(what_ + ": vanishing denominator at x=" + std::to_string(x_)), x(x_) {}
};

struct IntermediateBreakdown : Error {
    int step;
    int x;
    IntermediateBreakdown(int step_, int x_)
        : Error("chain breakdown at step " + std::to_string(step_) + ", x=" + std::to_string(x_)),
          step(step_),
          x(x_) {}
};

struct ZeroPrefactor : Error {
    using Error::Error;
};

struct DegreeMismatch : Error {
    int expected;
    int fitted;
    DegreeMismatch(int expected_, int fitted_)
        : Error("polynomial degree mismatch: expected " + std::to_string(expected_) +
                ", fitted " + std::to_string(fitted_)),
          expected(expected_),
          fitted(fitted_) {}
};

struct ZeroLeadingCoefficient : Error {
    int x;
    explicit ZeroLeadingCoefficient(int x_)
        : Error("recurrence leading coefficient vanishes at x=" + std::to_string(x_)), x(x_) {}
};

struct AffineCheckFailed : Error {
    using Error::Error;
};

struct PreconditionViolated : Error {
    using Error::Error;
};

struct NodeZero : Error {
    using Error::Error;
};

struct NonHermitianSystem : Error {
    using Error::Error;
};

struct NotImplementedForFamily : Error {
    using Error::Error;
};

// ---------------------------------------------------------------------------
// Numeric policy
// ---------------------------------------------------------------------------

struct NumericPolicy {
    int working_precision = real_significand_bits;  // significand bits
    Real identity_tol = 1e-10L;                     // relative, matrix identities
    Real positivity_tol = 1e-12L;                   // absolute, positivity checks
    Real tail_tol = 1e-14L;                         // truncation tail weight

    void validate() const {
        if (!(identity_tol > 0 && positivity_tol > 0 && tail_tol > 0))
            throw OutOfDomain("tolerance", "all tolerances must be > 0");
        const Real eps = std::numeric_limits<Real>::epsilon();
        if (identity_tol < eps * 1e3L)
            throw OutOfDomain("identity_tol", "identity_tol >= machine epsilon * 1e3");
    }
};

inline NumericPolicy& default_policy() {
    static NumericPolicy policy{};
    return policy;
}

// ---------------------------------------------------------------------------
// Parameters
// ---------------------------------------------------------------------------

// One named parameter.  Shifts lambda -> lambda + s*delta act on the integer
// accumulator so repeated shifting is exact; conversion to a floating value
// happens only at evaluation time.  Multiplicative (q-type) entries read as
// coeff * q^shift, additive ones as coeff + shift.
struct Parameter {
    Real coeff = 0;
    int shift = 0;
    bool multiplicative = false;
    int delta = 0;  // per-step increment applied to `shift`

    Real value(Real q) const {
        if (!multiplicative) return coeff + static_cast<Real>(shift);
        return coeff * std::pow(q, static_cast<Real>(shift));
    }
};

class ParameterSet {
public:
    ParameterSet() = default;

    ParameterSet& set_q(Real q) {
        q_ = q;
        return *this;
    }
    bool has_q() const { return q_.has_value(); }
    Real q() const {
        if (!q_) throw OutOfDomain("q", "family has no base q");
        return *q_;
    }

    ParameterSet& set_kappa_qpow(int pow) {
        kappa_qpow_ = pow;
        return *this;
    }
    // kappa = q^kappa_qpow (kappa_qpow = 0 for the classical families).
    Real kappa() const { return q_ ? std::pow(*q_, static_cast<Real>(kappa_qpow_)) : 1.0L; }
    Real kappa_pow(Real e) const { return std::pow(kappa(), e); }

    ParameterSet& add(const std::string& name, Real coeff, int delta, bool multiplicative = false,
                      int shift = 0) {
        entries_.push_back({name, Parameter{coeff, shift, multiplicative, delta}});
        return *this;
    }

    bool has(const std::string& name) const { return find(name) != nullptr; }

    Real value(const std::string& name) const {
        const Parameter* p = find(name);
        if (!p) throw OutOfDomain(name, "unknown parameter");
        return p->value(q_.value_or(0));
    }

    // Raw coefficient + accumulated shift, used by families that need exact
    // integer data (grid sizes, exponents).
    const Parameter& raw(const std::string& name) const {
        const Parameter* p = find(name);
        if (!p) throw OutOfDomain(name, "unknown parameter");
        return *p;
    }

    void override_coeff(const std::string& name, Real coeff) {
        for (auto& [n, p] : entries_)
            if (n == name) {
                p.coeff = coeff;
                p.shift = 0;
                return;
            }
        throw OutOfDomain(name, "unknown parameter");
    }

    ParameterSet shifted(int s) const {
        ParameterSet out = *this;
        for (auto& [name, p] : out.entries_) p.shift += s * p.delta;
        return out;
    }

    const std::vector<std::pair<std::string, Parameter>>& entries() const { return entries_; }

private:
    const Parameter* find(const std::string& name) const {
        for (const auto& [n, p] : entries_)
            if (n == name) return &p;
        return nullptr;
    }

    std::vector<std::pair<std::string, Parameter>> entries_;
    std::optional<Real> q_;
    int kappa_qpow_ = 0;
};

inline ParameterSet shift_parameters(const ParameterSet& lambda, int s) { return lambda.shifted(s); }

// ---------------------------------------------------------------------------
// Grid
// ---------------------------------------------------------------------------

struct GridSpec {
    enum class Kind { Finite, Truncated };

    Kind kind = Kind::Finite;
    int x_max = 0;  // N for Finite, cutoff for Truncated

    static GridSpec finite(int n) {
        if (n < 0) throw OutOfDomain("N", "N >= 0");
        return {Kind::Finite, n};
    }
    static GridSpec truncated(int cutoff) {
        if (cutoff < 8) throw OutOfDomain("cutoff", "cutoff >= 8");
        return {Kind::Truncated, cutoff};
    }

    bool finite() const { return kind == Kind::Finite; }
    int n_max() const { return x_max; }  // square matrix: level range matches grid
    int size() const { return x_max + 1; }
};

}  // namespace dqm
