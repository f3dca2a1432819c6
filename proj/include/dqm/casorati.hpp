#pragma once

#include <functional>
#include <vector>

#include "dqm/core.hpp"
#include "dqm/families.hpp"

namespace dqm {

// Function sampled on a contiguous integer window; out-of-range access is an
// error, never extrapolation.
class SampledFunction {
public:
    SampledFunction() = default;
    SampledFunction(int x_lo, Vector values) : x_lo_(x_lo), values_(std::move(values)) {}

    int x_lo() const { return x_lo_; }
    int x_hi() const { return x_lo_ + static_cast<int>(values_.size()) - 1; }

    Real at(int x) const {
        if (x < x_lo_ || x > x_hi())
            throw DomainExceeded("sample requested at x=" + std::to_string(x) + " outside [" +
                                 std::to_string(x_lo_) + ", " + std::to_string(x_hi()) + "]");
        return values_[static_cast<size_t>(x - x_lo_)];
    }

private:
    int x_lo_ = 0;
    Vector values_;
};

// det(f_k(x + j - 1))_{1 <= j,k <= m}; the empty determinant is 1.
// Closed expansion for m <= 3, LU with partial pivoting above.
Real casoratian(const std::vector<SampledFunction>& fs, int x);

// |W[g f_1, ..., g f_m](x) - prod_{k<m} g(x+k) W[f_1, ..., f_m](x)| relative.
Real check_product_rule(const SampledFunction& g, const std::vector<SampledFunction>& fs, int x);

// |W[W[f.., g], W[f.., h]](x) - W[f..](x+1) W[f.., g, h](x)| relative.
Real check_wronskian_identity(const std::vector<SampledFunction>& fs, const SampledFunction& g,
                              const SampledFunction& h, int x);

// varphi_ell(x; lambda) = prod_{0<=j<k<=ell-1} (eta(x+k) - eta(x+j)) / eta(k-j).
Real varphi_ell(const Family& fam, const ParameterSet& lambda, int ell, Real x);

// Residual between varphi_ell and the equivalent product of the auxiliary
// function over shifted parameters.
Real varphi_ell_product_residual(const Family& fam, const ParameterSet& lambda, int ell, Real x);

// W[P_{n_1}, ..., P_{n_m}](x; lambda) together with the normalized polynomial
// obtained by dividing out varphi_m and the energy-difference prefactor; the
// normalized value equals 1 at x = 0.
struct PolyCasoratian {
    Real raw = 0;         // the determinant itself
    Real normalized = 0;  // degree sum(n_k) - m(m-1)/2 polynomial value
};

PolyCasoratian casoratian_of_polynomials(const Family& fam, const ParameterSet& lambda,
                                         const std::vector<int>& levels, int x);

// The energy-difference prefactor shared by the polynomial Casoratian and the
// deforming-polynomial definitions.
Real poly_casoratian_prefactor(const Family& fam, const ParameterSet& lambda,
                               const std::vector<int>& levels);

// Convenience: sample a family eigenpolynomial P_n on [x_lo, x_hi].
SampledFunction sample_poly(const Family& fam, const ParameterSet& lambda, int n, int x_lo,
                            int x_hi);

}  // namespace dqm
