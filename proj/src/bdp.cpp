#include "dqm/bdp.hpp"

#include <cmath>
#include <sstream>

#include "json.hpp"

namespace dqm {

TransitionKernel transition_kernel(const JacobiSystem& sys, Real t, const NumericPolicy& policy) {
    if (!sys.grid().finite())
        throw NonHermitianSystem("transition kernel needs a finite chain");
    if (t < 0) throw PreconditionViolated("time must be non-negative");
    const int n = sys.dim();

    // Rate matrix in the polynomial gauge; rows sum to zero because the birth
    // rate vanishes at the top of a finite chain.
    Matrix gen(n, n);
    for (int x = 0; x < n; ++x) {
        gen(x, x) = -(sys.bpot()[x] + sys.dpot()[x]) * t;
        if (x + 1 < n) gen(x, x + 1) = sys.bpot()[x] * t;
        if (x > 0) gen(x, x - 1) = sys.dpot()[x] * t;
    }

    TransitionKernel out;
    out.t = t;
    out.p = matrix_exponential(gen);

    // Spectral path through the symmetric form: the assembled matrix carries
    // the spectrum with the zero mode at 0, so
    //   p(x,y;t) = sum_k e^{-t E_k} u_k(x) u_k(y) w(y)/w(x),
    // with w the zero-mode eigenvector.
    const Eigensystem& es = sys.eigensystem();
    const Vector& w = es.vectors.front();
    Matrix spectral(n, n);
    for (int k = 0; k < n; ++k) {
        const Real decay = std::exp(-t * es.values[k]);
        for (int x = 0; x < n; ++x)
            for (int y = 0; y < n; ++y)
                spectral(x, y) += decay * es.vectors[k][x] * es.vectors[k][y] * w[y] / w[x];
    }
    out.spectral_residual = (out.p - spectral).max_abs();
    for (int x = 0; x < n; ++x) {
        Real sum = 0;
        for (int y = 0; y < n; ++y) {
            sum += out.p(x, y);
            if (out.p(x, y) < -1e-10L || out.p(x, y) > 1 + 1e-10L)
                throw ConvergenceFailure("kernel entry outside [0, 1]", 0);
        }
        out.row_sum_dev = std::max(out.row_sum_dev, std::fabs(sum - 1));
    }
    if (out.spectral_residual > 1e-8L)
        throw ConvergenceFailure("spectral and exponential kernels disagree", 0);
    (void)policy;
    return out;
}

std::string kernel_csv(const TransitionKernel& k) {
    std::ostringstream os;
    os.precision(17);
    os << "x";
    for (int y = 0; y < k.p.cols(); ++y) os << ",y" << y;
    os << "\n";
    for (int x = 0; x < k.p.rows(); ++x) {
        os << x;
        for (int y = 0; y < k.p.cols(); ++y) os << "," << static_cast<double>(k.p(x, y));
        os << "\n";
    }
    return os.str();
}

DecayReport decay_rate_report(const JacobiSystem& sys, const NumericPolicy& policy) {
    DecayReport rep;
    const Eigensystem& es = sys.eigensystem();
    rep.expected_rate = es.values[1] - es.values[0];

    // stationary value of p(0,0;t)
    const Vector& gs = es.vectors.front();
    Real norm = 0;
    for (Real v : gs) norm += v * v;
    const Real stationary = gs[0] * gs[0] / norm;

    // two-point log-linear fit on the slowest excess mode, late enough that
    // the faster modes have died out
    const Real t0 = 3 / rep.expected_rate, t1 = 4.5L / rep.expected_rate;
    const Real e0 = transition_kernel(sys, t0, policy).p(0, 0) - stationary;
    const Real e1 = transition_kernel(sys, t1, policy).p(0, 0) - stationary;
    if (e0 > 0 && e1 > 0) rep.fitted_rate = (std::log(e0) - std::log(e1)) / (t1 - t0);
    rep.rel_dev = std::fabs(rep.fitted_rate - rep.expected_rate) /
                  std::max(Real(1e-30), std::fabs(rep.expected_rate));
    return rep;
}

std::string decay_report_json(const DecayReport& rep) {
    nlohmann::json j;
    j["schema"] = "dqm-report/1";
    j["fitted_rate"] = static_cast<double>(rep.fitted_rate);
    j["expected_rate"] = static_cast<double>(rep.expected_rate);
    j["rel_dev"] = static_cast<double>(rep.rel_dev);
    return j.dump(2);
}

}  // namespace dqm
