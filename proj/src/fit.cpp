#include "nisq/fit.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <unsupported/Eigen/LevenbergMarquardt>

#include "nisq/common.hpp"

namespace nisq {

namespace {

struct DecayFunctor : Eigen::DenseFunctor<double> {
    const std::vector<double>& m;
    const std::vector<double>& y;

    DecayFunctor(const std::vector<double>& lengths, const std::vector<double>& means)
        : Eigen::DenseFunctor<double>(3, static_cast<int>(lengths.size())), m(lengths), y(means) {}

    // x = (A, p, B)
    int operator()(const InputType& x, ValueType& f) const {
        for (std::size_t i = 0; i < m.size(); ++i) f(i) = x(0) * std::pow(x(1), m[i]) + x(2) - y[i];
        return 0;
    }

    int df(const InputType& x, JacobianType& j) const {
        for (std::size_t i = 0; i < m.size(); ++i) {
            j(i, 0) = std::pow(x(1), m[i]);
            j(i, 1) = m[i] == 0.0 ? 0.0 : x(0) * m[i] * std::pow(x(1), m[i] - 1.0);
            j(i, 2) = 1.0;
        }
        return 0;
    }
};

double rms(const DecayFit& f) {
    double s = 0.0;
    for (std::size_t i = 0; i < f.lengths.size(); ++i) {
        const double r = f.eval(f.lengths[i]) - f.means[i];
        s += r * r;
    }
    return std::sqrt(s / static_cast<double>(f.lengths.size()));
}

}  // namespace

double DecayFit::eval(double m) const { return A * std::pow(p, m) + B; }

double decay_to_error_rate(double p, int n_qubits) {
    const double d = std::ldexp(1.0, n_qubits);
    return (d - 1.0) / d * (1.0 - p);
}

DecayFit fit_exponential_decay(const std::vector<double>& lengths, const std::vector<double>& means) {
    if (lengths.size() != means.size()) throw InputError("decay fit: lengths and means differ in size");
    if (lengths.size() < 3) throw InputError("decay fit needs at least 3 points");
    DecayFit out;
    out.lengths = lengths;
    out.means = means;

    const auto [lo, hi] = std::minmax_element(means.begin(), means.end());
    const double mean = std::accumulate(means.begin(), means.end(), 0.0) / static_cast<double>(means.size());
    if (*hi - *lo <= 1e-12 * std::max(1.0, std::abs(mean))) {
        out.A = 0.0;
        out.p = 1.0;
        out.B = mean;
        out.degenerate = true;
        out.converged = true;
        out.residual = rms(out);
        return out;
    }

    // initial guess
    const double B0 = *lo;
    const double A0 = means.front() - B0;
    double p0 = 0.9;
    {
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        int k = 0;
        for (std::size_t i = 0; i < means.size(); ++i) {
            const double v = means[i] - B0;
            if (v <= 1e-12) continue;
            const double ly = std::log(v);
            sx += lengths[i];
            sy += ly;
            sxx += lengths[i] * lengths[i];
            sxy += lengths[i] * ly;
            ++k;
        }
        const double den = k * sxx - sx * sx;
        if (k >= 2 && den > 0) {
            const double slope = (k * sxy - sx * sy) / den;
            p0 = std::clamp(std::exp(slope), 1e-6, 1.0);
        }
    }

    DecayFunctor functor(lengths, means);
    Eigen::LevenbergMarquardt<DecayFunctor> lm(functor);
    lm.setMaxfev(2000);
    lm.setFtol(1e-15);
    lm.setXtol(1e-15);
    Eigen::VectorXd x(3);
    x << (A0 == 0.0 ? 1e-3 : A0), p0, B0;
    const auto status = lm.minimize(x);
    using S = Eigen::LevenbergMarquardtSpace::Status;
    if (status == S::ImproperInputParameters || status == S::TooManyFunctionEvaluation || !x.allFinite())
        throw NumericalError("decay fit did not converge");

    out.A = x(0);
    out.p = x(1);
    out.B = x(2);
    out.converged = true;
    if (out.p < 0.0 || out.p > 1.0 + 1e-6) {
        // Outside the physical range: pin p to the nearest bound and refit A, B linearly.
        out.p = std::clamp(out.p, 0.0, 1.0);
        if (out.p == 1.0) {
            out.A = 0.0;
            out.B = mean;
            out.degenerate = true;
        } else {
            Eigen::MatrixXd a(lengths.size(), 2);
            Eigen::VectorXd b(lengths.size());
            for (std::size_t i = 0; i < lengths.size(); ++i) {
                a(i, 0) = std::pow(out.p, lengths[i]);
                a(i, 1) = 1.0;
                b(i) = means[i];
            }
            const Eigen::VectorXd ab = a.colPivHouseholderQr().solve(b);
            out.A = ab(0);
            out.B = ab(1);
        }
    }
    out.residual = rms(out);
    return out;
}

}  // namespace nisq
