#pragma once

#include <vector>

namespace nisq {

/// y(m) = A p^m + B fitted by nonlinear least squares.
struct DecayFit {
    double A = 0.0;
    double p = 1.0;
    double B = 0.0;
    double residual = 0.0;  // root-mean-square residual
    std::vector<double> lengths;
    std::vector<double> means;
    bool converged = false;
    /// Constant data: p cannot be identified, so A = 0, p = 1, B = mean.
    bool degenerate = false;

    double eval(double m) const;
};

/// Start: B = min(y), A = y(first) - B, p from a log-linear fit of y - B.
/// Throws InputError for fewer than 3 points and NumericalError if the solver fails
/// within its iteration budget.
DecayFit fit_exponential_decay(const std::vector<double>& lengths, const std::vector<double>& means);

/// Average error rate (d - 1)/d (1 - p) for a d = 2^n dimensional system.
double decay_to_error_rate(double p, int n_qubits);

}  // namespace nisq
