#pragma once

#include <complex>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace nisq {

using cplx = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;
using Rng = std::mt19937_64;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr cplx kI{0.0, 1.0};

// Error hierarchy. The CLI maps each class to an exit code.
class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Malformed or inconsistent user input (exit code 2).
class InputError : public Error {
  public:
    using Error::Error;
};

/// A configured memory / path / contraction budget would be exceeded (exit code 3).
class BudgetError : public Error {
  public:
    BudgetError(const std::string& what, std::uint64_t required)
        : Error(what), required_(required) {}
    std::uint64_t required() const noexcept { return required_; }

  private:
    std::uint64_t required_;
};

/// Numerical inconsistency detected at runtime (exit code 1).
class NumericalError : public Error {
  public:
    using Error::Error;
};

class ParseError : public InputError {
  public:
    ParseError(const std::string& msg, int line, int column)
        : InputError("line " + std::to_string(line) + ", column " + std::to_string(column) +
                     ": " + msg),
          line_(line),
          column_(column) {}
    int line() const noexcept { return line_; }
    int column() const noexcept { return column_; }

  private:
    int line_;
    int column_;
};

/// splitmix64 finalizer; derives independent child seeds so sharded Monte Carlo
/// results do not depend on the worker count.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) {
    std::uint64_t z = master + 0x9E3779B97F4A7C15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

/// Uniform double in [0, 1) built from the top 53 bits; portable across standard libraries.
inline double uniform01(Rng& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline std::size_t uniform_index(Rng& rng, std::size_t n) {
    return static_cast<std::size_t>(uniform01(rng) * static_cast<double>(n)) % n;
}

/// Bitstring convention: character k is qubit k, qubit 0 is the most significant bit.
std::uint64_t bits_to_index(const std::string& bits);
std::string index_to_bits(std::uint64_t index, int n);

/// Sets the worker count used by internal data-parallel loops (0 = hardware default).
void set_num_threads(int threads);
int num_threads();

}  // namespace nisq
