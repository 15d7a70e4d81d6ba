#pragma once

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace cyclicity {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr const char* kVersion = "0.1.0";

/// Base class for all library errors. Messages name the violated precondition.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

class InvalidInputError : public Error {
public:
    using Error::Error;
};

/// Friction matrix is not (sufficiently) stable.
class StabilityError : public Error {
public:
    using Error::Error;
};

class SingularCovarianceError : public Error {
public:
    using Error::Error;
};

class DegenerateRankError : public Error {
public:
    using Error::Error;
};

class NoInverseError : public Error {
public:
    using Error::Error;
};

class UndefinedOrderError : public Error {
public:
    using Error::Error;
};

class StepSizeError : public Error {
public:
    using Error::Error;
};

/// Reduce an integer index to its representative in 1..N.  Every "indexed
/// mod N" value in the library goes through here; 0 maps to N, never to 0.
inline int mod_index(long long value, int n) {
    long long r = value % n;
    if (r <= 0) r += n;
    return static_cast<int>(r);
}

/// gcd for the coprimality preconditions (p-1 vs N).
inline int gcd_int(int a, int b) {
    while (b != 0) {
        int t = a % b;
        a = b;
        b = t;
    }
    return a < 0 ? -a : a;
}

}  // namespace cyclicity
