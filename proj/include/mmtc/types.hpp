#pragma once

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace mmtc {

using cd = std::complex<double>;
using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;
using RVector = Eigen::VectorXd;
using Index = Eigen::Index;

// Label of the zero symbol in the augmented alphabet; modulation points use 0..2^Mc-1.
inline constexpr int kZeroLabel = -1;

/// Raised when a caller violates a documented precondition.
class ContractError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Raised when the RLS recursion loses positive definiteness (non-finite gain).
class NumericalBreakdown : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline void require(bool cond, const std::string& what) {
    if (!cond) throw ContractError(what);
}

/// Complex multiply-accumulate counter used for complexity measurements.
struct OpCounter {
    std::uint64_t macs = 0;        // all complex MACs
    std::uint64_t inversion = 0;   // MACs spent inverting matrices

    void add(std::uint64_t n) { macs += n; }
    void add_inversion(std::uint64_t n) {
        macs += n;
        inversion += n;
    }
};

inline void count(OpCounter* c, std::uint64_t n) {
    if (c) c->add(n);
}

}  // namespace mmtc
