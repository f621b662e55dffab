#pragma once

#include <vector>

#include "lmoment/arith.hpp"

namespace lmoment {

// Truncated power series in q with exact integer coefficients, indices 0..prec.
struct QExpansion {
    std::vector<BigInt> c;

    QExpansion() = default;
    explicit QExpansion(std::size_t prec) : c(prec + 1) {}

    std::size_t prec() const { return c.empty() ? 0 : c.size() - 1; }
    const BigInt& operator[](std::size_t n) const { return c[n]; }
    BigInt& operator[](std::size_t n) { return c[n]; }
};

QExpansion operator+(const QExpansion& a, const QExpansion& b);
QExpansion operator-(const QExpansion& a, const QExpansion& b);
QExpansion operator*(const BigInt& s, const QExpansion& a);
// Product truncated to min(prec(a), prec(b)); exact via multi-prime NTT and CRT.
QExpansion operator*(const QExpansion& a, const QExpansion& b);
// Exact division by an integer; throws if any coefficient is not divisible.
QExpansion divide_exact(const QExpansion& a, const BigInt& d);

// Schoolbook product, used for small inputs and as an oracle.
QExpansion multiply_naive(const QExpansion& a, const QExpansion& b);

} // namespace lmoment
