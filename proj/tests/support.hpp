#pragma once

#include <cmath>
#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include "lmoment/arith.hpp"

namespace lmoment::test {

// Coefficients of prod_{n>=1} (1 - q^{step n})^{power} through q^prec, exact.
inline std::vector<BigInt> eta_power(std::size_t prec, int power, std::size_t step = 1) {
    std::vector<BigInt> c(prec + 1, 0);
    c[0] = 1;
    for (std::size_t n = step; n <= prec; n += step)
        for (int r = 0; r < power; ++r)
            for (std::size_t i = prec; i >= n; --i) c[i] -= c[i - n];
    return c;
}

// The weight-2 newform of level 11, eta(z)^2 eta(11z)^2, integer coefficients a(1..prec).
inline std::vector<BigInt> level11_coefficients(std::size_t prec) {
    auto a = eta_power(prec, 2, 1), b = eta_power(prec, 2, 11);
    std::vector<BigInt> out(prec + 1, 0);
    for (std::size_t i = 0; i < prec; ++i)
        for (std::size_t j = 0; i + j + 1 <= prec; ++j)
            if (b[j] != 0) out[i + j + 1] += a[i] * b[j];
    return out;
}

// Ingestion file for the level-11 form with A(m) = a(m)/sqrt(m).
inline void write_level11_file(const std::string& path, std::size_t maxm, const std::string& label = "e11") {
    auto a = level11_coefficients(maxm);
    std::ofstream os(path);
    os << "2,11," << label << ',' << maxm << '\n';
    char buf[96];
    for (std::size_t m = 1; m <= maxm; ++m) {
        std::snprintf(buf, sizeof buf, "%zu,%.17g,0\n", m, a[m].convert_to<double>() / std::sqrt(static_cast<double>(m)));
        os << buf;
    }
}

inline std::string temp_path(const std::string& name) { return "/tmp/lmoment_test_" + name; }

} // namespace lmoment::test
