#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "lmoment/arith.hpp"

namespace lmoment {

inline constexpr double pi = 3.14159265358979323846264338327950288;

// Raised when an operation needs a coefficient beyond what its provider holds.
struct range_exhausted : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Raised when a formula would divide by a vanishing Hecke eigenvalue.
struct lehmer_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Neumaier-compensated accumulator; the order of add() calls fixes the result.
class KahanSum {
public:
    void add(double x) {
        double t = sum_ + x;
        if (std::abs(sum_) >= std::abs(x))
            comp_ += (sum_ - t) + x;
        else
            comp_ += (x - t) + sum_;
        sum_ = t;
    }
    double value() const { return sum_ + comp_; }

private:
    double sum_ = 0;
    double comp_ = 0;
};

class KahanSumC {
public:
    void add(cplx x) {
        re_.add(x.real());
        im_.add(x.imag());
    }
    cplx value() const { return {re_.value(), im_.value()}; }

private:
    KahanSum re_, im_;
};

// Riemann zeta for complex s != 1: Euler-Maclaurin, Laurent series near s = 1.
cplx zeta(cplx s);
double zeta(double s);

// Stieltjes constants gamma_0, gamma_1, gamma_2.
inline constexpr double stieltjes[3] = {0.577215664901532860606512090082,
                                        -0.0728158454836767248605863758749,
                                        -0.00969036319287231848453038603521};

// Regularized upper incomplete gamma Q(a, x) = e^{-x} sum_{j<a} x^j/j! for integer a >= 1.
double upper_gamma_q(int a, double x);

// Smallest x with bound(x) <= target, where bound is decreasing for x >= a.
double solve_decreasing(const std::function<double(double)>& bound, double target, double start);

// Harmonic number sum_{j=1}^{n} 1/j.
double harmonic(int n);

// Complex Gamma via Lanczos (g=7, n=9), reflection for Re z < 1/2.
cplx gamma_fn(cplx z);

// Thread count: explicit request if > 0, else LMOMENT_THREADS, else hardware concurrency.
int resolve_threads(int requested);

// Runs job(i) for i in [0, n) over a fixed static partition; results in index order.
template <class T>
std::vector<T> parallel_map(std::size_t n, int threads, const std::function<T(std::size_t)>& job);

void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& job);

template <class T>
std::vector<T> parallel_map(std::size_t n, int threads, const std::function<T(std::size_t)>& job) {
    std::vector<T> out(n);
    parallel_for(n, threads, [&](std::size_t i) { out[i] = job(i); });
    return out;
}

// e(r/q) = exp(2 pi i r/q) with the angle reduced exactly.
cplx unit_root(i64 r, i64 q);

} // namespace lmoment
