#pragma once

#include <complex>
#include <cstdint>
#include <utility>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

namespace lmoment {

using u32 = std::uint32_t;
using u64 = std::uint64_t;
using i64 = std::int64_t;
using cplx = std::complex<double>;

using BigInt = boost::multiprecision::cpp_int;
using BigRational = boost::multiprecision::cpp_rational;

// Primes strictly increasing, exponents >= 1, product of p^e equals n.
struct Factorization {
    u64 n = 1;
    std::vector<std::pair<u64, int>> factors;

    u64 multiply() const;
    std::vector<u64> primes() const;
    // Exponent of p in n (0 if p does not divide n).
    int exponent(u64 p) const;
};

u64 mulmod(u64 a, u64 b, u64 m);
u64 powmod(u64 a, u64 e, u64 m);
bool is_prime(u64 n);

Factorization factor(u64 n);

int mobius(u64 n);
u64 euler_phi(u64 n);
int prime_omega(u64 m);
bool is_squarefree(u64 n);

// Sorted ascending.
std::vector<u64> divisors(u64 n);
std::vector<u64> squarefree_divisors(u64 n);

// c_q(n) = sum_{d | (q,n)} d mu(q/d); n may be negative or zero.
i64 ramanujan_sum(u64 q, i64 n);

// sum_{d | n, (d, N0) = 1} d^{-v}
cplx sigma_tilde(u64 n, cplx v, u64 N0);

// Sieve of Eratosthenes, all primes <= n.
std::vector<u32> primes_up_to(u32 n);

// v_p(n) for n >= 1.
int valuation(u64 n, u64 p);

} // namespace lmoment
