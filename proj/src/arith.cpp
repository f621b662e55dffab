#include "lmoment/arith.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace lmoment {

u64 Factorization::multiply() const {
    u64 r = 1;
    for (auto [p, e] : factors)
        for (int i = 0; i < e; ++i) r *= p;
    return r;
}

std::vector<u64> Factorization::primes() const {
    std::vector<u64> ps;
    ps.reserve(factors.size());
    for (auto [p, e] : factors) ps.push_back(p);
    return ps;
}

int Factorization::exponent(u64 p) const {
    for (auto [q, e] : factors)
        if (q == p) return e;
    return 0;
}

u64 mulmod(u64 a, u64 b, u64 m) {
    return static_cast<u64>(static_cast<unsigned __int128>(a) * b % m);
}

u64 powmod(u64 a, u64 e, u64 m) {
    u64 r = 1 % m;
    a %= m;
    while (e) {
        if (e & 1) r = mulmod(r, a, m);
        a = mulmod(a, a, m);
        e >>= 1;
    }
    return r;
}

bool is_prime(u64 n) {
    if (n < 2) return false;
    for (u64 p : {2ULL, 3ULL, 5ULL, 7ULL, 11ULL, 13ULL, 17ULL, 19ULL, 23ULL, 29ULL, 31ULL, 37ULL}) {
        if (n % p == 0) return n == p;
    }
    u64 d = n - 1;
    int s = 0;
    while ((d & 1) == 0) {
        d >>= 1;
        ++s;
    }
    // Deterministic base set for all n < 2^64.
    for (u64 a : {2ULL, 325ULL, 9375ULL, 28178ULL, 450775ULL, 9780504ULL, 1795265022ULL}) {
        u64 x = powmod(a % n, d, n);
        if (a % n == 0 || x == 1 || x == n - 1) continue;
        bool composite = true;
        for (int r = 1; r < s; ++r) {
            x = mulmod(x, x, n);
            if (x == n - 1) {
                composite = false;
                break;
            }
        }
        if (composite) return false;
    }
    return true;
}

namespace {

// Brent's variant; n odd composite. Deterministic sequence of increments.
u64 pollard_rho(u64 n) {
    for (u64 c = 1;; ++c) {
        auto f = [&](u64 x) { return (mulmod(x, x, n) + c) % n; };
        u64 y = 2, x = 2, g = 1, q = 1, ys = 2;
        u64 r = 1;
        const u64 m = 128;
        do {
            x = y;
            for (u64 i = 0; i < r; ++i) y = f(y);
            u64 k = 0;
            do {
                ys = y;
                for (u64 i = 0; i < std::min(m, r - k); ++i) {
                    y = f(y);
                    q = mulmod(q, x > y ? x - y : y - x, n);
                }
                g = std::gcd(q, n);
                k += m;
            } while (k < r && g == 1);
            r <<= 1;
        } while (g == 1);
        if (g == n) {
            do {
                ys = f(ys);
                g = std::gcd(x > ys ? x - ys : ys - x, n);
            } while (g == 1);
        }
        if (g != n) return g;
    }
}

void split(u64 n, std::vector<u64>& out) {
    if (n == 1) return;
    if (is_prime(n)) {
        out.push_back(n);
        return;
    }
    u64 d = pollard_rho(n);
    split(d, out);
    split(n / d, out);
}

} // namespace

Factorization factor(u64 n) {
    if (n == 0) throw std::invalid_argument("factor: n must be >= 1");
    Factorization f;
    f.n = n;
    u64 m = n;
    auto take = [&](u64 p) {
        int e = 0;
        while (m % p == 0) {
            m /= p;
            ++e;
        }
        if (e) f.factors.emplace_back(p, e);
    };
    take(2);
    take(3);
    constexpr u64 trial_limit = 1000000;
    for (u64 p = 5; p <= trial_limit && p * p <= m; p += 6) {
        take(p);
        take(p + 2);
    }
    if (m > 1) {
        std::vector<u64> rest;
        split(m, rest);
        std::sort(rest.begin(), rest.end());
        for (std::size_t i = 0; i < rest.size();) {
            std::size_t j = i;
            while (j < rest.size() && rest[j] == rest[i]) ++j;
            f.factors.emplace_back(rest[i], static_cast<int>(j - i));
            i = j;
        }
    }
    return f;
}

int mobius(u64 n) {
    auto f = factor(n);
    for (auto [p, e] : f.factors)
        if (e > 1) return 0;
    return (f.factors.size() % 2) ? -1 : 1;
}

u64 euler_phi(u64 n) {
    auto f = factor(n);
    u64 r = n;
    for (auto [p, e] : f.factors) r = r / p * (p - 1);
    return r;
}

int prime_omega(u64 m) { return static_cast<int>(factor(m).factors.size()); }

bool is_squarefree(u64 n) {
    for (auto [p, e] : factor(n).factors)
        if (e > 1) return false;
    return true;
}

std::vector<u64> divisors(u64 n) {
    auto f = factor(n);
    std::vector<u64> ds{1};
    for (auto [p, e] : f.factors) {
        std::size_t sz = ds.size();
        u64 pk = 1;
        for (int i = 1; i <= e; ++i) {
            pk *= p;
            for (std::size_t j = 0; j < sz; ++j) ds.push_back(ds[j] * pk);
        }
    }
    std::sort(ds.begin(), ds.end());
    return ds;
}

std::vector<u64> squarefree_divisors(u64 n) {
    auto f = factor(n);
    std::vector<u64> ds{1};
    for (auto [p, e] : f.factors) {
        std::size_t sz = ds.size();
        for (std::size_t j = 0; j < sz; ++j) ds.push_back(ds[j] * p);
    }
    std::sort(ds.begin(), ds.end());
    return ds;
}

i64 ramanujan_sum(u64 q, i64 n) {
    if (q == 0) throw std::invalid_argument("ramanujan_sum: q must be >= 1");
    u64 an = static_cast<u64>(n < 0 ? -n : n);
    u64 g = std::gcd(q, an); // gcd(q, 0) = q
    i64 s = 0;
    for (u64 d : divisors(g)) s += static_cast<i64>(d) * mobius(q / d);
    return s;
}

cplx sigma_tilde(u64 n, cplx v, u64 N0) {
    cplx s = 0;
    for (u64 d : divisors(n)) {
        if (std::gcd(d, N0) != 1) continue;
        s += std::exp(-v * std::log(static_cast<double>(d)));
    }
    return s;
}

std::vector<u32> primes_up_to(u32 n) {
    std::vector<u32> ps;
    if (n < 2) return ps;
    std::vector<bool> comp(n + 1, false);
    for (u64 i = 2; i <= n; ++i) {
        if (comp[i]) continue;
        ps.push_back(static_cast<u32>(i));
        for (u64 j = i * i; j <= n; j += i) comp[j] = true;
    }
    return ps;
}

int valuation(u64 n, u64 p) {
    int e = 0;
    while (n % p == 0) {
        n /= p;
        ++e;
    }
    return e;
}

} // namespace lmoment
