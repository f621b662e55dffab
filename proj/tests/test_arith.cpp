#include <doctest.h>

#include <cmath>
#include <numeric>
#include <random>

#include "lmoment/arith.hpp"
#include "lmoment/numeric.hpp"

using namespace lmoment;

namespace {

// Trial division over all d, the slow oracle for factor().
std::vector<std::pair<u64, int>> naive_factor(u64 n) {
    std::vector<std::pair<u64, int>> out;
    for (u64 p = 2; p * p <= n; ++p) {
        int e = 0;
        while (n % p == 0) {
            n /= p;
            ++e;
        }
        if (e) out.push_back({p, e});
    }
    if (n > 1) out.push_back({n, 1});
    return out;
}

} // namespace

TEST_CASE("factor examples") {
    CHECK(factor(1).factors.empty());
    CHECK(factor(12).factors == std::vector<std::pair<u64, int>>{{2, 2}, {3, 1}});
    const u64 n = (u64{1} << 40) + 1;
    auto f = factor(n);
    CHECK(f.multiply() == n);
    for (auto [p, e] : f.factors) CHECK(is_prime(p));
    CHECK(f.factors == naive_factor(n));
}

TEST_CASE("factor re-multiplies on random inputs up to 1e12") {
    std::mt19937_64 rng(7);
    std::uniform_int_distribution<u64> dist(1, 1000000000000ULL);
    for (int i = 0; i < 300; ++i) {
        const u64 n = dist(rng);
        auto f = factor(n);
        CHECK(f.multiply() == n);
        for (std::size_t j = 0; j < f.factors.size(); ++j) {
            CHECK(f.factors[j].second >= 1);
            if (j) CHECK(f.factors[j - 1].first < f.factors[j].first);
            CHECK(is_prime(f.factors[j].first));
        }
    }
    // Semiprimes with two large factors exercise the rho path.
    CHECK(factor(999999000001ULL * 3).multiply() == 999999000001ULL * 3);
    CHECK(factor(1000003ULL * 1000033ULL).factors == std::vector<std::pair<u64, int>>{{1000003, 1}, {1000033, 1}});
    CHECK(factor(4611686014132420609ULL).factors == std::vector<std::pair<u64, int>>{{2147483647, 2}});
}

TEST_CASE("mobius, phi, omega examples") {
    CHECK(mobius(1) == 1);
    CHECK(mobius(12) == 0);
    CHECK(mobius(30) == -1);
    CHECK(euler_phi(1) == 1);
    CHECK(euler_phi(12) == 4);
    for (u64 p : {2, 3, 101, 7919}) CHECK(euler_phi(p) == p - 1);
    CHECK(prime_omega(1) == 0);
    CHECK(prime_omega(12) == 2);
    CHECK(prime_omega(30) == 3);
}

TEST_CASE("multiplicativity on random coprime pairs") {
    std::mt19937_64 rng(11);
    std::uniform_int_distribution<u64> dist(1, 200000);
    int checked = 0;
    while (checked < 500) {
        const u64 m = dist(rng), n = dist(rng);
        if (std::gcd(m, n) != 1) continue;
        ++checked;
        CHECK(mobius(m * n) == mobius(m) * mobius(n));
        CHECK(euler_phi(m * n) == euler_phi(m) * euler_phi(n));
        CHECK(prime_omega(m * n) == prime_omega(m) + prime_omega(n));
    }
}

TEST_CASE("ramanujan sum examples") {
    for (i64 n : {-5, 0, 1, 17}) CHECK(ramanujan_sum(1, n) == 1);
    CHECK(ramanujan_sum(2, 1) == -1);
    CHECK(ramanujan_sum(4, 2) == -2);
}

TEST_CASE("ramanujan sum equals the root-of-unity sum for q, |n| <= 200") {
    int bad = 0;
    for (u64 q = 1; q <= 200; ++q)
        for (i64 n = -200; n <= 200; ++n) {
            cplx s = 0;
            for (u64 d = 1; d <= q; ++d)
                if (std::gcd(d, q) == 1) s += std::polar(1.0, -2 * pi * static_cast<double>((n * static_cast<i64>(d)) % static_cast<i64>(q)) / static_cast<double>(q));
            if (std::llround(s.real()) != ramanujan_sum(q, n) || std::abs(s.imag()) > 1e-8) ++bad;
        }
    CHECK(bad == 0);
}

TEST_CASE("sigma_tilde") {
    CHECK(std::abs(sigma_tilde(6, 0.0, 1) - 4.0) < 1e-15);
    CHECK(std::abs(sigma_tilde(4, 1.0, 2) - 1.0) < 1e-15);
    CHECK(std::abs(sigma_tilde(3, 2.0, 1) - 10.0 / 9) < 1e-15);
    for (u64 n = 1; n <= 500; ++n)
        CHECK(std::abs(sigma_tilde(n, 0.0, 1) - static_cast<double>(divisors(n).size())) < 1e-12);
}

TEST_CASE("divisors and square-free divisors") {
    CHECK(divisors(12) == std::vector<u64>{1, 2, 3, 4, 6, 12});
    CHECK(squarefree_divisors(12) == std::vector<u64>{1, 2, 3, 6});
    CHECK(divisors(1) == std::vector<u64>{1});
    CHECK(is_squarefree(30));
    CHECK_FALSE(is_squarefree(49));
    CHECK(valuation(96, 2) == 5);
}

TEST_CASE("primes_up_to agrees with is_prime") {
    auto ps = primes_up_to(10000);
    CHECK(ps.size() == 1229);
    std::size_t j = 0;
    for (u32 n = 2; n <= 10000; ++n)
        if (is_prime(n)) CHECK(ps[j++] == n);
}
