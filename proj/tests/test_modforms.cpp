#include <doctest.h>

#include <cmath>
#include <fstream>
#include <numeric>

#include "lmoment/modforms.hpp"
#include "lmoment/numeric.hpp"
#include "support.hpp"

using namespace lmoment;

namespace {

const std::size_t prec = 16384;

const HeckeEigenform& delta() { return cached_level1_eigenforms(12, prec)[0]; }
const std::vector<HeckeEigenform>& k24() { return cached_level1_eigenforms(24, prec); }

BigInt sigma(u64 n, unsigned k) {
    BigInt s = 0;
    for (u64 d : divisors(n)) s += boost::multiprecision::pow(BigInt(d), k);
    return s;
}

void write_lines(const std::string& path, const std::string& text) {
    std::ofstream(path) << text;
}

} // namespace

TEST_CASE("eisenstein q-expansions") {
    auto e4 = eisenstein_qexp(4, 2);
    CHECK(e4.c == std::vector<BigInt>{1, 240, 2160});
    auto e6 = eisenstein_qexp(6, 1);
    CHECK(e6.c == std::vector<BigInt>{1, -504});
    CHECK(eisenstein_qexp(4, 0).c == std::vector<BigInt>{1});
    auto big = eisenstein_qexp(6, 200);
    for (u64 n = 1; n <= 200; ++n) CHECK(big[n] == -504 * sigma(n, 5));
    CHECK_THROWS(eisenstein_qexp(8, 5));
}

TEST_CASE("exact series multiplication matches the schoolbook product") {
    auto a = eisenstein_qexp(4, 600), b = eisenstein_qexp(6, 600);
    CHECK((a * b).c == multiply_naive(a, b).c);
}

TEST_CASE("delta equals the eta^24 product for n <= 1000") {
    const auto eta = test::eta_power(1000, 24);
    const auto& D = delta();
    int bad = 0;
    for (std::size_t n = 1; n <= 1000; ++n)
        if (D.exact_coefficient(n) != eta[n - 1]) ++bad;
    CHECK(bad == 0);
    CHECK(D.exact_coefficient(2) == -24);
    CHECK(D.exact_coefficient(6) == D.exact_coefficient(2) * D.exact_coefficient(3));
    auto dq = delta_qexp(50);
    for (std::size_t n = 1; n <= 50; ++n) CHECK(dq[n] == eta[n - 1]);
}

TEST_CASE("coefficient normalization") {
    const auto& D = delta();
    CHECK(D.coefficient(1) == cplx(1));
    CHECK(std::abs(D.coefficient(2) - -24 * std::pow(2.0, -5.5)) < 1e-15);
    CHECK(std::abs(D.coefficient(4) - (D.coefficient(2) * D.coefficient(2) - 1.0)) < 1e-14);
    CHECK_THROWS_AS(D.coefficient(16411), range_exhausted); // 16411 is prime, beyond the bound
    CHECK_NOTHROW(D.coefficient(2 * 16381));
}

TEST_CASE("weight 24: two forms, trace of T2 equals the sum of a(2)") {
    const auto& F = k24();
    REQUIRE(F.size() == 2);
    CHECK(cusp_dimension(24) == 2);
    auto T = hecke_t2_matrix(24, 200);
    BigInt trace = T[0][0] + T[1][1];
    const double sum_a2 = (F[0].coefficient(2) + F[1].coefficient(2)).real() * std::pow(2.0, 11.5);
    CHECK(std::abs(sum_a2 - trace.convert_to<double>()) < 1e-6);
    CHECK(F[0].coefficient(2).real() > F[1].coefficient(2).real());
    CHECK(F[0].label() == "k24a");
    CHECK(F[1].label() == "k24b");
    CHECK_FALSE(F[0].same_form(F[1]));
}

TEST_CASE("exact multiplicativity and Hecke recursion on computed forms") {
    const auto& D = cached_level1_eigenforms(12, 90000)[0]; // m n <= 300^2
    int bad = 0;
    for (u64 m = 1; m <= 300; ++m)
        for (u64 n = 1; n <= 300; ++n)
            if (std::gcd(m, n) == 1 && D.exact_coefficient(m * n) != D.exact_coefficient(m) * D.exact_coefficient(n))
                ++bad;
    CHECK(bad == 0);
    for (u32 p : primes_up_to(50)) {
        const BigInt pk = boost::multiprecision::pow(BigInt(p), 11);
        u64 pr = p; // p^r
        for (int r = 1; r <= 4 && pr * p <= D.exact_bound(); ++r, pr *= p) {
            const BigInt lhs = D.exact_coefficient(pr * p);
            const BigInt rhs = D.exact_coefficient(p) * D.exact_coefficient(pr) - pk * D.exact_coefficient(pr / p);
            CHECK(lhs == rhs);
        }
    }
}

TEST_CASE("Ramanujan bound |A(p)| <= 2 for p <= 1e4") {
    double worst = 0;
    for (u32 p : primes_up_to(10000)) {
        worst = std::max(worst, std::abs(delta().coefficient(p)));
        for (const auto& f : k24()) worst = std::max(worst, std::abs(f.coefficient(p)));
    }
    CHECK(worst <= 2 + 1e-9);
}

TEST_CASE("satake parameters") {
    CHECK(std::abs(satake(2.0).alpha - 1.0) < 1e-15);
    CHECK(std::abs(satake(0.0).alpha - cplx(0, 1)) < 1e-15);
    CHECK(std::abs(satake(1.0).alpha - std::polar(1.0, pi / 3)) < 1e-15);
    double worst = 0;
    for (u32 p : primes_up_to(2000)) {
        cplx A = delta().coefficient(p);
        cplx a = satake(A, p).alpha;
        worst = std::max(worst, std::abs(a + 1.0 / a - A));
        CHECK(std::abs(std::abs(a) - 1) < 1e-12);
        CHECK(a.imag() >= 0);
    }
    CHECK(worst <= 1e-14);
}

TEST_CASE("ingestion validates invariants") {
    const std::string ok = test::temp_path("ingest_ok.csv");
    test::write_level11_file(ok, 300);
    auto f = ingest_coefficients(ok);
    CHECK(f.level() == 11);
    CHECK(f.weight() == 2);
    CHECK(f.provider() == Provider::file);
    CHECK(std::abs(f.coefficient(2) - -2 / std::sqrt(2.0)) < 1e-15);
    // Beyond the stored bound the multiplicative extension still applies.
    CHECK(std::abs(f.coefficient(2 * 149) - f.coefficient(2) * f.coefficient(149)) < 1e-12);

    const std::string bad1 = test::temp_path("ingest_a1.csv");
    write_lines(bad1, "12,1,x,2\n1,2,0\n2,-0.5,0\n");
    CHECK_THROWS_WITH_AS(ingest_coefficients(bad1), doctest::Contains("A(1)=1"), std::runtime_error);

    // Delta's table with A(6) perturbed.
    const std::string bad6 = test::temp_path("ingest_a6.csv");
    {
        std::ofstream os(bad6);
        os << "12,1,d,8\n";
        os.precision(17);
        for (u64 m = 1; m <= 8; ++m) {
            double a = delta().coefficient(m).real();
            if (m == 6) a += 1e-3;
            os << m << ',' << a << ",0\n";
        }
    }
    CHECK_THROWS_WITH_AS(ingest_coefficients(bad6), doctest::Contains("m=6"), std::runtime_error);

    const std::string garbled = test::temp_path("ingest_bad.csv");
    write_lines(garbled, "12,1,d,2\n1,1,0\nx,y\n");
    CHECK_THROWS_WITH_AS(ingest_coefficients(garbled), doctest::Contains("parse error"), std::runtime_error);
}

TEST_CASE("write then ingest round-trips") {
    const std::string path = test::temp_path("roundtrip.csv");
    write_coefficients(delta(), 500, path);
    auto g = ingest_coefficients(path);
    CHECK(g.label() == "k12");
    for (u64 m = 1; m <= 500; ++m) CHECK(std::abs(g.coefficient(m) - delta().coefficient(m)) < 1e-15);
}
