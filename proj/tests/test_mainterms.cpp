#include <doctest.h>

#include <cmath>
#include <numeric>

#include "lmoment/mainterms.hpp"
#include "lmoment/numeric.hpp"

using namespace lmoment;

namespace {

const HeckeEigenform& delta() { return cached_level1_eigenforms(12, 50000)[0]; }
const std::vector<HeckeEigenform>& k24() { return cached_level1_eigenforms(24, 50000); }

const MainTerms& mt_ff() {
    static const MainTerms mt(delta(), delta());
    return mt;
}
const MainTerms& mt_fg() {
    static const MainTerms mt(k24()[0], k24()[1]);
    return mt;
}

const double zeta2 = pi * pi / 6;

// H2_ff(p^alpha) expanded by hand over (d1, d2) in {1, p}^2.
double h2_prime_power(double A, double p, int alpha) {
    const double lp = std::log(p), pa = std::pow(p, -alpha);
    const double b1 = -lp * (2 * p - 1) / (2 * (p - 1)) + lp * pa * (3 * p - 1) / (p - 1); // (p,1) and (1,p)
    const double b2 = lp * (pa + 0.5) + b1;                                                 // (p,p)
    const double inner = 2 * (-1 / (p + 1)) * b1 + b2 / (p * A);
    const double first = 0.5 * (-A * A / p) * inner;
    const double second = (-1 / p) * (lp - 2 * lp / p) * (A * A + (1 - A * A) / p + 1 / (p * p)) / (1 + 1 / p);
    return first - second;
}

} // namespace

TEST_CASE("H2_ff examples") {
    const MainTerms& mt = mt_ff();
    CHECK(mt.H2_ff(1) == 0.0);
    for (u64 p : {2, 3, 7, 101})
        for (int alpha : {1, 2}) {
            const u64 q = alpha == 1 ? p : p * p;
            const double A = delta().coefficient(p).real();
            CHECK(std::abs(mt.H2_ff(q) - h2_prime_power(A, static_cast<double>(p), alpha)) < 1e-12);
        }
    CHECK(std::isfinite(mt.H2_ff(30)));
}

TEST_CASE("H2_ff guards a vanishing A((d1, d2))") {
    auto table = delta().coefficients_upto(50000);
    table[2] = 1e-13;
    HeckeEigenform fake(12, 1, "lehmer", Provider::file, table);
    MainTerms mt(fake, fake);
    CHECK_THROWS_AS(mt.H2_ff(2), lehmer_error);
    CHECK_NOTHROW(mt.H2_ff(3));
}

TEST_CASE("H_ff structure") {
    const MainTerms& mt = mt_ff();
    const SymsqEvaluator& ev = mt.symsq();
    const double D1 = ev.D(1.0).value.real();
    CHECK(std::abs(mt.L_sym().value.real() - 0.631792945727879) < 1e-11);
    CHECK(std::abs(D1 * zeta2 - mt.L_sym().value.real()) < 1e-14);
    // q = 1: constant brace times L/zeta(2) plus twice c_f(1).
    const double brace1 = harmonic(11) - std::log(8 * pi);
    const double cf1 = cf_derivative(ev, 1).value.real();
    CHECK(std::abs(mt.H_ff(1).value.real() - (brace1 * D1 + 2 * cf1)) < 1e-12);
    // Affine in C2 with slope H_ff_C2_slope.
    MainTerms cal(delta(), delta(), 0.37);
    for (u64 q : {1, 7, 30, 101}) {
        const double diff = cal.H_ff(q).value.real() - mt.H_ff(q).value.real();
        CHECK(std::abs(diff - 0.37 * mt.H_ff_C2_slope(q)) < 1e-12);
    }
    CHECK_THROWS_AS(mt_fg().H_ff(5), std::logic_error);
}

TEST_CASE("log q coefficient at prime q matches the Satake factorization") {
    const MainTerms& mt = mt_ff();
    const double D1 = mt.symsq().D(1.0).value.real();
    double worst = 0;
    for (u32 q : primes_up_to(400)) {
        if (q < 50) continue;
        const double slope = mt.H_ff_C2_slope(q); // 2 prod(1 - 1/p) L^{(q)}/zeta^{(q)}(2)
        const cplx a = satake(delta().coefficient(q), q).alpha;
        const double dq = q;
        const cplx local = (1.0 - a * a / dq) * (1.0 - 1 / dq) * (1.0 - 1.0 / (a * a * dq));
        const double expect = 2 * (1 - 1 / dq) * D1 * local.real() / (1 - 1 / (dq * dq));
        CHECK(std::abs(slope - expect) < 1e-12);
        worst = std::max(worst, std::abs(slope / (2 * D1) - 1) * dq);
    }
    // Leading deviation is A(q)^2 / q with |A(q)| <= 2.
    CHECK(worst <= 4.5);
}

TEST_CASE("prime-Q shape of H_ff") {
    const MainTerms& mt = mt_ff();
    const double D1 = mt.symsq().D(1.0).value.real();
    const double cf1 = cf_derivative(mt.symsq(), 1).value.real();
    // H_ff(Q) - [2 log Q + brace(1)] L/zeta(2) - 2 c_f(1) = O(log Q / Q) over primes.
    auto scaled = [&](u32 Q) {
        const double lq = std::log(static_cast<double>(Q));
        const double shape = (2 * lq + harmonic(11) - std::log(8 * pi)) * D1 + 2 * cf1;
        return std::abs(mt.H_ff(Q).value.real() - shape) * Q / lq;
    };
    double c_low = 0, c_high = 0;
    for (u32 p : primes_up_to(400)) {
        if (p < 50) continue;
        (p <= 200 ? c_low : c_high) = std::max(p <= 200 ? c_low : c_high, scaled(p));
    }
    CHECK(c_low < 50);
    CHECK(c_high <= 1.5 * c_low);
}

TEST_CASE("H1_fg examples") {
    const MainTerms& mt = mt_fg();
    const cplx L = mt.L_fg().value;
    CHECK(std::abs(L - 0.142754250885994) < 1e-11);
    for (u64 Q : {1, 2, 7, 30, 101}) CHECK(std::abs(mt.H1_fg(Q, 1, 1).value - L / 2.0) < 1e-15);
    // Q = 1, l1 = 2: a = 1 carries 2^{-1} + 1, a = 2 carries 2^{-1}.
    const double A = k24()[0].coefficient(2).real(), B = k24()[1].coefficient(2).real();
    const cplx expect = L / 8.0 * (1.5 * (A - B / 2) + 0.5 * (B - A / 2)) / 0.75;
    CHECK(std::abs(mt.H1_fg(1, 2, 1).value - expect) < 1e-15);
    // Swapping the forms and the ells conjugates.
    MainTerms sw(k24()[1], k24()[0]);
    for (auto [l1, l2] : {std::pair<u64, u64>{1, 1}, {2, 3}, {6, 5}, {10, 15}})
        for (u64 Q : {1, 4, 21}) {
            CHECK(std::abs(sw.H1_fg(Q, l2, l1).value - std::conj(mt.H1_fg(Q, l1, l2).value)) < 1e-15);
            CHECK(std::abs(mt.H1_fg(Q, l2, l1, true).value - sw.H1_fg(Q, l2, l1).value) < 1e-15);
        }
    CHECK_THROWS_AS(mt.H1_fg(1, 4, 1), std::invalid_argument);
    CHECK_THROWS_AS(mt_ff().H1_fg(1, 1, 1), std::logic_error);
}

TEST_CASE("sieved H1 at a prime matches the two-term expansion") {
    const MainTerms& mt = mt_fg();
    const cplx L = mt.L_fg().value;
    CHECK(std::abs(mt.H1_fg_sieved(1).value - mt.H1_fg(1, 1, 1).value) < 1e-16);
    for (u64 Q : {3, 11, 97}) {
        const double q = static_cast<double>(Q);
        const double A = k24()[0].coefficient(Q).real(), B = k24()[1].coefficient(Q).real();
        const double den = 1 - 1 / (q * q);
        const cplx hQ1 = L / (4 * q) * (1.5 * (A - B / q) + 0.5 * (B - A / q)) / den;
        const cplx h1Q = L / (4 * q) * (1.5 * (B - A / q) + 0.5 * (A - B / q)) / den;
        const cplx expect = L / 2.0 - (A * B * L / 2.0 - B * hQ1 - A * h1Q + L / (2 * q)) / q;
        CHECK(std::abs(mt.H1_fg_sieved(Q).value - expect) < 1e-12);
    }
}

TEST_CASE("prediction_fneq approaches 2 L(1, f x g) like 1/Q over primes") {
    const MainTerms& mt = mt_fg();
    const cplx L2 = 2.0 * mt.L_fg().value;
    const cplx h = mt.H1_fg(1, 1, 1).value, hs = mt.H1_fg(1, 1, 1, true).value;
    CHECK(std::abs(mt.prediction_fneq(1).value - (mt.L_fg().value + h + hs)) < 1e-15);
    CHECK(std::abs(mt.prediction_fneq(1).value - L2) < 1e-15);
    double c_low = 0, c_high = 0;
    for (u32 p : primes_up_to(400)) {
        if (p < 20) continue;
        const SmoothedEstimate e = mt.prediction_fneq(p);
        CHECK(std::abs(e.value.imag()) <= e.error_bound + 1e-15);
        const double c = std::abs(e.value - L2) * p;
        (p <= 200 ? c_low : c_high) = std::max(p <= 200 ? c_low : c_high, c);
    }
    CHECK(c_low < 5);
    CHECK(c_high <= 1.5 * c_low);
    // Composite moduli: finite, real part dominant.
    for (u64 Q : {6, 12, 35, 60, 105, 200}) {
        const SmoothedEstimate e = mt.prediction(Q);
        CHECK(std::isfinite(e.value.real()));
        CHECK(std::abs(e.value.imag()) <= e.error_bound + 1e-15);
    }
}

TEST_CASE("E_p local factor") {
    // A = B = 2, A(p^2) = B(p^2) = 3, expanded by hand.
    for (u64 p : {2, 3, 5, 101})
        for (cplx v : {cplx(1, 0), cplx(2, 0), cplx(0.5, 3)}) {
            const double dp = static_cast<double>(p);
            const cplx x = std::pow(dp, -v);
            const cplx expect = 1 - std::pow(dp, -2) + x / (dp * dp) - 4.0 * x / dp + 6.0 * x / (dp * dp) -
                                4.0 * x / (dp * dp * dp) + std::pow(dp, -4);
            CHECK(std::abs(E_p(v, p, 2, 2, 3, 3) - expect) < 1e-15);
        }
    double worst = 0;
    for (u32 p : primes_up_to(10000)) {
        const auto& f = k24()[0];
        const auto& g = k24()[1];
        const u64 pp = static_cast<u64>(p) * p;
        const cplx e = E_p(1.0, p, f.coefficient(p), g.coefficient(p), f.coefficient(pp), g.coefficient(pp));
        worst = std::max(worst, std::abs(e - 1.0) * p * p);
    }
    CHECK(worst <= 12);
}

TEST_CASE("generating series of L^{(q)}(1, f x g) q^{-v}") {
    const auto& f = k24()[0];
    const auto& g = k24()[1];
    const MainTerms& mt = mt_fg();
    const double v = 3;
    KahanSumC sum;
    for (u64 q = 1; q <= 10000; ++q) sum.add(euler_removed(EulerKind::rankin, q, 1.0, &f, &g) * std::pow(q, -v));
    const EulerProductEstimate E = mt.E_N0_corrected(v, 20000);
    const cplx corrected = zeta(v) * zeta2 * E.value;
    // The product keeps its (1 - p^-2) tail, the q-sum its q > 10^4 tail.
    CHECK(std::abs(sum.value() - corrected) <= zeta(v) * zeta2 * E.tail_bound + 1e-7);
    CHECK(std::abs(sum.value() - corrected) > 1e-7);
    // The literal factor does not reproduce the series (it keeps p^-4 and divides by zeta(2)).
    const cplx literal = zeta(v) / zeta2 * mt.E_N0(v, 20000).value;
    CHECK(std::abs(sum.value() - literal) > 1e-2);
}

TEST_CASE("Euler products: doubling the cutoff stays inside the tail bound") {
    const MainTerms& mt = mt_fg();
    for (cplx v : {cplx(1, 0), cplx(2, 0), cplx(0.5, 1)}) {
        for (bool corrected : {false, true}) {
            EulerProductEstimate a = corrected ? mt.E_N0_corrected(v, 10000) : mt.E_N0(v, 10000);
            EulerProductEstimate b = corrected ? mt.E_N0_corrected(v, 20000) : mt.E_N0(v, 20000);
            CHECK(std::abs(a.value - b.value) <= a.tail_bound);
            CHECK(b.tail_bound < a.tail_bound);
        }
    }
    CHECK_THROWS_AS(mt.E_N0(-0.5), std::invalid_argument);
    auto r1 = mt.thm_main_rhs_fneq(4, 10000), r2 = mt.thm_main_rhs_fneq(4, 20000);
    CHECK(std::abs(r1.total - r2.total) <= r1.tail_bound);
    CHECK(r1.tail_bound <= r1.error);
}

TEST_CASE("f != g right-hand side") {
    const MainTerms& mt = mt_fg();
    const cplx L = mt.L_fg().value;
    const u64 P = 20000;
    auto r = mt.thm_main_rhs_fneq(4, P);
    const double ey = std::exp(pi / 16);
    CHECK(std::abs(r.piece1 - L / zeta2 * ey * mt.E_N0(1.0, P).value) < 1e-15);
    CHECK(std::abs(r.total - r.piece1 - r.piece2) < 1e-15);
    // The Gaussian factor is the only y-dependence.
    auto big = mt.thm_main_rhs_fneq(1e6, P), one = mt.thm_main_rhs_fneq(1, P);
    CHECK(std::abs(big.total - one.total * std::exp(-pi)) <= 4e-12 * std::abs(big.total));
    auto c = mt.thm_main_rhs_fneq_corrected(4, P);
    CHECK(std::abs(c.piece1 - 2 * pi * ey * L * zeta2 * mt.E_N0_corrected(1.0, P).value) < 1e-14);
    CHECK_THROWS_AS(mt.thm_main_rhs_fneq(0), std::invalid_argument);
}

TEST_CASE("Rankin-Selberg residues") {
    const MainTerms& mt = mt_ff();
    const double D1 = mt.L_sym().value.real() / zeta2;
    const double A2 = delta().coefficient(2).real(), A3 = delta().coefficient(3).real();
    CHECK(std::abs(mt.res_rankin(1, 1) - D1) < 1e-15);
    CHECK(std::abs(mt.res_rankin(2, 1) - A2 / 3 * D1) < 1e-15);
    CHECK(std::abs(mt.res_rankin(2, 2) - D1 / 2) < 1e-15);
    CHECK(std::abs(mt.res_rankin(6, 1) - A2 * A3 / 12 * D1) < 1e-15);
    for (u64 a : {1, 2, 6, 10})
        for (u64 b : {1, 3, 5, 6}) CHECK(mt.res_rankin(a, b) == mt.res_rankin(b, a));
    CHECK_THROWS_AS(mt_fg().res_rankin(1, 1), std::logic_error);
}

TEST_CASE("inner product formula") {
    const MainTerms& mt = mt_fg();
    const auto& f = k24()[0];
    const auto& g = k24()[1];
    const int k = 24;
    auto gamma_factor = [&](double s) { return std::exp(std::lgamma(s + k - 1) - (s + k - 1) * std::log(4 * pi)); };
    // Unfolding case: a = N0 = 1, l1 = l2 = 1.
    auto A = f.coefficients_upto(50000), B = g.coefficients_upto(50000);
    const cplx L2 = ladder_value([&](u64 m) { return A[m] * std::conj(B[m]); }, 2.0, 48, 5).value;
    CHECK(std::abs(mt.inner_product_rhs(2, 1, 1, 1) - gamma_factor(2) * L2) < 1e-9 * gamma_factor(2));
    CHECK(std::abs(mt.inner_product_rhs(1, 1, 1, 1) - gamma_factor(1) * mt.L_fg().value) < 1e-20);
    // Interchanging the ells with f and g conjugates at real s.
    MainTerms sw(g, f);
    for (auto [l1, l2] : {std::pair<u64, u64>{2, 3}, {3, 1}, {6, 10}})
        for (double s : {1.0, 1.5}) {
            const u64 N = l1 / std::gcd(l1, l2) * l2;
            for (u64 a : divisors(N)) {
                const cplx x = mt.inner_product_rhs(s, a, l1, l2);
                const cplx y = sw.inner_product_rhs(s, a, l2, l1);
                CHECK(std::abs(x - std::conj(y)) <= 1e-9 * std::abs(x) + 1e-300);
            }
        }
    CHECK_THROWS_AS(mt.inner_product_rhs(1, 4, 1, 1), std::invalid_argument);
    // f = g: pole at s = 1 unless residue mode is requested.
    const MainTerms& ff = mt_ff();
    CHECK_THROWS_AS(ff.inner_product_rhs(1, 1, 1, 1), std::invalid_argument);
    const double g12 = std::exp(std::lgamma(12.0) - 12 * std::log(4 * pi));
    CHECK(std::abs(ff.inner_product_rhs(1, 1, 1, 1, true) - g12 * ff.res_rankin(1, 1)) < 1e-15 * g12);
}

TEST_CASE("calibrate_C2 recovers a planted constant") {
    MainTerms planted(delta(), delta(), -0.8125);
    std::vector<std::pair<u64, double>> data;
    for (u32 p : primes_up_to(200))
        if (p >= 50) data.emplace_back(p, planted.H_ff(p).value.real());
    CHECK(std::abs(calibrate_C2(mt_ff(), data) - -0.8125) < 1e-10);
    CHECK_THROWS_AS(calibrate_C2(mt_ff(), {}), std::invalid_argument);
}
