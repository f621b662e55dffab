#include "lmoment/eisenstein.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

#include "lmoment/numeric.hpp"

namespace lmoment {

namespace {

cplx ppow(u64 p, cplx e) { return std::exp(e * std::log(static_cast<double>(p))); }

void check_rho_domain(cplx s) {
    if (s.imag() != 0) {
        if (s.real() <= 0.5) throw std::domain_error("rho_cusp: Re s must exceed 1/2");
        return;
    }
    // Real s: zeta(2s) must be finite and nonzero.
    const double t = 2 * s.real();
    if (std::abs(t - 1) < 1e-12) throw std::domain_error("rho_cusp: pole of zeta(2s)");
    if (t <= 0 && std::abs(t / 2 - std::round(t / 2)) < 1e-12)
        throw std::domain_error("rho_cusp: trivial zero of zeta(2s)");
}

} // namespace

void validate_cusp(const CuspLabel& c) {
    if (c.N < 1 || !is_squarefree(c.N)) throw std::invalid_argument("cusp: N must be square-free");
    if (c.a < 1 || c.N % c.a != 0) throw std::invalid_argument("cusp: a must divide N");
}

cplx rho_cusp(const CuspLabel& c, cplx s, i64 n) {
    validate_cusp(c);
    check_rho_domain(s);
    if (n == 0) throw std::invalid_argument("rho_cusp: n must be nonzero");
    const u64 an = static_cast<u64>(n < 0 ? -n : n);
    cplx div = 0;
    for (u64 d : divisors(an))
        if (std::gcd(d, c.N) == 1) div += ppow(d, 1.0 - 2.0 * s);
    cplx v = ppow(c.N / c.a, -s) * div / zeta(2.0 * s);
    for (u64 p : factor(c.N).primes()) v /= 1.0 - ppow(p, -2.0 * s);
    for (u64 p : factor(c.a).primes()) {
        const int al = valuation(an, p);
        const cplx e = 1.0 - 2.0 * s;
        v *= ppow(p, -2.0 * s) / (1.0 - ppow(p, e)) *
             (static_cast<double>(p) - ppow(p, static_cast<double>(al) * e + 1.0) - 1.0 +
              ppow(p, static_cast<double>(al + 1) * e));
    }
    return v;
}

BruteForce rho_cusp_bruteforce(const CuspLabel& c, cplx s, i64 n, u64 G) {
    validate_cusp(c);
    if (s.real() <= 0.5) throw std::domain_error("rho_cusp_bruteforce: Re s must exceed 1/2");
    const u64 Na = c.N / c.a;
    KahanSumC acc;
    for (u64 g = 1; g <= G; ++g) {
        if (std::gcd(g, Na) != 1) continue;
        const i64 r = ramanujan_sum(g * c.a, n);
        if (r == 0) continue;
        acc.add(static_cast<double>(r) * ppow(g, -2.0 * s));
    }
    const double aN = static_cast<double>(c.a * c.N);
    BruteForce out;
    out.value = std::exp(-s * std::log(aN)) * acc.value();
    double sig = 0;
    for (u64 d : divisors(static_cast<u64>(n < 0 ? -n : n))) sig += static_cast<double>(d);
    const double sr = s.real();
    out.tail_bound = sig * std::pow(static_cast<double>(G), 1 - 2 * sr) / (2 * sr - 1) * std::pow(aN, -sr);
    return out;
}

cplx rho_cusp_const(const CuspLabel& c, cplx s) {
    validate_cusp(c);
    if (s.real() <= 0.5) throw std::domain_error("rho_cusp_const: Re s must exceed 1/2");
    if (std::abs(s - 1.0) < 1e-12) throw std::domain_error("rho_cusp_const: pole of zeta(2s - 1)");
    cplx v = zeta(2.0 * s - 1.0) / zeta(2.0 * s) * static_cast<double>(euler_phi(c.a)) *
             std::exp(-s * std::log(static_cast<double>(c.a * c.N)));
    for (u64 p : factor(c.N).primes()) v /= 1.0 - ppow(p, -2.0 * s);
    for (u64 p : factor(c.N / c.a).primes()) v *= 1.0 - ppow(p, 1.0 - 2.0 * s);
    return v;
}

cplx zeta_cusp_Q(const CuspLabel& c, u64 Q, cplx sp, cplx tau) {
    validate_cusp(c);
    if (Q < 1) throw std::invalid_argument("zeta_cusp_Q: Q must be >= 1");
    if (std::abs(sp + tau - 1.0) < 1e-6 || std::abs(sp - tau - 1.0) < 1e-6)
        throw std::domain_error("zeta_cusp_Q: s' within 1e-6 of a pole 1 +- tau");
    cplx v = zeta(sp + tau) * zeta(sp - tau) * ppow(c.N / c.a, -0.5 + tau) * ppow(Q, -tau);
    for (u64 p : factor(c.N).primes()) v /= 1.0 - ppow(p, -1.0 + 2.0 * tau);
    for (u64 p : factor(c.N / c.a).primes()) v *= 1.0 - ppow(p, -(sp - tau));
    const auto Qf = factor(Q);
    for (u64 p : factor(c.a).primes()) {
        const double dp = static_cast<double>(p);
        const int al = Qf.exponent(p);
        v *= ppow(p, -1.0 + 2.0 * tau) / (1.0 - ppow(p, 2.0 * tau)) *
             ((dp - 1) * (1.0 - ppow(p, -(sp - tau))) +
              ppow(p, 2.0 * tau * static_cast<double>(al)) * (ppow(p, 2.0 * tau) - dp) * (1.0 - ppow(p, -(sp + tau))));
    }
    for (auto [p, al] : Qf.factors) {
        if (c.N % p == 0) continue;
        v *= ((1.0 - ppow(p, -(sp - tau))) -
              ppow(p, static_cast<double>(al + 1) * 2.0 * tau) * (1.0 - ppow(p, -(sp + tau)))) /
             (1.0 - ppow(p, 2.0 * tau));
    }
    return v;
}

cplx zeta_cusp_Q_bruteforce(const CuspLabel& c, u64 Q, cplx sp, cplx tau, u64 H) {
    validate_cusp(c);
    KahanSumC acc;
    const cplx s = 0.5 - tau;
    for (u64 h = 1; h <= H; ++h)
        acc.add(rho_cusp(c, s, -static_cast<i64>(h * Q)) * ppow(h, -(sp + tau)));
    return zeta(1.0 - 2.0 * tau) * ppow(Q, -tau) * acc.value();
}

SurdValue z_plus_special(const CuspLabel& c, u64 Q) {
    validate_cusp(c);
    if (Q < 1) throw std::invalid_argument("z_plus_special: Q must be >= 1");
    BigRational v = 1;
    for (u64 p : factor(c.N).primes()) v /= BigRational(p + 1);
    return {v, 1};
}

SurdValue z_minus_special(const CuspLabel& c, u64 Q) {
    validate_cusp(c);
    if (Q < 1) throw std::invalid_argument("z_minus_special: Q must be >= 1");
    const auto Qf = factor(Q);
    BigInt v = 1;
    for (u64 p : factor(c.a).primes()) {
        BigInt pa = boost::multiprecision::pow(BigInt(p), static_cast<unsigned>(Qf.exponent(p)));
        v *= pa - 1;
    }
    for (auto [p, al] : Qf.factors)
        if (c.N % p != 0) v *= boost::multiprecision::pow(BigInt(p), static_cast<unsigned>(al));
    return {BigRational(v), -1};
}

BigRational z_identity(u64 N, u64 Q) {
    BigRational plus = 0, minus = 0;
    for (u64 a : divisors(N)) {
        plus += z_plus_special({N, a}, Q).coeff;
        minus += z_minus_special({N, a}, Q).coeff;
    }
    // z+ carries sqrt(Q), z- carries 1/sqrt(Q); divide the sum by sqrt(Q).
    return frak_e(N) * plus + minus / BigRational(Q);
}

BigRational frak_e(u64 N) {
    if (N < 1 || !is_squarefree(N)) throw std::invalid_argument("frak_e: N must be square-free");
    BigRational v = 1;
    for (u64 p : factor(N).primes()) v *= BigRational(p + 1, 2);
    return v;
}

cplx scattering_row_sum(u64 N, cplx s) {
    if (N < 1 || !is_squarefree(N)) throw std::invalid_argument("scattering_row_sum: N must be square-free");
    cplx v = 1;
    for (u64 p : factor(N).primes()) v *= (ppow(p, s) + 1.0) / (ppow(p, 1.0 - s) + 1.0);
    return v;
}

} // namespace lmoment
