#pragma once

#include "lmoment/arith.hpp"

namespace lmoment {

// Cusp 1/a of Gamma_0(N), N square-free, a | N.
struct CuspLabel {
    u64 N = 1;
    u64 a = 1;
};
void validate_cusp(const CuspLabel& c);

// rho_{1/a}(s, n) by the divisor/Euler closed form.
cplx rho_cusp(const CuspLabel& c, cplx s, i64 n);
// (1/(aN))^s sum_{gamma <= G, (gamma, N/a) = 1} gamma^{-2s} c_{gamma a}(n), with the
// tail bound sigma(|n|) G^{1-2 Re s}/(2 Re s - 1) (aN)^{-Re s}.
struct BruteForce {
    cplx value = 0;
    double tail_bound = 0;
};
BruteForce rho_cusp_bruteforce(const CuspLabel& c, cplx s, i64 n, u64 G = 10000);

// Constant-term coefficient rho_{1/a, infinity}(s).
cplx rho_cusp_const(const CuspLabel& c, cplx s);

// zeta_{1/a, Q}(s', tau) by the closed form; throws near the poles s' = 1 +- tau.
cplx zeta_cusp_Q(const CuspLabel& c, u64 Q, cplx sp, cplx tau);
// zeta(1 - 2 tau) Q^{-tau} sum_{h <= H} rho(1/2 - tau, -hQ) / h^{s' + tau}.
cplx zeta_cusp_Q_bruteforce(const CuspLabel& c, u64 Q, cplx sp, cplx tau, u64 H = 100000);

// value = coeff * sqrt(Q)^{sqrt_power}
struct SurdValue {
    BigRational coeff;
    int sqrt_power = 0;
};
SurdValue z_plus_special(const CuspLabel& c, u64 Q);
SurdValue z_minus_special(const CuspLabel& c, u64 Q);
// (e(N) sum_a z+ + sum_a z-) / sqrt(Q), exactly.
BigRational z_identity(u64 N, u64 Q);

BigRational frak_e(u64 N);
cplx scattering_row_sum(u64 N, cplx s);

} // namespace lmoment
