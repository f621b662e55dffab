#pragma once

#include <map>
#include <string>
#include <tuple>

#include "lmoment/lseries.hpp"

namespace lmoment {

struct MomentReport {
    u64 Q = 1;
    SmoothedEstimate S_direct;
    cplx S1 = 0;      // diagonal at scale X
    cplx offdiag = 0; // S2 + S3 at scale X
    double X = 0;
    cplx prediction = 0;
    double prediction_error = 0;
    cplx residual = 0; // S_direct.value - prediction
    double residual_error = 0;
    std::map<std::string, std::string> params;
};

// ell1, ell2 square-free and coprime to the level.
struct ShiftedSumParams {
    double X = 1;
    u64 Q = 1;
    u64 l1 = 1, l2 = 1;
};

// Which shifts h in l1 m1 - l2 m2 = h Q enter the building block.
enum class ShiftRange { positive, nonnegative, full };

// (1/phi(Q)) sum_chi L(1/2, f, chi) conj(L(1/2, g, chi)), reduced in enumeration order.
MomentReport second_moment(const CentralValueEngine& ef, const CentralValueEngine& eg, u64 Q, int threads = 0);
MomentReport second_moment(const HeckeEigenform& f, const HeckeEigenform& g, u64 Q, int threads = 0);
// Same average over a caller-chosen character order (a permutation of 0..phi(Q)-1).
SmoothedEstimate second_moment_ordered(const CentralValueEngine& ef, const CentralValueEngine& eg, u64 Q,
                                       const std::vector<std::size_t>& order, int threads = 0);

// f != g: L^{(Q)}(1, f x g). f = g: prod(1 - 1/p) L^{(Q)}(1, sym^2)/zeta^{(Q)}(2) log(X/2) + c_f(Q).
SmoothedEstimate diagonal_S1(const HeckeEigenform& f, const HeckeEigenform& g, u64 Q, double X);

// Sum over l1 m1 - l2 m2 = h Q (h in range) of A(m1) conj(B(m2)) (l1 m1 l2 m2)^{-1/2}
// e^{-(l1 m1 + l2 m2)/X}, truncated at l_i m_i <= 39 X.
cplx building_block(const HeckeEigenform& f, const HeckeEigenform& g, const ShiftedSumParams& p,
                    ShiftRange range = ShiftRange::positive);

// sum_{m, h >= 1, (m, Q) = 1} A(m + hQ) conj(B(m)) e^{-(2m + hQ)/X} / sqrt((m + hQ) m), m + hQ <= 39 X.
cplx S2_direct(const HeckeEigenform& f, const HeckeEigenform& g, u64 Q, double X);
// sum_{m, h >= 1, (m, Q) = 1} A(m) conj(B(m + hQ)) (same weight and truncation).
cplx S3_direct(const HeckeEigenform& f, const HeckeEigenform& g, u64 Q, double X);

struct SieveComparison {
    cplx lhs = 0, rhs = 0;
    double diff = 0;
};
// lhs = S2_direct; rhs = sum_{d|Q} mu(d)/d sum_{d1,d2|d} mu mu A(d/d1) conj(B(d/d2)) S(X/d, Q/d, d1, d2).
SieveComparison sieve_decomposition(const HeckeEigenform& f, const HeckeEigenform& g, u64 Q, double X);

// a(dn) == sum_{d0 | (d, n)} mu(d0) d0^{k-1} a(d/d0) a(n/d0) in exact integers.
bool hecke_sieve_check(const HeckeEigenform& f, u64 d, u64 n);

struct BridgeComparison {
    cplx character_average = 0;
    cplx congruence_sum = 0;
    double diff = 0;
};
// Finite-truncation orthogonality: character average of truncated smoothed sums versus the
// double sum over m1 = m2 (mod Q), (m2, Q) = 1, m_i <= M, weights e^{-m/X}.
BridgeComparison orthogonality_bridge(const HeckeEigenform& f, const HeckeEigenform& g, u64 Q, u64 M, double X);

} // namespace lmoment
