#include "lmoment/moments.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "lmoment/numeric.hpp"

namespace lmoment {

namespace {

constexpr double lattice_cut = 39.0;
constexpr double max_lattice = 5e7;

u64 lattice_bound(double X, u64 l) {
    double v = lattice_cut * X / static_cast<double>(l);
    if (v > max_lattice) throw range_exhausted("truncation infeasible: lattice bound " + std::to_string(v));
    return static_cast<u64>(std::floor(v * (1 + 1e-13)));
}

// w[m] = c(m) (l m)^{-1/2} e^{-l m / X}, conjugated on request.
std::vector<cplx> weighted(const HeckeEigenform& f, u64 M, u64 l, double X, bool conjugate) {
    auto A = f.coefficients_upto(std::max<u64>(M, 1));
    std::vector<cplx> w(M + 1, 0.0);
    for (u64 m = 1; m <= M; ++m) {
        double lm = static_cast<double>(l * m);
        cplx a = conjugate ? std::conj(A[m]) : A[m];
        w[m] = a * std::exp(-lm / X) / std::sqrt(lm);
    }
    return w;
}

void check_pair(const HeckeEigenform& f, const HeckeEigenform& g, u64 Q) {
    if (f.weight() != g.weight() || f.level() != g.level())
        throw std::invalid_argument("forms must share weight and level");
    if (std::gcd(Q, f.level()) != 1) throw std::invalid_argument("(Q, N0) must be 1");
}

} // namespace

SmoothedEstimate second_moment_ordered(const CentralValueEngine& ef, const CentralValueEngine& eg, u64 Q,
                                       const std::vector<std::size_t>& order, int threads) {
    check_pair(ef.form(), eg.form(), Q);
    CharacterGroup G(Q);
    if (order.size() != G.order()) throw std::invalid_argument("character order must cover the group");
    const bool same = &ef == &eg || ef.form().same_form(eg.form());
    struct Pair {
        SmoothedEstimate f, g;
    };
    auto vals = parallel_map<Pair>(G.order(), resolve_threads(threads), [&](std::size_t i) {
        Character chi = G.character(order[i]);
        Pair p;
        p.f = ef.value(chi);
        p.g = same ? p.f : eg.value(chi);
        return p;
    });
    KahanSumC acc;
    double err = 0;
    i64 trunc = 0;
    for (const auto& p : vals) {
        acc.add(p.f.value * std::conj(p.g.value));
        err += std::abs(p.f.value) * p.g.error_bound + std::abs(p.g.value) * p.f.error_bound +
               p.f.error_bound * p.g.error_bound;
        trunc = std::max({trunc, p.f.truncation, p.g.truncation});
    }
    const double phi = static_cast<double>(G.order());
    SmoothedEstimate S;
    S.value = acc.value() / phi;
    S.error_bound = err / phi;
    S.truncation = trunc;
    return S;
}

MomentReport second_moment(const CentralValueEngine& ef, const CentralValueEngine& eg, u64 Q, int threads) {
    std::vector<std::size_t> order(euler_phi(Q));
    std::iota(order.begin(), order.end(), 0);
    MomentReport r;
    r.Q = Q;
    r.S_direct = second_moment_ordered(ef, eg, Q, order, threads);
    r.params["f"] = ef.form().label();
    r.params["g"] = eg.form().label();
    r.params["method"] = "afe";
    return r;
}

MomentReport second_moment(const HeckeEigenform& f, const HeckeEigenform& g, u64 Q, int threads) {
    CentralValueEngine ef(f);
    if (f.same_form(g)) return second_moment(ef, ef, Q, threads);
    CentralValueEngine eg(g);
    return second_moment(ef, eg, Q, threads);
}

SmoothedEstimate diagonal_S1(const HeckeEigenform& f, const HeckeEigenform& g, u64 Q, double X) {
    check_pair(f, g, Q);
    if (!f.same_form(g)) return rankin_L1(f, g, Q);
    if (!(X > 2)) throw std::invalid_argument("diagonal_S1: X must exceed 2");
    SymsqEvaluator ev(f);
    SmoothedEstimate F = ev.cf_function(Q, 1.0);
    SmoothedEstimate c = cf_derivative(ev, Q);
    const double lx = std::log(X / 2);
    SmoothedEstimate out;
    out.value = F.value * lx + c.value;
    out.error_bound = F.error_bound * std::abs(lx) + c.error_bound;
    out.X_ladder = F.X_ladder;
    out.truncation = std::max(F.truncation, c.truncation);
    return out;
}

cplx building_block(const HeckeEigenform& f, const HeckeEigenform& g, const ShiftedSumParams& p,
                    ShiftRange range) {
    if (p.Q < 1 || p.l1 < 1 || p.l2 < 1) throw std::invalid_argument("building_block: bad parameters");
    if (!is_squarefree(p.l1) || !is_squarefree(p.l2)) throw std::invalid_argument("ell must be square-free");
    if (std::gcd(p.l1 * p.l2, f.level()) != 1) throw std::invalid_argument("ell must be coprime to N0");
    const u64 M1 = lattice_bound(p.X, p.l1), M2 = lattice_bound(p.X, p.l2);
    if (M1 == 0 || M2 == 0) return 0.0;
    auto wa = weighted(f, M1, p.l1, p.X, false);
    auto wb = weighted(g, M2, p.l2, p.X, true);
    // m1 bucketed by l1 m1 mod Q, ascending within each bucket.
    std::vector<std::vector<u64>> bucket(p.Q);
    for (u64 m1 = 1; m1 <= M1; ++m1) bucket[(p.l1 % p.Q) * (m1 % p.Q) % p.Q].push_back(m1);
    KahanSumC acc;
    for (u64 m2 = 1; m2 <= M2; ++m2) {
        const u64 t = p.l2 * m2;
        const auto& b = bucket[t % p.Q];
        auto it = b.begin();
        if (range != ShiftRange::full) {
            // l1 m1 > t for positive, >= t for nonnegative.
            u64 lo = range == ShiftRange::positive ? t / p.l1 + 1 : (t + p.l1 - 1) / p.l1;
            it = std::lower_bound(b.begin(), b.end(), lo);
        }
        for (; it != b.end(); ++it) acc.add(wa[*it] * wb[m2]);
    }
    return acc.value();
}

cplx S2_direct(const HeckeEigenform& f, const HeckeEigenform& g, u64 Q, double X) {
    if (Q < 1) throw std::invalid_argument("S2_direct: Q must be >= 1");
    const u64 M = lattice_bound(X, 1);
    if (M <= Q) return 0.0;
    auto wa = weighted(f, M, 1, X, false);
    auto wb = weighted(g, M, 1, X, true);
    KahanSumC acc;
    for (u64 m = 1; m + Q <= M; ++m) {
        if (Q > 1 && std::gcd(m, Q) != 1) continue;
        for (u64 m1 = m + Q; m1 <= M; m1 += Q) acc.add(wa[m1] * wb[m]);
    }
    return acc.value();
}

cplx S3_direct(const HeckeEigenform& f, const HeckeEigenform& g, u64 Q, double X) {
    if (Q < 1) throw std::invalid_argument("S3_direct: Q must be >= 1");
    const u64 M = lattice_bound(X, 1);
    if (M <= Q) return 0.0;
    auto wa = weighted(f, M, 1, X, false);
    auto wb = weighted(g, M, 1, X, true);
    KahanSumC acc;
    for (u64 m = 1; m + Q <= M; ++m) {
        if (Q > 1 && std::gcd(m, Q) != 1) continue;
        for (u64 m2 = m + Q; m2 <= M; m2 += Q) acc.add(wa[m] * wb[m2]);
    }
    return acc.value();
}

SieveComparison sieve_decomposition(const HeckeEigenform& f, const HeckeEigenform& g, u64 Q, double X) {
    check_pair(f, g, Q);
    SieveComparison out;
    out.lhs = S2_direct(f, g, Q, X);
    KahanSumC acc;
    for (u64 d : squarefree_divisors(Q)) {
        const double dd = static_cast<double>(d);
        const int mu_d = mobius(d);
        for (u64 d1 : divisors(d))
            for (u64 d2 : divisors(d)) {
                cplx coef = static_cast<double>(mu_d * mobius(d1) * mobius(d2)) / dd * f.coefficient(d / d1) *
                            std::conj(g.coefficient(d / d2));
                ShiftedSumParams p{X / dd, Q / d, d1, d2};
                acc.add(coef * building_block(f, g, p, ShiftRange::positive));
            }
    }
    out.rhs = acc.value();
    out.diff = std::abs(out.lhs - out.rhs);
    return out;
}

bool hecke_sieve_check(const HeckeEigenform& f, u64 d, u64 n) {
    if (d < 1 || n < 1) throw std::invalid_argument("hecke_sieve_check: d, n must be >= 1");
    if (!is_squarefree(d)) throw std::invalid_argument("hecke_sieve_check: d must be square-free");
    if (std::gcd(d, f.level()) != 1) throw std::invalid_argument("hecke_sieve_check: (d, N0) must be 1");
    if (!f.has_exact() || d * n > f.exact_bound())
        throw range_exhausted("hecke_sieve_check: exact coefficients unavailable");
    BigInt rhs = 0;
    for (u64 d0 : divisors(std::gcd(d, n))) {
        BigInt term = f.exact_coefficient(d / d0) * f.exact_coefficient(n / d0);
        term *= boost::multiprecision::pow(BigInt(d0), static_cast<unsigned>(f.weight() - 1));
        if (mobius(d0) < 0)
            rhs -= term;
        else
            rhs += term;
    }
    return rhs == f.exact_coefficient(d * n);
}

BridgeComparison orthogonality_bridge(const HeckeEigenform& f, const HeckeEigenform& g, u64 Q, u64 M, double X) {
    check_pair(f, g, Q);
    auto wa = weighted(f, M, 1, X, false);
    auto wb = weighted(g, M, 1, X, false);
    CharacterGroup G(Q);
    KahanSumC avg;
    for (std::size_t i = 0; i < G.order(); ++i) {
        Character chi = G.character(i);
        KahanSumC sf, sg;
        for (u64 m = 1; m <= M; ++m) {
            cplx c = chi(static_cast<i64>(m));
            sf.add(wa[m] * c);
            sg.add(wb[m] * c);
        }
        avg.add(sf.value() * std::conj(sg.value()));
    }
    BridgeComparison out;
    out.character_average = avg.value() / static_cast<double>(G.order());
    KahanSumC dbl;
    for (u64 m2 = 1; m2 <= M; ++m2) {
        if (Q > 1 && std::gcd(m2, Q) != 1) continue;
        for (u64 m1 = (m2 - 1) % Q + 1; m1 <= M; m1 += Q) dbl.add(wa[m1] * std::conj(wb[m2]));
    }
    out.congruence_sum = dbl.value();
    out.diff = std::abs(out.character_average - out.congruence_sum);
    return out;
}

} // namespace lmoment
