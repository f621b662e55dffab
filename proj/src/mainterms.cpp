#include "lmoment/mainterms.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

#include "lmoment/numeric.hpp"

namespace lmoment {

namespace {

constexpr double zeta2 = pi * pi / 6;

double dpow(u64 p, int e) { return std::pow(static_cast<double>(p), e); }

// Primes p with positive exponent in num/den (all square-free inputs).
std::vector<u64> net_primes(std::initializer_list<u64> num, std::initializer_list<u64> den) {
    std::map<u64, int> e;
    for (u64 n : num)
        for (u64 p : factor(n).primes()) ++e[p];
    for (u64 n : den)
        for (u64 p : factor(n).primes()) --e[p];
    std::vector<u64> out;
    for (auto [p, v] : e) {
        if (v < 0) throw std::logic_error("net_primes: non-integral quotient");
        if (v > 0) out.push_back(p);
    }
    return out;
}

// Sum_{p > P} C p^{-sigma} over primes, bounded by 1.5 C P^{1-sigma} / ((sigma - 1) ln P).
double prime_tail(double C, double sigma, u64 P) {
    const double dP = static_cast<double>(P);
    return 1.5 * C * std::pow(dP, 1 - sigma) / ((sigma - 1) * std::log(dP));
}

// Relative perturbation of a product whose factors satisfy sum |x_p - 1| <= tau.
double product_tail(double tau) { return std::expm1(2 * tau); }

} // namespace

int r_count(u64 m) { return prime_omega(m); }

cplx E_p(cplx v, u64 p, cplx Ap, cplx Bp, cplx Ap2, cplx Bp2) {
    const double dp = static_cast<double>(p);
    const cplx pv = std::exp(-v * std::log(dp));
    const cplx AB = Ap * std::conj(Bp);
    return 1.0 - 1 / (dp * dp) + pv / (dp * dp) - pv / dp * AB + pv / (dp * dp) * (Ap2 + std::conj(Bp2)) -
           pv / (dp * dp * dp) * AB + 1 / (dp * dp * dp * dp);
}

cplx E_p_corrected(cplx v, u64 p, cplx Ap, cplx Bp, cplx Ap2, cplx Bp2) {
    const double dp = static_cast<double>(p), X = 1 / dp;
    const cplx pv = std::exp(-v * std::log(dp));
    const cplx AB = Ap * std::conj(Bp);
    const cplx Np = 1.0 - AB * X + (Ap2 + std::conj(Bp2)) * X * X - AB * X * X * X + X * X * X * X;
    return (1 - X * X) * (1.0 - pv) + pv * Np;
}

MainTerms::MainTerms(const HeckeEigenform& f, const HeckeEigenform& g, std::optional<double> C2)
    : f_(f), g_(g), diagonal_(f.same_form(g)), C2_(C2) {
    if (f.weight() != g.weight() || f.level() != g.level())
        throw std::invalid_argument("forms must share weight and level");
    if (diagonal_) {
        sym_ = std::make_unique<SymsqEvaluator>(f);
        D1_ = sym_->D(1.0);
        L_ = D1_;
        L_.value *= zeta2;
        L_.error_bound *= zeta2;
    } else {
        L_ = rankin_L1(f, g);
    }
}

const SmoothedEstimate& MainTerms::L_fg() const {
    if (diagonal_) throw std::logic_error("L_fg requires f != g");
    return L_;
}

const SmoothedEstimate& MainTerms::L_sym() const {
    if (!diagonal_) throw std::logic_error("L_sym requires f = g");
    return L_;
}

const SymsqEvaluator& MainTerms::symsq() const {
    if (!sym_) throw std::logic_error("symsq evaluator requires f = g");
    return *sym_;
}

SmoothedEstimate MainTerms::L_fg_removed(u64 Q) const {
    cplx m = euler_removed(EulerKind::rankin, Q, 1.0, &f_, &g_);
    SmoothedEstimate e = L_fg();
    e.value *= m;
    e.error_bound *= std::abs(m);
    return e;
}

double MainTerms::H2_ff(u64 q) const {
    if (std::gcd(q, f_.level()) != 1) throw std::invalid_argument("(q, N0) must be 1");
    auto A = [&](u64 n) { return f_.coefficient(n).real(); };
    auto alpha = [&](u64 p) { return valuation(q, p); };
    auto lg = [](u64 p) { return std::log(static_cast<double>(p)); };
    KahanSum first;
    for (u64 d : squarefree_divisors(q)) {
        const double outer = mobius(d) * A(d) * A(d) / static_cast<double>(d);
        if (outer == 0) continue;
        KahanSum inner;
        for (u64 d1 : divisors(d))
            for (u64 d2 : divisors(d)) {
                const u64 g = std::gcd(d1, d2);
                const double Ag = A(g);
                if (std::abs(Ag) < 1e-12)
                    throw lehmer_error("H2_ff: A(" + std::to_string(g) + ") vanishes");
                double w = mobius(d1) * mobius(d2) / (static_cast<double>(g) * Ag);
                for (u64 p : factor(d1 * d2 / (g * g)).primes()) w /= static_cast<double>(p + 1);
                double brace = 0;
                for (u64 p : factor(g).primes()) brace += lg(p) * (dpow(p, -alpha(p)) + 0.5);
                for (u64 p : factor(d1 * d2 / g).primes()) {
                    const double dp = static_cast<double>(p);
                    brace -= lg(p) * (2 * dp - 1) / (2 * (dp - 1));
                    brace += lg(p) * dpow(p, -alpha(p)) * (3 * dp - 1) / (dp - 1);
                }
                inner.add(w * brace);
            }
        first.add(outer * inner.value());
    }
    KahanSum second;
    for (u64 d : squarefree_divisors(q)) {
        double lw = std::log(static_cast<double>(d));
        double prod = 1;
        for (u64 p : factor(d).primes()) {
            const double dp = static_cast<double>(p), a2 = A(p) * A(p);
            lw -= 2 * lg(p) / dp;
            prod *= (a2 + (1 - a2) / dp + 1 / (dp * dp)) / (1 + 1 / dp);
        }
        second.add(mobius(d) / static_cast<double>(d) * lw * prod);
    }
    return 0.5 * first.value() - second.value();
}

double MainTerms::H_ff_C2_slope(u64 q) const { return 2 * symsq().cf_function(q, 1.0).value.real(); }

SmoothedEstimate MainTerms::H_ff(u64 q) const {
    if (!diagonal_) throw std::logic_error("H_ff requires f = g");
    if (q < 1) throw std::invalid_argument("H_ff: q must be >= 1");
    const SymsqEvaluator& ev = symsq();
    SmoothedEstimate PL = ev.cf_function(q, 1.0); // prod(1 - 1/p) L^{(q)}(1, sym^2)/zeta^{(q)}(2)
    SmoothedEstimate cf = cf_derivative(ev, q);
    double brace = 2 * C2() + harmonic(f_.weight() - 1) - std::log(8 * pi);
    for (u64 p : factor(f_.level()).primes()) {
        const double dp = static_cast<double>(p);
        brace += std::log(dp) * (4 * dp - 1) / (4 * (dp - 1));
    }
    for (auto [p, a] : factor(q).factors) {
        const double dp = static_cast<double>(p);
        brace -= 2 * std::log(dp) * (1 - dpow(p, -a)) / (dp - 1);
    }
    const double lq = std::log(static_cast<double>(q));
    const double h2 = H2_ff(q);
    SmoothedEstimate out;
    out.value = (2 * lq + brace) * PL.value + h2 * D1_.value + 2.0 * cf.value;
    out.error_bound = std::abs(2 * lq + brace) * PL.error_bound + std::abs(h2) * D1_.error_bound + 2 * cf.error_bound;
    out.X_ladder = PL.X_ladder;
    out.truncation = std::max(PL.truncation, cf.truncation);
    return out;
}

SmoothedEstimate MainTerms::H1_fg(u64 Q, u64 l1, u64 l2, bool swapped) const {
    if (diagonal_) throw std::logic_error("H1_fg requires f != g");
    if (!is_squarefree(l1) || !is_squarefree(l2)) throw std::invalid_argument("ell must be square-free");
    const u64 N0 = f_.level();
    if (std::gcd(l1 * l2, N0) != 1 || std::gcd(Q, N0) != 1)
        throw std::invalid_argument("(Q l1 l2, N0) must be 1");
    const HeckeEigenform& F = swapped ? g_ : f_;
    const HeckeEigenform& G = swapped ? f_ : g_;
    const cplx L = swapped ? std::conj(L_.value) : L_.value;
    const u64 g = std::gcd(l1, l2);
    const u64 N = N0 * (l1 / g) * l2;
    const auto Qf = factor(Q);
    const double two_r = std::pow(2.0, -r_count(N));
    KahanSumC acc;
    for (u64 a : divisors(N)) {
        // Q^{-1} prod_{p | a, p^alpha || Q, alpha >= 0} (p^alpha - 1) prod_{p^alpha || Q, p not | N} p^alpha
        double second = 1 / static_cast<double>(Q);
        for (u64 p : factor(a).primes()) second *= dpow(p, Qf.exponent(p)) - 1;
        for (auto [p, e] : Qf.factors)
            if (N % p != 0) second *= dpow(p, e);
        const u64 n0 = N0 / std::gcd(a, N0);
        cplx term = (two_r + second) * static_cast<double>(n0) * F.coefficient(n0) * std::conj(G.coefficient(n0));
        for (u64 p : net_primes({l1, std::gcd(a, l2)}, {g, std::gcd(a, l1)})) {
            const double dp = static_cast<double>(p);
            term *= (F.coefficient(p) - G.coefficient(p) / dp) / (1 - 1 / (dp * dp));
        }
        for (u64 p : net_primes({l2, std::gcd(a, l1)}, {g, std::gcd(a, l2)})) {
            const double dp = static_cast<double>(p);
            term *= (G.coefficient(p) - F.coefficient(p) / dp) / (1 - 1 / (dp * dp));
        }
        acc.add(term);
    }
    const double pre = 0.25 * static_cast<double>(g) / static_cast<double>(l1 * l2);
    SmoothedEstimate out;
    const cplx S = acc.value();
    out.value = pre * L * S;
    out.error_bound = pre * std::abs(S) * L_.error_bound;
    out.X_ladder = L_.X_ladder;
    out.truncation = L_.truncation;
    return out;
}

SmoothedEstimate MainTerms::H1_fg_sieved(u64 Q, bool swapped) const {
    const HeckeEigenform& F = swapped ? g_ : f_;
    const HeckeEigenform& G = swapped ? f_ : g_;
    KahanSumC acc;
    double err = 0;
    for (u64 d : squarefree_divisors(Q))
        for (u64 d1 : divisors(d))
            for (u64 d2 : divisors(d)) {
                cplx c = static_cast<double>(mobius(d) * mobius(d1) * mobius(d2)) / static_cast<double>(d) *
                         F.coefficient(d / d1) * std::conj(G.coefficient(d / d2));
                SmoothedEstimate h = H1_fg(Q / d, d1, d2, swapped);
                acc.add(c * h.value);
                err += std::abs(c) * h.error_bound;
            }
    SmoothedEstimate out;
    out.value = acc.value();
    out.error_bound = err;
    out.X_ladder = L_.X_ladder;
    out.truncation = L_.truncation;
    return out;
}

SmoothedEstimate MainTerms::prediction_fneq(u64 Q) const {
    SmoothedEstimate a = L_fg_removed(Q), b = H1_fg_sieved(Q, false), c = H1_fg_sieved(Q, true);
    SmoothedEstimate out = a;
    out.value = a.value + b.value + c.value;
    out.error_bound = a.error_bound + b.error_bound + c.error_bound;
    return out;
}

SmoothedEstimate MainTerms::prediction_ff(u64 Q) const { return H_ff(Q); }

SmoothedEstimate MainTerms::prediction(u64 Q) const { return diagonal_ ? prediction_ff(Q) : prediction_fneq(Q); }

namespace {

template <class Local>
EulerProductEstimate euler_over_primes(const HeckeEigenform& f, const HeckeEigenform& g, cplx v, u64 P,
                                       Local local) {
    if (v.real() <= 0) throw std::invalid_argument("E_N0: tail bound needs Re v > 0");
    if (P > 0xffffffffULL) throw std::invalid_argument("prime cutoff too large");
    const u64 N0 = f.level();
    cplx prod = 1;
    for (u32 p : primes_up_to(static_cast<u32>(P))) {
        if (N0 % p == 0) continue;
        const u64 pp = static_cast<u64>(p) * p;
        prod *= local(v, p, f.coefficient(p), g.coefficient(p), f.coefficient(pp), g.coefficient(pp));
    }
    const double sigma = std::min(2.0, 1 + v.real());
    EulerProductEstimate e;
    e.value = prod;
    e.prime_cutoff = P;
    e.tail_bound = std::abs(prod) * product_tail(prime_tail(12, sigma, P));
    return e;
}

} // namespace

EulerProductEstimate MainTerms::E_N0(cplx v, u64 P) const { return euler_over_primes(f_, g_, v, P, E_p); }

EulerProductEstimate MainTerms::E_N0_corrected(cplx v, u64 P) const {
    return euler_over_primes(f_, g_, v, P, E_p_corrected);
}

namespace {

struct Piece2 {
    cplx value;
    double rel_tail;
};

Piece2 piece2_bracket(const HeckeEigenform& f, const HeckeEigenform& g, u64 P) {
    const u64 N0 = f.level();
    cplx P1 = 1, P2 = 1;
    for (u32 p : primes_up_to(static_cast<u32>(P))) {
        if (N0 % p == 0) continue;
        const double dp = p;
        const cplx A = f.coefficient(p), Bb = std::conj(g.coefficient(p));
        P1 *= 1.0 - (A * Bb - (A + Bb) * (A + Bb) / (1 + 1 / dp) + 1.0) / (dp * dp);
        P2 *= 1.0 - (A * Bb - (A * A + Bb * Bb) / (dp + 1) + 1 / dp) / (dp * dp);
    }
    cplx pre = std::pow(2.0, -r_count(N0));
    const double t1 = product_tail(prime_tail(21, 2, P)), t2 = product_tail(prime_tail(9, 2, P));
    Piece2 out;
    out.value = pre * P1 + P2;
    out.rel_tail = (std::abs(pre * P1) * t1 + std::abs(P2) * t2) / std::max(std::abs(out.value), 1e-300);
    return out;
}

} // namespace

MainTerms::RhsBreakdown MainTerms::thm_main_rhs_fneq(double y, u64 P) const {
    const SmoothedEstimate& L = L_fg();
    if (!(y > 0)) throw std::invalid_argument("y must be positive");
    const u64 N0 = f_.level();
    const double ey = std::exp(pi / (y * y));
    double zN0 = zeta2, res = 1;
    cplx lev = 1;
    for (u64 p : factor(N0).primes()) {
        const double dp = static_cast<double>(p);
        zN0 *= 1 - 1 / (dp * dp);
        res *= 1 - 1 / dp;
        lev *= (dp * f_.coefficient(p) * std::conj(g_.coefficient(p)) + 1.0) * (1 - 1 / dp);
    }
    EulerProductEstimate E = E_N0(1.0, P);
    Piece2 br = piece2_bracket(f_, g_, P);
    RhsBreakdown out;
    out.piece1 = L.value / zN0 * ey * res * E.value;
    out.piece2 = ey / 2 * L.value * lev * br.value;
    out.total = out.piece1 + out.piece2;
    const double relL = L.error_bound / std::abs(L.value);
    out.tail_bound = std::abs(out.piece1) * E.tail_bound / std::abs(E.value) + std::abs(out.piece2) * br.rel_tail;
    out.error = std::abs(out.total) * relL + out.tail_bound;
    out.prime_cutoff = P;
    return out;
}

MainTerms::RhsBreakdown MainTerms::thm_main_rhs_fneq_corrected(double y, u64 P) const {
    const SmoothedEstimate& L = L_fg();
    if (!(y > 0)) throw std::invalid_argument("y must be positive");
    const u64 N0 = f_.level();
    const double ey = std::exp(pi / (y * y));
    double zN0 = zeta2, res = 1;
    cplx lev = 1;
    for (u64 p : factor(N0).primes()) {
        const double dp = static_cast<double>(p);
        zN0 *= 1 - 1 / (dp * dp);
        res *= 1 - 1 / dp;
        lev *= (dp * f_.coefficient(p) * std::conj(g_.coefficient(p)) + 1.0) * (1 - 1 / dp);
    }
    EulerProductEstimate E = E_N0_corrected(1.0, P);
    Piece2 br = piece2_bracket(f_, g_, P);
    RhsBreakdown out;
    out.piece1 = 2 * pi * ey * L.value * zN0 * res * E.value;
    out.piece2 = 2 * pi * ey / 2 * L.value * lev * br.value;
    out.total = out.piece1 + out.piece2;
    const double relL = L.error_bound / std::abs(L.value);
    out.tail_bound = std::abs(out.piece1) * E.tail_bound / std::abs(E.value) + std::abs(out.piece2) * br.rel_tail;
    out.error = std::abs(out.total) * relL + out.tail_bound;
    out.prime_cutoff = P;
    return out;
}

double MainTerms::res_rankin(u64 l1, u64 l2) const {
    if (!diagonal_) throw std::logic_error("res_rankin requires f = g");
    const u64 g = std::gcd(l1, l2);
    const u64 m = (l1 / g) * (l2 / g);
    double v = f_.coefficient(m).real() / static_cast<double>(g);
    for (u64 p : factor(m).primes()) v /= static_cast<double>(p + 1);
    return v * D1_.value.real();
}

cplx MainTerms::inner_product_rhs(double s, u64 a, u64 l1, u64 l2, bool residue) const {
    const u64 N0 = f_.level();
    const u64 g = std::gcd(l1, l2);
    const u64 N = N0 * (l1 / g) * l2;
    if (a == 0 || N % a != 0) throw std::invalid_argument("inner_product_rhs: a must divide N");
    const int k = f_.weight();
    const u64 n0 = N0 / std::gcd(a, N0);
    cplx v = static_cast<double>(n0) * f_.coefficient(n0) * std::conj(g_.coefficient(n0));
    v *= std::pow(static_cast<double>(l1 * l2), -s - (k - 1) / 2.0) * std::pow(static_cast<double>(g), 2 * s - 1) *
         std::pow(static_cast<double>(std::gcd(a, g)), 1 - s);
    for (u64 p : net_primes({l1, std::gcd(a, l2)}, {g, std::gcd(a, l1)})) {
        const double ps = std::pow(static_cast<double>(p), -s);
        v *= (f_.coefficient(p) - g_.coefficient(p) * ps) / (1 - ps * ps);
    }
    for (u64 p : net_primes({l2, std::gcd(a, l1)}, {g, std::gcd(a, l2)})) {
        const double ps = std::pow(static_cast<double>(p), -s);
        v *= (g_.coefficient(p) - f_.coefficient(p) * ps) / (1 - ps * ps);
    }
    v *= std::exp(std::lgamma(s + k - 1) - (s + k - 1) * std::log(4 * pi));
    cplx L;
    if (!diagonal_) {
        if (s == 1.0) {
            L = L_.value;
        } else {
            const u64 M = smoothed_truncation(64.0 * 16);
            auto A = f_.coefficients_upto(M), B = g_.coefficients_upto(M);
            L = ladder_value([&](u64 m) { return A[m] * std::conj(B[m]); }, s, 64, 5).value;
        }
    } else if (residue) {
        if (s != 1.0) throw std::invalid_argument("residue mode is defined at s = 1");
        L = D1_.value;
    } else {
        if (s == 1.0) throw std::invalid_argument("L(s, f x f) has a pole at s = 1; request residue mode");
        // L(s, f x f) = zeta(s) L(s, sym^2)/zeta(2s) at level 1.
        L = zeta(s) * symsq().D(s).value;
    }
    return v * L;
}

double calibrate_C2(const MainTerms& mt, const std::vector<std::pair<u64, double>>& data) {
    if (data.empty()) throw std::invalid_argument("calibrate_C2: no data");
    MainTerms base(mt.f(), mt.g(), 0.0);
    KahanSum num, den;
    for (auto [q, S] : data) {
        const double c = base.H_ff_C2_slope(q);
        const double h0 = base.H_ff(q).value.real();
        num.add(c * (S - h0));
        den.add(c * c);
    }
    return num.value() / den.value();
}

} // namespace lmoment
