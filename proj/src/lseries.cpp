#include "lmoment/lseries.hpp"

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "lmoment/numeric.hpp"

namespace lmoment {

namespace {
// Fixed L-values use X0 2^j, j = 0..4.
constexpr int fixed_points = 5;
constexpr double fixed_span = 16;

// c~(m) = sum_{d^2 | m} c(m/d^2): multiplies the Dirichlet series by zeta(2s). Applied to
// A(m) conj(B(m)) or A(m^2) it removes the 1/zeta(2s) poles on Re s = 1/4, leaving an
// entire function whose smoothing error is a power series in 1/X.
std::vector<cplx> times_zeta2s(const std::vector<cplx>& c) {
    std::vector<cplx> out(c.size(), 0.0);
    for (u64 d = 1; d * d < c.size(); ++d)
        for (u64 m = 1; m * d * d < c.size(); ++m) out[m * d * d] += c[m];
    return out;
}

SmoothedEstimate divide_zeta2s(SmoothedEstimate e, double s) {
    const double z = zeta(2 * s);
    e.value /= z;
    e.error_bound /= z;
    return e;
}
} // namespace

u64 smoothed_truncation(double X) {
    if (!(X > 1)) throw std::invalid_argument("smoothed_truncation: X must exceed 1");
    return static_cast<u64>(std::ceil(X * (39.0 + std::log(X))));
}

SmoothedEstimate smoothed_series(const CoeffFn& c, cplx s, double X) {
    const u64 M = smoothed_truncation(X);
    KahanSumC acc;
    double cmax = 0, absum = 0;
    for (u64 m = 1; m <= M; ++m) {
        cplx cm = c(m);
        if (cm == 0.0) continue;
        cmax = std::max(cmax, std::abs(cm));
        const double lm = std::log(static_cast<double>(m));
        cplx term = cm * std::exp(-s * lm - static_cast<double>(m) / X);
        absum += std::abs(term);
        acc.add(term);
    }
    SmoothedEstimate e;
    e.value = acc.value();
    // sum_{m>M} |c(m)| m^{-Re s} e^{-m/X} with |c| <= cmax, Re s >= 0 on the supported range.
    const double tail = cmax * X * std::exp(-static_cast<double>(M) / X) * (1.0 + static_cast<double>(M) / X);
    e.error_bound = tail + 4 * DBL_EPSILON * absum;
    e.X_ladder = {X};
    e.truncation = static_cast<i64>(M);
    return e;
}

SmoothedEstimate extrapolate(const std::vector<std::pair<double, SmoothedEstimate>>& values) {
    const std::size_t n = values.size();
    if (n < 3) throw std::invalid_argument("extrapolate: need at least 3 ladder points");
    std::vector<double> h(n);
    for (std::size_t i = 0; i < n; ++i) h[i] = 1.0 / values[i].first;
    // Lagrange weights at h = 0 over the points [lo, n).
    auto weights = [&](std::size_t lo) {
        std::vector<double> w(n, 0.0);
        for (std::size_t i = lo; i < n; ++i) {
            double wi = 1;
            for (std::size_t j = lo; j < n; ++j)
                if (j != i) wi *= h[j] / (h[j] - h[i]);
            w[i] = wi;
        }
        return w;
    };
    auto full = weights(0), sub = weights(1);
    KahanSumC a, b;
    double amp = 0;
    i64 trunc = 0;
    SmoothedEstimate out;
    for (std::size_t i = 0; i < n; ++i) {
        a.add(full[i] * values[i].second.value);
        b.add(sub[i] * values[i].second.value);
        amp += std::abs(full[i]) * values[i].second.error_bound;
        trunc = std::max(trunc, values[i].second.truncation);
        out.X_ladder.push_back(values[i].first);
    }
    out.value = a.value();
    out.error_bound = std::abs(a.value() - b.value()) + amp;
    out.truncation = trunc;
    return out;
}

SmoothedEstimate ladder_value(const CoeffFn& c, cplx s, double X0, int points) {
    std::vector<std::pair<double, SmoothedEstimate>> v;
    double X = X0;
    for (int j = 0; j < points; ++j, X *= 2) v.emplace_back(X, smoothed_series(c, s, X));
    return extrapolate(v);
}

cplx gauss_sum(u64 q, const std::vector<cplx>& chi) {
    if (chi.size() != q) throw std::invalid_argument("gauss_sum: table size must equal modulus");
    KahanSumC acc;
    for (u64 r = 0; r < q; ++r)
        if (chi[r] != 0.0) acc.add(chi[r] * unit_root(static_cast<i64>(r), static_cast<i64>(q)));
    return acc.value();
}

CentralValueEngine::CentralValueEngine(const HeckeEigenform& f) : f_(f) {
    if (f.weight() % 2) throw std::invalid_argument("CentralValueEngine: weight must be even");
}

std::shared_ptr<const CentralValueEngine::Tables> CentralValueEngine::tables(u64 q) const {
    {
        std::lock_guard<std::mutex> lk(mu_);
        auto it = cache_.find(q);
        if (it != cache_.end()) return it->second;
    }
    const int a = f_.weight() / 2;
    const double C = static_cast<double>(q) * std::sqrt(static_cast<double>(f_.level())) / (2 * pi);
    const double tmax = *std::max_element(std::begin(split_points), std::end(split_points));
    const double tmin = *std::min_element(std::begin(split_points), std::end(split_points));
    // Both sums decay no slower than Q(a, n / Cp); |A(n)| n^{-1/2} <= 2 bounds each term.
    const double Cp = C * std::max(tmax, 1.0 / tmin);
    auto bound = [&](double x) { return 2 * Cp * a * upper_gamma_q(a + 1, x); };
    const double xs = solve_decreasing(bound, 1e-17, static_cast<double>(a));
    const u64 N = static_cast<u64>(std::ceil(xs * Cp)) + 1;

    std::vector<cplx> A;
    {
        std::lock_guard<std::mutex> lk(mu_);
        if (coeffs_.size() < N + 1) coeffs_ = f_.coefficients_upto(std::max<u64>(N, 2 * coeffs_.size()));
        A.assign(coeffs_.begin(), coeffs_.begin() + static_cast<std::ptrdiff_t>(N + 1));
    }

    auto T = std::make_shared<Tables>();
    T->q = q;
    std::vector<KahanSumC> dk[3], uk[3];
    for (int t = 0; t < 3; ++t) {
        dk[t].assign(q, {});
        uk[t].assign(q, {});
    }
    double absum = 0;
    for (u64 n = 1; n <= N; ++n) {
        const u64 r = n % q;
        if (q > 1 && std::gcd(r, q) != 1) continue;
        const double dn = static_cast<double>(n);
        const cplx w = A[n] / std::sqrt(dn);
        for (int t = 0; t < 3; ++t) {
            const double ts = split_points[t];
            const double g1 = upper_gamma_q(a, dn / (C * ts));
            const double g2 = upper_gamma_q(a, dn * ts / C);
            dk[t][r].add(w * g1);
            uk[t][r].add(std::conj(w) * g2);
            absum += std::abs(w) * (g1 + g2);
        }
    }
    for (int t = 0; t < 3; ++t) {
        T->direct[t].resize(q);
        T->dual[t].resize(q);
        for (u64 r = 0; r < q; ++r) {
            T->direct[t][r] = dk[t][r].value();
            T->dual[t][r] = uk[t][r].value();
        }
    }
    T->tail = bound(xs);
    T->rounding = 8 * DBL_EPSILON * absum;
    std::lock_guard<std::mutex> lk(mu_);
    return cache_.emplace(q, std::move(T)).first->second;
}

SmoothedEstimate CentralValueEngine::primitive_value(u64 q, const std::vector<cplx>& chi) const {
    if (chi.size() != q) throw std::invalid_argument("primitive_value: table size must equal conductor");
    if (std::gcd(q, f_.level()) != 1) throw std::invalid_argument("conductor must be coprime to the level");
    auto T = tables(q);
    cplx S1[3], S2[3];
    for (int t = 0; t < 3; ++t) {
        KahanSumC a, b;
        for (u64 r = 0; r < q; ++r) {
            if (chi[r] == 0.0) continue;
            a.add(chi[r] * T->direct[t][r]);
            b.add(std::conj(chi[r]) * T->dual[t][r]);
        }
        S1[t] = a.value();
        S2[t] = b.value();
    }
    cplx eps;
    const int k = f_.weight();
    const cplx ik = std::pow(cplx(0, 1), k % 4);
    if (f_.level() == 1) {
        cplx tau = gauss_sum(q, chi);
        eps = ik * tau * tau / static_cast<double>(q);
    } else {
        // V(t) = S1(t) + eps S2(t) is independent of t.
        cplx den = S2[0] - S2[1];
        if (std::abs(den) < 1e-12) throw std::runtime_error("root number solve is ill-conditioned");
        eps = -(S1[0] - S1[1]) / den;
        if (std::abs(std::abs(eps) - 1) > 1e-6) throw std::runtime_error("solved root number is not unimodular");
    }
    cplx V[3];
    for (int t = 0; t < 3; ++t) V[t] = S1[t] + eps * S2[t];
    SmoothedEstimate e;
    e.value = V[0];
    double spread = std::max(std::abs(V[1] - V[0]), std::abs(V[2] - V[0]));
    e.error_bound = 2 * T->tail + spread + T->rounding;
    const double C = static_cast<double>(q) * std::sqrt(static_cast<double>(f_.level())) / (2 * pi);
    e.X_ladder = {C};
    e.truncation = static_cast<i64>(T->direct[0].size());
    return e;
}

SmoothedEstimate CentralValueEngine::value(const Character& chi) const {
    const u64 Q = chi.modulus();
    if (std::gcd(Q, f_.level()) != 1) throw std::invalid_argument("(Q, N0) must be 1");
    PrimitiveData pd = primitive_of(chi);
    SmoothedEstimate e = primitive_value(pd.conductor, pd.values);
    // Restore the Euler factors at p | Q, p not dividing the conductor.
    cplx mult = 1;
    for (u64 p : chi.group().factorization().primes()) {
        if (pd.conductor % p == 0) continue;
        cplx cp = pd.values[p % pd.conductor];
        if (pd.conductor == 1) cp = 1;
        const double dp = static_cast<double>(p);
        mult *= 1.0 - f_.coefficient(p) * cp / std::sqrt(dp) + cp * cp / dp;
    }
    e.value *= mult;
    e.error_bound *= std::abs(mult);
    return e;
}

SmoothedEstimate twisted_central_value(const HeckeEigenform& f, const Character& chi) {
    return CentralValueEngine(f).value(chi);
}

SmoothedEstimate twisted_central_value_ladder(const HeckeEigenform& f, const Character& chi, double X0) {
    const u64 Q = chi.modulus();
    if (X0 <= 0) X0 = std::max(64.0, std::pow(static_cast<double>(Q), 1.5));
    const u64 M = smoothed_truncation(X0 * 8);
    auto A = f.coefficients_upto(M);
    CoeffFn c = [&](u64 m) { return A[m] * chi(static_cast<i64>(m)); };
    return ladder_value(c, 0.5, X0);
}

SmoothedEstimate rankin_L1(const HeckeEigenform& f, const HeckeEigenform& g, u64 Q, double X0) {
    if (f.same_form(g)) throw std::invalid_argument("rankin_L1 requires f != g");
    const u64 M = smoothed_truncation(X0 * fixed_span);
    auto A = f.coefficients_upto(M);
    auto B = g.coefficients_upto(M);
    std::vector<cplx> ab(M + 1, 0.0);
    for (u64 m = 1; m <= M; ++m) ab[m] = A[m] * std::conj(B[m]);
    const auto c = times_zeta2s(ab);
    SmoothedEstimate e = divide_zeta2s(ladder_value([&](u64 m) { return c[m]; }, 1.0, X0, fixed_points), 1.0);
    if (Q > 1) {
        const cplx mult = euler_removed(EulerKind::rankin, Q, 1.0, &f, &g);
        e.value *= mult;
        e.error_bound *= std::abs(mult);
    }
    return e;
}

std::vector<cplx> square_coefficients(const HeckeEigenform& f, u64 nmax) {
    std::vector<cplx> out(nmax + 1, 0.0);
    if (nmax == 0) return out;
    out[1] = 1;
    std::vector<u32> spf(nmax + 1, 0);
    for (u64 i = 2; i <= nmax; ++i) {
        if (spf[i]) continue;
        for (u64 j = i; j <= nmax; j += i)
            if (!spf[j]) spf[j] = static_cast<u32>(i);
    }
    // A(p^{2e}) from A(p) by the Hecke recursion (p not dividing N0) or A(p)^{2e}.
    auto prime_power_sq = [&](u64 p, int e) {
        cplx Ap = f.coefficient(p);
        if (f.level() % p == 0) return std::pow(Ap, 2 * e);
        cplx prev = 1, cur = Ap;
        for (int i = 1; i < 2 * e; ++i) {
            cplx next = Ap * cur - prev;
            prev = cur;
            cur = next;
        }
        return cur;
    };
    for (u64 n = 2; n <= nmax; ++n) {
        u64 p = spf[n], rest = n;
        int e = 0;
        while (rest % p == 0) {
            rest /= p;
            ++e;
        }
        out[n] = prime_power_sq(p, e) * out[rest];
    }
    return out;
}

SmoothedEstimate symsq_over_zeta(const HeckeEigenform& f, double s, double X0) {
    if (f.level() != 1) throw std::invalid_argument("symsq ladders require level 1");
    const auto c = times_zeta2s(square_coefficients(f, smoothed_truncation(X0 * fixed_span)));
    return divide_zeta2s(ladder_value([&](u64 n) { return c[n]; }, s, X0, fixed_points), s);
}

SmoothedEstimate symsq_L1(const HeckeEigenform& f, double X0) {
    SmoothedEstimate e = symsq_over_zeta(f, 1.0, X0);
    const double z2 = pi * pi / 6;
    e.value *= z2;
    e.error_bound *= z2;
    return e;
}

cplx euler_removed(EulerKind kind, u64 Q, cplx s, const HeckeEigenform* f, const HeckeEigenform* g) {
    if (Q == 1) return 1.0;
    auto fac = factor(Q);
    auto checked_satake = [](cplx Ap, u64 p) {
        if (std::abs(Ap) > 2 + 1e-6) throw std::invalid_argument("invalid Satake parameter: |A(p)| > 2");
        return satake(Ap, p).alpha;
    };
    if (kind != EulerKind::zeta) {
        if (!f || (kind == EulerKind::rankin && !g)) throw std::invalid_argument("euler_removed: missing form");
        if (std::gcd(Q, f->level()) != 1 || (g && std::gcd(Q, g->level()) != 1))
            throw std::invalid_argument("euler_removed: (Q, N0) must be 1");
    }
    cplx mult = 1;
    for (u64 p : fac.primes()) {
        const cplx X = std::exp(-s * std::log(static_cast<double>(p)));
        switch (kind) {
        case EulerKind::zeta:
            mult *= 1.0 - X;
            break;
        case EulerKind::symsq: {
            cplx al = checked_satake(f->coefficient(p), p);
            mult *= (1.0 - al * al * X) * (1.0 - X) * (1.0 - X / (al * al));
            break;
        }
        case EulerKind::rankin: {
            cplx al = checked_satake(f->coefficient(p), p);
            cplx be = checked_satake(std::conj(g->coefficient(p)), p);
            cplx num = 1;
            for (cplx x : {al, 1.0 / al})
                for (cplx y : {be, 1.0 / be}) num *= 1.0 - x * y * X;
            mult *= num / (1.0 - X * X);
            break;
        }
        }
    }
    return mult;
}

DerivativeEstimate stencil_derivative(const std::function<SmoothedEstimate(double)>& F, double s0, double h) {
    auto stencil = [&](double hh) {
        SmoothedEstimate m2 = F(s0 - 2 * hh), m1 = F(s0 - hh), p1 = F(s0 + hh), p2 = F(s0 + 2 * hh);
        SmoothedEstimate d;
        d.value = (m2.value - 8.0 * m1.value + 8.0 * p1.value - p2.value) / (12 * hh);
        d.error_bound =
            (m2.error_bound + 8 * m1.error_bound + 8 * p1.error_bound + p2.error_bound) / (12 * hh);
        d.X_ladder = p1.X_ladder;
        d.truncation = std::max({m2.truncation, m1.truncation, p1.truncation, p2.truncation});
        return d;
    };
    DerivativeEstimate out;
    out.coarse = stencil(h);
    out.fine = stencil(h / 2);
    const double gap = std::abs(out.fine.value - out.coarse.value);
    out.combined.value = (16.0 * out.fine.value - out.coarse.value) / 15.0;
    // Richardson removes O(h^4); the fine/coarse gap bounds what is left.
    out.combined.error_bound = (16 * out.fine.error_bound + out.coarse.error_bound) / 15 + gap / 15;
    // Each stencil's own O(h^4) error, estimated from the gap: 16/15 of it at h, 1/15 at h/2.
    out.coarse.error_bound += 16 * gap / 15;
    out.fine.error_bound += gap / 15;
    out.combined.X_ladder = out.fine.X_ladder;
    out.combined.truncation = std::max(out.fine.truncation, out.coarse.truncation);
    return out;
}

SymsqEvaluator::SymsqEvaluator(const HeckeEigenform& f, double X0) : f_(f), X0_(X0) {
    if (f.level() != 1) throw std::invalid_argument("symsq ladders require level 1");
    sq_ = times_zeta2s(square_coefficients(f, smoothed_truncation(X0 * fixed_span)));
}

SmoothedEstimate SymsqEvaluator::D(double s) const {
    {
        std::lock_guard<std::mutex> lk(mu_);
        auto it = memo_.find(s);
        if (it != memo_.end()) return it->second;
    }
    SmoothedEstimate e = divide_zeta2s(ladder_value([&](u64 n) { return sq_[n]; }, s, X0_, fixed_points), s);
    std::lock_guard<std::mutex> lk(mu_);
    memo_.emplace(s, e);
    return e;
}

SmoothedEstimate SymsqEvaluator::cf_function(u64 Q, double s) const {
    SmoothedEstimate e = D(s);
    cplx mult = euler_removed(EulerKind::symsq, Q, s, &f_) * euler_removed(EulerKind::zeta, Q, s);
    for (u64 p : factor(Q).primes()) mult /= 1.0 - std::pow(static_cast<double>(p), -2 * s);
    e.value *= mult;
    e.error_bound *= std::abs(mult);
    return e;
}

DerivativeEstimate cf_derivative_detail(const SymsqEvaluator& ev, u64 Q, double h) {
    return stencil_derivative([&](double s) { return ev.cf_function(Q, s); }, 1.0, h);
}

SmoothedEstimate cf_derivative(const SymsqEvaluator& ev, u64 Q) { return cf_derivative_detail(ev, Q).combined; }

SmoothedEstimate cf_derivative(const HeckeEigenform& f, u64 Q, double X0) {
    SymsqEvaluator ev(f, X0);
    return cf_derivative(ev, Q);
}

} // namespace lmoment
