#include "lmoment/qexp.hpp"

#include <algorithm>
#include <mutex>
#include <stdexcept>

namespace lmoment {

namespace {

struct NttPrime {
    u64 p;
    u64 g; // primitive root
};

constexpr int kMaxLog = 21; // transforms up to length 2^21

// Primes p = c*2^kMaxLog + 1 < 2^31, descending, with primitive roots.
const std::vector<NttPrime>& ntt_primes() {
    static std::vector<NttPrime> ps;
    static std::once_flag once;
    std::call_once(once, [] {
        for (u64 c = (1ULL << (31 - kMaxLog)) - 1; c >= 1; --c) {
            u64 p = (c << kMaxLog) + 1;
            if (!is_prime(p)) continue;
            auto f = factor(p - 1);
            for (u64 g = 2;; ++g) {
                bool ok = true;
                for (auto [q, e] : f.factors)
                    if (powmod(g, (p - 1) / q, p) == 1) {
                        ok = false;
                        break;
                    }
                if (ok) {
                    ps.push_back({p, g});
                    break;
                }
            }
        }
    });
    return ps;
}

void ntt(std::vector<u64>& a, const NttPrime& P, bool invert) {
    const u64 p = P.p;
    const std::size_t n = a.size();
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }
    for (std::size_t len = 2; len <= n; len <<= 1) {
        u64 w = powmod(P.g, (p - 1) / len, p);
        if (invert) w = powmod(w, p - 2, p);
        std::vector<u64> ws(len / 2);
        ws[0] = 1;
        for (std::size_t i = 1; i < len / 2; ++i) ws[i] = ws[i - 1] * w % p;
        for (std::size_t i = 0; i < n; i += len) {
            for (std::size_t j = 0; j < len / 2; ++j) {
                u64 u = a[i + j];
                u64 v = a[i + j + len / 2] * ws[j] % p;
                a[i + j] = u + v < p ? u + v : u + v - p;
                a[i + j + len / 2] = u >= v ? u - v : u + p - v;
            }
        }
    }
    if (invert) {
        u64 inv = powmod(n % p, p - 2, p);
        for (auto& x : a) x = x * inv % p;
    }
}

// |x| mod p via the little-endian limb array of the cpp_int backend.
u64 abs_mod(const BigInt& x, u64 p) {
    const auto& be = x.backend();
    auto limbs = be.limbs();
    unsigned n = be.size();
    unsigned __int128 r = 0;
    for (unsigned i = n; i-- > 0;) {
        r = ((r << 64) | limbs[i]) % p;
    }
    return static_cast<u64>(r);
}

u64 signed_mod(const BigInt& x, u64 p) {
    u64 r = abs_mod(x, p);
    if (x.sign() < 0 && r != 0) r = p - r;
    return r;
}

std::size_t max_bits(const std::vector<BigInt>& v, std::size_t upto) {
    std::size_t b = 0;
    for (std::size_t i = 0; i < upto && i < v.size(); ++i)
        if (v[i] != 0) b = std::max<std::size_t>(b, boost::multiprecision::msb(abs(v[i])) + 1);
    return b;
}

} // namespace

QExpansion operator+(const QExpansion& a, const QExpansion& b) {
    std::size_t P = std::min(a.prec(), b.prec());
    QExpansion r(P);
    for (std::size_t i = 0; i <= P; ++i) r.c[i] = a.c[i] + b.c[i];
    return r;
}

QExpansion operator-(const QExpansion& a, const QExpansion& b) {
    std::size_t P = std::min(a.prec(), b.prec());
    QExpansion r(P);
    for (std::size_t i = 0; i <= P; ++i) r.c[i] = a.c[i] - b.c[i];
    return r;
}

QExpansion operator*(const BigInt& s, const QExpansion& a) {
    QExpansion r(a.prec());
    for (std::size_t i = 0; i < a.c.size(); ++i) r.c[i] = s * a.c[i];
    return r;
}

QExpansion divide_exact(const QExpansion& a, const BigInt& d) {
    QExpansion r(a.prec());
    for (std::size_t i = 0; i < a.c.size(); ++i) {
        BigInt q, rem;
        boost::multiprecision::divide_qr(a.c[i], d, q, rem);
        if (rem != 0) throw std::runtime_error("divide_exact: coefficient not divisible");
        r.c[i] = q;
    }
    return r;
}

QExpansion multiply_naive(const QExpansion& a, const QExpansion& b) {
    std::size_t P = std::min(a.prec(), b.prec());
    QExpansion r(P);
    for (std::size_t i = 0; i <= P; ++i) {
        if (a.c[i] == 0) continue;
        for (std::size_t j = 0; i + j <= P; ++j) r.c[i + j] += a.c[i] * b.c[j];
    }
    return r;
}

QExpansion operator*(const QExpansion& a, const QExpansion& b) {
    const std::size_t P = std::min(a.prec(), b.prec());
    if (P < 64) return multiply_naive(a, b);
    std::size_t len = 1;
    while (len <= 2 * P) len <<= 1;
    if (len > (std::size_t(1) << kMaxLog)) throw std::invalid_argument("q-expansion product too long");

    // |coefficient| <= (P+1) max|a| max|b|; need prod(primes) > 2 * that bound.
    std::size_t need_bits = max_bits(a.c, P + 1) + max_bits(b.c, P + 1) + 64 - __builtin_clzll(P + 1) + 2;
    const auto& primes = ntt_primes();
    std::vector<NttPrime> use;
    double bits = 0;
    for (const auto& pr : primes) {
        if (bits > static_cast<double>(need_bits)) break;
        use.push_back(pr);
        bits += std::log2(static_cast<double>(pr.p));
    }
    if (bits <= static_cast<double>(need_bits)) throw std::runtime_error("not enough NTT primes");

    const std::size_t K = use.size();
    std::vector<std::vector<u64>> res(K);
    for (std::size_t t = 0; t < K; ++t) {
        const u64 p = use[t].p;
        std::vector<u64> fa(len, 0), fb(len, 0);
        for (std::size_t i = 0; i <= P; ++i) {
            fa[i] = signed_mod(a.c[i], p);
            fb[i] = signed_mod(b.c[i], p);
        }
        ntt(fa, use[t], false);
        ntt(fb, use[t], false);
        for (std::size_t i = 0; i < len; ++i) fa[i] = fa[i] * fb[i] % p;
        ntt(fa, use[t], true);
        fa.resize(P + 1);
        res[t] = std::move(fa);
    }

    // Garner: x = d0 + p0 (d1 + p1 (d2 + ...)), then shift to the symmetric range.
    std::vector<std::vector<u64>> inv(K, std::vector<u64>(K, 0));
    for (std::size_t i = 0; i < K; ++i)
        for (std::size_t j = i + 1; j < K; ++j) inv[i][j] = powmod(use[i].p % use[j].p, use[j].p - 2, use[j].p);
    BigInt M = 1;
    for (const auto& pr : use) M *= pr.p;
    const BigInt half = M / 2;

    QExpansion r(P);
    std::vector<u64> d(K);
    for (std::size_t i = 0; i <= P; ++i) {
        for (std::size_t j = 0; j < K; ++j) {
            u64 x = res[j][i];
            const u64 pj = use[j].p;
            for (std::size_t l = 0; l < j; ++l) {
                x = (x + pj - d[l] % pj) % pj;
                x = x * inv[l][j] % pj;
            }
            d[j] = x;
        }
        BigInt v = d[K - 1];
        for (std::size_t j = K - 1; j-- > 0;) {
            v *= use[j].p;
            v += d[j];
        }
        if (v > half) v -= M;
        r.c[i] = std::move(v);
    }
    return r;
}

} // namespace lmoment
