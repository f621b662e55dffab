#include "lmoment/modforms.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <mutex>
#include <sstream>
#include <stdexcept>

#include <boost/multiprecision/cpp_bin_float.hpp>

#include "lmoment/numeric.hpp"

namespace lmoment {

using Big50 = boost::multiprecision::cpp_bin_float_50;

QExpansion eisenstein_qexp(int weight, std::size_t prec) {
    long factor_k;
    if (weight == 4)
        factor_k = 240;
    else if (weight == 6)
        factor_k = -504;
    else
        throw std::invalid_argument("eisenstein_qexp: unsupported weight " + std::to_string(weight));
    std::vector<unsigned __int128> sigma(prec + 1, 0);
    for (std::size_t d = 1; d <= prec; ++d) {
        unsigned __int128 dk = 1;
        for (int i = 0; i < weight - 1; ++i) dk *= d;
        for (std::size_t m = d; m <= prec; m += d) sigma[m] += dk;
    }
    QExpansion e(prec);
    e.c[0] = 1;
    for (std::size_t n = 1; n <= prec; ++n) {
        BigInt s = static_cast<u64>(sigma[n] >> 64);
        s <<= 64;
        s += static_cast<u64>(sigma[n]);
        e.c[n] = factor_k * s;
    }
    return e;
}

QExpansion delta_qexp(std::size_t prec) {
    QExpansion e4 = eisenstein_qexp(4, prec), e6 = eisenstein_qexp(6, prec);
    QExpansion diff = e4 * (e4 * e4) - e6 * e6;
    return divide_exact(diff, BigInt(1728));
}

int cusp_dimension(int k) {
    if (k < 0 || k % 2) return 0;
    int d = k / 12;
    if (k % 12 == 2) d -= 1;
    return std::max(d, 0);
}

namespace {

QExpansion power(const QExpansion& f, int e, std::size_t prec) {
    QExpansion r(prec);
    r.c[0] = 1;
    for (int i = 0; i < e; ++i) r = r * f;
    return r;
}

} // namespace

std::vector<QExpansion> miller_basis(int k, std::size_t prec) {
    const int d = cusp_dimension(k);
    std::vector<QExpansion> g;
    if (d == 0) return g;
    QExpansion delta = delta_qexp(prec);
    QExpansion e4 = eisenstein_qexp(4, prec), e6 = eisenstein_qexp(6, prec);
    QExpansion dj = delta;
    for (int j = 1; j <= d; ++j) {
        int rest = k - 12 * j;
        int b = (rest % 4 == 2) ? 1 : 0;
        int a = (rest - 6 * b) / 4;
        QExpansion f = dj;
        if (a > 0) f = f * power(e4, a, prec);
        if (b > 0) f = f * e6;
        g.push_back(std::move(f));
        if (j < d) dj = dj * delta;
    }
    for (int i = d - 1; i >= 1; --i) {
        for (int j = i + 1; j <= d; ++j) {
            BigInt c = g[i - 1].c[j];
            if (c != 0) g[i - 1] = g[i - 1] - c * g[j - 1];
        }
    }
    return g;
}

namespace {

std::vector<std::vector<BigInt>> t2_matrix_from_basis(const std::vector<QExpansion>& basis, int k) {
    const std::size_t d = basis.size();
    if (basis.empty() || basis[0].prec() < 2 * d) throw std::invalid_argument("precision too small to diagonalize");
    BigInt pk = BigInt(1) << (k - 1);
    std::vector<std::vector<BigInt>> M(d, std::vector<BigInt>(d));
    for (std::size_t j = 0; j < d; ++j)
        for (std::size_t i = 1; i <= d; ++i) {
            BigInt v = basis[j].c[2 * i];
            if (i % 2 == 0) v += pk * basis[j].c[i / 2];
            M[i - 1][j] = v;
        }
    return M;
}

} // namespace

std::vector<std::vector<BigInt>> hecke_t2_matrix(int k, std::size_t prec) {
    return t2_matrix_from_basis(miller_basis(k, prec), k);
}

HeckeEigenform::HeckeEigenform(int k, u64 N0, std::string label, Provider provider, std::vector<cplx> table,
                               std::vector<BigInt> exact)
    : k_(k), N0_(N0), label_(std::move(label)), provider_(provider), table_(std::move(table)),
      exact_(std::move(exact)) {
    if (table_.size() < 2) throw std::invalid_argument("eigenform needs at least A(1)");
    if (std::abs(table_[1] - 1.0) > 1e-9) throw std::invalid_argument("eigenform must have A(1) = 1");
}

cplx HeckeEigenform::coefficient(u64 m) const {
    if (m == 0) throw std::invalid_argument("coefficient: m must be >= 1");
    if (m < table_.size()) return table_[m];
    auto f = factor(m);
    cplx r = 1;
    for (auto [p, e] : f.factors) {
        if (p >= table_.size())
            throw range_exhausted("coefficient: prime " + std::to_string(p) + " beyond provider bound " +
                                  std::to_string(bound()));
        u64 pe = 1;
        for (int i = 0; i < e; ++i) pe *= p;
        if (pe < table_.size()) {
            r *= table_[pe];
            continue;
        }
        cplx Ap = table_[p];
        if (N0_ % p == 0) {
            r *= std::pow(Ap, e);
            continue;
        }
        cplx prev = 1, cur = Ap;
        for (int i = 1; i < e; ++i) {
            cplx next = Ap * cur - prev;
            prev = cur;
            cur = next;
        }
        r *= cur;
    }
    return r;
}

const BigInt& HeckeEigenform::exact_coefficient(u64 m) const {
    if (m >= exact_.size()) throw range_exhausted("exact_coefficient: m beyond exact data");
    return exact_[m];
}

std::vector<cplx> HeckeEigenform::coefficients_upto(u64 n) const {
    std::vector<cplx> out(n + 1, 0.0);
    u64 direct = std::min<u64>(n, bound());
    for (u64 m = 1; m <= direct; ++m) out[m] = table_[m];
    if (n <= bound()) return out;
    // Smallest-prime-factor sieve for the extension range.
    std::vector<u32> spf(n + 1, 0);
    for (u64 i = 2; i <= n; ++i) {
        if (spf[i]) continue;
        for (u64 j = i; j <= n; j += i)
            if (!spf[j]) spf[j] = static_cast<u32>(i);
    }
    for (u64 m = bound() + 1; m <= n; ++m) {
        u64 p = spf[m];
        if (p > bound())
            throw range_exhausted("coefficients_upto: prime " + std::to_string(p) + " beyond provider bound");
        u64 pe = 1, rest = m;
        int e = 0;
        while (rest % p == 0) {
            rest /= p;
            pe *= p;
            ++e;
        }
        if (rest > 1) {
            out[m] = out[pe] * out[rest];
            continue;
        }
        if (N0_ % p == 0) {
            out[m] = std::pow(table_[p], e);
            continue;
        }
        out[m] = table_[p] * out[m / p] - out[m / p / p];
    }
    return out;
}

std::vector<HeckeEigenform> level1_eigenforms(int k, std::size_t prec) {
    if (k % 2 || k < 12 || k > 26) throw std::invalid_argument("level1_eigenforms: k must be even in [12, 26]");
    const int d = cusp_dimension(k);
    if (d == 0) return {};
    if (prec < static_cast<std::size_t>(2 * d)) throw std::invalid_argument("precision too small to diagonalize");
    auto basis = miller_basis(k, prec);
    auto M = t2_matrix_from_basis(basis, k);

    std::vector<Big50> lambdas;
    std::vector<std::vector<Big50>> vecs;
    if (d == 1) {
        lambdas.push_back(Big50(M[0][0]));
        vecs.push_back({Big50(1)});
    } else if (d == 2) {
        Big50 m00(M[0][0]), m01(M[0][1]), m10(M[1][0]), m11(M[1][1]);
        Big50 tr = m00 + m11, det = m00 * m11 - m01 * m10;
        Big50 disc = tr * tr - 4 * det;
        if (disc <= 0) throw std::runtime_error("T2 eigenvalues not real and distinct");
        Big50 sq = sqrt(disc);
        for (Big50 lam : {(tr + sq) / 2, (tr - sq) / 2}) {
            Big50 res = lam * lam - tr * lam + det;
            if (abs(res) / (lam * lam) > Big50(1e-20)) throw std::runtime_error("characteristic polynomial residual too large");
            Big50 v2 = (m01 != 0) ? (lam - m00) / m01 : m10 / (lam - m11);
            lambdas.push_back(lam);
            vecs.push_back({Big50(1), v2});
        }
    } else {
        throw std::invalid_argument("level1_eigenforms: dimension > 2 unsupported");
    }

    std::vector<HeckeEigenform> forms;
    const char* suffix = "ab";
    for (std::size_t e = 0; e < lambdas.size(); ++e) {
        std::vector<cplx> table(prec + 1, 0.0);
        for (std::size_t n = 1; n <= prec; ++n) {
            Big50 a = 0;
            for (int j = 0; j < d; ++j) a += vecs[e][j] * Big50(basis[j].c[n]);
            Big50 norm = pow(sqrt(Big50(n)), k - 1);
            table[n] = static_cast<double>(a / norm);
        }
        std::vector<BigInt> exact;
        if (d == 1) exact = basis[0].c;
        std::string label = "k" + std::to_string(k) + (d > 1 ? std::string(1, suffix[e]) : std::string());
        forms.emplace_back(k, 1, label, Provider::computed, std::move(table), std::move(exact));
    }
    return forms;
}

const std::vector<HeckeEigenform>& cached_level1_eigenforms(int k, std::size_t prec) {
    static std::mutex mu;
    static std::map<int, std::vector<HeckeEigenform>> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(k);
    if (it == cache.end() || it->second.empty() || it->second.front().bound() < prec) {
        cache[k] = level1_eigenforms(k, prec);
        it = cache.find(k);
    }
    return it->second;
}

namespace {

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        auto b = tok.find_first_not_of(" \t\r");
        auto e = tok.find_last_not_of(" \t\r");
        out.push_back(b == std::string::npos ? std::string() : tok.substr(b, e - b + 1));
    }
    return out;
}

} // namespace

HeckeEigenform ingest_coefficients(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("ingest: cannot open " + path);
    std::string line;
    auto next_line = [&](std::string& l) {
        while (std::getline(in, l)) {
            if (l.empty() || l[0] == '#' || l.find_first_not_of(" \t\r") == std::string::npos) continue;
            return true;
        }
        return false;
    };
    if (!next_line(line)) throw std::runtime_error("ingest: missing header");
    auto h = split_csv(line);
    if (h.size() != 4) throw std::runtime_error("ingest: header must be k,N0,label,maxm");
    int k;
    u64 N0, maxm;
    try {
        k = std::stoi(h[0]);
        N0 = std::stoull(h[1]);
        maxm = std::stoull(h[3]);
    } catch (const std::exception&) {
        throw std::runtime_error("ingest: malformed header");
    }
    if (k < 2 || k % 2) throw std::runtime_error("ingest: weight must be even and >= 2");
    if (N0 < 1 || !is_squarefree(N0)) throw std::runtime_error("ingest: level must be square-free");
    if (maxm < 1) throw std::runtime_error("ingest: maxm must be >= 1");
    std::vector<cplx> table(maxm + 1, 0.0);
    std::vector<bool> seen(maxm + 1, false);
    std::size_t lineno = 1;
    while (next_line(line)) {
        ++lineno;
        auto r = split_csv(line);
        if (r.size() != 3) throw std::runtime_error("ingest: parse error in row " + std::to_string(lineno));
        u64 m;
        double re, im;
        try {
            m = std::stoull(r[0]);
            re = std::stod(r[1]);
            im = std::stod(r[2]);
        } catch (const std::exception&) {
            throw std::runtime_error("ingest: parse error in row " + std::to_string(lineno));
        }
        if (m < 1 || m > maxm) throw std::runtime_error("ingest: index out of range in row " + std::to_string(lineno));
        table[m] = cplx(re, im);
        seen[m] = true;
    }
    for (u64 m = 1; m <= maxm; ++m)
        if (!seen[m]) throw std::runtime_error("ingest: missing coefficient m=" + std::to_string(m));

    auto violation = [](const std::string& what, u64 m) {
        return std::runtime_error("ingest: " + what + " violation at m=" + std::to_string(m));
    };
    auto close = [](cplx a, cplx b) { return std::abs(a - b) <= 1e-8 * (1 + std::abs(b)); };
    if (!close(table[1], 1.0)) throw violation("normalization A(1)=1", 1);
    for (u64 m = 2; m <= maxm; ++m) {
        auto f = factor(m);
        if (f.factors.size() > 1) {
            u64 pe = 1;
            for (int i = 0; i < f.factors[0].second; ++i) pe *= f.factors[0].first;
            if (!close(table[m], table[pe] * table[m / pe])) throw violation("multiplicativity", m);
            continue;
        }
        auto [p, e] = f.factors[0];
        if (N0 % p == 0) {
            if (e == 1) {
                if (std::abs(std::abs(table[p]) - 1.0 / std::sqrt(static_cast<double>(p))) > 1e-8)
                    throw violation("|A(p)| = p^{-1/2}", m);
            } else if (!close(table[m], table[m / p] * table[p])) {
                throw violation("Hecke recursion", m);
            }
        } else if (e == 1) {
            if (std::abs(table[p]) > 2 + 1e-6) throw violation("|A(p)| <= 2", m);
        } else {
            cplx expect = table[p] * table[m / p] - table[m / p / p];
            if (!close(table[m], expect)) throw violation("Hecke recursion", m);
        }
    }
    return HeckeEigenform(k, N0, h[2], Provider::file, std::move(table));
}

void write_coefficients(const HeckeEigenform& f, u64 maxm, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << f.weight() << ',' << f.level() << ',' << f.label() << ',' << maxm << '\n';
    out.precision(17);
    for (u64 m = 1; m <= maxm; ++m) {
        cplx a = f.coefficient(m);
        out << m << ',' << a.real() << ',' << a.imag() << '\n';
    }
}

SatakePair satake(cplx A_p, u64 p) {
    cplx disc = std::sqrt(A_p * A_p - 4.0);
    cplx r1 = (A_p + disc) / 2.0, r2 = (A_p - disc) / 2.0;
    cplx alpha;
    if (std::abs(r1.imag() - r2.imag()) > 1e-15)
        alpha = r1.imag() > r2.imag() ? r1 : r2;
    else
        alpha = std::abs(r1) >= std::abs(r2) ? r1 : r2;
    return {alpha, p};
}

} // namespace lmoment
