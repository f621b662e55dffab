#include "lmoment/characters.hpp"

#include <numeric>
#include <stdexcept>

#include "lmoment/numeric.hpp"

namespace lmoment {

namespace {

u64 crt_lift(u64 residue, u64 pe, u64 Q) {
    // x = residue mod pe, x = 1 mod Q/pe.
    u64 other = Q / pe;
    if (other == 1) return residue % pe;
    for (u64 x = 1; x < Q; x += other)
        if (x % pe == residue % pe) return x;
    throw std::logic_error("crt_lift failed");
}

u64 primitive_root_prime_power(u64 p, int e) {
    u64 pe = 1;
    for (int i = 0; i < e; ++i) pe *= p;
    auto f = factor(p - 1);
    for (u64 g = 2;; ++g) {
        bool ok = true;
        for (auto [q, k] : f.factors)
            if (powmod(g, (p - 1) / q, p) == 1) {
                ok = false;
                break;
            }
        if (!ok) continue;
        if (e >= 2 && powmod(g, p - 1, p * p) == 1) g += p;
        return g % pe;
    }
}

} // namespace

CharacterGroup::CharacterGroup(u64 Q) : Q_(Q), fac_(factor(Q)) {
    if (Q < 1) throw std::invalid_argument("CharacterGroup: Q must be >= 1");
    // Per-component discrete-log tables mod p^e; slots appended in factor order.
    struct Component {
        u64 p, pe;
        std::vector<std::vector<u64>> dl; // dl[r] = exponents for unit r mod pe
        std::size_t nslots;
    };
    std::vector<Component> comps;
    for (auto [p, e] : fac_.factors) {
        u64 pe = 1;
        for (int i = 0; i < e; ++i) pe *= p;
        Component c{p, pe, std::vector<std::vector<u64>>(pe), 0};
        if (p != 2) {
            u64 g = primitive_root_prime_power(p, e);
            u64 n = pe / p * (p - 1);
            u64 x = 1;
            for (u64 i = 0; i < n; ++i) {
                c.dl[x] = {i};
                x = x * g % pe;
            }
            gen_orders_.push_back(n);
            gens_.push_back(crt_lift(g, pe, Q));
            gen_component_.emplace_back(p, pe);
            c.nslots = 1;
        } else if (e == 1) {
            c.dl[1] = {};
            c.nslots = 0;
        } else if (e == 2) {
            c.dl[1] = {0};
            c.dl[3] = {1};
            gen_orders_.push_back(2);
            gens_.push_back(crt_lift(3, pe, Q));
            gen_component_.emplace_back(2, pe);
            c.nslots = 1;
        } else {
            u64 n5 = pe / 4;
            for (u64 a = 0; a < 2; ++a) {
                u64 x = a ? pe - 1 : 1;
                for (u64 b = 0; b < n5; ++b) {
                    c.dl[x] = {a, b};
                    x = x * 5 % pe;
                }
            }
            gen_orders_.push_back(2);
            gens_.push_back(crt_lift(pe - 1, pe, Q));
            gen_component_.emplace_back(2, pe);
            gen_orders_.push_back(n5);
            gens_.push_back(crt_lift(5, pe, Q));
            gen_component_.emplace_back(2, pe);
            c.nslots = 2;
        }
        comps.push_back(std::move(c));
    }
    for (u64 n : gen_orders_) {
        order_ *= n;
        L_ = std::lcm(L_, n);
    }
    dlog_.assign(Q, {});
    unit_.assign(Q, false);
    for (u64 m = 0; m < Q; ++m) {
        if (std::gcd(m, Q) != 1) continue;
        unit_[m] = true;
        std::vector<u64> v;
        for (const auto& c : comps) {
            const auto& d = c.dl[m % c.pe];
            v.insert(v.end(), d.begin(), d.end());
        }
        dlog_[m] = std::move(v);
    }
    roots_.resize(L_);
    for (u64 j = 0; j < L_; ++j) roots_[j] = unit_root(static_cast<i64>(j), static_cast<i64>(L_));
}

std::vector<u64> CharacterGroup::exponents_of(std::size_t i) const {
    if (i >= order_) throw std::out_of_range("character index out of range");
    std::vector<u64> e(gen_orders_.size());
    for (std::size_t j = gen_orders_.size(); j-- > 0;) {
        e[j] = i % gen_orders_[j];
        i /= gen_orders_[j];
    }
    return e;
}

std::size_t CharacterGroup::index_of(const std::vector<u64>& exps) const {
    if (exps.size() != gen_orders_.size()) throw std::invalid_argument("exponent tuple size mismatch");
    std::size_t i = 0;
    for (std::size_t j = 0; j < exps.size(); ++j) i = i * gen_orders_[j] + exps[j] % gen_orders_[j];
    return i;
}

Character CharacterGroup::character(std::size_t i) const {
    Character c;
    c.group_ = this;
    c.index_ = i;
    c.exps_ = exponents_of(i);
    c.idx_.assign(Q_, -1);
    c.table_.assign(Q_, 0.0);
    for (u64 m = 0; m < Q_; ++m) {
        if (!unit_[m]) continue;
        u64 s = 0;
        for (std::size_t j = 0; j < c.exps_.size(); ++j)
            s = (s + (c.exps_[j] * dlog_[m][j] % gen_orders_[j]) * (L_ / gen_orders_[j])) % L_;
        c.idx_[m] = static_cast<i64>(s);
        c.table_[m] = roots_[s];
    }
    return c;
}

std::vector<Character> CharacterGroup::characters() const {
    std::vector<Character> out;
    out.reserve(order_);
    for (std::size_t i = 0; i < order_; ++i) out.push_back(character(i));
    return out;
}

u64 Character::modulus() const { return group_->modulus(); }

cplx Character::operator()(i64 m) const {
    i64 Q = static_cast<i64>(group_->modulus());
    i64 r = m % Q;
    if (r < 0) r += Q;
    return table_[static_cast<std::size_t>(r)];
}

i64 Character::root_index(i64 m) const {
    i64 Q = static_cast<i64>(group_->modulus());
    i64 r = m % Q;
    if (r < 0) r += Q;
    return idx_[static_cast<std::size_t>(r)];
}

u64 Character::order_bound() const { return group_->exponent(); }

bool Character::is_principal() const {
    for (u64 e : exps_)
        if (e) return false;
    return true;
}

CharacterGroup build_group(u64 Q) { return CharacterGroup(Q); }

cplx evaluate(const Character& chi, i64 m) {
    if (m < 0) throw std::invalid_argument("evaluate: m must be >= 0");
    return chi(m);
}

u64 conductor(const Character& chi) {
    const CharacterGroup& G = chi.group();
    const auto& exps = chi.exponents();
    u64 cond = 1;
    std::size_t j = 0;
    while (j < exps.size()) {
        auto [p, pe] = G.gen_component_[j];
        if (p != 2) {
            u64 n = G.gen_orders_[j], a = exps[j];
            if (a != 0) {
                u64 ord = n / std::gcd(a, n);
                u64 c = p;
                while (ord % p == 0) {
                    ord /= p;
                    c *= p;
                }
                cond *= c;
            }
            ++j;
            continue;
        }
        if (pe == 4) {
            if (exps[j]) cond *= 4;
            ++j;
            continue;
        }
        u64 b = exps[j], c = exps[j + 1], n5 = G.gen_orders_[j + 1];
        if (c == 0) {
            if (b) cond *= 4;
        } else {
            u64 ord = n5 / std::gcd(c, n5);
            cond *= 4 * ord;
        }
        j += 2;
    }
    return cond;
}

PrimitiveData primitive_of(const Character& chi) {
    PrimitiveData d;
    const u64 Q = chi.modulus();
    d.conductor = conductor(chi);
    const u64 q = d.conductor;
    d.values.assign(q, 0.0);
    for (u64 n = 0; n < q; ++n) {
        if (std::gcd(n, q) != 1) continue;
        for (u64 m = n; m < Q + q; m += q) {
            if (std::gcd(m, Q) == 1) {
                d.values[n] = chi(static_cast<i64>(m));
                break;
            }
        }
    }
    if (q == 1) d.values[0] = 1.0;
    return d;
}

cplx orthogonality_sum(u64 Q, i64 m1, i64 m2) {
    CharacterGroup G(Q);
    auto red = [&](i64 m) {
        i64 r = m % static_cast<i64>(Q);
        return static_cast<u64>(r < 0 ? r + static_cast<i64>(Q) : r);
    };
    u64 r1 = red(m1), r2 = red(m2);
    if (!G.is_unit(r1) || !G.is_unit(r2)) return 0.0;
    const auto& d1 = G.dlog(r1);
    const auto& d2 = G.dlog(r2);
    const auto& n = G.generator_orders();
    const u64 L = G.exponent();
    KahanSumC acc;
    for (std::size_t i = 0; i < G.order(); ++i) {
        auto e = G.exponents_of(i);
        u64 s = 0;
        for (std::size_t j = 0; j < e.size(); ++j) {
            u64 diff = (d1[j] + n[j] - d2[j]) % n[j];
            s = (s + (e[j] * diff % n[j]) * (L / n[j])) % L;
        }
        acc.add(unit_root(static_cast<i64>(s), static_cast<i64>(L)));
    }
    return acc.value();
}

} // namespace lmoment
