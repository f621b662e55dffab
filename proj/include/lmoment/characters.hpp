#pragma once

#include <memory>
#include <vector>

#include "lmoment/arith.hpp"

namespace lmoment {

class CharacterGroup;

// Dirichlet character mod Q. Values are stored as root-of-unity indices j/order.
class Character {
public:
    const CharacterGroup& group() const { return *group_; }
    u64 modulus() const;
    std::size_t index() const { return index_; }
    const std::vector<u64>& exponents() const { return exps_; }

    // chi(m mod Q); zero off the units.
    cplx operator()(i64 m) const;
    // Exact index j with chi(m) = e(j/order); -1 off the units.
    i64 root_index(i64 m) const;
    u64 order_bound() const;
    const std::vector<cplx>& table() const { return table_; }
    bool is_principal() const;

private:
    friend class CharacterGroup;
    const CharacterGroup* group_ = nullptr;
    std::size_t index_ = 0;
    std::vector<u64> exps_;
    std::vector<i64> idx_;
    std::vector<cplx> table_;
};

// Full group of Dirichlet characters mod Q, enumerated lexicographically in exponent
// tuples (principal first). Immutable after construction.
class CharacterGroup {
public:
    explicit CharacterGroup(u64 Q);

    u64 modulus() const { return Q_; }
    const Factorization& factorization() const { return fac_; }
    std::size_t order() const { return order_; }
    // Orders of the generators; product equals phi(Q).
    const std::vector<u64>& generator_orders() const { return gen_orders_; }
    // Generators as residues mod Q (each one is 1 in every other CRT component).
    const std::vector<u64>& generators() const { return gens_; }
    // L = lcm of generator orders; character values are L-th roots of unity.
    u64 exponent() const { return L_; }

    Character character(std::size_t i) const;
    std::vector<Character> characters() const;
    std::vector<u64> exponents_of(std::size_t i) const;
    std::size_t index_of(const std::vector<u64>& exps) const;

    // Discrete logs of m (unit mod Q) on the generators; empty when gcd(m,Q) > 1.
    const std::vector<u64>& dlog(u64 m) const { return dlog_[m % Q_]; }
    bool is_unit(u64 m) const { return unit_[m % Q_]; }

private:
    u64 Q_;
    Factorization fac_;
    std::size_t order_ = 1;
    u64 L_ = 1;
    std::vector<u64> gen_orders_;
    std::vector<u64> gens_;
    // Component of each generator: prime p and p^e.
    std::vector<std::pair<u64, u64>> gen_component_;
    std::vector<std::vector<u64>> dlog_;
    std::vector<bool> unit_;
    std::vector<cplx> roots_;

    friend class Character;
    friend u64 conductor(const Character& chi);
};

CharacterGroup build_group(u64 Q);
cplx evaluate(const Character& chi, i64 m);
u64 conductor(const Character& chi);

// The primitive character inducing chi: its conductor and value table mod conductor.
struct PrimitiveData {
    u64 conductor = 1;
    std::vector<cplx> values; // size = conductor
};
PrimitiveData primitive_of(const Character& chi);

cplx orthogonality_sum(u64 Q, i64 m1, i64 m2);

} // namespace lmoment
