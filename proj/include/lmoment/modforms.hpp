#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "lmoment/arith.hpp"
#include "lmoment/qexp.hpp"

namespace lmoment {

QExpansion eisenstein_qexp(int weight, std::size_t prec);
// Delta = (E4^3 - E6^2) / 1728, exact.
QExpansion delta_qexp(std::size_t prec);

// Cusp-form basis in Miller echelon form: f_i = q^i + O(q^{d+1}), i = 1..d.
std::vector<QExpansion> miller_basis(int k, std::size_t prec);
int cusp_dimension(int k);

enum class Provider { computed, file };

// Normalized Hecke eigenform. A(1) = 1, immutable after construction.
class HeckeEigenform {
public:
    HeckeEigenform(int k, u64 N0, std::string label, Provider provider, std::vector<cplx> table,
                   std::vector<BigInt> exact = {});

    int weight() const { return k_; }
    u64 level() const { return N0_; }
    const std::string& label() const { return label_; }
    Provider provider() const { return provider_; }
    // Largest m with a stored value.
    u64 bound() const { return table_.size() - 1; }
    bool has_exact() const { return !exact_.empty(); }
    u64 exact_bound() const { return exact_.empty() ? 0 : exact_.size() - 1; }
    bool same_form(const HeckeEigenform& o) const {
        return label_ == o.label_ && k_ == o.k_ && N0_ == o.N0_;
    }

    // A(m); beyond bound() extended multiplicatively from prime-power values via the Hecke
    // recursion. Throws range_exhausted if a prime factor exceeds bound().
    cplx coefficient(u64 m) const;
    // Unnormalized integer a(m) for computed level-1 forms with exact data.
    const BigInt& exact_coefficient(u64 m) const;
    // Contiguous A(1..n) (index 0 unused), extended via coefficient() where needed.
    std::vector<cplx> coefficients_upto(u64 n) const;

private:
    int k_;
    u64 N0_;
    std::string label_;
    Provider provider_;
    std::vector<cplx> table_;
    std::vector<BigInt> exact_;
};


// One eigenform per embedding, ordered by decreasing a(2).
std::vector<HeckeEigenform> level1_eigenforms(int k, std::size_t prec);
// Process-wide cache keyed by (k, prec); returns forms computed to at least prec.
const std::vector<HeckeEigenform>& cached_level1_eigenforms(int k, std::size_t prec);

// Matrix of T_2 on the Miller basis (column j = T_2 f_j in the basis), exact.
std::vector<std::vector<BigInt>> hecke_t2_matrix(int k, std::size_t prec);

HeckeEigenform ingest_coefficients(const std::string& path);
void write_coefficients(const HeckeEigenform& f, u64 maxm, const std::string& path);

struct SatakePair {
    cplx alpha;
    u64 p = 0;
};
SatakePair satake(cplx A_p, u64 p = 0);

} // namespace lmoment
