#pragma once

#include <memory>
#include <optional>
#include <vector>

#include "lmoment/lseries.hpp"

namespace lmoment {

// r(m): number of distinct prime divisors.
int r_count(u64 m);

// E_p(v) exactly as displayed with the infinite product over p not dividing N0.
cplx E_p(cplx v, u64 p, cplx Ap, cplx Bp, cplx Ap2, cplx Bp2);
// Local factor of sum_q L^{(q)}(1, f x g) q^{-v} / (L zeta(v) zeta(2)) from the Satake factorization.
cplx E_p_corrected(cplx v, u64 p, cplx Ap, cplx Bp, cplx Ap2, cplx Bp2);

// Fixed inputs for every main term of one form pair: L(1, f x g) (f != g) or
// L(1, sym^2 f) with the D(s) evaluator (f = g), and the calibration constant C2.
class MainTerms {
public:
    MainTerms(const HeckeEigenform& f, const HeckeEigenform& g, std::optional<double> C2 = std::nullopt);

    const HeckeEigenform& f() const { return f_; }
    const HeckeEigenform& g() const { return g_; }
    bool diagonal() const { return diagonal_; }
    bool calibrated() const { return C2_.has_value(); }
    double C2() const { return C2_.value_or(0.0); }
    void set_C2(double c) { C2_ = c; }

    // L(1, f x g) = sum A(m) conj(B(m)) / m (f != g).
    const SmoothedEstimate& L_fg() const;
    // L(1, sym^2 f) (f = g, level 1).
    const SmoothedEstimate& L_sym() const;
    const SymsqEvaluator& symsq() const;

    // L^{(Q)}(1, f x g) via the Satake multiplier.
    SmoothedEstimate L_fg_removed(u64 Q) const;

    double H2_ff(u64 q) const;
    SmoothedEstimate H_ff(u64 q) const;
    // Coefficient of C2 in H_ff(q): 2 prod(1 - 1/p) L^{(q)}(1, sym^2)/zeta^{(q)}(2).
    double H_ff_C2_slope(u64 q) const;

    // H^{(1)}_{f,g}(Q; l1, l2); swapped = true gives H^{(1)}_{g,f}.
    SmoothedEstimate H1_fg(u64 Q, u64 l1, u64 l2, bool swapped = false) const;
    SmoothedEstimate H1_fg_sieved(u64 Q, bool swapped = false) const;

    SmoothedEstimate prediction_fneq(u64 Q) const;
    SmoothedEstimate prediction_ff(u64 Q) const;
    // prediction_fneq or prediction_ff by the pair type.
    SmoothedEstimate prediction(u64 Q) const;

    EulerProductEstimate E_N0(cplx v, u64 P = 100000) const;
    EulerProductEstimate E_N0_corrected(cplx v, u64 P = 100000) const;

    struct RhsBreakdown {
        cplx piece1 = 0, piece2 = 0, total = 0;
        double error = 0;
        u64 prime_cutoff = 0;
        double tail_bound = 0;
    };
    // Right-hand side of the f != g short-interval average, literal.
    RhsBreakdown thm_main_rhs_fneq(double y, u64 P = 100000) const;
    // Same with the Satake-derived E'_p and the 2 pi contour normalization.
    RhsBreakdown thm_main_rhs_fneq_corrected(double y, u64 P = 100000) const;

    // Res_{s=1} L(s, f x f; l1, l2).
    double res_rankin(u64 l1, u64 l2) const;

    // vol conj<V_{l1,l2}, E_{1/a}(., s)>; residue = true replaces L(s, f x f) by its residue at s = 1.
    cplx inner_product_rhs(double s, u64 a, u64 l1, u64 l2, bool residue = false) const;

private:
    const HeckeEigenform& f_;
    const HeckeEigenform& g_;
    bool diagonal_;
    std::optional<double> C2_;
    SmoothedEstimate L_;
    std::unique_ptr<SymsqEvaluator> sym_;
    SmoothedEstimate D1_; // L(1, sym^2)/zeta(2)
};

// Least-squares C2 from (q, S(q)) pairs against H_ff.
double calibrate_C2(const MainTerms& mt, const std::vector<std::pair<u64, double>>& data);

} // namespace lmoment
