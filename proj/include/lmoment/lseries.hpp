#pragma once

#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <vector>

#include "lmoment/characters.hpp"
#include "lmoment/modforms.hpp"

namespace lmoment {

// Value plus explicit error budget (truncation tail + extrapolation residual).
struct SmoothedEstimate {
    cplx value = 0;
    double error_bound = 0;
    std::vector<double> X_ladder;
    i64 truncation = 0;
};

struct EulerProductEstimate {
    cplx value = 1;
    u64 prime_cutoff = 0;
    double tail_bound = 0;
};

using CoeffFn = std::function<cplx(u64)>;

// Truncation M = ceil(X (39 + ln X)).
u64 smoothed_truncation(double X);

// sum_{m<=M} c(m) m^{-s} e^{-m/X}, compensated, increasing m.
SmoothedEstimate smoothed_series(const CoeffFn& c, cplx s, double X);

// Polynomial extrapolation in 1/X to 1/X = 0 over the ladder points.
SmoothedEstimate extrapolate(const std::vector<std::pair<double, SmoothedEstimate>>& values);

// Ladder X_j = X0 2^j, j < points, then extrapolate.
SmoothedEstimate ladder_value(const CoeffFn& c, cplx s, double X0, int points = 4);

// Central value L(1/2, f, chi) by the approximate functional equation; the
// error budget includes the split-parameter disagreement (t = 1 vs t = 1.25).
SmoothedEstimate twisted_central_value(const HeckeEigenform& f, const Character& chi);
// Same by the exponential-smoothing ladder with X0 = max(64, Q^{3/2}) (small Q only).
SmoothedEstimate twisted_central_value_ladder(const HeckeEigenform& f, const Character& chi, double X0 = 0);

// Central values for every primitive character mod q, with per-conductor tables reused.
// Index i matches CharacterGroup(q) enumeration; imprimitive entries are left empty.
class CentralValueEngine {
public:
    explicit CentralValueEngine(const HeckeEigenform& f);
    // Split parameters t of the functional equation; the first is the reported value.
    static constexpr double split_points[3] = {1.0, 1.25, 0.8};

    // L(1/2, f, chi*) for a primitive character given by its value table mod q.
    SmoothedEstimate primitive_value(u64 q, const std::vector<cplx>& chi) const;
    // L(1/2, f, chi) for any chi mod Q.
    SmoothedEstimate value(const Character& chi) const;
    const HeckeEigenform& form() const { return f_; }

private:
    struct Tables {
        u64 q = 0;
        // T[t][r] for t in split_points: direct and dual residue-class sums.
        std::vector<cplx> direct[3], dual[3];
        double tail = 0;
        double rounding = 0;
    };
    std::shared_ptr<const Tables> tables(u64 q) const;

    const HeckeEigenform& f_;
    mutable std::mutex mu_;
    mutable std::map<u64, std::shared_ptr<const Tables>> cache_;
    mutable std::vector<cplx> coeffs_;
};

// Root number of f (x) chi* for level 1: i^k tau(chi*)^2 / q.
cplx gauss_sum(u64 q, const std::vector<cplx>& chi);

// L^{(Q)}(1, f (x) g) with L(1, f (x) g) = sum A(m) conj(B(m)) / m: the ladder runs on the
// zeta(2s)-completed series, the p | Q factors are removed through the Satake multiplier.
SmoothedEstimate rankin_L1(const HeckeEigenform& f, const HeckeEigenform& g, u64 Q = 1, double X0 = 64);
// L(1, f, sym^2) = zeta(2) sum A(n^2)/n (level 1).
SmoothedEstimate symsq_L1(const HeckeEigenform& f, double X0 = 64);
// sum_n A(n^2) n^{-s} = L(s, sym^2 f) / zeta(2s), smoothed ladder at real s near 1.
SmoothedEstimate symsq_over_zeta(const HeckeEigenform& f, double s, double X0 = 64);

enum class EulerKind { rankin, symsq, zeta };
// prod_{p | Q} (local factor at p)^{-1}, so that L^{(Q)}(s) = multiplier * L(s).
cplx euler_removed(EulerKind kind, u64 Q, cplx s, const HeckeEigenform* f = nullptr,
                   const HeckeEigenform* g = nullptr);

struct DerivativeEstimate {
    SmoothedEstimate combined; // Richardson over (h, h/2)
    SmoothedEstimate coarse;   // 5-point stencil at h
    SmoothedEstimate fine;     // 5-point stencil at h/2
};
// d/ds F(s) at s0 by the 5-point stencil at h and h/2 combined by Richardson.
DerivativeEstimate stencil_derivative(const std::function<SmoothedEstimate(double)>& F, double s0, double h = 1e-2);

// Memoized D(s) = sum_n A(n^2) n^{-s} for one level-1 form; thread-safe.
class SymsqEvaluator {
public:
    explicit SymsqEvaluator(const HeckeEigenform& f, double X0 = 64);
    SmoothedEstimate D(double s) const;
    const HeckeEigenform& form() const { return f_; }
    // F_Q(s) = L^{(Q)}(s, sym^2)/zeta^{(Q)}(2s) prod_{p|Q}(1 - p^{-s}).
    SmoothedEstimate cf_function(u64 Q, double s) const;

private:
    const HeckeEigenform& f_;
    double X0_;
    std::vector<cplx> sq_; // coefficients of L(s, sym^2 f)
    mutable std::mutex mu_;
    mutable std::map<double, SmoothedEstimate> memo_;
};

// c_f(Q) = F_Q'(1).
SmoothedEstimate cf_derivative(const HeckeEigenform& f, u64 Q, double X0 = 64);
SmoothedEstimate cf_derivative(const SymsqEvaluator& ev, u64 Q);
DerivativeEstimate cf_derivative_detail(const SymsqEvaluator& ev, u64 Q, double h = 1e-2);

// A(n^2) for n <= nmax (index 0 unused), via the Hecke recursion at each prime.
std::vector<cplx> square_coefficients(const HeckeEigenform& f, u64 nmax);

} // namespace lmoment
