#include "lmoment/sweep.hpp"

#include <chrono>
#include <cstdio>

#include "lmoment/numeric.hpp"

namespace lmoment {

std::vector<SweepRow> run_sweep(const HeckeEigenform& f, const HeckeEigenform& g, const std::vector<u64>& Qs,
                                const MainTerms& mt, int threads, bool timing) {
    CentralValueEngine ef(f);
    const bool same = f.same_form(g);
    CentralValueEngine eg_own(g);
    const CentralValueEngine& eg = same ? ef : eg_own;
    return parallel_map<SweepRow>(Qs.size(), resolve_threads(threads), [&](std::size_t i) {
        auto t0 = std::chrono::steady_clock::now();
        SweepRow row;
        row.report = moment_with_prediction(ef, eg, mt, Qs[i], 1);
        if (timing)
            row.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        return row;
    });
}

void write_sweep_csv(std::ostream& os, const std::vector<SweepRow>& rows) {
    os << "Q,phiQ,S_re,S_im,S_err,pred_re,pred_im,res_re,res_im,res_err,seconds\n";
    char buf[512];
    for (const auto& r : rows) {
        const MomentReport& m = r.report;
        std::snprintf(buf, sizeof buf, "%llu,%llu,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.6f\n",
                      static_cast<unsigned long long>(m.Q), static_cast<unsigned long long>(euler_phi(m.Q)),
                      m.S_direct.value.real(), m.S_direct.value.imag(), m.S_direct.error_bound, m.prediction.real(),
                      m.prediction.imag(), m.residual.real(), m.residual.imag(), m.residual_error, r.seconds);
        os << buf;
    }
}

std::vector<u64> primes_in(u64 lo, u64 hi) {
    std::vector<u64> out;
    if (hi < 2) return out;
    for (u32 p : primes_up_to(static_cast<u32>(hi)))
        if (p >= lo) out.push_back(p);
    return out;
}

} // namespace lmoment
