#pragma once

#include <ostream>
#include <vector>

#include "lmoment/residuals.hpp"

namespace lmoment {

struct SweepRow {
    MomentReport report;
    double seconds = 0;
};

// Moment reports for each Q (jobs over Q run concurrently, rows returned in input order).
std::vector<SweepRow> run_sweep(const HeckeEigenform& f, const HeckeEigenform& g, const std::vector<u64>& Qs,
                                const MainTerms& mt, int threads = 0, bool timing = true);

// Header Q,phiQ,S_re,S_im,S_err,pred_re,pred_im,res_re,res_im,res_err,seconds.
void write_sweep_csv(std::ostream& os, const std::vector<SweepRow>& rows);

std::vector<u64> primes_in(u64 lo, u64 hi);

} // namespace lmoment
