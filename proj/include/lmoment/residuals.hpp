#pragma once

#include <map>
#include <string>
#include <vector>

#include "lmoment/mainterms.hpp"
#include "lmoment/moments.hpp"

namespace lmoment {

struct ResidualEntry {
    u64 q = 0;
    cplx residual = 0;
    double error = 0;
};

// Entries strictly increasing in q, every q coprime to N0.
struct ResidualSeries {
    std::vector<ResidualEntry> entries;
    std::string f_label, g_label;
    std::string calibration;

    void add(const ResidualEntry& e);
    void write_csv(const std::string& path) const;
    static ResidualSeries read_csv(const std::string& path);
};

// Moment, prediction and residual S_direct - prediction for one modulus.
MomentReport moment_with_prediction(const CentralValueEngine& ef, const CentralValueEngine& eg, const MainTerms& mt,
                                    u64 Q, int threads = 0);
ResidualEntry residual(const MomentReport& r);

double gaussian_weight(double q, double Q, double y);

struct WeightedAverage {
    cplx value = 0;
    // (y/Q) sum of weights over q coprime to N0 with weight > 1e-16 that the map does not cover.
    double missing_weight = 0;
    std::size_t terms = 0;
    bool truncated = false;
};
// (y/Q) sum_{(q, N0) = 1} value(q) e^{-y^2 log^2(Q/q)/(4 pi)} over the supplied q.
WeightedAverage weighted_average(const std::map<u64, cplx>& values, double Q, double y, u64 N0 = 1);
WeightedAverage weighted_average(const ResidualSeries& s, double Q, double y, u64 N0 = 1);

struct ContourCheck {
    cplx lhs = 0;
    double rhs = 0;
    double diff = 0;
};
// lhs = (1/2 pi i) int_{(2)} (e^{pi v^2/y^2}/y) X^v dv by the trapezoid rule, rhs = e^{-y^2 log^2 X/(4 pi)}.
ContourCheck contour_identity_check(double X, double y);

struct LinearFit {
    double slope = 0, intercept = 0, r2 = 0;
    std::size_t used = 0;
};
LinearFit least_squares(const std::vector<double>& x, const std::vector<double>& y);
// Fit of log|residual| against log q over entries with |residual| > 10 error; needs 8 of them.
LinearFit exponent_fit(const ResidualSeries& s);

struct NonvanishWitness {
    bool found = false;
    u64 q = 0;
    std::size_t character_index = 0;
    double abs_Lf = 0, abs_Lg = 0;
    double err_f = 0, err_g = 0;
    u64 searched_moduli = 0;
};
// Smallest |q - X| (then smaller q, then lowest character index) with both twists above
// max(10 error, 1e-8); window is the half-width around X (<= 0 selects X^{0.6}).
NonvanishWitness nonvanish_search(const CentralValueEngine& ef, const CentralValueEngine& eg, double X,
                                  double window = 0, int threads = 0);

} // namespace lmoment
