#include "lmoment/residuals.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "lmoment/numeric.hpp"

namespace lmoment {

void ResidualSeries::add(const ResidualEntry& e) {
    if (!entries.empty() && e.q <= entries.back().q) throw std::invalid_argument("residual series: q must increase");
    entries.push_back(e);
}

void ResidualSeries::write_csv(const std::string& path) const {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot write " + path);
    os << "q,res_re,res_im,err\n" << std::setprecision(17);
    for (const auto& e : entries) os << e.q << ',' << e.residual.real() << ',' << e.residual.imag() << ',' << e.error << '\n';
}

ResidualSeries ResidualSeries::read_csv(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot read " + path);
    std::string line;
    std::getline(is, line);
    if (line != "q,res_re,res_im,err") throw std::runtime_error("residual csv: bad header");
    ResidualSeries s;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string a, b, c, d;
        std::getline(ss, a, ',');
        std::getline(ss, b, ',');
        std::getline(ss, c, ',');
        std::getline(ss, d, ',');
        s.add({std::stoull(a), {std::stod(b), std::stod(c)}, std::stod(d)});
    }
    return s;
}

MomentReport moment_with_prediction(const CentralValueEngine& ef, const CentralValueEngine& eg, const MainTerms& mt,
                                    u64 Q, int threads) {
    MomentReport r = second_moment(ef, eg, Q, threads);
    SmoothedEstimate p = mt.prediction(Q);
    r.prediction = p.value;
    r.prediction_error = p.error_bound;
    r.residual = r.S_direct.value - p.value;
    r.residual_error = r.S_direct.error_bound + p.error_bound;
    r.params["C2"] = mt.calibrated() ? std::to_string(mt.C2()) : "uncalibrated";
    return r;
}

ResidualEntry residual(const MomentReport& r) { return {r.Q, r.residual, r.residual_error}; }

double gaussian_weight(double q, double Q, double y) {
    if (!(q >= 1) || !(Q >= 1) || !(y > 0)) throw std::invalid_argument("gaussian_weight: need q, Q >= 1, y > 0");
    const double l = std::log(Q / q);
    return std::exp(-y * y * l * l / (4 * pi));
}

WeightedAverage weighted_average(const std::map<u64, cplx>& values, double Q, double y, u64 N0) {
    if (values.empty()) throw std::invalid_argument("weighted_average: insufficient coverage (no values)");
    WeightedAverage out;
    KahanSumC acc;
    for (auto [q, v] : values) {
        if (std::gcd(q, N0) != 1) continue;
        const double w = gaussian_weight(static_cast<double>(q), Q, y);
        if (w < 1e-16) {
            out.truncated = true;
            continue;
        }
        acc.add(v * w);
        ++out.terms;
    }
    out.value = acc.value() * (y / Q);
    // Weight > 1e-16 needs |log(Q/q)| < sqrt(4 pi ln 1e16)/y.
    const double span = std::sqrt(4 * pi * std::log(1e16)) / y;
    const u64 qlo = static_cast<u64>(std::max(1.0, std::floor(Q * std::exp(-span))));
    const u64 qhi = static_cast<u64>(std::ceil(Q * std::exp(span)));
    KahanSum miss;
    for (u64 q = qlo; q <= qhi; ++q) {
        if (std::gcd(q, N0) != 1 || values.count(q)) continue;
        const double w = gaussian_weight(static_cast<double>(q), Q, y);
        if (w < 1e-16) continue;
        miss.add(w);
    }
    out.missing_weight = miss.value() * (y / Q);
    if (out.missing_weight > 0) out.truncated = true;
    return out;
}

WeightedAverage weighted_average(const ResidualSeries& s, double Q, double y, u64 N0) {
    std::map<u64, cplx> m;
    for (const auto& e : s.entries) m[e.q] = e.residual;
    return weighted_average(m, Q, y, N0);
}

ContourCheck contour_identity_check(double X, double y) {
    if (!(X > 0) || !(y > 0)) throw std::invalid_argument("contour_identity_check: X, y must be positive");
    // v = 2 + it, dv = i dt: (1/2 pi) int e^{pi v^2/y^2} X^v / y dt.
    const double h = y / 100, lx = std::log(X);
    const int n = 800; // t in [-8y, 8y]
    KahanSumC acc;
    for (int j = -n; j <= n; ++j) {
        const double t = j * h;
        const cplx v(2.0, t);
        const cplx term = std::exp(pi * v * v / (y * y) + v * lx) / y;
        acc.add((j == -n || j == n) ? 0.5 * term : term);
    }
    ContourCheck out;
    out.lhs = acc.value() * h / (2 * pi);
    out.rhs = std::exp(-y * y * lx * lx / (4 * pi));
    out.diff = std::abs(out.lhs - out.rhs);
    return out;
}

LinearFit least_squares(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("least_squares: need >= 2 points");
    const double n = static_cast<double>(x.size());
    const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
    const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
    double sxx = 0, sxy = 0, syy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
        syy += (y[i] - my) * (y[i] - my);
    }
    if (sxx == 0) throw std::invalid_argument("least_squares: degenerate abscissae");
    LinearFit f;
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    f.r2 = syy == 0 ? 1.0 : sxy * sxy / (sxx * syy);
    f.used = x.size();
    return f;
}

LinearFit exponent_fit(const ResidualSeries& s) {
    std::vector<double> x, y;
    for (const auto& e : s.entries) {
        const double a = std::abs(e.residual);
        if (a > 10 * e.error && a > 0) {
            x.push_back(std::log(static_cast<double>(e.q)));
            y.push_back(std::log(a));
        }
    }
    if (x.size() < 8) throw std::invalid_argument("exponent_fit: fewer than 8 usable points");
    return least_squares(x, y);
}

NonvanishWitness nonvanish_search(const CentralValueEngine& ef, const CentralValueEngine& eg, double X,
                                  double window, int threads) {
    if (!(X >= 2)) throw std::invalid_argument("nonvanish_search: X must be >= 2");
    const double w = window > 0 ? window : std::pow(X, 0.6);
    if (w > std::pow(X, 0.6) + 1e-9) throw std::invalid_argument("nonvanish_search: window exceeds X^0.6");
    const u64 lo = static_cast<u64>(std::max(1.0, std::ceil(X - w)));
    const u64 hi = static_cast<u64>(std::floor(X + w));
    std::vector<u64> qs;
    for (u64 q = lo; q <= hi; ++q)
        if (std::gcd(q, ef.form().level()) == 1) qs.push_back(q);
    std::stable_sort(qs.begin(), qs.end(), [&](u64 a, u64 b) {
        const double da = std::abs(static_cast<double>(a) - X), db = std::abs(static_cast<double>(b) - X);
        if (da != db) return da < db;
        return a < b;
    });
    const bool same = &ef == &eg || ef.form().same_form(eg.form());
    NonvanishWitness out;
    for (u64 q : qs) {
        ++out.searched_moduli;
        CharacterGroup G(q);
        struct Pair {
            SmoothedEstimate f, g;
        };
        auto vals = parallel_map<Pair>(G.order(), resolve_threads(threads), [&](std::size_t i) {
            Character chi = G.character(i);
            Pair p;
            p.f = ef.value(chi);
            p.g = same ? p.f : eg.value(chi);
            return p;
        });
        for (std::size_t i = 0; i < vals.size(); ++i) {
            const auto& p = vals[i];
            const double af = std::abs(p.f.value), ag = std::abs(p.g.value);
            if (af > std::max(10 * p.f.error_bound, 1e-8) && ag > std::max(10 * p.g.error_bound, 1e-8)) {
                out.found = true;
                out.q = q;
                out.character_index = i;
                out.abs_Lf = af;
                out.abs_Lg = ag;
                out.err_f = p.f.error_bound;
                out.err_g = p.g.error_bound;
                return out;
            }
        }
    }
    return out;
}

} // namespace lmoment
