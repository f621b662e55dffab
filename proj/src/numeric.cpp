#include "lmoment/numeric.hpp"

#include <algorithm>
#include <cstdlib>
#include <thread>

namespace lmoment {

namespace {

// B_{2j} for j = 1..10.
constexpr double bernoulli_even[10] = {1.0 / 6,        -1.0 / 30,       1.0 / 42,
                                       -1.0 / 30,      5.0 / 66,        -691.0 / 2730,
                                       7.0 / 6,        -3617.0 / 510,   43867.0 / 798,
                                       -174611.0 / 330};

} // namespace

cplx zeta(cplx s) {
    cplx d = s - 1.0;
    if (std::abs(d) == 0) throw std::domain_error("zeta: pole at s = 1");
    if (std::abs(d) < 1e-3) {
        return 1.0 / d + stieltjes[0] - stieltjes[1] * d + 0.5 * stieltjes[2] * d * d;
    }
    const int N = std::max(20, static_cast<int>(std::abs(s)) + 20);
    KahanSumC acc;
    for (int n = 1; n < N; ++n) acc.add(std::exp(-s * std::log(static_cast<double>(n))));
    const double lN = std::log(static_cast<double>(N));
    cplx Ns = std::exp(-s * lN);
    acc.add(Ns * static_cast<double>(N) / (s - 1.0));
    acc.add(0.5 * Ns);
    // Terms B_{2j}/(2j)! * s(s+1)...(s+2j-2) * N^{-s-2j+1}.
    cplx rising = s;
    double fact = 2.0;
    cplx Npow = Ns / static_cast<double>(N);
    for (int j = 1; j <= 10; ++j) {
        acc.add(bernoulli_even[j - 1] / fact * rising * Npow);
        rising *= (s + static_cast<double>(2 * j - 1)) * (s + static_cast<double>(2 * j));
        fact *= static_cast<double>((2 * j + 1) * (2 * j + 2));
        Npow /= static_cast<double>(N) * N;
    }
    return acc.value();
}

double zeta(double s) { return zeta(cplx(s, 0)).real(); }

double upper_gamma_q(int a, double x) {
    if (a < 1) throw std::invalid_argument("upper_gamma_q: a must be >= 1");
    if (x <= 0) return 1.0;
    if (x < 600) {
        double t = std::exp(-x), s = 0;
        for (int j = 0; j < a; ++j) {
            if (j > 0) t *= x / j;
            s += t;
        }
        return s;
    }
    double s = 0, lx = std::log(x);
    for (int j = 0; j < a; ++j) s += std::exp(-x + j * lx - std::lgamma(j + 1.0));
    return s;
}

double solve_decreasing(const std::function<double(double)>& bound, double target, double start) {
    double lo = start, hi = std::max(start, 1.0);
    while (bound(hi) > target) {
        lo = hi;
        hi *= 2;
        if (hi > 1e12) throw std::runtime_error("solve_decreasing: no crossing");
    }
    for (int it = 0; it < 80 && hi - lo > 1e-9 * hi; ++it) {
        double mid = 0.5 * (lo + hi);
        if (bound(mid) > target)
            lo = mid;
        else
            hi = mid;
    }
    return hi;
}

double harmonic(int n) {
    double s = 0;
    for (int j = 1; j <= n; ++j) s += 1.0 / j;
    return s;
}

cplx gamma_fn(cplx z) {
    static const double g = 7;
    static const double c[9] = {0.99999999999980993,  676.5203681218851,     -1259.1392167224028,
                                771.32342877765313,   -176.61502916214059,   12.507343278686905,
                                -0.13857109526572012, 9.9843695780195716e-6, 1.5056327351493116e-7};
    if (z.real() < 0.5) return pi / (std::sin(pi * z) * gamma_fn(1.0 - z));
    z -= 1.0;
    cplx x = c[0];
    for (int i = 1; i < 9; ++i) x += c[i] / (z + static_cast<double>(i));
    cplx t = z + g + 0.5;
    return std::sqrt(2 * pi) * std::pow(t, z + 0.5) * std::exp(-t) * x;
}

int resolve_threads(int requested) {
    if (requested > 0) return requested;
    if (const char* env = std::getenv("LMOMENT_THREADS")) {
        int v = std::atoi(env);
        if (v > 0) return v;
    }
    unsigned h = std::thread::hardware_concurrency();
    return h ? static_cast<int>(h) : 1;
}

void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& job) {
    std::size_t T = static_cast<std::size_t>(std::max(1, threads));
    T = std::min(T, std::max<std::size_t>(n, 1));
    if (T <= 1) {
        for (std::size_t i = 0; i < n; ++i) job(i);
        return;
    }
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errs(T);
    for (std::size_t t = 0; t < T; ++t) {
        std::size_t lo = n * t / T, hi = n * (t + 1) / T;
        pool.emplace_back([&, t, lo, hi] {
            try {
                for (std::size_t i = lo; i < hi; ++i) job(i);
            } catch (...) {
                errs[t] = std::current_exception();
            }
        });
    }
    for (auto& th : pool) th.join();
    for (auto& e : errs)
        if (e) std::rethrow_exception(e);
}

cplx unit_root(i64 r, i64 q) {
    i64 m = r % q;
    if (m < 0) m += q;
    double ang = 2 * pi * static_cast<double>(m) / static_cast<double>(q);
    return {std::cos(ang), std::sin(ang)};
}

} // namespace lmoment
