#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <numeric>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "lmoment/eisenstein.hpp"
#include "lmoment/numeric.hpp"
#include "lmoment/residuals.hpp"
#include "lmoment/sweep.hpp"

using namespace lmoment;
using json = nlohmann::json;

namespace {

// Raised for configurations that violate a module precondition (exit 2).
struct config_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct RunConfig {
    int k = 24;
    std::string label, label2, ingest, ingest2;
    u64 Q = 0, qmin = 0, qmax = 0;
    bool primes_only = false;
    double y = 4;
    double X = 0;
    u64 P = 100000;
    std::string out;
    std::string format = "csv";
    int threads = 0;
    u64 seed = 1;
    bool timing = true;
    std::size_t prec = 131072;
    std::optional<double> C2;
    u64 maxm = 100;
    std::size_t chr = 0;
    double window = 0;
};

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

json cjson(cplx z) { return json::array({z.real(), z.imag()}); }

json estimate_json(const SmoothedEstimate& e) {
    return {{"value", cjson(e.value)}, {"error_bound", e.error_bound}, {"X_ladder", e.X_ladder},
            {"truncation", e.truncation}};
}

// Writes to --out when given, stdout otherwise.
class Sink {
public:
    explicit Sink(const std::string& path) {
        if (!path.empty()) {
            file_.open(path);
            if (!file_) throw config_error("cannot write output file " + path);
        }
    }
    std::ostream& os() { return file_.is_open() ? static_cast<std::ostream&>(file_) : std::cout; }

private:
    std::ofstream file_;
};

void emit_json(const RunConfig& c, const json& j) {
    Sink s(c.out);
    s.os() << j.dump(2) << '\n';
}

// Owns the two forms of the run; g aliases f when both selections agree.
struct FormPair {
    std::unique_ptr<HeckeEigenform> f_own, g_own;
    const HeckeEigenform* f = nullptr;
    const HeckeEigenform* g = nullptr;
};

int weight_of_label(const std::string& label, int fallback) {
    if (label.size() < 2 || label[0] != 'k') return fallback;
    std::size_t i = 1;
    while (i < label.size() && std::isdigit(static_cast<unsigned char>(label[i]))) ++i;
    return i > 1 ? std::stoi(label.substr(1, i - 1)) : fallback;
}

const HeckeEigenform& computed_form(const std::string& label, int k, std::size_t prec) {
    if (k < 12 || k > 26 || k % 2) throw config_error("weight must be even in [12, 26] for computed forms");
    const auto& forms = cached_level1_eigenforms(k, prec);
    if (forms.empty()) throw config_error("no cusp forms of weight " + std::to_string(k));
    for (const auto& f : forms)
        if (f.label() == label) return f;
    std::string avail;
    for (const auto& f : forms) avail += (avail.empty() ? "" : ", ") + f.label();
    throw config_error("unknown form label '" + label + "' (available: " + avail + ")");
}

FormPair load_forms(const RunConfig& c) {
    FormPair fp;
    const int dim = cusp_dimension(c.k);
    const std::string base = "k" + std::to_string(c.k);
    auto pick = [&](const std::string& label, const std::string& ingest, int idx) -> const HeckeEigenform* {
        if (!ingest.empty()) {
            auto& own = idx == 0 ? fp.f_own : fp.g_own;
            try {
                own = std::make_unique<HeckeEigenform>(ingest_coefficients(ingest));
            } catch (const std::exception& e) {
                throw config_error(e.what());
            }
            return own.get();
        }
        std::string l = label;
        if (l.empty()) {
            if (dim <= 1)
                l = base;
            else
                l = base + (idx == 0 ? "a" : "b");
        }
        return &computed_form(l, weight_of_label(l, c.k), c.prec);
    };
    fp.f = pick(c.label, c.ingest, 0);
    // An ingested f with no second selection pairs with itself.
    fp.g = !c.ingest.empty() && c.ingest2.empty() && c.label2.empty() ? fp.f : pick(c.label2, c.ingest2, 1);
    if (fp.f->weight() != fp.g->weight() || fp.f->level() != fp.g->level())
        throw config_error("forms must share weight and level");
    if (fp.f->same_form(*fp.g)) fp.g = fp.f;
    return fp;
}

void check_coprime(u64 Q, const HeckeEigenform& f) {
    if (Q < 1) throw config_error("Q must be >= 1");
    const u64 g = std::gcd(Q, f.level());
    if (g != 1)
        throw config_error("precondition (Q, N0) = 1 violated: Q=" + std::to_string(Q) +
                           ", N0=" + std::to_string(f.level()) + ", gcd=" + std::to_string(g));
}

std::vector<u64> modulus_range(const RunConfig& c, const HeckeEigenform& f) {
    if (c.qmin < 1 || c.qmax < c.qmin) throw config_error("need 1 <= qmin <= qmax");
    std::vector<u64> qs;
    for (u64 q = c.qmin; q <= c.qmax; ++q) {
        if (std::gcd(q, f.level()) != 1) continue;
        if (c.primes_only && !is_prime(q)) continue;
        qs.push_back(q);
    }
    if (qs.empty()) throw config_error("empty modulus range");
    return qs;
}

void require_Q(const RunConfig& c) {
    if (c.Q == 0) throw config_error("--Q is required");
}

// ---- subcommands ----

int cmd_coeffs(const RunConfig& c) {
    FormPair fp = load_forms(c);
    const HeckeEigenform& f = *fp.f;
    if (c.maxm < 1) throw config_error("maxm must be >= 1");
    if (c.format == "json") {
        json rows = json::array();
        for (u64 m = 1; m <= c.maxm; ++m) rows.push_back(cjson(f.coefficient(m)));
        emit_json(c, {{"command", "coeffs"}, {"label", f.label()}, {"k", f.weight()}, {"N0", f.level()},
                      {"maxm", c.maxm}, {"coefficients", rows}});
        return 0;
    }
    // Ingestion format, so the dump loads back with --ingest.
    Sink s(c.out);
    s.os() << f.weight() << ',' << f.level() << ',' << f.label() << ',' << c.maxm << '\n';
    for (u64 m = 1; m <= c.maxm; ++m) {
        cplx a = f.coefficient(m);
        s.os() << m << ',' << fmt(a.real()) << ',' << fmt(a.imag()) << '\n';
    }
    return 0;
}

int cmd_chars(const RunConfig& c) {
    require_Q(c);
    CharacterGroup G(c.Q);
    struct Row {
        std::size_t index;
        u64 conductor;
        bool primitive, principal;
        int parity;
    };
    std::vector<Row> rows;
    for (std::size_t i = 0; i < G.order(); ++i) {
        Character chi = G.character(i);
        u64 cond = conductor(chi);
        int parity = c.Q <= 2 ? 1 : static_cast<int>(std::lround(chi(-1).real()));
        rows.push_back({i, cond, cond == c.Q, chi.is_principal(), parity});
    }
    if (c.format == "json") {
        json jr = json::array();
        for (const auto& r : rows)
            jr.push_back({{"index", r.index}, {"conductor", r.conductor}, {"primitive", r.primitive},
                          {"principal", r.principal}, {"parity", r.parity}});
        emit_json(c, {{"command", "chars"}, {"Q", c.Q}, {"order", G.order()}, {"exponent", G.exponent()},
                      {"generators", G.generators()}, {"generator_orders", G.generator_orders()},
                      {"characters", jr}});
        return 0;
    }
    Sink s(c.out);
    s.os() << "index,conductor,primitive,principal,parity\n";
    for (const auto& r : rows)
        s.os() << r.index << ',' << r.conductor << ',' << r.primitive << ',' << r.principal << ',' << r.parity << '\n';
    return 0;
}

int cmd_lvalue(const RunConfig& c) {
    require_Q(c);
    FormPair fp = load_forms(c);
    check_coprime(c.Q, *fp.f);
    CharacterGroup G(c.Q);
    if (c.chr >= G.order()) throw config_error("character index out of range (order " + std::to_string(G.order()) + ")");
    Character chi = G.character(c.chr);
    CentralValueEngine ef(*fp.f);
    SmoothedEstimate L = ef.value(chi);
    const u64 cond = conductor(chi);
    if (c.format == "json") {
        emit_json(c, {{"command", "lvalue"}, {"label", fp.f->label()}, {"Q", c.Q}, {"char", c.chr},
                      {"conductor", cond}, {"L", estimate_json(L)}});
        return 0;
    }
    Sink s(c.out);
    s.os() << "label,Q,char,conductor,L_re,L_im,err\n"
           << fp.f->label() << ',' << c.Q << ',' << c.chr << ',' << cond << ',' << fmt(L.value.real()) << ','
           << fmt(L.value.imag()) << ',' << fmt(L.error_bound) << '\n';
    return 0;
}

int cmd_moment(const RunConfig& c) {
    require_Q(c);
    FormPair fp = load_forms(c);
    check_coprime(c.Q, *fp.f);
    CentralValueEngine ef(*fp.f), eg_own(*fp.g);
    const CentralValueEngine& eg = fp.f == fp.g ? ef : eg_own;
    MainTerms mt(*fp.f, *fp.g, c.C2);
    MomentReport r = moment_with_prediction(ef, eg, mt, c.Q, c.threads);
    if (c.X > 0) {
        r.X = c.X;
        r.S1 = diagonal_S1(*fp.f, *fp.g, c.Q, c.X).value;
        r.offdiag = S2_direct(*fp.f, *fp.g, c.Q, c.X) + S3_direct(*fp.f, *fp.g, c.Q, c.X);
    }
    if (c.format == "json") {
        json j = {{"command", "moment"},
                  {"f", fp.f->label()},
                  {"g", fp.g->label()},
                  {"Q", r.Q},
                  {"phiQ", euler_phi(r.Q)},
                  {"S_direct", estimate_json(r.S_direct)},
                  {"prediction", cjson(r.prediction)},
                  {"prediction_error", r.prediction_error},
                  {"residual", cjson(r.residual)},
                  {"residual_error", r.residual_error},
                  {"params", r.params}};
        if (c.X > 0) {
            j["X"] = r.X;
            j["S1"] = cjson(r.S1);
            j["offdiag"] = cjson(r.offdiag);
        }
        emit_json(c, j);
        return 0;
    }
    Sink s(c.out);
    write_sweep_csv(s.os(), {SweepRow{r, 0}});
    return 0;
}

int cmd_mainterm(const RunConfig& c) {
    require_Q(c);
    FormPair fp = load_forms(c);
    check_coprime(c.Q, *fp.f);
    MainTerms mt(*fp.f, *fp.g, c.C2);
    std::vector<std::pair<std::string, SmoothedEstimate>> terms;
    auto real_term = [](double v) {
        SmoothedEstimate e;
        e.value = v;
        return e;
    };
    if (mt.diagonal()) {
        terms.emplace_back("L1_sym2", mt.L_sym());
        terms.emplace_back("cf_Q", cf_derivative(mt.symsq(), c.Q));
        terms.emplace_back("H2_ff", real_term(mt.H2_ff(c.Q)));
        terms.emplace_back("C2_slope", real_term(mt.H_ff_C2_slope(c.Q)));
        terms.emplace_back("C2", real_term(mt.C2()));
    } else {
        terms.emplace_back("L1_fg", mt.L_fg());
        terms.emplace_back("L1_fg_removed", mt.L_fg_removed(c.Q));
        terms.emplace_back("H1_fg", mt.H1_fg_sieved(c.Q, false));
        terms.emplace_back("H1_gf", mt.H1_fg_sieved(c.Q, true));
    }
    terms.emplace_back("prediction", mt.prediction(c.Q));
    if (c.format == "json") {
        json jt = json::object();
        for (const auto& [name, e] : terms) jt[name] = estimate_json(e);
        emit_json(c, {{"command", "mainterm"}, {"f", fp.f->label()}, {"g", fp.g->label()}, {"Q", c.Q},
                      {"diagonal", mt.diagonal()}, {"calibrated", mt.calibrated()}, {"terms", jt}});
        return 0;
    }
    Sink s(c.out);
    s.os() << "term,re,im,err\n";
    for (const auto& [name, e] : terms)
        s.os() << name << ',' << fmt(e.value.real()) << ',' << fmt(e.value.imag()) << ',' << fmt(e.error_bound) << '\n';
    return 0;
}

int cmd_sweep(const RunConfig& c) {
    FormPair fp = load_forms(c);
    std::vector<u64> qs = modulus_range(c, *fp.f);
    MainTerms mt(*fp.f, *fp.g, c.C2);
    auto rows = run_sweep(*fp.f, *fp.g, qs, mt, c.threads, c.timing);
    if (c.format == "json") {
        json jr = json::array();
        for (const auto& r : rows)
            jr.push_back({{"Q", r.report.Q},
                          {"phiQ", euler_phi(r.report.Q)},
                          {"S", cjson(r.report.S_direct.value)},
                          {"S_err", r.report.S_direct.error_bound},
                          {"prediction", cjson(r.report.prediction)},
                          {"residual", cjson(r.report.residual)},
                          {"residual_error", r.report.residual_error},
                          {"seconds", r.seconds}});
        emit_json(c, {{"command", "sweep"}, {"f", fp.f->label()}, {"g", fp.g->label()}, {"rows", jr}});
        return 0;
    }
    Sink s(c.out);
    write_sweep_csv(s.os(), rows);
    return 0;
}

int cmd_residual_avg(const RunConfig& c) {
    require_Q(c);
    if (!(c.y > 0)) throw config_error("y must be positive");
    FormPair fp = load_forms(c);
    RunConfig rc = c;
    if (rc.qmin == 0) rc.qmin = std::max<u64>(1, c.Q / 4);
    if (rc.qmax == 0) rc.qmax = 4 * c.Q;
    std::vector<u64> qs = modulus_range(rc, *fp.f);
    MainTerms mt(*fp.f, *fp.g, c.C2);
    auto rows = run_sweep(*fp.f, *fp.g, qs, mt, c.threads, false);
    std::map<u64, cplx> S, R;
    double S_err = 0;
    for (const auto& r : rows) {
        S[r.report.Q] = r.report.S_direct.value;
        R[r.report.Q] = r.report.residual;
        S_err += gaussian_weight(static_cast<double>(r.report.Q), static_cast<double>(c.Q), c.y) *
                 r.report.S_direct.error_bound;
    }
    S_err *= c.y / static_cast<double>(c.Q);
    const u64 N0 = fp.f->level();
    WeightedAverage wS = weighted_average(S, static_cast<double>(c.Q), c.y, N0);
    WeightedAverage wR = weighted_average(R, static_cast<double>(c.Q), c.y, N0);
    json j = {{"command", "residual-avg"},
              {"f", fp.f->label()},
              {"g", fp.g->label()},
              {"Q", c.Q},
              {"y", c.y},
              {"qmin", rc.qmin},
              {"qmax", rc.qmax},
              {"terms", wS.terms},
              {"missing_weight", wS.missing_weight},
              {"truncated", wS.truncated},
              {"wa_S", cjson(wS.value)},
              {"wa_S_err", S_err},
              {"wa_residual", cjson(wR.value)}};
    if (!mt.diagonal()) {
        auto lit = mt.thm_main_rhs_fneq(c.y, c.P);
        auto cor = mt.thm_main_rhs_fneq_corrected(c.y, c.P);
        j["rhs_literal"] = cjson(lit.total);
        j["rhs_literal_err"] = lit.error;
        j["rhs_corrected"] = cjson(cor.total);
        j["rhs_corrected_err"] = cor.error;
        j["prime_cutoff"] = lit.prime_cutoff;
    }
    if (c.format == "json") {
        emit_json(c, j);
        return 0;
    }
    Sink s(c.out);
    s.os() << "key,re,im\n";
    auto row = [&](const std::string& k, cplx v) { s.os() << k << ',' << fmt(v.real()) << ',' << fmt(v.imag()) << '\n'; };
    row("wa_S", wS.value);
    row("wa_S_err", S_err);
    row("wa_residual", wR.value);
    row("missing_weight", wS.missing_weight);
    if (!mt.diagonal()) {
        row("rhs_literal", {j["rhs_literal"][0].get<double>(), j["rhs_literal"][1].get<double>()});
        row("rhs_literal_err", j["rhs_literal_err"].get<double>());
        row("rhs_corrected", {j["rhs_corrected"][0].get<double>(), j["rhs_corrected"][1].get<double>()});
        row("rhs_corrected_err", j["rhs_corrected_err"].get<double>());
    }
    return 0;
}

// Fast identity suite; the acceptance binary runs the full-size grids.
int cmd_verify(const RunConfig& c) {
    struct Suite {
        std::string name;
        bool pass;
        std::string detail;
    };
    std::vector<Suite> suites;
    auto run = [&](const std::string& name, const std::function<std::pair<bool, std::string>()>& body) {
        try {
            auto [ok, d] = body();
            suites.push_back({name, ok, d});
        } catch (const std::exception& e) {
            suites.push_back({name, false, std::string("error: ") + e.what()});
        }
    };
    run("z_identity", [] {
        int bad = 0;
        for (u64 N = 1; N <= 30; ++N) {
            if (!is_squarefree(N)) continue;
            for (u64 Q = 1; Q <= 30; ++Q)
                if (z_identity(N, Q) != 2) ++bad;
        }
        return std::pair{bad == 0, std::to_string(bad) + " failures, N,Q <= 30"};
    });
    const std::size_t p12 = std::max<std::size_t>(c.prec, 4000);
    run("hecke_sieve_k12", [&] {
        const auto& D = cached_level1_eigenforms(12, p12)[0];
        int bad = 0;
        for (u64 d = 1; d <= 30; ++d) {
            if (!is_squarefree(d)) continue;
            for (u64 n = 1; n <= 100; ++n)
                if (!hecke_sieve_check(D, d, n)) ++bad;
        }
        return std::pair{bad == 0, std::to_string(bad) + " failures, d <= 30, n <= 100"};
    });
    run("eta24_oracle", [&] {
        const auto& D = cached_level1_eigenforms(12, p12)[0];
        // prod (1 - q^n)^24 by repeated multiplication, exact.
        const std::size_t n = 300;
        std::vector<BigInt> e(n + 1, 0);
        e[0] = 1;
        for (std::size_t m = 1; m <= n; ++m)
            for (int r = 0; r < 24; ++r)
                for (std::size_t i = n; i >= m; --i) e[i] -= e[i - m];
        int bad = 0;
        for (std::size_t i = 1; i <= n; ++i)
            if (D.exact_coefficient(i) != e[i - 1]) ++bad;
        return std::pair{bad == 0, std::to_string(bad) + " mismatches, n <= 300"};
    });
    FormPair fp;
    try {
        fp = load_forms(c);
    } catch (const std::exception& e) {
        suites.push_back({"forms", false, e.what()});
    }
    if (fp.f) {
        run("ramanujan_bound", [&] {
            double worst = 0;
            const u64 lim = std::min<u64>(fp.f->bound(), 10000);
            for (u32 p : primes_up_to(static_cast<u32>(lim)))
                if (fp.f->level() % p) worst = std::max(worst, std::abs(fp.f->coefficient(p)));
            return std::pair{worst <= 2 + 1e-9, "max |A(p)| = " + fmt(worst) + ", p <= " + std::to_string(lim)};
        });
        run("satake_resum", [&] {
            double worst = 0;
            for (u32 p : primes_up_to(1000)) {
                cplx A = fp.f->coefficient(p);
                cplx a = satake(A, p).alpha;
                worst = std::max(worst, std::abs(a + 1.0 / a - A));
            }
            return std::pair{worst <= 1e-14, "max |alpha + 1/alpha - A(p)| = " + fmt(worst)};
        });
        run("sieve_decomposition", [&] {
            double worst = 0;
            for (u64 Q : {6, 10, 15})
                if (std::gcd(Q, fp.f->level()) == 1)
                    worst = std::max(worst, sieve_decomposition(*fp.f, *fp.g, Q, 8).diff);
            return std::pair{worst <= 1e-9, "max |direct - sieved| = " + fmt(worst)};
        });
        run("orthogonality_bridge", [&] {
            double worst = 0;
            for (u64 Q = 1; Q <= 10; ++Q)
                if (std::gcd(Q, fp.f->level()) == 1)
                    worst = std::max(worst, orthogonality_bridge(*fp.f, *fp.g, Q, 500, 100).diff);
            return std::pair{worst <= 1e-9, "max diff = " + fmt(worst) + ", Q <= 10, M = 500"};
        });
    }
    run("rho_cusp", [] {
        double worst = 0;
        for (u64 a : {1, 2, 3, 6})
            for (i64 n : {-7, -1, 1, 4, 12}) {
                cplx cf = rho_cusp({6, a}, 1.6, n);
                auto bf = rho_cusp_bruteforce({6, a}, 1.6, n, 10000);
                worst = std::max(worst, std::abs(cf - bf.value) / std::abs(cf));
            }
        return std::pair{worst <= 1e-5, "max rel err = " + fmt(worst)};
    });
    run("zeta_cusp_Q", [] {
        double worst = 0;
        cplx cf = zeta_cusp_Q({5, 5}, 7, 3.0, 0.3);
        cplx bf = zeta_cusp_Q_bruteforce({5, 5}, 7, 3.0, 0.3, 20000);
        worst = std::abs(cf - bf) / std::abs(cf);
        return std::pair{worst <= 1e-5, "rel err (5,5,7) = " + fmt(worst)};
    });
    run("scattering_reflection", [&] {
        std::mt19937_64 rng(c.seed);
        std::uniform_real_distribution<double> t(-20, 20);
        double worst = 0;
        for (u64 N : {1, 2, 6, 30, 105})
            for (int i = 0; i < 8; ++i) {
                const cplx s(0.5, t(rng));
                worst = std::max(worst, std::abs(scattering_row_sum(N, s) * scattering_row_sum(N, 1.0 - s) - 1.0));
            }
        return std::pair{worst <= 1e-10, "max |row(s) row(1-s) - 1| = " + fmt(worst)};
    });
    run("contour_normalized", [] {
        // The line integral equals the Gaussian closed form divided by 2 pi.
        double worst = 0;
        for (double X : {0.5, 1.0, 2.0})
            for (double y : {1.0, 2.0, 4.0}) {
                auto cc = contour_identity_check(X, y);
                worst = std::max(worst, std::abs(cc.lhs - cc.rhs / (2 * pi)));
            }
        return std::pair{worst <= 1e-8, "max |lhs - rhs/(2 pi)| = " + fmt(worst)};
    });
    bool all = true;
    for (const auto& s : suites) all = all && s.pass;
    if (c.format == "json") {
        json js = json::array();
        for (const auto& s : suites) js.push_back({{"suite", s.name}, {"pass", s.pass}, {"detail", s.detail}});
        emit_json(c, {{"command", "verify"}, {"all_pass", all}, {"suites", js}});
    } else {
        Sink s(c.out);
        s.os() << "suite,status,detail\n";
        for (const auto& x : suites) s.os() << x.name << ',' << (x.pass ? "PASS" : "FAIL") << ',' << x.detail << '\n';
    }
    return all ? 0 : 1;
}

int cmd_nonvanish(const RunConfig& c) {
    if (!(c.X >= 2)) throw config_error("--X (target conductor) must be >= 2");
    if (c.window > std::pow(c.X, 0.6) + 1e-9) throw config_error("window must not exceed X^0.6");
    FormPair fp = load_forms(c);
    CentralValueEngine ef(*fp.f), eg_own(*fp.g);
    const CentralValueEngine& eg = fp.f == fp.g ? ef : eg_own;
    NonvanishWitness w = nonvanish_search(ef, eg, c.X, c.window, c.threads);
    if (c.format == "json") {
        emit_json(c, {{"command", "nonvanish"}, {"f", fp.f->label()}, {"g", fp.g->label()}, {"X", c.X},
                      {"found", w.found}, {"q", w.q}, {"char", w.character_index}, {"abs_Lf", w.abs_Lf},
                      {"abs_Lg", w.abs_Lg}, {"err_f", w.err_f}, {"err_g", w.err_g},
                      {"searched_moduli", w.searched_moduli}});
    } else {
        Sink s(c.out);
        s.os() << "found,q,char,abs_Lf,abs_Lg,err_f,err_g,searched_moduli\n"
               << w.found << ',' << w.q << ',' << w.character_index << ',' << fmt(w.abs_Lf) << ','
               << fmt(w.abs_Lg) << ',' << fmt(w.err_f) << ',' << fmt(w.err_g) << ',' << w.searched_moduli << '\n';
    }
    if (!w.found) {
        std::cerr << "no witness in the window; widen it or move X\n";
        return 1;
    }
    return 0;
}

int cmd_eisenstein(const RunConfig& c) {
    struct Row {
        std::string kind;
        u64 N, a, Q;
        double s;
        i64 n;
        cplx closed, brute;
        double rel;
    };
    std::vector<Row> rows;
    const u64 G = c.maxm > 100 ? c.maxm : 10000;
    for (u64 a : {1, 2, 3, 6})
        for (i64 n = -20; n <= 20; ++n) {
            if (n == 0) continue;
            cplx cf = rho_cusp({6, a}, 1.6, n);
            cplx bf = rho_cusp_bruteforce({6, a}, 1.6, n, G).value;
            rows.push_back({"rho_cusp", 6, a, 0, 1.6, n, cf, bf, std::abs(cf - bf) / std::abs(cf)});
        }
    for (auto [N, a, Q] : std::vector<std::array<u64, 3>>{{5, 5, 7}, {6, 2, 7}, {6, 6, 49}}) {
        cplx cf = zeta_cusp_Q({N, a}, Q, 3.0, 0.3);
        cplx bf = zeta_cusp_Q_bruteforce({N, a}, Q, 3.0, 0.3, 100000);
        rows.push_back({"zeta_cusp_Q", N, a, Q, 3.0, 0, cf, bf, std::abs(cf - bf) / std::abs(cf)});
    }
    double worst = 0;
    for (const auto& r : rows) worst = std::max(worst, r.rel);
    if (c.format == "json") {
        json jr = json::array();
        for (const auto& r : rows)
            jr.push_back({{"kind", r.kind}, {"N", r.N}, {"a", r.a}, {"Q", r.Q}, {"s", r.s}, {"n", r.n},
                          {"closed", cjson(r.closed)}, {"brute", cjson(r.brute)}, {"rel_err", r.rel}});
        emit_json(c, {{"command", "eisenstein"}, {"max_rel_err", worst}, {"rows", jr}});
    } else {
        Sink s(c.out);
        s.os() << "kind,N,a,Q,s,n,closed_re,closed_im,brute_re,brute_im,rel_err\n";
        for (const auto& r : rows)
            s.os() << r.kind << ',' << r.N << ',' << r.a << ',' << r.Q << ',' << fmt(r.s) << ',' << r.n << ','
                   << fmt(r.closed.real()) << ',' << fmt(r.closed.imag()) << ',' << fmt(r.brute.real()) << ','
                   << fmt(r.brute.imag()) << ',' << fmt(r.rel) << '\n';
    }
    return worst <= 1e-5 ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Second moments of twisted modular L-functions: direct computation, main terms, identities"};
    app.set_config("--config", "", "flat key=value file; command-line flags override its keys");
    app.require_subcommand(1, 1);
    RunConfig c;
    std::optional<double> C2;
    app.add_option("--k", c.k, "weight of the computed level-1 forms")->capture_default_str();
    app.add_option("--label", c.label, "label of f (k12, k24a, k24b, ...)");
    app.add_option("--label2", c.label2, "label of g");
    app.add_option("--ingest", c.ingest, "coefficient file for f (k,N0,label,maxm header)");
    app.add_option("--ingest2", c.ingest2, "coefficient file for g");
    app.add_option("--Q", c.Q, "modulus");
    app.add_option("--qmin", c.qmin, "first modulus of a range");
    app.add_option("--qmax", c.qmax, "last modulus of a range");
    app.add_flag("--primes-only", c.primes_only, "restrict ranges to prime moduli");
    app.add_option("--y", c.y, "Gaussian width parameter")->capture_default_str();
    app.add_option("--X", c.X, "smoothing scale (moment pieces) or target conductor (nonvanish)");
    app.add_option("--P", c.P, "prime cutoff for Euler products")->capture_default_str();
    app.add_option("--out", c.out, "output path (stdout when empty)");
    app.add_option("--format", c.format, "csv or json")->check(CLI::IsMember({"csv", "json"}))->capture_default_str();
    app.add_option("--threads", c.threads, "worker threads (0: LMOMENT_THREADS or hardware)");
    app.add_option("--seed", c.seed, "seed for randomized suites")->capture_default_str();
    app.add_option("--timing", c.timing, "record per-modulus seconds in sweeps")->capture_default_str();
    app.add_option("--prec", c.prec, "coefficient bound for computed forms")->capture_default_str();
    app.add_option("--C2", C2, "calibrated constant C2 (f = g)");
    app.add_option("--maxm", c.maxm, "largest m for coeffs; Ramanujan-sum cutoff for eisenstein")->capture_default_str();
    app.add_option("--char", c.chr, "character index in enumeration order");
    app.add_option("--window", c.window, "nonvanish half-width (<= X^0.6; 0 selects X^0.6)");

    std::map<std::string, std::function<int(const RunConfig&)>> commands = {
        {"coeffs", cmd_coeffs},       {"chars", cmd_chars},       {"lvalue", cmd_lvalue},
        {"moment", cmd_moment},       {"mainterm", cmd_mainterm}, {"sweep", cmd_sweep},
        {"residual-avg", cmd_residual_avg}, {"verify", cmd_verify}, {"nonvanish", cmd_nonvanish},
        {"eisenstein", cmd_eisenstein}};
    const std::map<std::string, std::string> help = {
        {"coeffs", "dump the A(m) table of f"},
        {"chars", "summary of the character group mod Q"},
        {"lvalue", "one twisted central value L(1/2, f, chi)"},
        {"moment", "one moment report with prediction and residual"},
        {"mainterm", "one prediction with its term breakdown"},
        {"sweep", "moment reports over a modulus range (CSV rows)"},
        {"residual-avg", "Gaussian-weighted averages against the short-interval right-hand side"},
        {"verify", "identity suite with a pass/fail table"},
        {"nonvanish", "simultaneous nonvanishing witness near X"},
        {"eisenstein", "closed-form versus brute-force Eisenstein grid"}};
    for (const auto& [name, text] : help) app.add_subcommand(name, text)->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }
    c.C2 = C2;
    if (app.count("--k") == 0 && !c.label.empty()) c.k = weight_of_label(c.label, c.k);
    std::string name = app.get_subcommands().front()->get_name();
    try {
        return commands.at(name)(c);
    } catch (const config_error& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "computation error: " << e.what() << '\n';
        return 1;
    }
}
