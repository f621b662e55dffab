#include <doctest.h>

#include <array>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

#include <json.hpp>

#include "support.hpp"

using namespace lmoment;
using nlohmann::json;

namespace {

struct RunResult {
    int status = -1;
    std::string out;
};

std::string cli() {
    const char* p = std::getenv("LMOMENT_CLI");
    REQUIRE_MESSAGE(p != nullptr, "LMOMENT_CLI must point at the lmoment binary");
    return p;
}

// Runs the CLI with stdout captured; stderr is merged when merge_stderr is set.
RunResult run(const std::string& args, bool merge_stderr = false) {
    const std::string cmd = cli() + " " + args + (merge_stderr ? " 2>&1" : " 2>/dev/null");
    RunResult r;
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    std::array<char, 4096> buf;
    std::size_t n;
    while ((n = std::fread(buf.data(), 1, buf.size(), pipe)) > 0) r.out.append(buf.data(), n);
    const int st = pclose(pipe);
    r.status = WIFEXITED(st) ? WEXITSTATUS(st) : -1;
    return r;
}

std::vector<std::string> lines(const std::string& s) {
    std::vector<std::string> out;
    std::istringstream is(s);
    for (std::string l; std::getline(is, l);)
        if (!l.empty()) out.push_back(l);
    return out;
}

std::vector<std::string> fields(const std::string& line) {
    std::vector<std::string> out;
    std::istringstream is(line);
    for (std::string f; std::getline(is, f, ',');) out.push_back(f);
    return out;
}

bool is_number(const std::string& s) {
    char* end = nullptr;
    std::strtod(s.c_str(), &end);
    return !s.empty() && end == s.c_str() + s.size();
}

bool is_complex(const json& j) { return j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number(); }

bool is_estimate(const json& j) {
    return j.is_object() && is_complex(j.at("value")) && j.at("error_bound").is_number() &&
           j.at("X_ladder").is_array() && j.at("truncation").is_number_integer();
}

// Small budgets keep every invocation to a few seconds.
const std::string fast = " --prec 50000 --threads 1";

} // namespace

TEST_CASE("verify suites pass") {
    RunResult r = run("verify --prec 20000 --threads 1");
    CHECK(r.status == 0);
    auto ls = lines(r.out);
    REQUIRE(ls.size() >= 2);
    CHECK(ls[0] == "suite,status,detail");
    for (std::size_t i = 1; i < ls.size(); ++i) CHECK(fields(ls[i]).at(1) == "PASS");
}

TEST_CASE("precondition (Q, N0) = 1 is reported with exit 2") {
    const std::string path = test::temp_path("cli_level11.csv");
    test::write_level11_file(path, 3000);
    RunResult r = run("moment --Q 22 --ingest " + path + " --threads 1", true);
    CHECK(r.status == 2);
    CHECK(r.out.find("(Q, N0) = 1") != std::string::npos);
    RunResult ok = run("lvalue --Q 7 --char 1 --ingest " + path + " --threads 1", true);
    CHECK(ok.status == 0);
}

TEST_CASE("argument and input errors exit 2") {
    CHECK(run("moment").status == 2);                                  // missing --Q
    CHECK(run("frobnicate").status == 2);                              // unknown subcommand
    CHECK(run("moment --Q 7 --ingest /nonexistent/file.csv").status == 2);
    CHECK(run("chars --Q 12 --format xml").status == 2);
    CHECK(run("lvalue --Q 7 --char 99 --prec 20000").status == 2);      // index beyond phi(Q)
    CHECK(run("sweep --qmin 60 --qmax 50 --prec 20000").status == 2);
}

TEST_CASE("sweep CSV schema") {
    RunResult r = run("sweep --qmin 50 --qmax 60 --primes-only --timing false" + fast);
    REQUIRE(r.status == 0);
    auto ls = lines(r.out);
    REQUIRE(ls.size() == 3); // header, 53, 59
    CHECK(ls[0] == "Q,phiQ,S_re,S_im,S_err,pred_re,pred_im,res_re,res_im,res_err,seconds");
    const char* expect_q[] = {"53", "59"};
    for (std::size_t i = 1; i < ls.size(); ++i) {
        auto f = fields(ls[i]);
        REQUIRE(f.size() == 11);
        CHECK(f[0] == expect_q[i - 1]);
        CHECK(std::stoull(f[1]) == std::stoull(f[0]) - 1);
        for (const auto& x : f) CHECK(is_number(x));
        // residual = S - prediction, column by column.
        CHECK(std::abs(std::stod(f[7]) - (std::stod(f[2]) - std::stod(f[5]))) < 1e-12);
        CHECK(std::stod(f[10]) == 0.0);
    }
}

TEST_CASE("sweep output is byte-identical across thread counts") {
    const std::string base = "sweep --qmin 20 --qmax 45 --primes-only --timing false --prec 50000 --threads ";
    RunResult a = run(base + "1"), b = run(base + "4"), c = run(base + "8");
    REQUIRE(a.status == 0);
    CHECK(a.out == b.out);
    CHECK(a.out == c.out);
}

TEST_CASE("JSON schemas") {
    {
        json j = json::parse(run("chars --Q 12 --format json").out);
        CHECK(j.at("command") == "chars");
        CHECK(j.at("order") == 4);
        CHECK(j.at("characters").size() == 4);
        for (const auto& c : j.at("characters")) {
            CHECK(c.at("index").is_number_integer());
            CHECK(c.at("conductor").is_number_integer());
            CHECK(c.at("primitive").is_boolean());
            CHECK(c.at("principal").is_boolean());
            CHECK((c.at("parity") == 1 || c.at("parity") == -1));
        }
    }
    {
        json j = json::parse(run("coeffs --k 12 --maxm 3 --prec 5000 --format json").out);
        CHECK(j.at("label") == "k12");
        CHECK(j.at("coefficients").size() == 3);
        CHECK(is_complex(j.at("coefficients")[1]));
        CHECK(std::abs(j.at("coefficients")[1][0].get<double>() - -24 / std::pow(2.0, 5.5)) < 1e-15);
    }
    {
        json j = json::parse(run("lvalue --Q 7 --char 1 --format json" + fast).out);
        CHECK(is_estimate(j.at("L")));
        CHECK(j.at("conductor") == 7);
    }
    {
        json j = json::parse(run("moment --Q 7 --format json" + fast).out);
        CHECK(j.at("command") == "moment");
        CHECK(is_estimate(j.at("S_direct")));
        CHECK(is_complex(j.at("prediction")));
        CHECK(is_complex(j.at("residual")));
        CHECK(j.at("phiQ") == 6);
        CHECK(j.at("params").at("method") == "afe");
        const double res = j.at("residual")[0].get<double>();
        const double s = j.at("S_direct").at("value")[0].get<double>(), p = j.at("prediction")[0].get<double>();
        CHECK(std::abs(res - (s - p)) < 1e-14);
    }
    {
        json j = json::parse(run("mainterm --Q 7 --format json" + fast).out);
        CHECK(j.at("diagonal") == false);
        for (const char* t : {"L1_fg", "L1_fg_removed", "H1_fg", "H1_gf", "prediction"}) CHECK(is_estimate(j.at("terms").at(t)));
        CHECK(std::abs(j.at("terms").at("L1_fg").at("value")[0].get<double>() - 0.142754250885994) < 1e-11);
    }
    {
        json j = json::parse(run("mainterm --Q 7 --k 12 --C2 0.5 --format json" + fast).out);
        CHECK(j.at("diagonal") == true);
        CHECK(j.at("calibrated") == true);
        for (const char* t : {"L1_sym2", "cf_Q", "H2_ff", "C2_slope", "C2", "prediction"}) CHECK(j.at("terms").contains(t));
    }
    {
        json j = json::parse(run("nonvanish --X 20 --format json" + fast).out);
        CHECK(j.at("found") == true);
        CHECK(j.at("abs_Lf").get<double>() > 10 * j.at("err_f").get<double>());
    }
}

TEST_CASE("config file with flag override") {
    const std::string path = test::temp_path("cli.cfg");
    {
        std::ofstream os(path);
        os << "Q=7\nprec=50000\nthreads=1\nformat=json\n";
    }
    json a = json::parse(run("chars --config " + path).out);
    CHECK(a.at("Q") == 7);
    json b = json::parse(run("chars --config " + path + " --Q 11").out);
    CHECK(b.at("Q") == 11);
    CHECK(b.at("order") == 10);
}

TEST_CASE("output file and CSV coefficient dump") {
    const std::string path = test::temp_path("cli_coeffs.csv");
    RunResult r = run("coeffs --k 12 --maxm 5 --prec 5000 --out " + path);
    CHECK(r.status == 0);
    CHECK(r.out.empty());
    std::ifstream is(path);
    std::string header;
    std::getline(is, header);
    CHECK(header == "12,1,k12,5");
}
