#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <string>

#include <json.hpp>

using json = nlohmann::json;

namespace {

struct RunResult {
    int exit_code;
    std::string out;
};

RunResult run_cli(const std::string& args) {
    std::string cmd = std::string(DTV_CLI_PATH) + " " + args + " 2>/dev/null";
    FILE* p = popen(cmd.c_str(), "r");
    REQUIRE(p != nullptr);
    std::string out;
    char buf[4096];
    std::size_t n;
    while ((n = fread(buf, 1, sizeof buf, p)) > 0) out.append(buf, n);
    int status = pclose(p);
    return {WEXITSTATUS(status), std::move(out)};
}

json run_json(const std::string& args, int expect_code = 0) {
    auto r = run_cli(args);
    CHECK(r.exit_code == expect_code);
    return json::parse(r.out);
}

std::string write_temp(const std::string& name, const std::string& content) {
    std::string path = std::string("/tmp/dtv_cli_test_") + name;
    std::ofstream out(path);
    out << content;
    return path;
}

} // namespace

TEST_CASE("check certifies the integer elliptic potential in exact mode") {
    auto j = run_json("check --dtv 1,1,1,1 --g2 4 --g3 0 --mode exact");
    CHECK(j["overall"] == true);
    REQUIRE(j["verdicts"].size() == 4);
    for (const auto& v : j["verdicts"]) {
        CHECK(v["verdict"] == "trivial");
        CHECK(v["m"] == 1);
    }
}

TEST_CASE("check flags a perturbed coefficient") {
    auto j = run_json("check --dtv-alphas 0,5/2,2,2,2 --g2 4 --g3 0 --mode exact");
    CHECK(j["overall"] == false);
    CHECK(j["verdicts"][1]["verdict"] == "fails_triangular");
}

TEST_CASE("classify recognizes the Gaussian lattice") {
    auto j = run_json("classify --points 0,1,i --mode exact --template");
    CHECK(j["tag"] == "elliptic");
    CHECK(j["commensurability_cutoff_hit"] == false);
    CHECK(j["template"]["family"] == "dtv");
    CHECK(j["template"]["free_alpha_count"] == 5);
}

TEST_CASE("classify reports non-discrete sets") {
    auto j = run_json("classify --points 0,1,1.41421356237309515");
    CHECK(j["tag"] == "non_discrete");
    CHECK(j["commensurability_cutoff_hit"] == true);
}

TEST_CASE("spectral on the rational potential gives -lambda^3") {
    auto j = run_json("spectral --rat 2 --max-order 3 --mode exact");
    CHECK(j["found"] == true);
    CHECK(j["minimal_order"] == 3);
    auto coeffs = j["spectral"]["coeffs"];
    REQUIRE(coeffs.size() == 4);
    CHECK(coeffs[0] == "0");
    CHECK(coeffs[1] == "0");
    CHECK(coeffs[2] == "0");
    CHECK(coeffs[3] == "-1");
}

TEST_CASE("commute accepts a potential expansion file") {
    // 2/z^2 at z* = 1: coefficients 2 (-1)^k (k+1)
    std::string coeffs = "[";
    for (int k = 0; k <= 40; ++k) {
        coeffs += '"' + std::to_string(2 * (k % 2 ? -(k + 1) : (k + 1))) + '"';
        if (k < 40) coeffs += ',';
    }
    coeffs += "]";
    auto path = write_temp(
        "u.json", R"({"base_point": "1", "min_degree": 0, "coeffs": )" + coeffs + "}");
    auto j = run_json("commute --u-json " + path + " --max-order 3 --mode exact");
    CHECK(j["found"] == true);
    CHECK(j["minimal_order"] == 3);
    CHECK(j["operator"]["order"] == 3);
    CHECK(j["operator"]["monic"] == true);
}

TEST_CASE("expand emits the local series") {
    auto j = run_json("expand --rat 2 --alpha0 7 --order 6 --mode exact");
    CHECK(j["min_degree"] == -2);
    CHECK(j["coeffs"][0] == "2");
    CHECK(j["coeffs"][2] == "7");
}

TEST_CASE("darboux chain step reports the climbed label") {
    auto j = run_json("darboux --chain-step 1 --a 1 --order 16 --mode exact");
    CHECK(j["lambda0"] == "4");
    CHECK(j["dg_check"]["m"] == 2);
    CHECK(j["dg_check"]["verdict"] == "trivial");
}

TEST_CASE("convert matches the Jacobi-form shift") {
    auto j = run_json("convert --m 1,0,0,0 --k 0.5");
    // lambda_shift = (1 + k^2)/3 * sum(alpha) = (1.25/3) * 2
    double shift = std::stod(j["lambda_shift"].get<std::string>());
    CHECK(shift == doctest::Approx(2.5 / 3.0).epsilon(1e-12));
    CHECK(j["spec"]["variant"] == "dtv");
}

TEST_CASE("check --frobenius reports obstruction samples per pole") {
    auto j = run_json("check --rat 2 --mode exact --frobenius --seed 11");
    REQUIRE(j["verdicts"].size() == 1);
    const auto& f = j["verdicts"][0]["frobenius"];
    REQUIRE(f["lambdas"].size() == 8);
    for (const auto& lr : f["log_required"]) CHECK(lr == false);
}

TEST_CASE("byte-identical output for identical invocations") {
    auto a = run_cli("check --dtv 2,1,0,1 --g2 4 --g3 0 --mode exact --seed 7");
    auto b = run_cli("check --dtv 2,1,0,1 --g2 4 --g3 0 --mode exact --seed 7");
    CHECK(a.exit_code == 0);
    CHECK(a.out == b.out);
    auto c = run_cli("classify --points 0,0.5,1.5");
    auto d = run_cli("classify --points 0,0.5,1.5");
    CHECK(c.out == d.out);
}

TEST_CASE("exit codes: usage, domain, truncation") {
    CHECK(run_cli("check --no-such-flag").exit_code == 1);
    CHECK(run_cli("nonsense").exit_code == 1);
    // degenerate lattice -> domain error
    auto r2 = run_cli("check --dtv 1,0,0,0 --g2 3 --g3 1");
    CHECK(r2.exit_code == 2);
    auto j2 = json::parse(r2.out);
    CHECK(j2["error"] == "domain_error");
    // malformed JSON input
    auto bad = write_temp("bad.json", "{ not json");
    CHECK(run_cli("expand --spec " + bad).exit_code == 2);
    // expansion too short for the requested certificate -> refusal with hint
    auto r3 = run_cli("check --dtv 3,0,0,0 --g2 4 --g3 0 --mode exact --order 3");
    CHECK(r3.exit_code == 3);
    auto j3 = json::parse(r3.out);
    CHECK(j3["error"] == "truncation_refused");
    CHECK(j3["hint"]["required_trunc_order"] == 5);
}

TEST_CASE("sweep emits ordered rows in both formats") {
    auto j = run_json("sweep --max-m 1 --mode exact");
    REQUIRE(j.size() == 16);
    CHECK(j[0]["m"] == json::array({0, 0, 0, 0}));
    CHECK(j[15]["m"] == json::array({1, 1, 1, 1}));
    for (const auto& row : j) CHECK(row["overall"] == true);

    auto r = run_cli("sweep --max-m 1 --mode exact --output csv");
    CHECK(r.exit_code == 0);
    CHECK(r.out.rfind("m0,m1,m2,m3,overall", 0) == 0);
    int lines = 0;
    for (char ch : r.out) lines += ch == '\n';
    CHECK(lines == 17); // header + 16 rows
}

TEST_CASE("config file and environment defaults") {
    auto cfg = write_temp("config.json", R"({"scalar_mode": "exact", "trunc_order": 32})");
    auto j = run_json("--config " + cfg + " expand --rat 2 --order 4");
    CHECK(j["coeffs"][0] == "2"); // exact-mode rendering
    // Same through the environment variable.
    std::string cmd = std::string("DTV_CONFIG=") + cfg + " " + DTV_CLI_PATH +
                      " expand --rat 2 --order 4 2>/dev/null";
    FILE* p = popen(cmd.c_str(), "r");
    REQUIRE(p != nullptr);
    std::string out;
    char buf[4096];
    std::size_t n;
    while ((n = fread(buf, 1, sizeof buf, p)) > 0) out.append(buf, n);
    pclose(p);
    CHECK(json::parse(out)["coeffs"][0] == "2");
}

TEST_CASE("precision flag selects the wide floating backend") {
    auto j = run_json("expand --rat 2 --order 4 --precision-bits 64");
    CHECK(j["min_degree"] == -2);
    CHECK(run_cli("expand --rat 2 --precision-bits 128").exit_code == 2);
    CHECK(run_cli("expand --rat 2 --precision-bits 40").exit_code == 2);
}

TEST_CASE("potential JSON round-trips through the CLI") {
    auto j = run_json("check --trig 2,6 --a 1 --mode exact");
    CHECK(j["overall"] == true);
    CHECK(j["verdicts"][0]["m"] == 1);
    CHECK(j["verdicts"][1]["m"] == 2);
    auto spec = j["spec"].dump();
    auto path = write_temp("trig_spec.json", spec);
    auto j2 = run_json("check --spec " + path + " --mode exact");
    CHECK(j2["spec"] == j["spec"]);
    CHECK(j2["overall"] == true);
}
