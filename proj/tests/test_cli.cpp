#include <catch2/catch_amalgamated.hpp>

#include <sys/wait.h>

#include <cstdio>
#include <fstream>
#include <sstream>

#include "test_support.hpp"

using namespace dubrovin;

namespace {

struct RunResult {
    int code = -1;
    std::string out;
};

RunResult run_cli(const std::string& args) {
    const std::string cmd = std::string(DUBROVIN_CLI_PATH) + " " + args + " 2>&1";
    FILE* p = popen(cmd.c_str(), "r");
    REQUIRE(p != nullptr);
    std::string out;
    char buf[4096];
    std::size_t n = 0;
    while ((n = fread(buf, 1, sizeof buf, p)) > 0) out.append(buf, n);
    const int status = pclose(p);
    RunResult r;
    r.out = std::move(out);
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

const json* find_check(const json& report, const std::string& name) {
    for (const auto& c : report.at("checks"))
        if (c.at("name") == name) return &c;
    return nullptr;
}

std::string write_temp(const std::string& name, const std::string& content) {
    const std::string path = "/tmp/" + name;
    std::ofstream f(path);
    REQUIRE(f.good());
    f << content;
    return path;
}

}  // namespace

TEST_CASE("json round trip for deformation data") {
    const GwData d = testsup::make_synthetic_gw();
    const GwData back = parse_gw_data(gw_data_json(d));
    REQUIRE(back.dim == d.dim);
    REQUIRE(back.h2_rank == d.h2_rank);
    REQUIRE(max_diff(back.cup.pairing, d.cup.pairing) == 0.0);
    REQUIRE(back.classes.size() == d.classes.size());
    for (std::size_t c = 0; c < d.classes.size(); ++c) {
        REQUIRE(back.classes[c].exponents == d.classes[c].exponents);
        for (int j = 0; j < d.dim; ++j)
            for (int i = 0; i < d.dim; ++i)
                for (int l = 0; l < d.dim; ++l)
                    REQUIRE(back.inv_at(c, j, i, l) == d.inv_at(c, j, i, l));
    }
    for (int i = 0; i < d.dim; ++i)
        for (int j = 0; j < d.dim; ++j)
            for (int k = 0; k < d.dim; ++k)
                REQUIRE(back.cup.gamma_at(i, j, k) == d.cup.gamma_at(i, j, k));
}

TEST_CASE("complex entries accept bare numbers and pairs") {
    REQUIRE(parse_complex(json(2.5), "x") == Complex(2.5, 0.0));
    REQUIRE(parse_complex(json::array({1.0, -2.0}), "x") == Complex(1.0, -2.0));
    REQUIRE_THROWS_AS(parse_complex(json::array({1.0}), "x"), ParseError);
    REQUIRE_THROWS_AS(parse_complex(json("nope"), "x"), ParseError);
    try {
        parse_matrix(json::array({json::array({json("bad")})}), "m");
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        REQUIRE(e.path == "m[0][0]");
    }
}

TEST_CASE("flat frame from the builtin family") {
    const RunResult r = run_cli("flat --pm 1");
    REQUIRE(r.code == 0);
    const json j = json::parse(r.out);
    REQUIRE(j.at("command") == "flat");
    REQUIRE(j.at("config").at("hbar") == json::array({0.0, 1.0}));
    REQUIRE(j.at("config").at("order") == 25);
    REQUIRE(j.at("config").at("kmax") == 25);
    REQUIRE(j.at("config").at("jmax") == 25);
    REQUIRE(j.at("config").at("dmax") == 8);
    REQUIRE(j.at("config").at("tol") == 1e-8);
    REQUIRE(j.at("flatness_residual").get<double>() < 1e-6);
    REQUIRE(j.at("matrices").at("g").size() == 2);
    REQUIRE(j.at("matrices").at("g_inv")[0].size() == 2);
}

TEST_CASE("flat frame from a data file") {
    const std::string path =
        write_temp("dubrovin_synth.json", gw_data_json(testsup::make_synthetic_gw()).dump(2));
    const RunResult r = run_cli("flat --input " + path + " --t 0.2+0.1i,-0.1");
    REQUIRE(r.code == 0);
    const json j = json::parse(r.out);
    REQUIRE(j.at("config").at("source") == path);
    REQUIRE(j.at("config").at("t") ==
            json::array({json::array({0.2, 0.1}), json::array({-0.1, 0.0})}));
    REQUIRE(j.at("flatness_residual").get<double>() < 1e-6);
    REQUIRE(j.at("matrices").at("g_inv").size() == 3);
}

TEST_CASE("verification suite passes on builtins and data files") {
    for (const std::string args : {std::string("verify --pm 1"), std::string("verify --pm 2")}) {
        const RunResult r = run_cli(args);
        REQUIRE(r.code == 0);
        const json j = json::parse(r.out);
        REQUIRE(j.at("all_pass") == true);
        for (const std::string name :
             {"constant_product_frobenius", "one_direction_solvers_agree",
              "chained_frame_flatness", "closed_form_cross_method",
              "hypergeometric_identity"}) {
            const json* c = find_check(j, name);
            REQUIRE(c != nullptr);
            REQUIRE(c->at("pass") == true);
        }
    }
    const std::string path =
        write_temp("dubrovin_synth2.json", gw_data_json(testsup::make_synthetic_gw()).dump());
    const RunResult r = run_cli("verify --input " + path);
    REQUIRE(r.code == 0);
    const json j = json::parse(r.out);
    REQUIRE(j.at("all_pass") == true);
    REQUIRE(find_check(j, "closed_form_cross_method") == nullptr);  // builtin-only check
}

TEST_CASE("verification failure sets the exit code") {
    const RunResult r = run_cli("verify --pm 1 --tol 1e-30");
    REQUIRE(r.code == 1);
    const json j = json::parse(r.out);
    REQUIRE(j.at("all_pass") == false);
}

TEST_CASE("truncation failure reports the convergence exit code") {
    const RunResult r = run_cli("flat --pm 1 --t 4.0 --kmax 6 --jmax 6");
    REQUIRE(r.code == 3);
    REQUIRE(r.out.find("convergence failure") != std::string::npos);
}

TEST_CASE("input failures report the input exit code") {
    const std::string path = write_temp("dubrovin_broken.json", "{\"dim\": 3}");
    const RunResult r = run_cli("flat --input " + path);
    REQUIRE(r.code == 2);
    REQUIRE(r.out.find("h2_rank") != std::string::npos);

    REQUIRE(run_cli("flat --no-such-flag").code == 2);
    REQUIRE(run_cli("flat --input /no/such/file.json").code == 2);
    REQUIRE(run_cli("flat --pm 1 --t 0.1,0.2").code == 2);  // too many parameters
    REQUIRE(run_cli("pm-closed-form --input " + path).code == 2);
}

TEST_CASE("invariant recovery round trip") {
    const RunResult r = run_cli("gw-recover --pm 2");
    REQUIRE(r.code == 0);
    const json j = json::parse(r.out);
    const json* c = find_check(j, "invariant_round_trip");
    REQUIRE(c != nullptr);
    REQUIRE(c->at("pass") == true);
    REQUIRE(c->at("value").get<double>() < 1e-9);
    const json& inv = j.at("matrices").at("direction_1_degree_1_invariants");
    for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b) {
            const double expect = (a + b == 4) ? 1.0 : 0.0;  // degrees sum to 2m+1
            REQUIRE(std::abs(inv[a][b][0].get<double>() - expect) < 1e-9);
            REQUIRE(std::abs(inv[a][b][1].get<double>()) < 1e-9);
        }

    const std::string path =
        write_temp("dubrovin_synth3.json", gw_data_json(testsup::make_synthetic_gw()).dump());
    const RunResult rs = run_cli("gw-recover --input " + path);
    REQUIRE(rs.code == 0);
    const json js = json::parse(rs.out);
    REQUIRE(js.at("matrices").contains("direction_2_degree_1_invariants"));
}

TEST_CASE("closed form subcommand and csv output") {
    const RunResult r = run_cli("pm-closed-form --pm 2 --t 0.3+0.2i --format csv");
    REQUIRE(r.code == 0);
    REQUIRE(r.out.find("# tol=") != std::string::npos);
    REQUIRE(r.out.find("check,closed_form_vs_block_exp,") != std::string::npos);
    REQUIRE(r.out.find("solution,0,0,") != std::string::npos);
    REQUIRE(r.out.find(",pass") != std::string::npos);

    // csv matrix rows agree with the json matrix
    const RunResult rj = run_cli("pm-closed-form --pm 2 --t 0.3+0.2i");
    REQUIRE(rj.code == 0);
    const json j = json::parse(rj.out);
    const double re00 = j.at("matrices").at("solution")[0][0][0].get<double>();
    std::istringstream lines(r.out);
    std::string line;
    bool seen = false;
    while (std::getline(lines, line)) {
        if (line.rfind("solution,0,0,", 0) == 0) {
            const auto p1 = line.find(',', 13);
            REQUIRE(std::abs(std::stod(line.substr(13, p1 - 13)) - re00) < 1e-12);
            seen = true;
        }
    }
    REQUIRE(seen);
}

TEST_CASE("hypergeometric identity subcommand") {
    const RunResult r = run_cli("givental-check --pm 1");
    REQUIRE(r.code == 0);
    const json j = json::parse(r.out);
    const json* c = find_check(j, "identity_residual");
    REQUIRE(c != nullptr);
    REQUIRE(c->at("pass") == true);
    const double resid = c->at("value").get<double>();
    REQUIRE(resid < 1e-8);
    REQUIRE(j.at("residual_at_half_dmax").get<double>() > resid);
    REQUIRE(find_check(j, "residual_decreases_with_degree")->at("pass") == true);
}

TEST_CASE("reports can be written to a file") {
    const std::string path = "/tmp/dubrovin_report.json";
    std::remove(path.c_str());
    const RunResult r = run_cli("verify --pm 1 --output " + path);
    REQUIRE(r.code == 0);
    REQUIRE(r.out.empty());
    std::ifstream f(path);
    REQUIRE(f.good());
    json j;
    f >> j;
    REQUIRE(j.at("all_pass") == true);
}
