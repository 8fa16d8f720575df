#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

namespace fs = std::filesystem;

namespace {

int run_cli(const std::string& args) {
    const std::string cmd = std::string(KLTOMO_CLI_PATH) + " " + args + " > cli_stdout.txt 2>&1";
    const int status = std::system(cmd.c_str());
    if (status == -1) return -1;
    return WEXITSTATUS(status);
}

std::string slurp(const fs::path& p) {
    std::ifstream is(p, std::ios::binary);
    std::stringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

} // namespace

TEST_CASE("ibody subcommand reproduces the membership verdicts") {
    fs::remove_all("cli_ibody");
    CHECK(run_cli("ibody --q 4 --n 6 --ell 1 --k 2 --out cli_ibody/q4") == 0);
    const auto rep = nlohmann::json::parse(slurp("cli_ibody/q4/ibody.json"));
    CHECK_FALSE(rep.at("is_member").get<bool>());
    CHECK(rep.at("mu_min").get<double>() < 0.0);

    CHECK(run_cli("ibody --q 2 --n 6 --ell 1 --k 2 --out cli_ibody/q2") == 0);
    const auto rep2 = nlohmann::json::parse(slurp("cli_ibody/q2/ibody.json"));
    CHECK(rep2.at("is_member").get<bool>());

    // exploratory run, no membership assertion attached
    CHECK(run_cli("ibody --q 4 --n 6 --ell 1 --k 4 --out cli_ibody/k4") == 0);

    // mu dump exists with the right header
    CHECK(slurp("cli_ibody/q4/mu.csv").substr(0, 5) == "t,mu\n");
}

TEST_CASE("bp preconditions and exit codes") {
    CHECK(run_cli("bp --mode negative --n 6 --i 3 --ell 1 --out cli_rej") == 2);
    CHECK(run_cli("bp --n 6 --i 4 --ell 1 --out cli_rej") == 2); // missing mode
    CHECK(run_cli("bp --mode sideways --n 6 --i 4 --ell 1") == 1);
    CHECK(run_cli("--not-a-flag") == 1);
}

TEST_CASE("malformed config exits with a parse diagnostic") {
    {
        std::ofstream os("cli_bad.cfg");
        os << "n=oops\n";
    }
    CHECK(run_cli("radon --config cli_bad.cfg") == 1);
    {
        std::ofstream os("cli_unknown.cfg");
        os << "banana=3\n";
    }
    CHECK(run_cli("radon --config cli_unknown.cfg") == 1);
    CHECK(run_cli("radon --config cli_missing.cfg") == 1);
}

TEST_CASE("config values apply and flags win") {
    {
        std::ofstream os("cli_ok.cfg");
        os << "# comment line\n";
        os << "n=5\ni=2\nell=2\nq=4\nseed=3\nsamples=64\nout=cli_cfg_out\n";
    }
    fs::remove_all("cli_cfg_out");
    CHECK(run_cli("radon --config cli_ok.cfg --samples 16") == 0);
    const auto rep = nlohmann::json::parse(slurp("cli_cfg_out/radon.json"));
    CHECK(rep.at("config").at("n").get<int>() == 5);
    CHECK(rep.at("config").at("samples").get<int>() == 16); // flag beat the config
    CHECK(rep.at("max_rel_diff").get<double>() <= 1e-6);
}

TEST_CASE("bp negative run is deterministic byte for byte") {
    fs::remove_all("cli_neg1");
    fs::remove_all("cli_neg2");
    const std::string args = "bp --mode negative --n 6 --i 4 --ell 1 --samples 120 --seed 7";
    CHECK(run_cli(args + " --out cli_neg1") == 0);
    CHECK(run_cli(args + " --out cli_neg2") == 0);
    for (const char* name :
         {"bp_report.json", "sections.csv", "a_profile.csv", "b_profile.csv", "phi.csv", "h.csv"}) {
        const std::string a = slurp(fs::path("cli_neg1") / name);
        const std::string b = slurp(fs::path("cli_neg2") / name);
        REQUIRE(!a.empty());
        CHECK(a == b);
    }
    const auto rep = nlohmann::json::parse(slurp("cli_neg1/bp_report.json"));
    CHECK(rep.at("verdict").get<std::string>() == "true");
    CHECK(rep.at("construction").at("pairing").get<double>() < 0.0);
}

TEST_CASE("bp positive runs emit reports and section tables") {
    fs::remove_all("cli_pa");
    CHECK(run_cli("bp --mode positive-a --n 6 --i 2 --ell 3 --lambda-grid 9 --out cli_pa") == 0);
    const auto rep = nlohmann::json::parse(slurp("cli_pa/bp_report.json"));
    CHECK(rep.at("verdict").get<std::string>() == "confirmed");
    CHECK(slurp("cli_pa/sections.csv").substr(0, 22) == "lambda1,lambda2,volA,v");

    fs::remove_all("cli_pb");
    CHECK(run_cli("bp --mode positive-b --n 6 --i 3 --ell 2 --lambda-grid 9 --out cli_pb") == 0);
    const auto repb = nlohmann::json::parse(slurp("cli_pb/bp_report.json"));
    CHECK(repb.at("verdict").get<std::string>() == "confirmed");
    CHECK(repb.at("min_g").get<double>() >= -1e-8 * repb.at("max_abs_g").get<double>());
    CHECK(slurp("cli_pb/g.csv").substr(0, 4) == "t,g\n");
}

TEST_CASE("bp accepts a JSON body spec for B") {
    {
        std::ofstream os("cli_body.json");
        os << R"({"kind":"perturbed","base":{"kind":"ql_ball","n":5,"ell":2,"q":2},)"
           << R"("coeffs":[0.2,0,0,0,0]})";
    }
    fs::remove_all("cli_pj");
    CHECK(run_cli("bp --mode positive-a --n 5 --i 2 --ell 2 --a-scale 0.7 --lambda-grid 5 "
                  "--samples 2048 --b-json cli_body.json --out cli_pj") == 0);
    const auto rep = nlohmann::json::parse(slurp("cli_pj/bp_report.json"));
    CHECK(rep.at("verdict").get<std::string>() == "confirmed");

    {
        std::ofstream os("cli_body_bad.json");
        os << "{not json";
    }
    CHECK(run_cli("bp --mode positive-a --n 5 --i 2 --ell 2 --b-json cli_body_bad.json") == 1);
}
