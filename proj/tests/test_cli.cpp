#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>
#include <string>
#include <vector>

#include "cli.hpp"

using npc::cli::dispatch;

namespace {

struct Run {
    int rc;
    std::string out, err;
};

Run run(std::vector<std::string> args) {
    args.insert(args.begin(), "npclass");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int rc = dispatch(static_cast<int>(argv.size()), argv.data(), out, err);
    return {rc, out.str(), err.str()};
}

std::string temp_path(const std::string& name) {
    return (std::filesystem::temp_directory_path() / ("npclass_cli_" + name)).string();
}

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST_SUITE("cli") {
    TEST_CASE("exponents: Stein anchors") {
        const auto r = run({"exponents", "--p0", "0.45,0.55", "--p1", "0.55,0.45", "--stein", "--alpha", "10"});
        REQUIRE(r.rc == 0);
        const auto j = nlohmann::json::parse(r.out);
        CHECK(std::abs(j["E1_stein"].get<double>() - 0.0200670695462151) < 1e-10);
        CHECK(std::abs(j["E0_stein"].get<double>() - 0.0182528707194597) < 1e-10);
    }

    TEST_CASE("bounds") {
        const auto r = run({"bounds", "--p0", "0.7,0.3", "--p1", "0.6,0.4", "--e0", "0.005"});
        REQUIRE(r.rc == 0);
        const auto j = nlohmann::json::parse(r.out);
        CHECK(std::abs(j["upper"].get<double>() - 14.19) < 0.01);
        CHECK(std::abs(j["lower"].get<double>() - 0.0204974) < 1e-4);
        CHECK(j["lower"].get<double>() <= j["alpha_star"].get<double>());
        CHECK(j["alpha_star"].get<double>() <= j["upper"].get<double>());
    }

    TEST_CASE("exit codes") {
        CHECK(run({}).rc == 2);
        CHECK(run({"bounds", "--p0", "0.7,0.3", "--p1", "0.6,0.4", "--e0", "0.005", "--nope", "1"}).rc == 2);
        CHECK(run({"bounds", "--p0", "0.7,0.2", "--p1", "0.6,0.4", "--e0", "0.005"}).rc == 2);
        CHECK(run({"simulate-fixed", "--p0", "0.5,0.5", "--p1", "0.4,0.6", "--n", "5", "--trials", "10", "--alpha", "1",
                   "--rules", "bogus"}).rc == 2);
        // E0 beyond D(P1||P0) is a numeric-domain failure.
        CHECK(run({"bounds", "--p0", "0.7,0.3", "--p1", "0.6,0.4", "--e0", "1.0"}).rc == 3);
        CHECK(run({"threshold", "--p0", "0.7,0.3", "--q1", "0.69,0.31", "--e0", "0.005"}).rc == 3);
    }

    TEST_CASE("failed runs leave no output file") {
        const auto path = temp_path("fail.json");
        std::remove(path.c_str());
        const auto r = run({"bounds", "--p0", "0.7,0.3", "--p1", "0.6,0.4", "--e0", "1.0", "--out", path});
        CHECK(r.rc == 3);
        CHECK_FALSE(std::filesystem::exists(path));
    }

    TEST_CASE("print-config round trip") {
        const std::vector<std::string> flags = {"simulate-fixed", "--p0", "0.3,0.3,0.4", "--p1", "0.35,0.35,0.3",
                                                "--n", "5,10", "--alpha", "2", "--trials", "200", "--seed", "3",
                                                "--e0", "0.005", "--rules", "lrt,glrt,interp"};
        const auto direct = run(flags);
        REQUIRE(direct.rc == 0);
        auto pc = flags;
        pc.push_back("--print-config");
        const auto cfg = run(pc);
        REQUIRE(cfg.rc == 0);
        const auto path = temp_path("cfg.json");
        std::ofstream(path) << cfg.out;
        const auto via = run({"simulate-fixed", "--config", path});
        CHECK(via.rc == 0);
        CHECK(via.out == direct.out);
        // Flags override the file.
        const auto over = run({"simulate-fixed", "--config", path, "--trials", "300"});
        CHECK(over.out != direct.out);
        CHECK(over.out.find(",300,") != std::string::npos);
        std::remove(path.c_str());
    }

    TEST_CASE("simulate-fixed passes epsilon to the Gutman rule") {
        const std::vector<std::string> base = {"simulate-fixed", "--p0", "0.3,0.3,0.4", "--p1", "0.35,0.35,0.3",
                                               "--n", "20", "--alpha", "2", "--trials", "100", "--e0", "0.005",
                                               "--rules", "gutman"};
        CHECK(run(base).rc == 2);
        auto with = base;
        with.insert(with.end(), {"--epsilon", "0.05"});
        const auto r = run(with);
        CHECK(r.rc == 0);
        CHECK(r.out.find("\ngutman,20,40,100,") != std::string::npos);
    }

    TEST_CASE("oracle") {
        const auto r = run({"oracle", "--p0", "0.7,0.3", "--p1", "0.6,0.4", "--n", "8", "--k", "8", "--rule", "always1"});
        REQUIRE(r.rc == 0);
        const auto j = nlohmann::json::parse(r.out);
        CHECK(j["eps0"].get<double>() == doctest::Approx(1.0));
        CHECK(j["eps1"].get<double>() == 0.0);
    }

    TEST_CASE("figure determinism via the executable") {
        const std::string tool = NPCLASS_TOOL_PATH;
        const auto a = temp_path("fig2a.csv"), b = temp_path("fig2b.csv");
        const std::string base = tool + " figure fig5 --trials 200 --seed 7 --n 20,30";
        CHECK(std::system((base + " --out " + a).c_str()) == 0);
        CHECK(std::system((base + " --workers 4 --out " + b).c_str()) == 0);
        CHECK(slurp(a) == slurp(b));
        CHECK(slurp(a).rfind("n,trials,eps0,eps1", 0) == 0);
        std::remove(a.c_str());
        std::remove(b.c_str());
        CHECK(WEXITSTATUS(std::system((tool + " bounds --p0 0.7,0.3 > /dev/null 2>&1").c_str())) == 2);
    }

    TEST_CASE("seed from the environment") {
        const std::vector<std::string> args = {"simulate-seq", "--p0", "0.45,0.55", "--p1", "0.55,0.45", "--n", "20",
                                               "--alpha", "10", "--trials", "300", "--penalty", "off"};
        const auto unset = run(args);
        setenv("NP_UNIVERSAL_SEED", "99", 1);
        const auto env = run(args);
        unsetenv("NP_UNIVERSAL_SEED");
        auto explicit_args = args;
        explicit_args.insert(explicit_args.end(), {"--seed", "99"});
        CHECK(env.out == run(explicit_args).out);
        CHECK(env.out != unset.out);
    }
}
