#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <json.hpp>

#include <array>
#include <cstdio>
#include <fstream>
#include <string>
#include <sys/wait.h>

namespace {

struct Run {
    std::string out;
    int code;
};

Run run(const std::string& args, const std::string& env = "") {
    const std::string cmd = env + std::string(KDVW_CLI_PATH) + " " + args + " 2>/dev/null";
    FILE* p = popen(cmd.c_str(), "r");
    REQUIRE(p != nullptr);
    std::string out;
    std::array<char, 4096> buf{};
    size_t n;
    while ((n = fread(buf.data(), 1, buf.size(), p)) > 0) out.append(buf.data(), n);
    const int status = pclose(p);
    return {out, WIFEXITED(status) ? WEXITSTATUS(status) : -1};
}

int count(const std::string& s, const std::string& needle) {
    int c = 0;
    for (size_t pos = s.find(needle); pos != std::string::npos; pos = s.find(needle, pos + 1)) ++c;
    return c;
}

}  // namespace

TEST_CASE("derive") {
    const Run r = run("derive --hierarchy kdv --k 1");
    CHECK(r.code == 0);
    CHECK(r.out == "v_t3 = 1/4*v_3 + 3*v_0*v_1\n");
    const auto j = nlohmann::json::parse(run("derive --hierarchy kdv --k 2 --format json").out);
    CHECK(j["name"] == "kdv2");
    CHECK(j["matches_registry"] == true);
    CHECK(j["rhs"]["monomials"].size() == 4);
    CHECK(run("derive --hierarchy pkdv --k 1").out == "u_t3 = 1/4*u_3 + 3/2*u_1^2\n");
    CHECK(run("derive --k 9").code == 2);
    CHECK(run("derive --k x").code == 2);
    CHECK(run("derive --no-such-flag 1").code == 1);
    CHECK(run("derive --format csv").code == 2);
}

TEST_CASE("fredholm det row") {
    const Run r = run("fredholm det --kernel airy --sigma heaviside --s -2 --m 40");
    CHECK(r.code == 0);
    REQUIRE(r.out.rfind("s,m,L,iota,Q,converged\n", 0) == 0);
    CHECK(count(r.out, "\n") == 2);
    const std::string row = r.out.substr(r.out.find('\n') + 1);
    CHECK(row.rfind("-2,40,12,1,", 0) == 0);
    CHECK(row.find(",true\n") != std::string::npos);
    const double q = std::stod(row.substr(std::string("-2,40,12,1,").size()));
    CHECK(std::abs(q - 0.413224142505122555) <= 1e-12);
}

TEST_CASE("certify all") {
    const Run ok = run("certify all");
    CHECK(ok.code == 0);
    CHECK(ok.out.find("failed 0") != std::string::npos);
    CHECK(count(ok.out, "FAIL ") == 0);
    for (const char* g : {"PASS zero-curvature:", "PASS x-series:", "PASS pi-lax:", "PASS density:"})
        CHECK(ok.out.find(g) != std::string::npos);
    const Run bad = run("certify all --corrupt kdv2:0:1 --format json");
    CHECK(bad.code == 3);
    const auto j = nlohmann::json::parse(bad.out);
    CHECK(j["failed"] == 1);
    CHECK(j["culprits"] == nlohmann::json::array({"kdv2"}));
    const auto u = nlohmann::json::parse(run("certify all --corrupt U:0:0 --format json").out);
    CHECK(u["culprits"] == nlohmann::json::array({"U"}));
    CHECK(run("certify all --corrupt nothing:0:0").code == 2);
    const Run none = run("certify all --groups ''");
    CHECK(none.code == 0);
    CHECK(none.out == "passed 0 failed 0\n");
}

TEST_CASE("lax verify sections") {
    const Run a = run("lax verify --section zero-curvature");
    CHECK(a.code == 0);
    CHECK(run("lax verify --section 3").out == a.out);
    CHECK(run("lax verify --section appendix-a").out == run("lax verify --section x-series").out);
    const auto j = nlohmann::json::parse(run("lax verify --section pi-lax --format json").out);
    for (const auto& c : j["certificates"]) {
        CHECK(c["status"] == "PASS");
        CHECK(c.contains("claim"));
        CHECK(c.contains("residual"));
    }
    CHECK(run("lax verify --section 4").code == 2);
}

TEST_CASE("job spec round trip and determinism") {
    const Run spec = run("fredholm sweep --from -1 --to 1 --step 0.5 --sigma heaviside --iota 0.5 --print-spec");
    CHECK(spec.code == 0);
    const std::string path = "kdvw_cli_test_spec.json";
    {
        std::ofstream f(path);
        f << spec.out;
    }
    CHECK(run("--config " + path + " --print-spec").out == spec.out);
    const Run a = run("--config " + path);
    const Run b = run("--config " + path);
    CHECK(a.code == 0);
    CHECK(a.out == b.out);
    CHECK(count(a.out, "\n") == 6);
    CHECK(run("--config " + path, "KDVW_THREADS=4 ").out == a.out);
    {
        std::ofstream f(path);
        f << R"({"command": "fredholm det", "params": {"m": "forty"}})";
    }
    CHECK(run("--config " + path).code == 2);
    std::remove(path.c_str());
}

TEST_CASE("coords, sigma, specfun, kdv") {
    const auto c = nlohmann::json::parse(run("coords map --from pi --values 1,1,1,1").out);
    CHECK(c["output"]["tau1"].get<double>() == doctest::Approx(-0.375).epsilon(1e-15));
    CHECK(c["output"]["tau7"].get<double>() == doctest::Approx(2.0 / 7).epsilon(1e-15));
    CHECK(run("coords map --from pi --values 1,1,-1,1").code == 2);
    CHECK(run("coords map --values 1,2").code == 2);

    const Run s = run("sigma validate --sigma gumbel_cubic");
    CHECK(s.code == 0);
    CHECK(nlohmann::json::parse(s.out)["assumption2"] == true);
    CHECK(run("sigma validate --sigma piecewise --jumps 0 --values 0.8,0.3 --iota 0.3").code == 2);

    CHECK(run("specfun check").code == 0);

    const auto sol = nlohmann::json::parse(run("kdv soliton").out);
    CHECK(sol["relative_l2"].get<double>() <= 1e-6);
    CHECK(sol["peak_observed"].get<double>() == doctest::Approx(-0.25).epsilon(1e-6));
    const auto m = nlohmann::json::parse(run("kdv miura").out);
    CHECK(m["discrepancy"].get<double>() <= 1e-6);
    const Run e = run("kdv evolve --T 0.05 --N 64 --P 10 --ic cosine");
    CHECK(e.code == 0);
    CHECK(e.out.rfind("x,v\n", 0) == 0);
    CHECK(count(e.out, "\n") == 65);
    CHECK(run("kdv evolve --N 48").code == 2);
    CHECK(run("kdv evolve --equation b012").code == 2);
}
