#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <sys/wait.h>
#include <unistd.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "jsonio.hpp"

namespace fs = std::filesystem;
using halfline::tools::Json;
using halfline::tools::canonical_json;

namespace {

struct RunResult {
    int exit_code = -1;
    std::string output;
};

std::string cli_path() {
    const char* p = std::getenv("HALFLINE_CLI_PATH");
    REQUIRE_MESSAGE(p != nullptr, "HALFLINE_CLI_PATH must point at the binary");
    return p;
}

RunResult run_cli(const std::string& args) {
    const std::string cmd = "'" + cli_path() + "' " + args + " 2>&1";
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    RunResult r;
    char buf[4096];
    std::size_t n;
    while ((n = fread(buf, 1, sizeof buf, pipe)) > 0) r.output.append(buf, n);
    const int status = pclose(pipe);
    r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

struct TempDir {
    fs::path path;
    TempDir() {
        static int counter = 0;
        path = fs::temp_directory_path() /
               ("halfline-cli-" + std::to_string(::getpid()) + "-" +
                std::to_string(counter++));
        fs::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path, ec);
    }
    std::string file(const std::string& name, const std::string& text) const {
        const fs::path p = path / name;
        std::ofstream out(p);
        out << text;
        return p.string();
    }
    std::string sub(const std::string& name) const { return (path / name).string(); }
};

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE_MESSAGE(in.good(), path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

std::vector<std::vector<std::string>> csv_rows(const std::string& text) {
    std::vector<std::vector<std::string>> rows;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        std::vector<std::string> cells;
        std::string cell;
        std::istringstream ls(line);
        while (std::getline(ls, cell, ',')) cells.push_back(cell);
        rows.push_back(std::move(cells));
    }
    return rows;
}

const char* kWeylConfig =
    "task = \"weyl\"\n"
    "[potential]\n"
    "family = \"constant\"\n"
    "value = [1.0, 0.0]\n"
    "[lambda]\n"
    "value = [0.0, 0.0]\n"
    "[numeric]\n"
    "tol = 1e-10\n"
    "radius_tol = 1e-9\n";

}  // namespace

TEST_CASE("weyl run: converged disks, closed-form limit, canonical output") {
    TempDir tmp;
    const std::string cfg = tmp.file("weyl.toml", kWeylConfig);
    const RunResult r = run_cli("run --config '" + cfg + "' --out '" + tmp.sub("out") + "'");
    CHECK_MESSAGE(r.exit_code == 0, r.output);

    const std::string bytes = slurp(tmp.sub("out") + "/results.json");
    const Json doc = Json::parse(bytes);
    CHECK(doc.at("task") == "weyl");
    CHECK(doc.at("version") == "0.1.0");
    const Json& res = doc.at("results");
    CHECK(res.at("converged") == true);
    CHECK(res.at("final_radius").get<double>() <= 1e-9);
    CHECK(std::abs(res.at("mu")[0].get<double>() + 1.0) <= 1e-8);
    CHECK(std::abs(res.at("mu")[1].get<double>()) <= 1e-8);

    // Emitted JSON is in the canonical form: reparse + re-emit is identity.
    CHECK(canonical_json(doc) == bytes);

    const auto disks = csv_rows(slurp(tmp.sub("out") + "/disks.csv"));
    REQUIRE(disks.size() >= 4);
    CHECK(disks[0] == std::vector<std::string>{"b", "center_re", "center_im", "radius"});
    for (std::size_t i = 2; i < disks.size(); ++i) {
        CHECK(std::stod(disks[i][3]) < std::stod(disks[i - 1][3]));
    }
}

TEST_CASE("identical configurations produce byte-identical outputs") {
    TempDir tmp;
    const std::string cfg = tmp.file("weyl.toml", kWeylConfig);
    const RunResult a = run_cli("run --config '" + cfg + "' --out '" + tmp.sub("a") + "'");
    const RunResult b = run_cli("run --config '" + cfg + "' --out '" + tmp.sub("b") + "'");
    REQUIRE(a.exit_code == 0);
    REQUIRE(b.exit_code == 0);
    for (const char* name : {"/results.json", "/disks.csv", "/eta.csv"}) {
        CHECK(slurp(tmp.sub("a") + name) == slurp(tmp.sub("b") + name));
    }
}

TEST_CASE("failed decay condition reports and exits 3") {
    TempDir tmp;
    const std::string cfg = tmp.file("checka.toml",
                                     "task = \"check-a\"\n"
                                     "[potential]\n"
                                     "family = \"constant\"\n"
                                     "value = [1.0, 0.0]\n"
                                     "[lambda]\n"
                                     "value = [2.0, 0.0]\n");
    const RunResult r = run_cli("run --config '" + cfg + "' --out '" + tmp.sub("out") + "'");
    CHECK_MESSAGE(r.exit_code == 3, r.output);
    const Json doc = Json::parse(slurp(tmp.sub("out") + "/results.json"));
    CHECK(doc.at("results").at("holds") == false);
    CHECK(doc.at("results").at("margin").is_null());
    const auto rows = csv_rows(slurp(tmp.sub("out") + "/margins.csv"));
    REQUIRE(rows.size() > 1);
    CHECK(rows[1][2] == "0");  // on the branch cut: no margin value at all
}

TEST_CASE("eigenvalue search over a box") {
    TempDir tmp;
    const std::string cfg = tmp.file("eigs.toml",
                                     "task = \"eigs\"\n"
                                     "[potential]\n"
                                     "family = \"monomial\"\n"
                                     "exponent = 2.0\n"
                                     "[region]\n"
                                     "re = [0.0, 12.0]\n"
                                     "im = [-1.0, 1.0]\n"
                                     "[numeric]\n"
                                     "tol = 1e-9\n");
    const RunResult r = run_cli("run --config '" + cfg + "' --out '" + tmp.sub("out") + "'");
    CHECK_MESSAGE(r.exit_code == 0, r.output);
    const Json doc = Json::parse(slurp(tmp.sub("out") + "/results.json"));
    const Json& res = doc.at("results");
    REQUIRE(res.at("count") == 3);
    CHECK(res.at("region_winding") == 3);
    const double want[] = {3.0, 7.0, 11.0};
    for (int i = 0; i < 3; ++i) {
        const Json& ev = res.at("eigenvalues")[i];
        CHECK(std::abs(ev.at("lambda")[0].get<double>() - want[i]) <= 1e-6);
        CHECK(std::abs(ev.at("lambda")[1].get<double>()) <= 1e-6);
    }
}

TEST_CASE("unconverged disk shrinkage exits 2") {
    TempDir tmp;
    const std::string cfg = tmp.file("stall.toml",
                                     "task = \"weyl\"\n"
                                     "[potential]\n"
                                     "family = \"constant\"\n"
                                     "value = [1.0, 0.0]\n"
                                     "[lambda]\n"
                                     "value = [0.0, 0.0]\n"
                                     "[numeric]\n"
                                     "b_max = 4.0\n"
                                     "radius_tol = 1e-30\n");
    const RunResult r = run_cli("run --config '" + cfg + "' --out '" + tmp.sub("out") + "'");
    CHECK_MESSAGE(r.exit_code == 2, r.output);
}

TEST_CASE("configuration errors exit 1 with a pointed message") {
    TempDir tmp;
    const std::string bad = tmp.file("bad.toml",
                                     "task = \"weyl\"\n"
                                     "[potential]\n"
                                     "family = \"monomial\"\n"
                                     "exponnent = 2.0\n"
                                     "[lambda]\n"
                                     "value = [0.0, 0.0]\n");
    const RunResult r = run_cli("run --config '" + bad + "' --out '" + tmp.sub("out") + "'");
    CHECK(r.exit_code == 1);
    CHECK(r.output.find("unknown key 'exponnent'") != std::string::npos);

    const std::string missing = tmp.file("missing.toml",
                                         "task = \"weyl\"\n"
                                         "[potential]\n"
                                         "family = \"constant\"\n"
                                         "value = [1.0, 0.0]\n");
    const RunResult r2 =
        run_cli("run --config '" + missing + "' --out '" + tmp.sub("out2") + "'");
    CHECK(r2.exit_code == 1);
    CHECK(r2.output.find("[lambda]") != std::string::npos);

    const RunResult r3 = run_cli("run --config '" + tmp.sub("nosuch.toml") + "'");
    CHECK(r3.exit_code == 1);

    const RunResult r4 = run_cli("");
    CHECK(r4.exit_code != 0);
}

TEST_CASE("validate checks a configuration without running it") {
    TempDir tmp;
    const std::string cfg = tmp.file("weyl.toml", kWeylConfig);
    const RunResult ok = run_cli("validate --config '" + cfg + "'");
    CHECK(ok.exit_code == 0);
    CHECK(ok.output.find("ok:") != std::string::npos);
    CHECK(!fs::exists(tmp.sub("out")));

    const std::string bad = tmp.file("bad.toml", "task = \"nope\"\n");
    const RunResult fail = run_cli("validate --config '" + bad + "'");
    CHECK(fail.exit_code == 1);
    CHECK(fail.output.find("unknown task") != std::string::npos);
}
