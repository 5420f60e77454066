#include "doctest.h"

#include "json.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>
#include <sys/wait.h>

namespace fs = std::filesystem;

namespace {

const fs::path kScratch = fs::path(OTM_TEST_SCRATCH) / "cli";

int run(const std::string& args, const std::string& env = "")
{
    std::string cmd = env + " " + std::string(OTM_CLI_PATH) + " " + args + " > /dev/null 2>&1";
    int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

nlohmann::json load(const fs::path& p)
{
    std::ifstream in(p);
    return nlohmann::json::parse(in);
}

}  // namespace

TEST_CASE("family table command")
{
    fs::remove_all(kScratch);
    REQUIRE(run("table2 --nmax 50 --out " + kScratch.string()) == 0);
    auto j = load(kScratch / "table2.json");
    CHECK(j["status"] == "PASS");
    auto rows = j["checks"][0]["values"]["rows"];
    CHECK(rows.size() == 8);
    for (const auto& r : rows) CHECK(r["entries"].size() == 50);
}

TEST_CASE("usage errors")
{
    CHECK(run("") == 2);
    CHECK(run("no-such-command") == 2);
    CHECK(run("onestep --locus middle") == 2);
    CHECK(run("table2 --nmax 0") == 2);
    CHECK(run("verify-all --samples 0 --out " + (kScratch / "bad").string()) == 2);
    CHECK(run("--help") == 0);
}

TEST_CASE("output directory from the environment")
{
    fs::path dir = kScratch / "env";
    fs::remove_all(dir);
    REQUIRE(run("onestep --locus lower", "OTM_OUTPUT_DIR=" + dir.string()) == 0);
    CHECK(fs::exists(dir / "onestep_lower.json"));
}

TEST_CASE("geometry, tails and the aggregate report")
{
    fs::path dir = kScratch / "agg";
    fs::remove_all(dir);
    REQUIRE(run("geometry --kmax 8 --out " + dir.string()) == 0);
    auto g = load(dir / "geometry_polygons.json");
    CHECK(g["cell_families"].size() == 2);
    REQUIRE(run("tails --nmax 40 --mc-samples 100000 --out " + dir.string()) == 0);
    std::ifstream csv(dir / "tails.csv");
    std::string header;
    std::getline(csv, header);
    CHECK(header == "n,tail_exact_p,tail_exact_q,tail_mc,stderr");
    REQUIRE(run("report --out " + dir.string()) == 0);
    auto a = load(dir / "aggregate.json");
    CHECK(a["status"] == "PASS");
    CHECK(a["reports"].size() == 2);
    CHECK(run("report --out " + (kScratch / "missing").string()) == 2);
}

TEST_CASE("correlation series are reproducible")
{
    fs::path a = kScratch / "c1", b = kScratch / "c2";
    std::string args = "correlations --map h --samples 20000 --fit-lo 2 --nmax 10 --seed 3 --out ";
    int ra = run(args + a.string()), rb = run(args + b.string());
    CHECK(ra == 0);
    CHECK(rb == 0);
    std::ifstream fa(a / "correlations_h.csv"), fb(b / "correlations_h.csv");
    std::string sa((std::istreambuf_iterator<char>(fa)), {}), sb((std::istreambuf_iterator<char>(fb)), {});
    CHECK(!sa.empty());
    CHECK(sa == sb);
}
