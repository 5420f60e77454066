#include "doctest.h"

#include "otm/report.hpp"

using namespace otm;

namespace {

void check_cert(const Certificate& c)
{
    INFO(c.to_json().dump());
    CHECK(c.pass);
}

}  // namespace

TEST_CASE("cell and partition checks")
{
    check_cert(check_jacobian_reconstruction(3000, 1));
    check_cert(check_escape_exits(3, 4, 20));
    ReturnPartition rp = return_partition(64);
    check_cert(check_cell_scaling(rp));
    check_cert(check_conditional_slopes({20}, 0.15));
    ReturnPartition small = return_partition(10);
    Certificate g = check_singularity_gradients(small);
    check_cert(g);
    CHECK(g.values["max_gradient_sigma23"] == "11/14");
}

TEST_CASE("escape exits fail when short escapes are included")
{
    // A^1 cells of A_3 exit into A_2 as well
    CHECK_FALSE(check_escape_exits(3, 1, 6).pass);
}

TEST_CASE("geometry export")
{
    nlohmann::json doc;
    Certificate c = check_geometry_export(8, &doc);
    check_cert(c);
    CHECK(doc["sigma"].size() == 4);
    CHECK(doc["cell_families"].size() == 2);
    for (const auto& fam : doc["cell_families"])
        for (const auto& cell : fam["cells"]) CHECK(cell["area"] == cell["closed_form_area"]);
    CHECK(doc["m_cells"].size() == 9);
    CHECK(doc["m_cells"][0]["return_time"] == 1);
}

TEST_CASE("small statistical checks")
{
    check_cert(check_lyapunov(20, 1000, 3));
    check_cert(check_hit_frequency(100, 1000, 3));
    check_cert(check_return_tail(40, 300000, 10, 3));
    check_cert(check_growth_dynamics(50, 3, 64));
    CorrelationSeries s;
    Certificate c = check_correlations(MapKind::H, 20000, 2, 8, 3, &s);
    CHECK(s.n.size() == 9);
    CHECK(c.values.contains("series"));
}

TEST_CASE("report status and serialisation")
{
    VerificationReport rep;
    Certificate ok("a", "passes"), bad("b", "fails");
    bad.expect(false, "always");
    rep.entries.push_back({ok, false, 1.0});
    rep.entries.push_back({bad, true, 2.0});
    CHECK(rep.pass());
    CHECK(rep.warnings() == 1);
    CHECK(rep.entries[1].status() == "WARN");
    nlohmann::json j = rep.to_json();
    CHECK(j["status"] == "PASS");
    CHECK(j["schema"] == kReportSchema);
    CHECK(j["checks"][1]["status"] == "WARN");
    // runtimes stay out of the report
    CHECK(j.dump().find("seconds") == std::string::npos);
    CHECK(rep.timing_json()["b"] == 2.0);
    rep.entries[1].soft = false;
    CHECK_FALSE(rep.pass());
    CHECK(rep.to_json()["status"] == "FAIL");
    CHECK(json_text(j) == json_text(nlohmann::json::parse(json_text(j))));
}

TEST_CASE("run configuration")
{
    RunConfig cfg;
    CHECK_NOTHROW(cfg.validate());
    cfg.lyapunov_samples = 0;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg = RunConfig();
    cfg.h_lo = 50;
    cfg.h_hi = 51;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    CHECK(RunConfig().to_json()["seed"] == 7);
}

TEST_CASE("checks run in a fixed order")
{
    auto checks = all_checks(RunConfig());
    CHECK(checks.size() == 28);
    CHECK(checks.front().id == "family-expansion");
    std::size_t soft = 0;
    for (const auto& c : checks) soft += c.soft;
    CHECK(soft == 2);
}
