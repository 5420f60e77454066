#include "otm/cones.hpp"
#include "otm/growth.hpp"
#include "otm/report.hpp"

#include "CLI11.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

using namespace otm;

namespace {

constexpr int kPass = 0, kFail = 1, kUsage = 2;

std::string default_output_dir()
{
    const char* env = std::getenv("OTM_OUTPUT_DIR");
    return env && *env ? env : "otm-output";
}

void print_entry(const ReportEntry& e)
{
    std::cout << e.status() << "  " << e.cert.id << "  " << e.cert.label << "  (" << e.cert.checked << " checks)\n";
    if (!e.cert.pass)
        for (const auto& f : e.cert.failures) std::cout << "      " << f.dump() << '\n';
}

// Report of a subset of checks, written to dir/name.json.
int finish(const RunConfig& cfg, const std::string& name, std::vector<ReportEntry> entries,
           const nlohmann::json& extra = nullptr)
{
    VerificationReport rep;
    rep.config = cfg;
    rep.entries = std::move(entries);
    for (const auto& e : rep.entries) print_entry(e);
    nlohmann::json j = rep.to_json();
    if (!extra.is_null()) j["data"] = extra;
    write_artifact(cfg.output_dir, name + ".json", json_text(j));
    std::cout << (rep.pass() ? "PASS" : "FAIL") << "  " << name << " -> "
              << (std::filesystem::path(cfg.output_dir) / (name + ".json")).string() << '\n';
    return rep.pass() ? kPass : kFail;
}

ReportEntry entry(Certificate c, bool soft = false) { return ReportEntry{std::move(c), soft, 0}; }

// Collects the statuses of the reports already written to the output directory.
int aggregate(const RunConfig& cfg)
{
    namespace fs = std::filesystem;
    if (!fs::is_directory(cfg.output_dir)) {
        std::cerr << "no output directory " << cfg.output_dir << '\n';
        return kUsage;
    }
    std::vector<fs::path> files;
    for (const auto& f : fs::directory_iterator(cfg.output_dir))
        if (f.path().extension() == ".json" && f.path().filename() != "aggregate.json" &&
            f.path().filename() != "timing.json")
            files.push_back(f.path());
    std::sort(files.begin(), files.end());
    nlohmann::json reports = nlohmann::json::array();
    bool pass = true;
    std::size_t warnings = 0;
    for (const auto& p : files) {
        std::ifstream in(p);
        nlohmann::json j = nlohmann::json::parse(in, nullptr, false);
        if (j.is_discarded() || !j.contains("schema") || j["schema"] != kReportSchema) continue;
        nlohmann::json checks = nlohmann::json::array();
        for (const auto& c : j["checks"]) checks.push_back({{"check_id", c["check_id"]}, {"status", c["status"]}});
        pass = pass && j["status"] == "PASS";
        warnings += j.value("warnings", std::size_t(0));
        reports.push_back({{"file", p.filename().string()},
                           {"command", j["config"]["command"]},
                           {"status", j["status"]},
                           {"checks", std::move(checks)}});
    }
    if (reports.empty()) {
        std::cerr << "no reports in " << cfg.output_dir << '\n';
        return kUsage;
    }
    nlohmann::json out = {{"schema", kReportSchema},
                          {"status", pass ? "PASS" : "FAIL"},
                          {"warnings", warnings},
                          {"reports", std::move(reports)}};
    write_artifact(cfg.output_dir, "aggregate.json", json_text(out));
    std::cout << (pass ? "PASS" : "FAIL") << "  aggregate of " << out["reports"].size() << " reports, " << warnings
              << " warnings\n";
    return pass ? kPass : kFail;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Exact certificates and statistics for the tent-map linked twist map H = G F on the torus"};
    app.require_subcommand(1);
    app.fallthrough();

    RunConfig cfg;
    cfg.output_dir = default_output_dir();
    unsigned threads = 0;
    app.add_option("--out", cfg.output_dir, "Output directory (default $OTM_OUTPUT_DIR or ./otm-output)");
    app.add_option("--seed", cfg.seed, "64-bit seed for every sampled check")->capture_default_str();
    app.add_option("--threads", threads, "Worker threads for sampling (0 = all cores); results do not depend on it");

    auto* verify = app.add_subcommand("verify-all", "Run every certificate and statistical check");
    verify->add_option("--kmax", cfg.k_max, "Depth of the cell families")->capture_default_str();
    verify->add_option("--nmax", cfg.n_max, "Depth of the matrix families")->capture_default_str();
    verify->add_option("--mmax", cfg.m_max, "Depth of the return partition")->capture_default_str();
    verify->add_option("--samples", cfg.lyapunov_samples, "Lyapunov samples")->capture_default_str();
    verify->add_option("--segments", cfg.growth_samples, "Random segments for the growth dynamics")->capture_default_str();
    verify->add_option("--points", cfg.reconstruction_points, "Points for the Jacobian reconstruction")->capture_default_str();
    verify->add_option("--steps", cfg.lyapunov_n, "Orbit length for Lyapunov exponents")->capture_default_str();
    verify->add_option("--hit-samples", cfg.hit_samples, "Samples for the sigma hit frequency")->capture_default_str();
    verify->add_option("--hsigma-samples", cfg.hsigma_samples, "Samples for return-map correlations")->capture_default_str();
    verify->add_option("--h-samples", cfg.h_samples, "Samples for correlations of H")->capture_default_str();
    verify->add_option("--tail-samples", cfg.tail_mc_samples, "Monte-Carlo samples for the return tail")->capture_default_str();

    unsigned table_n = 200;
    auto* table = app.add_subcommand("table2", "Closed forms and minimum expansion factors of the matrix families");
    table->add_option("--nmax", table_n, "Family depth n = 1..N")->capture_default_str()->check(CLI::PositiveNumber);

    std::size_t segments = 1000;
    unsigned budget = 64;
    auto* growth = app.add_subcommand("growth", "Growth certificates and random segment dynamics");
    growth->add_option("--samples", segments, "Random segments")->capture_default_str()->check(CLI::PositiveNumber);
    growth->add_option("--budget", budget, "Iteration budget per segment")->capture_default_str();

    std::string locus = "upper";
    auto* onestep = app.add_subcommand("onestep", "One-step expansion constants near an accumulation point");
    onestep->add_option("--locus", locus, "upper or lower")->check(CLI::IsMember({"upper", "lower"}))->capture_default_str();

    unsigned geo_k = 12;
    auto* geometry = app.add_subcommand("geometry", "Export sigma, the cell families and the m-cells as polygons");
    geometry->add_option("--kmax", geo_k, "Largest cell index")->capture_default_str()->check(CLI::Range(5u, 64u));

    std::size_t ly_samples = 1000;
    unsigned ly_n = 10000;
    auto* lyap = app.add_subcommand("lyapunov", "Sampled Lyapunov exponents and the period-2 value");
    lyap->add_option("--samples", ly_samples, "Sample points")->capture_default_str()->check(CLI::PositiveNumber);
    lyap->add_option("--steps", ly_n, "Orbit length")->capture_default_str()->check(CLI::PositiveNumber);

    std::string map = "hsigma";
    std::size_t corr_samples = 0;
    unsigned corr_lo = 0, corr_hi = 0;
    auto* corr = app.add_subcommand("correlations", "Correlations of cos 2 pi x under H or the return map");
    corr->add_option("--map", map, "h or hsigma")->check(CLI::IsMember({"h", "hsigma"}))->capture_default_str();
    corr->add_option("--samples", corr_samples, "Samples (default 10^7 for hsigma, 2 10^6 for h)");
    corr->add_option("--fit-lo", corr_lo, "First n of the fit window (default 1 for hsigma, 10 for h)");
    corr->add_option("--nmax", corr_hi, "Last n, also the end of the fit window (default 15 for hsigma, 100 for h)");

    unsigned tail_n = 40, tail_mc_n = 10;
    std::size_t tail_mc = 1000000;
    auto* tails = app.add_subcommand("tails", "Exact and Monte-Carlo return-time tails");
    tails->add_option("--nmax", tail_n, "Largest n of the exact tail (fit over [15, min(40, nmax)])")
        ->capture_default_str()
        ->check(CLI::Range(17u, 64u));
    tails->add_option("--mc-samples", tail_mc, "Monte-Carlo samples")->capture_default_str()->check(CLI::PositiveNumber);
    tails->add_option("--mc-nmax", tail_mc_n, "Largest n of the Monte-Carlo column")->capture_default_str();

    auto* report = app.add_subcommand("report", "Aggregate the reports in the output directory into aggregate.json");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? kPass : kUsage;
    }

    try {
        set_statistics_threads(threads);
        if (verify->parsed()) {
            cfg.command = "verify-all";
            cfg.hit_n = cfg.lyapunov_n;
            cfg.validate();
            VerificationReport rep = verify_all(cfg, print_entry);
            write_artifact(cfg.output_dir, "report.json", json_text(rep.to_json()));
            write_artifact(cfg.output_dir, "timing.json", json_text(rep.timing_json()));
            for (const auto& [name, text] : rep.artifacts) write_artifact(cfg.output_dir, name, text);
            std::cout << (rep.pass() ? "PASS" : "FAIL") << "  " << rep.entries.size() << " checks, " << rep.warnings()
                      << " warnings -> " << (std::filesystem::path(cfg.output_dir) / "report.json").string() << '\n';
            return rep.pass() ? kPass : kFail;
        }
        if (table->parsed()) {
            cfg.command = "table2";
            cfg.n_max = table_n;
            return finish(cfg, "table2", {entry(table2_verify(table_n))});
        }
        if (growth->parsed()) {
            cfg.command = "growth";
            cfg.growth_samples = segments;
            cfg.growth_budget = budget;
            return finish(cfg, "growth",
                          {entry(check_sigma1a()), entry(check_sigma1b()), entry(check_sigma3b()), entry(check_ks1()),
                           entry(check_simple_two_step()), entry(check_growth_dynamics(segments, cfg.seed, budget))});
        }
        if (onestep->parsed()) {
            cfg.command = "onestep";
            Locus l = locus == "upper" ? Locus::Upper : Locus::Lower;
            return finish(cfg, "onestep_" + locus, {entry(check_one_step(l))});
        }
        if (geometry->parsed()) {
            cfg.command = "geometry";
            cfg.k_max = geo_k;
            nlohmann::json doc;
            Certificate c = check_geometry_export(geo_k, &doc);
            write_artifact(cfg.output_dir, "geometry_polygons.json", json_text(doc));
            return finish(cfg, "geometry", {entry(std::move(c))});
        }
        if (lyap->parsed()) {
            cfg.command = "lyapunov";
            cfg.lyapunov_samples = ly_samples;
            cfg.lyapunov_n = ly_n;
            LyapunovEstimate e;
            Certificate c = check_lyapunov(ly_samples, ly_n, cfg.seed, &e);
            std::ostringstream csv;
            csv.precision(17);
            csv << "sample,exponent,sigma_frequency\n";
            for (std::size_t i = 0; i < e.exponents.size(); ++i)
                csv << i << ',' << e.exponents[i] << ',' << e.hit_frequency[i] << '\n';
            write_artifact(cfg.output_dir, "lyapunov.csv", csv.str());
            return finish(cfg, "lyapunov", {entry(std::move(c))});
        }
        if (corr->parsed()) {
            cfg.command = "correlations";
            const bool induced = map == "hsigma";
            std::size_t n = corr_samples ? corr_samples : (induced ? cfg.hsigma_samples : cfg.h_samples);
            unsigned lo = corr_lo ? corr_lo : (induced ? 1 : cfg.h_lo);
            unsigned hi = corr_hi ? corr_hi : (induced ? cfg.hsigma_n : cfg.h_hi);
            if (n < 2 || lo + 2 > hi) throw std::invalid_argument("need at least 2 samples and 3 window points");
            if (induced) {
                cfg.hsigma_samples = n;
                cfg.hsigma_n = hi;
            } else {
                cfg.h_samples = n;
                cfg.h_lo = lo;
                cfg.h_hi = hi;
            }
            CorrelationSeries s;
            Certificate c = check_correlations(induced ? MapKind::HSigma : MapKind::H, n, lo, hi, cfg.seed, &s);
            write_artifact(cfg.output_dir, "correlations_" + map + ".csv", s.csv());
            int code = finish(cfg, "correlations_" + map, {entry(std::move(c), true)});
            return code;
        }
        if (tails->parsed()) {
            cfg.command = "tails";
            if (tail_mc_n > tail_n) throw std::invalid_argument("--mc-nmax must not exceed --nmax");
            cfg.tail_n = tail_n;
            cfg.tail_mc_samples = tail_mc;
            cfg.tail_mc_n = tail_mc_n;
            TailTable t;
            Certificate c = check_return_tail(tail_n, tail_mc, tail_mc_n, cfg.seed, &t);
            write_artifact(cfg.output_dir, "tails.csv", t.csv());
            return finish(cfg, "tails", {entry(std::move(c))});
        }
        if (report->parsed()) return aggregate(cfg);
    } catch (const std::invalid_argument& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return kUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kFail;
    }
    return kUsage;
}
