#pragma once

#include "otm/certificate.hpp"
#include "otm/cells.hpp"
#include "otm/statistics.hpp"

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace otm {

constexpr const char* kReportSchema = "otm-verification-report/1";

struct RunConfig {
    std::string command = "verify-all";
    unsigned k_max = 12;   // cell families and transition ranges
    unsigned n_max = 200;  // matrix family depth
    unsigned m_max = 64;   // return partition depth
    std::uint64_t seed = 7;
    std::string output_dir;

    std::size_t reconstruction_points = 100000;
    std::size_t growth_samples = 1000;
    unsigned growth_budget = 64;
    std::size_t lyapunov_samples = 1000;
    unsigned lyapunov_n = 10000;
    std::size_t hit_samples = 1000;
    unsigned hit_n = 10000;
    std::size_t hsigma_samples = 10000000;
    unsigned hsigma_n = 15;
    std::size_t h_samples = 2000000;
    unsigned h_lo = 10, h_hi = 100;
    unsigned tail_n = 40;
    std::size_t tail_mc_samples = 1000000;
    unsigned tail_mc_n = 10;

    void validate() const;  // throws std::invalid_argument on zero counts
    nlohmann::json to_json() const;
};

// ---------------------------------------------------------------- checks not owned by a single module

// H(z + e w) - H(z) = e M_j w mod 1 on random rational points, with M_j the block of the A class of z.
Certificate check_jacobian_reconstruction(std::size_t points, std::uint64_t seed);
// Exit labels of the escape cells A^k_{j,i} for k_lo <= k <= k_hi, all in {1, 4}.
Certificate check_escape_exits(int i, unsigned k_lo, unsigned k_hi);
// k^3 area of the closed-form cells at k = 100, 400 (< 5%), m^3 mu(M_m) at m = 30, 60 (< 15%).
Certificate check_cell_scaling(const ReturnPartition& rp);
// Conditional measure exponents -2 +- tol for the given rows, both loci.
Certificate check_conditional_slopes(const std::vector<unsigned>& ms, double tol);
// Gradient audit on the singular lines of the return partition.
Certificate check_singularity_gradients(const ReturnPartition& rp);
// Closed-form cell areas against the clipped polygons, and the exported geometry itself.
Certificate check_geometry_export(unsigned k_max, nlohmann::json* out = nullptr, const ReturnPartition* rp = nullptr);

Certificate check_lyapunov(std::size_t samples, unsigned n, std::uint64_t seed, LyapunovEstimate* out = nullptr);
Certificate check_hit_frequency(std::size_t samples, unsigned n, std::uint64_t seed);
// Soft: a failed fit is a warning.
Certificate check_correlations(MapKind map, std::size_t samples, unsigned lo, unsigned hi, std::uint64_t seed,
                               CorrelationSeries* out = nullptr);
Certificate check_return_tail(unsigned n_max, std::size_t mc_samples, unsigned mc_n, std::uint64_t seed,
                              TailTable* out = nullptr);
Certificate check_growth_dynamics(std::size_t samples, std::uint64_t seed, unsigned budget);

// ---------------------------------------------------------------- report

struct ReportEntry {
    Certificate cert;
    bool soft = false;
    double seconds = 0;  // kept out of the report JSON
    std::string status() const { return cert.pass ? "PASS" : (soft ? "WARN" : "FAIL"); }
};

struct VerificationReport {
    RunConfig config;
    std::vector<ReportEntry> entries;
    // series written next to the report: file name -> contents
    std::vector<std::pair<std::string, std::string>> artifacts;

    bool pass() const;  // every hard entry passes
    std::size_t warnings() const;
    nlohmann::json to_json() const;
    nlohmann::json timing_json() const;
};

struct NamedCheck {
    std::string id;
    bool soft = false;
    std::function<Certificate(VerificationReport&)> run;
};

// Every check of verify-all, in report order.
std::vector<NamedCheck> all_checks(const RunConfig& cfg);
// Runs the checks; progress(entry) is called after each one.
VerificationReport verify_all(const RunConfig& cfg, const std::function<void(const ReportEntry&)>& progress = {});

// Writes text to dir/name, creating dir.
void write_artifact(const std::string& dir, const std::string& name, const std::string& text);
// Canonical JSON text of a document: two-space indent and a trailing newline.
std::string json_text(const nlohmann::json& j);

}  // namespace otm
