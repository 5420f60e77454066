#include "otm/report.hpp"

#include "otm/cones.hpp"
#include "otm/growth.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <memory>
#include <random>
#include <set>

namespace otm {

namespace {

nlohmann::json number(double v) { return nlohmann::json(v); }

double relative_variation(double a, double b) { return std::abs(a - b) / std::max(std::abs(a), std::abs(b)); }

}  // namespace

void RunConfig::validate() const
{
    const std::vector<std::pair<const char*, std::size_t>> counts = {
        {"k_max", k_max},
        {"n_max", n_max},
        {"m_max", m_max},
        {"reconstruction_points", reconstruction_points},
        {"growth_samples", growth_samples},
        {"growth_budget", growth_budget},
        {"lyapunov_samples", lyapunov_samples},
        {"lyapunov_n", lyapunov_n},
        {"hit_samples", hit_samples},
        {"hit_n", hit_n},
        {"hsigma_samples", hsigma_samples},
        {"hsigma_n", hsigma_n},
        {"h_samples", h_samples},
        {"tail_n", tail_n},
        {"tail_mc_samples", tail_mc_samples}};
    for (const auto& [name, v] : counts)
        if (v == 0) throw std::invalid_argument(std::string(name) + " must be positive");
    if (h_lo == 0 || h_lo + 2 > h_hi) throw std::invalid_argument("correlation window must have at least 3 points");
    if (tail_n < 17) throw std::invalid_argument("tail_n must be at least 17");
    if (tail_mc_n > tail_n) throw std::invalid_argument("tail_mc_n must not exceed tail_n");
    if (m_max < 60) throw std::invalid_argument("m_max must be at least 60");
    if (tail_n > m_max) throw std::invalid_argument("tail_n must not exceed m_max");
}

nlohmann::json RunConfig::to_json() const
{
    return {{"command", command},
            {"k_max", k_max},
            {"n_max", n_max},
            {"m_max", m_max},
            {"seed", seed},
            {"reconstruction_points", reconstruction_points},
            {"growth_samples", growth_samples},
            {"growth_budget", growth_budget},
            {"lyapunov_samples", lyapunov_samples},
            {"lyapunov_n", lyapunov_n},
            {"hit_samples", hit_samples},
            {"hit_n", hit_n},
            {"hsigma_samples", hsigma_samples},
            {"hsigma_n", hsigma_n},
            {"h_samples", h_samples},
            {"h_window", {h_lo, h_hi}},
            {"tail_n", tail_n},
            {"tail_mc_samples", tail_mc_samples},
            {"tail_mc_n", tail_mc_n}};
}

// ---------------------------------------------------------------- geometry and cells

Certificate check_jacobian_reconstruction(std::size_t points, std::uint64_t seed)
{
    Certificate c("jacobian-reconstruction", "H is affine with Jacobian M_j on each A_j");
    std::mt19937_64 rng(seed);
    const long den = 999983;  // prime, so x and y are never dyadic
    std::uniform_int_distribution<long> num(1, den - 1), dir(-9, 9);
    const Rat eps = rat(1, 1000003);
    std::size_t straddling = 0;
    std::array<std::size_t, 4> per_class{};
    for (std::size_t i = 0; i < points; ++i) {
        TorusPoint z(rat(num(rng), den), rat(num(rng), den));
        Vec2 w(dir(rng), dir(rng));
        if (w == Vec2(0, 0)) w = Vec2(1, 1);
        int j = label_index(classify(z, PartitionSide::A));
        if (!c.expect(j != 0, "sample off the singularity set", {{"z", z.str()}})) continue;
        ++per_class[j - 1];
        TorusPoint z2(z.vec() + eps * w);
        if (label_index(classify(z2, PartitionSide::A)) != j) {
            ++straddling;
            continue;
        }
        TorusPoint hz = apply_H(z);
        Vec2 delta = apply_H(z2).vec() - hz.vec() - eps * (jacobian_block(j) * w);
        c.expect(frac(delta.x) == 0 && frac(delta.y) == 0, "H(z + e w) - H(z) = e M_j w mod 1",
                 {{"z", z.str()}, {"j", j}});
        c.expect(jacobian(z) == jacobian_block(j) && jacobian_block(j).det() == 1, "DH_z = M_j, det 1",
                 {{"z", z.str()}});
        c.expect(apply_H_inv(hz) == z, "H^-1 H z = z", {{"z", z.str()}});
    }
    c.set("points", nlohmann::json(points));
    c.set("straddling", nlohmann::json(straddling));
    c.set("per_class", nlohmann::json(per_class));
    c.expect(straddling * 100 < points + 100, "few perturbations leave the class");
    return c;
}

Certificate check_escape_exits(int i, unsigned k_lo, unsigned k_hi)
{
    Certificate c("escape-exits-A" + std::to_string(i),
                  "Exit labels of long escapes from A_" + std::to_string(i) + " are 1 or 4");
    EscapePartition p = escape_partition(i, k_hi);
    nlohmann::json labels = nlohmann::json::object();
    for (unsigned k = k_lo; k <= k_hi; ++k) {
        std::set<int> seen;
        for (const auto& cell : p.cells) {
            if (cell.k != k) continue;
            seen.insert(cell.j);
            c.expect(cell.j == 1 || cell.j == 4, "exit label in {1, 4}", {{"k", k}, {"j", cell.j}});
        }
        labels[std::to_string(k)] = std::vector<int>(seen.begin(), seen.end());
    }
    c.expect(p.total_area() == rat(1, 4), "cells and trapped set partition A_i");
    c.set("exit_labels", std::move(labels));
    c.set("trapped_area", area(p.trapped));
    return c;
}

Certificate check_cell_scaling(const ReturnPartition& rp)
{
    Certificate c("cell-scaling", "Cell measures scale like k^-3");
    for (Locus l : {Locus::Upper, Locus::Lower}) {
        Rat a = cell_area_closed_form(l, 100) * Rat(100 * 100 * 100);
        Rat b = cell_area_closed_form(l, 400) * Rat(400 * 400 * 400);
        double v = relative_variation(to_double(a), to_double(b));
        c.set("k3_area_100_" + locus_name(l), a);
        c.set("k3_area_400_" + locus_name(l), b);
        c.set("k3_variation_" + locus_name(l), number(v));
        c.expect(v < 0.05, "k^3 area varies < 5% between k = 100 and 400", {{"locus", locus_name(l)}});
    }
    c.expect(rp.cells.size() > 60, "partition reaches m = 60");
    if (rp.cells.size() > 60) {
        Rat a = rp.cells[30].area * Rat(30 * 30 * 30), b = rp.cells[60].area * Rat(60 * 60 * 60);
        double v = relative_variation(to_double(a), to_double(b));
        c.set("m3_mu_30", a);
        c.set("m3_mu_60", b);
        c.set("m3_variation", number(v));
        c.expect(v < 0.15, "m^3 mu(M_m) varies < 15% between m = 30 and 60");
    }
    return c;
}

Certificate check_conditional_slopes(const std::vector<unsigned>& ms, double tol)
{
    Certificate c("conditional-measure", "Conditional transition measures decay like k^-2");
    nlohmann::json rows = nlohmann::json::array();
    for (Locus l : {Locus::Upper, Locus::Lower})
        for (const auto& row : conditional_measure_table(ms, l)) {
            rows.push_back({{"locus", locus_name(l)},
                            {"m", row.m},
                            {"slope", row.slope},
                            {"row_sum", to_string(row.row_sum)},
                            {"fit", {row.fit_lo, row.fit_hi}}});
            c.expect(std::abs(row.slope + 2) <= tol, "exponent within -2 +- tol",
                     {{"locus", locus_name(l)}, {"m", row.m}, {"slope", row.slope}});
            c.expect(row.row_sum > 0 && row.row_sum <= 1, "row measure in (0, 1]", {{"m", row.m}});
        }
    c.set("tolerance", number(tol));
    c.set("rows", std::move(rows));
    return c;
}

Certificate check_singularity_gradients(const ReturnPartition& rp)
{
    std::size_t skipped = 0;
    auto lines = singularity_inventory(rp, &skipped);
    Certificate c = singularity_gradient_audit(lines);
    c.set("inventory_depth", nlohmann::json(rp.cells.size() - 1));
    c.set("edges_next_to_unresolved", nlohmann::json(skipped));
    c.expect(!lines.empty(), "inventory is not empty");
    return c;
}

Certificate check_geometry_export(unsigned k_max, nlohmann::json* out, const ReturnPartition* rp_in)
{
    Certificate c("geometry-export", "Exported cell areas match the shoelace area of the closed-form corners");
    const SigmaGeometry& g = sigma_geometry();
    nlohmann::json doc;
    nlohmann::json sig = nlohmann::json::array();
    for (int j = 0; j < 4; ++j)
        sig.push_back({{"j", j + 1}, {"area", to_string(area(g.sigma[j]))}, {"polygons", to_json(g.sigma[j])}});
    doc["sigma"] = std::move(sig);
    c.expect(g.area() == rat(3, 5), "area of sigma is 3/5");

    nlohmann::json fams = nlohmann::json::array();
    for (Locus l : {Locus::Upper, Locus::Lower}) {
        const unsigned k0 = locus_k_min(l);
        CellFamilyGeometry fg = cell_family_geometry(l, std::max(k_max, k0) + 2);
        nlohmann::json cells = nlohmann::json::array();
        for (unsigned k = k0; k <= k_max; ++k) {
            auto r = cell_corners(l, k);
            Rat shoelace = abs(signed_area(std::vector<Vec2>(r.begin(), r.end())));
            Region cell = fg.cell(k);
            Rat clipped = area(cell);
            c.expect(clipped == shoelace, "clipped cell area equals shoelace area",
                     {{"locus", locus_name(l)}, {"k", k}});
            cells.push_back({{"k", k},
                             {"area", to_string(clipped)},
                             {"closed_form_area", to_string(shoelace)},
                             {"corners", nlohmann::json::array({to_json(r[0]), to_json(r[1]), to_json(r[2]), to_json(r[3])})},
                             {"polygons", to_json(cell)},
                             {"image", to_json(fg.image(k))}});
        }
        fams.push_back({{"locus", locus_name(l)}, {"k_min", k0}, {"cells", std::move(cells)}});
    }
    doc["cell_families"] = std::move(fams);
    if (k_max < 5) c.expect(false, "k_max reaches both families (k_max >= 5)");

    ReturnPartition local;
    if (!rp_in) local = return_partition(std::max(k_max, 1u));
    const ReturnPartition& rp = rp_in ? *rp_in : local;
    nlohmann::json mc = nlohmann::json::array();
    Rat total = 0;
    for (const auto& cell : rp.cells) {
        if (cell.m > k_max) break;
        Rat sum = 0;
        for (const auto& p : cell.pieces) sum += p.poly.area();
        c.expect(sum == cell.area, "m-cell area is the sum of its pieces", {{"m", cell.m}});
        total += cell.area;
        nlohmann::json pieces = nlohmann::json::array();
        for (const auto& p : cell.pieces)
            pieces.push_back({{"cell", p.cell}, {"source", p.source}, {"target", p.target}, {"polygon", to_json(p.poly)}});
        mc.push_back({{"m", cell.m}, {"return_time", cell.m + 1}, {"area", to_string(cell.area)}, {"pieces", std::move(pieces)}});
    }
    c.expect(total <= g.area(), "m-cells fit inside sigma");
    doc["m_cells"] = std::move(mc);
    doc["k_max"] = k_max;
    c.set("k_max", nlohmann::json(k_max));
    if (out) *out = std::move(doc);
    return c;
}

// ---------------------------------------------------------------- statistics

Certificate check_lyapunov(std::size_t samples, unsigned n, std::uint64_t seed, LyapunovEstimate* out)
{
    Certificate c("lyapunov", "Lyapunov exponents are positive");
    LyapunovEstimate e = lyapunov(samples, n, seed);
    for (std::size_t i = 0; i < e.exponents.size(); ++i)
        c.expect(e.exponents[i] > 0, "exponent > 0", {{"sample", i}, {"exponent", e.exponents[i]}});
    c.expect(e.max_start_difference <= 10.0 / n, "start vectors (0,1), (13,21) agree within 10/n");
    c.expect(e.below_block_bound == 0, "exponent >= alpha_z log(79/21) / 8");
    TorusPoint p(rat(1, 4), rat(1, 4));
    c.expect(apply_H_n(p, 2) == p, "(1/4, 1/4) has period 2");
    double chi = lyapunov_at(p, n), exact = period_two_exponent();
    c.expect(std::abs(chi - exact) <= 1e-3, "period-2 estimate within 1e-3 of ln(9 + 4 sqrt 5) / 2");
    c.set("estimate", e.to_json());
    c.set("period_two_estimate", number(chi));
    c.set("period_two_exact", number(exact));
    if (out) *out = std::move(e);
    return c;
}

Certificate check_hit_frequency(std::size_t samples, unsigned n, std::uint64_t seed)
{
    Certificate c("sigma-hit-frequency", "Orbits return to sigma with frequency area(sigma)");
    HitFrequency h = sigma_hit_frequency(samples, n, seed);
    c.expect(h.monotone, "r(z; n, sigma) nondecreasing in n");
    c.expect(std::abs(h.mean - h.area) <= 3 * h.stderr_, "mean frequency within 3 stderr of area(sigma)");
    double p2 = sigma_hit_frequency_at(TorusPoint(rat(1, 4), rat(1, 4)), 100);
    c.expect(p2 == 1.0, "period-2 orbit stays in sigma");
    c.set("estimate", h.to_json());
    return c;
}

Certificate check_correlations(MapKind map, std::size_t samples, unsigned lo, unsigned hi, std::uint64_t seed,
                               CorrelationSeries* out)
{
    const bool induced = map == MapKind::HSigma;
    Certificate c(induced ? "correlations-hsigma" : "correlations-h",
                  induced ? "Exponential decay of correlations for the return map"
                          : "Polynomial decay of correlations for H");
    auto o = ObservableSpec::cos_x();
    CorrelationSeries s = correlations(map, o, o, hi, samples, seed, lo, hi);
    c.expect(!s.insufficient_signal, "at least 3 points with |C_n| > 3 stderr in the window");
    if (!s.insufficient_signal) {
        if (induced) {
            c.expect(s.fit.slope < -0.1, "log-linear slope < -0.1", s.fit.to_json());
            c.expect(s.fit.r2 >= 0.8, "log-linear fit R^2 >= 0.8", s.fit.to_json());
        } else {
            c.expect(s.fit.slope >= -2.0 && s.fit.slope <= -0.5, "log-log slope in [-2, -0.5]", s.fit.to_json());
        }
    }
    c.set("series", s.to_json());
    if (out) *out = std::move(s);
    return c;
}

Certificate check_return_tail(unsigned n_max, std::size_t mc_samples, unsigned mc_n, std::uint64_t seed, TailTable* out)
{
    Certificate c("return-tail", "Return-time tail mu(R > n) decays like n^-2");
    TailTable t = return_tail(n_max, mc_samples, mc_n, seed, 15, std::min(40u, n_max));
    c.expect(t.rows[0].exact == sigma_geometry().area(), "tail(0) = area(sigma)");
    c.expect(t.exponent >= 1.6 && t.exponent <= 2.4, "tail exponent in [1.6, 2.4]", t.fit.to_json());
    for (unsigned n = 0; n <= mc_n; ++n) {
        const auto& r = t.rows[n];
        c.expect(std::abs(r.mc - to_double(r.exact)) <= 3 * r.se, "Monte-Carlo tail within 3 stderr",
                 {{"n", n}, {"mc", r.mc}, {"exact", to_string(r.exact)}, {"stderr", r.se}});
    }
    c.set("table", t.to_json());
    if (out) *out = std::move(t);
    return c;
}

Certificate check_growth_dynamics(std::size_t samples, std::uint64_t seed, unsigned budget)
{
    Certificate c("growth-dynamics", "Aligned segments reach a non-simple intersection or grow");
    try {
        GrowthReport r = verify_growth_dynamics(samples, seed, budget);
        // both can hold at the same iterate; a segment with neither throws BudgetExhausted
        std::size_t seen = 0;
        for (const auto& [k, n] : r.iteration_histogram) seen += n;
        c.expect(seen == r.samples && r.c1 + r.c2 >= r.samples, "every segment reaches (C1) or (C2)");
        c.expect(r.c2 == 0 || r.min_factor > 1, "every (C2) factor > 1", {{"min_factor", to_string(r.min_factor)}});
        c.expect(r.max_iterations <= budget, "within the iteration budget");
        c.set("budget", nlohmann::json(budget));
        c.set("report", r.to_json());
    } catch (const BudgetExhausted& e) {
        c.expect(false, "iteration budget exhausted",
                 {{"p", to_json(e.witness().p)}, {"q", to_json(e.witness().q)}});
    }
    return c;
}

// ---------------------------------------------------------------- report

bool VerificationReport::pass() const
{
    for (const auto& e : entries)
        if (!e.cert.pass && !e.soft) return false;
    return true;
}

std::size_t VerificationReport::warnings() const
{
    std::size_t n = 0;
    for (const auto& e : entries)
        if (!e.cert.pass && e.soft) ++n;
    return n;
}

nlohmann::json VerificationReport::to_json() const
{
    nlohmann::json checks = nlohmann::json::array();
    for (const auto& e : entries) {
        nlohmann::json j = e.cert.to_json();
        j["status"] = e.status();
        j["soft"] = e.soft;
        checks.push_back(std::move(j));
    }
    return {{"schema", kReportSchema},
            {"config", config.to_json()},
            {"status", pass() ? "PASS" : "FAIL"},
            {"warnings", warnings()},
            {"checks", std::move(checks)}};
}

nlohmann::json VerificationReport::timing_json() const
{
    nlohmann::json t = nlohmann::json::object();
    for (const auto& e : entries) t[e.cert.id] = e.seconds;
    return t;
}

std::vector<NamedCheck> all_checks(const RunConfig& cfg)
{
    // the return partition is shared by several checks
    auto rp = std::make_shared<ReturnPartition>();
    auto partition = [rp, cfg]() -> const ReturnPartition& {
        if (rp->cells.empty()) *rp = return_partition(cfg.m_max);
        return *rp;
    };
    std::vector<NamedCheck> v;
    auto add = [&](std::string id, std::function<Certificate(VerificationReport&)> f, bool soft = false) {
        v.push_back({std::move(id), soft, std::move(f)});
    };
    add("family-expansion", [cfg](VerificationReport&) { return table2_verify(cfg.n_max); });
    add("expanding-cone", [cfg](VerificationReport&) { return verify_expanding_cone(cfg.n_max); });
    add("sigma-transitions", [cfg](VerificationReport&) { return verify_transition_table(cfg.n_max); });
    add("sigma-geometry", [](VerificationReport&) { return verify_sigma(sigma_geometry()); });
    add("jacobian-reconstruction",
        [cfg](VerificationReport&) { return check_jacobian_reconstruction(cfg.reconstruction_points, cfg.seed); });
    add("escape-exits-A3", [](VerificationReport&) { return check_escape_exits(3, 4, 20); });
    add("escape-exits-A2", [](VerificationReport&) { return check_escape_exits(2, 4, 20); });
    add("return-partition", [partition, cfg](VerificationReport&) { return verify_return_partition(partition(), cfg.m_max); });
    add("singularity-gradients", [partition](VerificationReport&) { return check_singularity_gradients(partition()); });
    add("cell-corners-upper", [cfg](VerificationReport&) { return verify_cell_corners(Locus::Upper, cfg.k_max); });
    add("cell-corners-lower", [cfg](VerificationReport&) { return verify_cell_corners(Locus::Lower, cfg.k_max); });
    add("cell-scaling", [partition](VerificationReport&) { return check_cell_scaling(partition()); });
    add("transition-range-upper", [cfg](VerificationReport&) { return verify_transition_ranges(Locus::Upper, cfg.k_max); });
    add("transition-range-lower", [cfg](VerificationReport&) { return verify_transition_ranges(Locus::Lower, cfg.k_max); });
    add("conditional-measure", [](VerificationReport&) { return check_conditional_slopes({20, 40}, 0.15); });
    add("sigma1a", [](VerificationReport&) { return check_sigma1a(); });
    add("sigma1b", [](VerificationReport&) { return check_sigma1b(); });
    add("sigma3b", [](VerificationReport&) { return check_sigma3b(); });
    add("line-lengths", [](VerificationReport&) { return check_ks1(); });
    add("simple_two_step", [](VerificationReport&) { return check_simple_two_step(); });
    add("one_step_upper", [](VerificationReport&) { return check_one_step(Locus::Upper); });
    add("one_step_lower", [](VerificationReport&) { return check_one_step(Locus::Lower); });
    add("growth-dynamics",
        [cfg](VerificationReport&) { return check_growth_dynamics(cfg.growth_samples, cfg.seed, cfg.growth_budget); });
    add("lyapunov", [cfg](VerificationReport&) { return check_lyapunov(cfg.lyapunov_samples, cfg.lyapunov_n, cfg.seed); });
    add("sigma-hit-frequency", [cfg](VerificationReport&) { return check_hit_frequency(cfg.hit_samples, cfg.hit_n, cfg.seed); });
    add("return-tail", [cfg](VerificationReport& r) {
        TailTable t;
        Certificate c = check_return_tail(cfg.tail_n, cfg.tail_mc_samples, cfg.tail_mc_n, cfg.seed, &t);
        r.artifacts.emplace_back("tails.csv", t.csv());
        return c;
    });
    add("correlations-hsigma", [cfg](VerificationReport& r) {
        CorrelationSeries s;
        Certificate c = check_correlations(MapKind::HSigma, cfg.hsigma_samples, 1, cfg.hsigma_n, cfg.seed, &s);
        r.artifacts.emplace_back("correlations_hsigma.csv", s.csv());
        return c;
    }, true);
    add("correlations-h", [cfg](VerificationReport& r) {
        CorrelationSeries s;
        Certificate c = check_correlations(MapKind::H, cfg.h_samples, cfg.h_lo, cfg.h_hi, cfg.seed, &s);
        r.artifacts.emplace_back("correlations_h.csv", s.csv());
        return c;
    }, true);
    return v;
}

VerificationReport verify_all(const RunConfig& cfg, const std::function<void(const ReportEntry&)>& progress)
{
    cfg.validate();
    VerificationReport rep;
    rep.config = cfg;
    for (const auto& check : all_checks(cfg)) {
        auto t0 = std::chrono::steady_clock::now();
        ReportEntry e{check.run(rep), check.soft, 0};
        e.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        rep.entries.push_back(std::move(e));
        if (progress) progress(rep.entries.back());
    }
    return rep;
}

void write_artifact(const std::string& dir, const std::string& name, const std::string& text)
{
    std::filesystem::create_directories(dir);
    std::ofstream f(std::filesystem::path(dir) / name, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + dir + "/" + name);
    f << text;
}

std::string json_text(const nlohmann::json& j) { return j.dump(2) + "\n"; }

}  // namespace otm
