#include "otm/statistics.hpp"

#include "otm/return_map.hpp"

#include <boost/math/quadrature/gauss.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <functional>
#include <numbers>
#include <sstream>
#include <thread>

namespace otm {

namespace {

using u64 = std::uint64_t;
constexpr u64 kHalf = (kLatticeQ + 1) / 2;  // first numerator above 1/2

u64 tent_num(u64 u) { return u < kHalf ? 2 * u : 2 * (kLatticeQ - u); }
u64 add_mod(u64 a, u64 b)
{
    u64 s = a + b;
    return s >= kLatticeQ ? s - kLatticeQ : s;
}
u64 sub_mod(u64 a, u64 b) { return a >= b ? a - b : a + kLatticeQ - b; }

// Jacobian blocks as doubles, row major.
constexpr double kBlocks[4][4] = {{1, 2, 2, 5}, {1, 2, -2, -3}, {1, -2, 2, -3}, {1, -2, -2, 5}};

unsigned g_threads = 0;

// Runs body(block) for block = 0..blocks-1 on the worker pool.
void run_blocks(std::size_t blocks, const std::function<void(std::size_t)>& body)
{
    unsigned workers = std::max(1u, std::min<unsigned>(statistics_threads(), unsigned(blocks)));
    if (workers == 1) {
        for (std::size_t b = 0; b < blocks; ++b) body(b);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(workers);
    for (unsigned w = 0; w < workers; ++w)
        pool.emplace_back([&, w] {
            try {
                for (std::size_t b; (b = next.fetch_add(1)) < blocks;) body(b);
            } catch (...) {
                errors[w] = std::current_exception();
            }
        });
    for (auto& t : pool) t.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

std::mt19937_64 block_rng(u64 seed, std::size_t block)
{
    std::seed_seq seq{u64(seed & 0xffffffffu), u64(seed >> 32), u64(block & 0xffffffffu), u64(block >> 32)};
    return std::mt19937_64(seq);
}

// Fixed-tree pairwise summation.
double pairwise_sum(const double* v, std::size_t n)
{
    if (n == 0) return 0;
    if (n == 1) return v[0];
    std::size_t h = n / 2;
    return pairwise_sum(v, h) + pairwise_sum(v + h, n - h);
}
double pairwise_sum(const std::vector<double>& v) { return pairwise_sum(v.data(), v.size()); }

std::size_t block_count(std::size_t samples, std::size_t per_block) { return (samples + per_block - 1) / per_block; }

std::size_t block_size(std::size_t samples, std::size_t per_block, std::size_t b)
{
    return std::min(per_block, samples - b * per_block);
}

// Draws a lattice point of sigma whose backward and forward orbits are regular enough to build a walker.
OrbitWalker sample_walker(std::mt19937_64& rng, bool in_sigma, std::size_t& rejected)
{
    for (;;) {
        try {
            OrbitWalker w(sample_lattice_point(rng));
            if (!in_sigma || w.sigma() != 0) return w;
        } catch (const SingularOrbit&) {
            ++rejected;
        }
    }
}

double to_d(const Rat& r) { return to_double(r); }

}  // namespace

// ---------------------------------------------------------------- lattice

TorusPoint LatticePoint::exact() const
{
    Rat q(mpz_class(std::to_string(kLatticeQ)));
    return TorusPoint(Rat(mpz_class(std::to_string(x))) / q, Rat(mpz_class(std::to_string(y))) / q);
}

int lattice_a_class(const LatticePoint& z)
{
    u64 x1 = add_mod(z.x, tent_num(z.y));
    if (x1 == 0 || z.y == 0) throw SingularOrbit("orbit meets the singularity set");
    return 1 + (x1 >= kHalf ? 1 : 0) + (z.y >= kHalf ? 2 : 0);
}

int lattice_step(LatticePoint& z)
{
    u64 x1 = add_mod(z.x, tent_num(z.y));
    if (x1 == 0 || z.y == 0) throw SingularOrbit("orbit meets the singularity set");
    int j = 1 + (x1 >= kHalf ? 1 : 0) + (z.y >= kHalf ? 2 : 0);
    z.y = add_mod(z.y, tent_num(x1));
    z.x = x1;
    return j;
}

LatticePoint lattice_inverse(const LatticePoint& z)
{
    LatticePoint w;
    w.y = sub_mod(z.y, tent_num(z.x));
    w.x = sub_mod(z.x, tent_num(w.y));
    return w;
}

LatticePoint sample_lattice_point(std::mt19937_64& rng)
{
    auto draw = [&] {
        for (;;) {
            u64 v = rng() >> 3;
            if (v < kLatticeQ) return v;
        }
    };
    LatticePoint z;
    z.x = draw();
    z.y = draw();
    return z;
}

OrbitWalker::OrbitWalker(const LatticePoint& z) : z_(z)
{
    LatticePoint w1 = lattice_inverse(z);
    prev1_ = lattice_a_class(w1);
    prev2_ = lattice_a_class(lattice_inverse(w1));
}

int OrbitWalker::sigma() const
{
    if (prev1_ == 1 || prev1_ == 4) return prev1_;
    if (prev1_ == 2 && prev2_ == 3) return 2;
    if (prev1_ == 3 && prev2_ == 2) return 3;
    return 0;
}

int OrbitWalker::step()
{
    int j = lattice_step(z_);
    prev2_ = prev1_;
    prev1_ = j;
    return j;
}

unsigned OrbitWalker::step_sigma(unsigned cap)
{
    for (unsigned r = 1; r <= cap; ++r) {
        step();
        if (sigma() != 0) return r;
    }
    throw SingularOrbit("no return to sigma within the cap");
}

// ---------------------------------------------------------------- observables

ObservableSpec ObservableSpec::sigma_indicator(int j)
{
    if (j < 0 || j > 4) throw std::invalid_argument("sigma region must be 0..4");
    ObservableSpec o;
    o.kind = Kind::Indicator;
    o.region = j;
    return o;
}

double ObservableSpec::eval(const LatticePoint& z, int sigma) const
{
    if (kind == Kind::Indicator) return (region == 0 ? sigma != 0 : sigma == region) ? 1.0 : 0.0;
    // phase numerator (k x + l y) mod q, exact
    auto term = [](long c, u64 v) -> unsigned __int128 {
        long m = c % long(kLatticeQ);
        if (m < 0) m += long(kLatticeQ);
        return (unsigned __int128)u64(m) * v % kLatticeQ;
    };
    u64 p = u64((term(k, z.x) + term(l, z.y)) % kLatticeQ);
    double phase = 2 * std::numbers::pi * (double(p) / double(kLatticeQ));
    return sine ? std::sin(phase) : std::cos(phase);
}

std::string ObservableSpec::name() const
{
    if (kind == Kind::Indicator) return region == 0 ? "1_sigma" : "1_sigma" + std::to_string(region);
    std::ostringstream s;
    s << (sine ? "sin" : "cos") << "(2pi(" << k << "x+" << l << "y))";
    return s.str();
}

double torus_mean(const ObservableSpec& o)
{
    if (o.kind == ObservableSpec::Kind::Indicator) {
        const auto& g = sigma_geometry();
        return to_d(o.region == 0 ? g.area() : area(g.sigma[o.region - 1]));
    }
    return (o.k == 0 && o.l == 0 && !o.sine) ? 1.0 : 0.0;
}

namespace {

// Integral of the trig observable over a convex polygon: exact in y, Gauss-Legendre in x on each vertical slab.
double polygon_trig_integral(const ObservableSpec& o, const PolygonQ& poly)
{
    const auto& vs = poly.vertices();
    std::vector<double> px, py;
    for (const auto& v : vs) {
        px.push_back(to_d(v.x));
        py.push_back(to_d(v.y));
    }
    std::vector<double> xs = px;
    std::sort(xs.begin(), xs.end());
    xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
    const double tau = 2 * std::numbers::pi;

    auto y_range = [&](double x) {
        double lo = 1e300, hi = -1e300;
        for (std::size_t i = 0; i < px.size(); ++i) {
            std::size_t j = (i + 1) % px.size();
            double x0 = px[i], x1 = px[j];
            if (x0 == x1) continue;
            if (x < std::min(x0, x1) || x > std::max(x0, x1)) continue;
            double y = py[i] + (py[j] - py[i]) * (x - x0) / (x1 - x0);
            lo = std::min(lo, y);
            hi = std::max(hi, y);
        }
        return std::pair{lo, hi};
    };
    auto inner = [&](double x) {
        auto [lo, hi] = y_range(x);
        if (hi <= lo) return 0.0;
        double a = tau * o.k * x;
        if (o.l == 0) return (o.sine ? std::sin(a) : std::cos(a)) * (hi - lo);
        double w = tau * o.l;
        if (o.sine) return -(std::cos(a + w * hi) - std::cos(a + w * lo)) / w;
        return (std::sin(a + w * hi) - std::sin(a + w * lo)) / w;
    };
    double total = 0;
    for (std::size_t i = 0; i + 1 < xs.size(); ++i)
        total += boost::math::quadrature::gauss<double, 30>::integrate(inner, xs[i], xs[i + 1]);
    return total;
}

}  // namespace

double sigma_mean(const ObservableSpec& o)
{
    const auto& g = sigma_geometry();
    double a = to_d(g.area());
    if (o.kind == ObservableSpec::Kind::Indicator)
        return o.region == 0 ? 1.0 : to_d(area(g.sigma[o.region - 1])) / a;
    double s = 0;
    for (const auto& r : g.sigma)
        for (const auto& p : r) s += polygon_trig_integral(o, p);
    return s / a;
}

// ---------------------------------------------------------------- fits

nlohmann::json LinearFit::to_json() const
{
    return {{"slope", slope},
            {"intercept", intercept},
            {"r2", r2},
            {"slope_stderr", slope_se},
            {"slope_ci95", {slope - 1.96 * slope_se, slope + 1.96 * slope_se}},
            {"window", {lo, hi}},
            {"points", points}};
}

LinearFit fit_line(const std::vector<double>& x, const std::vector<double>& y)
{
    if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("fit needs at least two points");
    const double n = double(x.size());
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0, sxy = 0, syy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
        syy += (y[i] - my) * (y[i] - my);
    }
    if (sxx == 0) throw std::invalid_argument("fit needs distinct abscissae");
    LinearFit f;
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    double sse = std::max(0.0, syy - f.slope * sxy);
    f.r2 = syy > 0 ? 1 - sse / syy : 1;
    f.slope_se = x.size() > 2 ? std::sqrt(sse / (n - 2) / sxx) : 0;
    f.points = x.size();
    return f;
}

// ---------------------------------------------------------------- Lyapunov exponents

nlohmann::json LyapunovEstimate::to_json() const
{
    return {{"n", n},
            {"samples", exponents.size()},
            {"blocks", blocks},
            {"mean", mean},
            {"min", min},
            {"max", max},
            {"max_start_difference", max_start_difference},
            {"resampled", resampled},
            {"below_block_bound", below_block_bound}};
}

LyapunovEstimate lyapunov(std::size_t samples, unsigned n, std::uint64_t seed)
{
    if (samples == 0 || n == 0) throw std::invalid_argument("lyapunov needs samples and steps");
    constexpr std::size_t per_block = 16;
    const double log_k = std::log(79.0 / 21.0);
    LyapunovEstimate e;
    e.n = n;
    e.exponents.assign(samples, 0);
    e.hit_frequency.assign(samples, 0);
    std::vector<double> diff(samples, 0);
    const std::size_t blocks = block_count(samples, per_block);
    std::vector<std::size_t> rejected(blocks, 0);
    e.blocks = blocks;

    run_blocks(blocks, [&](std::size_t b) {
        auto rng = block_rng(seed, b);
        for (std::size_t i = b * per_block, end = i + block_size(samples, per_block, b); i < end;) {
            try {
                OrbitWalker w = sample_walker(rng, false, rejected[b]);
                double v[2] = {0, 1}, u[2] = {13, 21};
                double lv = 0, lu = std::log(std::hypot(13.0, 21.0));
                const double lu0 = lu;
                std::size_t hits = 0;
                for (unsigned s = 0; s < n; ++s) {
                    if (w.sigma() != 0) ++hits;
                    const double* m = kBlocks[w.step() - 1];
                    for (double* t : {v, u}) {
                        double a = m[0] * t[0] + m[1] * t[1], c = m[2] * t[0] + m[3] * t[1];
                        double r = std::hypot(a, c);
                        t[0] = a / r;
                        t[1] = c / r;
                        (t == v ? lv : lu) += std::log(r);
                    }
                }
                e.exponents[i] = lv / n;
                diff[i] = std::abs(lv - (lu - lu0)) / n;
                e.hit_frequency[i] = double(hits) / n;
                ++i;
            } catch (const SingularOrbit&) {
                ++rejected[b];
            }
        }
    });

    for (auto r : rejected) e.resampled += r;
    e.mean = pairwise_sum(e.exponents) / double(samples);
    e.min = *std::min_element(e.exponents.begin(), e.exponents.end());
    e.max = *std::max_element(e.exponents.begin(), e.exponents.end());
    e.max_start_difference = *std::max_element(diff.begin(), diff.end());
    for (std::size_t i = 0; i < samples; ++i)
        if (e.exponents[i] < e.hit_frequency[i] * log_k / 8) ++e.below_block_bound;
    return e;
}

double lyapunov_at(const TorusPoint& z0, unsigned n)
{
    if (n == 0) throw std::invalid_argument("lyapunov needs steps");
    TorusPoint z = z0;
    double v[2] = {0, 1}, lv = 0;
    for (unsigned s = 0; s < n; ++s) {
        int j = label_index(classify(z, PartitionSide::A));
        if (j == 0) throw SingularOrbit("orbit meets the singularity set at " + z.str());
        const double* m = kBlocks[j - 1];
        double a = m[0] * v[0] + m[1] * v[1], c = m[2] * v[0] + m[3] * v[1];
        double r = std::hypot(a, c);
        v[0] = a / r;
        v[1] = c / r;
        lv += std::log(r);
        z = apply_H(z);
    }
    return lv / n;
}

double period_two_exponent() { return std::log(9 + 4 * std::sqrt(5.0)) / 2; }

// ---------------------------------------------------------------- hit frequency

nlohmann::json HitFrequency::to_json() const
{
    return {{"n", n}, {"samples", samples}, {"mean", mean}, {"stderr", stderr_}, {"area_sigma", area},
            {"monotone", monotone}};
}

HitFrequency sigma_hit_frequency(std::size_t samples, unsigned n, std::uint64_t seed)
{
    if (samples == 0 || n == 0) throw std::invalid_argument("hit frequency needs samples and steps");
    constexpr std::size_t per_block = 64;
    const std::size_t blocks = block_count(samples, per_block);
    std::vector<double> freq(samples, 0);
    std::vector<char> monotone(blocks, 1);
    std::vector<std::size_t> rejected(blocks, 0);
    run_blocks(blocks, [&](std::size_t b) {
        auto rng = block_rng(seed, b);
        for (std::size_t i = b * per_block, end = i + block_size(samples, per_block, b); i < end;) {
            try {
                OrbitWalker w = sample_walker(rng, false, rejected[b]);
                std::size_t hits = 0, last = 0;
                for (unsigned s = 0; s < n; ++s) {
                    if (w.sigma() != 0) ++hits;
                    if (hits < last) monotone[b] = 0;
                    last = hits;
                    w.step();
                }
                freq[i++] = double(hits) / n;
            } catch (const SingularOrbit&) {
                ++rejected[b];
            }
        }
    });
    HitFrequency h;
    h.samples = samples;
    h.n = n;
    h.area = to_d(sigma_geometry().area());
    h.mean = pairwise_sum(freq) / double(samples);
    std::vector<double> sq(samples);
    for (std::size_t i = 0; i < samples; ++i) sq[i] = (freq[i] - h.mean) * (freq[i] - h.mean);
    h.stderr_ = samples > 1 ? std::sqrt(pairwise_sum(sq) / double(samples - 1) / double(samples)) : 0;
    h.monotone = std::all_of(monotone.begin(), monotone.end(), [](char c) { return c != 0; });
    return h;
}

double sigma_hit_frequency_at(const TorusPoint& z0, unsigned n)
{
    if (n == 0) throw std::invalid_argument("hit frequency needs steps");
    TorusPoint z = z0;
    unsigned hits = 0;
    for (unsigned s = 0; s < n; ++s) {
        if (sigma_index(z) != 0) ++hits;
        z = apply_H(z);
    }
    return double(hits) / n;
}

std::pair<double, double> sample_mean(const ObservableSpec& o, std::size_t samples, std::uint64_t seed)
{
    if (samples < 2) throw std::invalid_argument("sample mean needs at least two samples");
    constexpr std::size_t per_block = 4096;
    const std::size_t blocks = block_count(samples, per_block);
    std::vector<double> s1(blocks, 0), s2(blocks, 0);
    run_blocks(blocks, [&](std::size_t b) {
        auto rng = block_rng(seed, b);
        std::size_t rejected = 0;
        for (std::size_t i = 0, m = block_size(samples, per_block, b); i < m; ++i) {
            OrbitWalker w = sample_walker(rng, false, rejected);
            double v = o.eval(w.point(), w.sigma());
            s1[b] += v;
            s2[b] += v * v;
        }
    });
    double mean = pairwise_sum(s1) / double(samples);
    double var = std::max(0.0, pairwise_sum(s2) / double(samples) - mean * mean);
    return {mean, std::sqrt(var / double(samples - 1))};
}

// ---------------------------------------------------------------- correlations

nlohmann::json CorrelationSeries::to_json() const
{
    nlohmann::json j = {{"map", map == MapKind::H ? "H" : "H_sigma"},
                        {"phi", phi},
                        {"psi", psi},
                        {"samples", samples},
                        {"estimator", estimator},
                        {"n", n},
                        {"c", c},
                        {"stderr", se},
                        {"insufficient_signal", insufficient_signal}};
    j["fit"] = insufficient_signal ? nlohmann::json(nullptr) : fit.to_json();
    j["fit_kind"] = map == MapKind::H ? "log|C_n| against log n" : "log|C_n| against n";
    return j;
}

std::string CorrelationSeries::csv() const
{
    std::ostringstream s;
    s.precision(17);
    s << "n,C_n,stderr\n";
    for (std::size_t i = 0; i < n.size(); ++i) s << n[i] << ',' << c[i] << ',' << se[i] << '\n';
    return s.str();
}

CorrelationSeries correlations(MapKind map, const ObservableSpec& phi, const ObservableSpec& psi, unsigned n_max,
                               std::size_t samples, std::uint64_t seed, unsigned fit_lo, unsigned fit_hi)
{
    if (samples < 2) throw std::invalid_argument("correlations need at least two samples");
    const bool induced = map == MapKind::HSigma;
    const double m_phi = induced ? sigma_mean(phi) : torus_mean(phi);
    const double m_psi = induced ? sigma_mean(psi) : torus_mean(psi);
    constexpr std::size_t per_block = 1 << 14;
    const std::size_t blocks = block_count(samples, per_block);
    const std::size_t len = std::size_t(n_max) + 1;
    std::vector<std::vector<double>> s1(blocks, std::vector<double>(len, 0)), s2 = s1;

    run_blocks(blocks, [&](std::size_t b) {
        auto rng = block_rng(seed, b);
        std::size_t rejected = 0;
        std::vector<double> prod(len);
        for (std::size_t i = 0, m = block_size(samples, per_block, b); i < m;) {
            try {
                OrbitWalker w = sample_walker(rng, induced, rejected);
                const double a = phi.eval(w.point(), w.sigma()) - m_phi;
                for (std::size_t t = 0; t < len; ++t) {
                    if (t > 0) induced ? void(w.step_sigma()) : void(w.step());
                    prod[t] = a * (psi.eval(w.point(), w.sigma()) - m_psi);
                }
                for (std::size_t t = 0; t < len; ++t) {
                    s1[b][t] += prod[t];
                    s2[b][t] += prod[t] * prod[t];
                }
                ++i;
            } catch (const SingularOrbit&) {
                ++rejected;
            }
        }
    });

    CorrelationSeries cs;
    cs.map = map;
    cs.phi = phi.name();
    cs.psi = psi.name();
    cs.samples = samples;
    std::vector<double> col(blocks);
    std::vector<double> fx, fy;
    for (std::size_t t = 0; t < len; ++t) {
        for (std::size_t b = 0; b < blocks; ++b) col[b] = s1[b][t];
        double mean = pairwise_sum(col) / double(samples);
        for (std::size_t b = 0; b < blocks; ++b) col[b] = s2[b][t];
        double var = std::max(0.0, pairwise_sum(col) / double(samples) - mean * mean);
        double se = std::sqrt(var / double(samples - 1));
        cs.n.push_back(unsigned(t));
        cs.c.push_back(mean);
        cs.se.push_back(se);
        if (t >= fit_lo && t <= fit_hi && t > 0 && std::abs(mean) > 3 * se) {
            fx.push_back(induced ? double(t) : std::log(double(t)));
            fy.push_back(std::log(std::abs(mean)));
        }
    }
    if (fx.size() < 3) {
        cs.insufficient_signal = true;
    } else {
        cs.fit = fit_line(fx, fy);
    }
    cs.fit.lo = fit_lo;
    cs.fit.hi = fit_hi;
    return cs;
}

// ---------------------------------------------------------------- return-time tails

nlohmann::json TailTable::to_json() const
{
    nlohmann::json rs = nlohmann::json::array();
    for (const auto& r : rows) {
        nlohmann::json j = {{"n", r.n}, {"exact", to_string(r.exact)}, {"exact_value", to_d(r.exact)}};
        if (r.mc >= 0) {
            j["mc"] = r.mc;
            j["stderr"] = r.se;
        }
        rs.push_back(j);
    }
    return {{"rows", rs}, {"mc_samples", mc_samples}, {"fit", fit.to_json()}, {"exponent", exponent}};
}

std::string TailTable::csv() const
{
    std::ostringstream s;
    s.precision(17);
    s << "n,tail_exact_p,tail_exact_q,tail_mc,stderr\n";
    for (const auto& r : rows) {
        s << r.n << ',' << r.exact.get_num().get_str() << ',' << r.exact.get_den().get_str() << ',';
        if (r.mc >= 0) s << r.mc << ',' << r.se;
        else s << ',';
        s << '\n';
    }
    return s.str();
}

TailTable return_tail(unsigned n_max, std::size_t mc_samples, unsigned mc_n_max, std::uint64_t seed,
                      unsigned fit_lo, unsigned fit_hi)
{
    if (fit_hi > n_max || fit_lo < 1 || fit_lo + 2 > fit_hi) throw std::invalid_argument("bad tail fit window");
    if (mc_n_max > n_max) throw std::invalid_argument("Monte-Carlo range exceeds the exact range");
    auto cells = mcells(n_max);
    TailTable t;
    t.mc_samples = mc_samples;
    Rat tail = sigma_geometry().area();
    for (unsigned n = 0; n <= n_max; ++n) {
        TailRow r;
        r.n = n;
        r.exact = tail;
        t.rows.push_back(r);
        if (n < cells.size()) tail -= cells[n].area;
    }

    if (mc_samples > 0) {
        constexpr std::size_t per_block = 1 << 14;
        const std::size_t blocks = block_count(mc_samples, per_block);
        const std::size_t len = std::size_t(mc_n_max) + 1;
        std::vector<std::vector<double>> counts(blocks, std::vector<double>(len, 0));
        run_blocks(blocks, [&](std::size_t b) {
            auto rng = block_rng(seed, b);
            std::size_t rejected = 0;
            for (std::size_t i = 0, m = block_size(mc_samples, per_block, b); i < m;) {
                try {
                    OrbitWalker w = sample_walker(rng, false, rejected);
                    ++i;
                    if (w.sigma() == 0) continue;
                    // R > n for n < R
                    unsigned r = 0;
                    do {
                        w.step();
                        ++r;
                    } while (w.sigma() == 0 && r <= mc_n_max);
                    for (unsigned n = 0; n < std::min<unsigned>(r, len); ++n) counts[b][n] += 1;
                } catch (const SingularOrbit&) {
                    ++rejected;
                }
            }
        });
        std::vector<double> col(blocks);
        for (std::size_t n = 0; n < len; ++n) {
            for (std::size_t b = 0; b < blocks; ++b) col[b] = counts[b][n];
            double p = pairwise_sum(col) / double(mc_samples);
            t.rows[n].mc = p;
            t.rows[n].se = std::sqrt(p * (1 - p) / double(mc_samples));
        }
    }

    std::vector<double> fx, fy;
    for (unsigned n = fit_lo; n <= fit_hi; ++n) {
        fx.push_back(std::log(double(n)));
        fy.push_back(std::log(to_d(t.rows[n].exact)));
    }
    t.fit = fit_line(fx, fy);
    t.fit.lo = fit_lo;
    t.fit.hi = fit_hi;
    t.exponent = -t.fit.slope;
    return t;
}

void set_statistics_threads(unsigned n) { g_threads = n; }

unsigned statistics_threads()
{
    if (g_threads != 0) return g_threads;
    return std::max(1u, std::thread::hardware_concurrency());
}

}  // namespace otm
