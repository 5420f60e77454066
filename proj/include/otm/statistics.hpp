#pragma once

#include "otm/torus_map.hpp"

#include "json.hpp"

#include <cstdint>
#include <utility>
#include <random>
#include <string>
#include <vector>

namespace otm {

// Orbit points p/q on the lattice with odd q = 2^61 - 1. H keeps the lattice, and no lattice
// point lies on x = 1/2 or y = 1/2, so only the lines x = 0, y = 0 can be hit.
constexpr std::uint64_t kLatticeQ = (std::uint64_t(1) << 61) - 1;

struct LatticePoint {
    std::uint64_t x = 0, y = 0;
    TorusPoint exact() const;
    double xd() const { return double(x) / double(kLatticeQ); }
    double yd() const { return double(y) / double(kLatticeQ); }
};

class SingularOrbit : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Class j of A_j containing z; throws SingularOrbit on the singularity set.
int lattice_a_class(const LatticePoint& z);
// z <- H(z); returns the A class of the old point.
int lattice_step(LatticePoint& z);
LatticePoint lattice_inverse(const LatticePoint& z);
LatticePoint sample_lattice_point(std::mt19937_64& rng);

// Forward orbit that keeps the A classes of H^-1 z and H^-2 z, which decide sigma membership.
class OrbitWalker {
public:
    explicit OrbitWalker(const LatticePoint& z);
    const LatticePoint& point() const { return z_; }
    int sigma() const;  // 0 outside sigma, else j of sigma_j
    int step();         // applies H, returns the A class used
    // Applies H until the orbit is back in sigma; returns the number of steps. Throws
    // SingularOrbit after cap steps.
    unsigned step_sigma(unsigned cap = 1u << 24);

private:
    LatticePoint z_;
    int prev1_ = 0, prev2_ = 0;  // A classes of H^-1 z and H^-2 z
};

// ---------------------------------------------------------------- observables

struct ObservableSpec {
    enum class Kind { Trig, Indicator } kind = Kind::Trig;
    // cos(2 pi (k x + l y)) or sin(...)
    int k = 1, l = 0;
    bool sine = false;
    // indicator of sigma_j, or of sigma when region = 0
    int region = 0;

    static ObservableSpec cos_x() { return {}; }
    static ObservableSpec sigma_indicator(int j = 0);
    double eval(const LatticePoint& z, int sigma) const;
    std::string name() const;
};

// Mean over the torus, and over sigma with normalised Lebesgue measure.
double torus_mean(const ObservableSpec& o);
double sigma_mean(const ObservableSpec& o);

// ---------------------------------------------------------------- results

struct LinearFit {
    double slope = 0, intercept = 0, r2 = 0;
    double slope_se = 0;  // 95% interval is slope +- 1.96 slope_se
    long lo = 0, hi = 0;  // window used
    std::size_t points = 0;
    nlohmann::json to_json() const;
};
// Least squares y = intercept + slope x.
LinearFit fit_line(const std::vector<double>& x, const std::vector<double>& y);

struct LyapunovEstimate {
    std::vector<double> exponents;      // one per sample, started from v = (0, 1)
    std::vector<double> hit_frequency;  // fraction of the orbit in sigma
    double mean = 0, min = 0, max = 0;
    double max_start_difference = 0;  // against a second start vector (13, 21)
    std::size_t resampled = 0;        // singular orbits replaced
    std::size_t below_block_bound = 0;  // samples under alpha_z log(K) / 8
    std::size_t blocks = 0;             // independently seeded sample blocks
    unsigned n = 0;
    nlohmann::json to_json() const;
};

LyapunovEstimate lyapunov(std::size_t samples, unsigned n, std::uint64_t seed);
// Exact rational orbit from z, for special points such as the period-2 orbit.
double lyapunov_at(const TorusPoint& z, unsigned n);
double period_two_exponent();  // ln(9 + 4 sqrt 5) / 2

struct HitFrequency {
    double mean = 0, stderr_ = 0, area = 0;
    bool monotone = true;  // r(z; n, sigma) nondecreasing in n
    std::size_t samples = 0;
    unsigned n = 0;
    nlohmann::json to_json() const;
};
HitFrequency sigma_hit_frequency(std::size_t samples, unsigned n, std::uint64_t seed);
// r(z; n, sigma) / n along the exact rational orbit of z.
double sigma_hit_frequency_at(const TorusPoint& z, unsigned n);
// Ensemble mean of an observable over the torus, with its standard error.
std::pair<double, double> sample_mean(const ObservableSpec& o, std::size_t samples, std::uint64_t seed);

enum class MapKind { H, HSigma };

struct CorrelationSeries {
    MapKind map = MapKind::H;
    std::string phi, psi;
    std::vector<unsigned> n;
    std::vector<double> c, se;
    std::size_t samples = 0;
    std::string estimator = "ensemble";
    LinearFit fit;             // H_sigma: log|C_n| against n; H: log|C_n| against log n
    bool insufficient_signal = false;
    nlohmann::json to_json() const;
    std::string csv() const;
};

// C_n for n = 0..n_max; the fit uses n in [fit_lo, fit_hi] where |C_n| > 3 stderr.
CorrelationSeries correlations(MapKind map, const ObservableSpec& phi, const ObservableSpec& psi, unsigned n_max,
                               std::size_t samples, std::uint64_t seed, unsigned fit_lo, unsigned fit_hi);

struct TailRow {
    unsigned n = 0;
    Rat exact;                 // mu(sigma and R > n)
    double mc = -1, se = 0;    // Monte-Carlo estimate when n <= mc_n_max
};

struct TailTable {
    std::vector<TailRow> rows;
    std::size_t mc_samples = 0;
    LinearFit fit;    // log tail against log n over the fit window
    double exponent = 0;  // -slope
    nlohmann::json to_json() const;
    std::string csv() const;
};

TailTable return_tail(unsigned n_max, std::size_t mc_samples, unsigned mc_n_max, std::uint64_t seed,
                      unsigned fit_lo = 15, unsigned fit_hi = 40);

// Worker count for the sampling loops; results do not depend on it.
void set_statistics_threads(unsigned n);
unsigned statistics_threads();

}  // namespace otm
